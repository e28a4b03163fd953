#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>

#include "irispad/client.hpp"
#include "irispad/manifest.hpp"
#include "irispad/prompt.hpp"

namespace irispad {

enum class MeshClassification { Normal, Attack };

inline constexpr std::array<std::string_view, 7> kMeshSections = {
    "Image Classification", "Confidence",
    "Key Features Observed", "Spoofing Indicators",
    "Examiner Integration", "Technical Details",
    "Comprehensive Iris Description",
};

inline constexpr std::string_view kComprehensiveSection =
    "Comprehensive Iris Description";

struct MeshDescription {
  MeshClassification classification = MeshClassification::Normal;
  double confidence = 0.0;
  /// Keyed by the canonical section name.
  std::map<std::string, std::string, std::less<>> sections;

  const std::string& section(std::string_view name) const;

  bool operator==(const MeshDescription&) const = default;
};

/// One line per annotation, experts first, each group ordered by
/// examiner_id. Throws Error(EmptyFeedback) for an empty list.
std::string format_examiner_feedback(std::span<const ExaminerAnnotation> annotations);

/// Request asking the model to analyze the image, weigh the feedback and
/// answer in the seven-section format.
AssembledPrompt build_mesh_request(const std::filesystem::path& image_ref,
                                   std::string_view feedback,
                                   std::string sample_id = {});

/// Locates all seven headers (case-insensitive, colon-terminated, markdown
/// emphasis tolerated) and extracts classification and confidence.
MeshDescription parse_mesh_response(std::string_view raw);

/// Headers in canonical order, one "Name: text" block per section.
std::string serialize_mesh(const MeshDescription& description);

struct MeshResult {
  MeshDescription description;
  int attempts = 0;
  std::string raw_text;
};

/// Queries until a response parses. Transport failures count as attempts.
/// Throws Error(AttemptsExhausted) with the last parse error as detail.
MeshResult generate_mesh(ModelClient& client,
                         const std::filesystem::path& image_ref,
                         std::span<const ExaminerAnnotation> annotations,
                         int max_attempts, std::string sample_id = {},
                         TranscriptLog* log = nullptr);

/// Single-line salience text for a description: the comprehensive section,
/// or the whole document when `full_document` is set.
std::string mesh_salience_text(const MeshDescription& description,
                               bool full_document);

}  // namespace irispad
