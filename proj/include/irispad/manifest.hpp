#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "irispad/presentation_class.hpp"

namespace irispad {

struct SampleRecord {
  std::string sample_id;
  std::filesystem::path image_ref;
  PresentationClass cls = PresentationClass::Live;
  std::string source_tag;

  bool operator==(const SampleRecord&) const = default;
};

struct Manifest {
  std::vector<SampleRecord> samples;
  std::uint64_t seed = 0;

  std::size_t count(PresentationClass c) const;
  const SampleRecord* find(std::string_view sample_id) const;

  bool operator==(const Manifest&) const = default;
};

enum class Expertise { Expert, NonExpert };
enum class Declared { Normal, Abnormal };

struct ExaminerAnnotation {
  std::string examiner_id;
  Expertise expertise = Expertise::NonExpert;
  Declared declared = Declared::Normal;
  bool correct = false;
  std::string transcript;

  bool operator==(const ExaminerAnnotation&) const = default;
};

using AnnotationMap = std::map<std::string, std::vector<ExaminerAnnotation>>;

/// A declaration is correct when "normal" meets a live sample or
/// "abnormal" meets any attack class.
bool declaration_is_correct(Declared declared, PresentationClass truth);

/// Reads `sample_id,class,image_path,source`. Relative image paths are
/// resolved against the manifest's directory. Image existence is not checked
/// here.
Manifest load_manifest(const std::filesystem::path& path);

Manifest parse_manifest(std::string_view content,
                        const std::filesystem::path& base_dir = {});

std::string format_manifest(const Manifest& manifest);

/// Per-class capped draw: seeded partial Fisher-Yates over each class sorted
/// by sample_id. Classes at or under the cap are kept whole. Output is in
/// canonical class order, then sample_id.
Manifest sample_per_class(const Manifest& manifest, std::size_t cap,
                          std::uint64_t seed);

/// Reads `sample_id | examiner_id | expertise | declared | correct |
/// transcript` and checks every stored `correct` flag against the manifest's
/// ground truth.
AnnotationMap load_annotations(const std::filesystem::path& path,
                               const Manifest& manifest);

AnnotationMap parse_annotations(std::string_view content,
                                const Manifest& manifest);

std::string_view to_string(Expertise e);
std::string_view to_string(Declared d);

}  // namespace irispad
