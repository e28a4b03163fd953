#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irispad/manifest.hpp"
#include "irispad/presentation_class.hpp"

namespace irispad {

enum class PromptBase { Short, Long };

enum class SalienceKind { None, Human, LlamaMesh, GeminiMesh };

inline constexpr std::array<SalienceKind, 4> kAllSalienceKinds = {
    SalienceKind::None, SalienceKind::Human, SalienceKind::LlamaMesh,
    SalienceKind::GeminiMesh};

/// One prompt configuration: a base prompt plus an optional salience source.
struct Variant {
  PromptBase base = PromptBase::Short;
  SalienceKind salience = SalienceKind::None;

  /// "<base>+<salience>", e.g. "long+gemini_mesh".
  std::string label() const;

  /// Position in enumerate_variants(); used to order stores and reports.
  std::size_t index() const;

  bool operator==(const Variant&) const = default;
};

std::string_view to_string(PromptBase b);
std::string_view to_string(SalienceKind k);
std::optional<SalienceKind> parse_salience_kind(std::string_view token);

/// Parses a variant label; throws Error(InvalidArgument) for anything that is
/// not one of the eight configurations.
Variant parse_variant(std::string_view label);

/// Short x {none, human, llama_mesh, gemini_mesh}, then long x the same.
std::vector<Variant> enumerate_variants();

struct SalienceEntry {
  std::string entry_id;
  std::string text;

  bool operator==(const SalienceEntry&) const = default;
};

struct SalienceCorpus {
  std::map<PresentationClass, std::vector<SalienceEntry>> entries;
  /// Index into `entries[c]` used for injection; absent means 0.
  std::map<PresentationClass, std::size_t> selector;

  /// Throws Error(MissingSalience) when the class has no entry at the
  /// selected index.
  const SalienceEntry& selected(PresentationClass c) const;
};

/// `class | entry_id | text` records, one per line.
SalienceCorpus load_salience_corpus(const std::filesystem::path& path);
SalienceCorpus parse_salience_corpus(std::string_view content);
std::string format_salience_corpus(const SalienceCorpus& corpus);

struct AssembledPrompt {
  std::optional<Variant> variant;  // empty for MESH requests
  std::string sample_id;
  std::string text;
  std::filesystem::path image_ref;
  std::size_t token_estimate = 0;
};

inline constexpr std::string_view kFloatInstruction = "float number from 0 to 1";

std::string render_short();
std::string render_long();
std::string render_base(PromptBase base);

/// Appends one `[Exemplar: <class>] <text>` block per requested class in
/// canonical order, after one blank line. `base_text` is kept verbatim as
/// the prefix.
std::string inject_salience(std::string_view base_text,
                            const SalienceCorpus& corpus, SalienceKind kind,
                            std::span<const PresentationClass> classes);

/// ceil(chars / 4). Characters are counted as bytes.
std::size_t estimate_tokens(std::string_view text);

struct BudgetResult {
  bool ok = true;
  std::size_t excess = 0;
};

BudgetResult budget_check(const AssembledPrompt& prompt,
                          std::size_t context_limit,
                          std::size_t image_allowance);

/// Corpora keyed by salience kind; kinds not used by a variant may be absent.
using SalienceLibrary = std::map<SalienceKind, SalienceCorpus>;

/// Full prompt text for one variant.
std::string render_variant(const Variant& variant,
                           const SalienceLibrary& library,
                           std::span<const PresentationClass> classes);

AssembledPrompt assemble_prompt(const Variant& variant,
                                const SampleRecord& sample,
                                const SalienceLibrary& library,
                                std::span<const PresentationClass> classes);

/// Mean token estimate of the selected entries, per kind. Reporting only.
double mean_selected_tokens(const SalienceCorpus& corpus,
                            std::span<const PresentationClass> classes);

}  // namespace irispad
