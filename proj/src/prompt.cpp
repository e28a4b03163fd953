#include "irispad/prompt.hpp"

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

constexpr std::string_view kShortPrompt =
    "Is this a real and healthy iris or synthetic/unhealthy iris? Return a "
    "single float number from 0 to 1 with 0 being real/healthy and 1 being "
    "synthetic/unhealthy and no other output.";

constexpr std::string_view kLongPrompt = R"(Role and Task:
You are an expert biometrics examiner specializing in iris presentation attack detection (PAD). You are given one iris image. Decide whether it shows a bona fide presentation of a real and healthy iris, or an attack presentation or unhealthy iris. Attack and unhealthy presentations include artificial eyes such as glass prostheses, iris printouts, eyes wearing textured contact lenses, printouts of irises wearing textured contact lenses, diseased eyes, post-mortem eyes, and synthetically generated iris images. Diseased and post-mortem eyes are real eyes, but for this task they count as unhealthy and must not be labeled normal.

Analysis Framework and Classification Context:
Assess the image including, but not limited to, the following indicators:
- Texture: natural radial iris structure versus printed dot patterns, repeated or painted textures, and lens texture overlaying the iris.
- Reflections: specular highlights and their shape, count, and placement relative to the cornea.
- Artifacts: paper edges, print banding, lens boundaries, generation artifacts, and pupil irregularities.
- Lighting: uniformity and direction of near-infrared illumination, unnatural flatness or glare.
- Other anomalous indicators: clouding, lesions, deformation, tissue changes after death, or anything else inconsistent with a live, healthy eye.

Required Output Format and Instructions:
Respond with exactly three lines in this order:
Confidence: a single float number from 0 to 1 with 0 being real/healthy and 1 being synthetic/unhealthy.
Classification: normal or attack.
Explanation: a short explanation of the decision in at most two sentences.
Do not write any other numbers before the confidence value.)";

constexpr std::string_view kSalienceSeparator = "\n\n";

}  // namespace

std::string_view to_string(PromptBase b) {
  return b == PromptBase::Short ? "short" : "long";
}

std::string_view to_string(SalienceKind k) {
  switch (k) {
    case SalienceKind::None: return "none";
    case SalienceKind::Human: return "human";
    case SalienceKind::LlamaMesh: return "llama_mesh";
    case SalienceKind::GeminiMesh: return "gemini_mesh";
  }
  return "?";
}

std::optional<SalienceKind> parse_salience_kind(std::string_view token) {
  for (auto k : kAllSalienceKinds) {
    if (to_string(k) == token) return k;
  }
  return std::nullopt;
}

std::string Variant::label() const {
  std::string out(to_string(base));
  out += '+';
  out += to_string(salience);
  return out;
}

std::size_t Variant::index() const {
  return (base == PromptBase::Short ? 0 : 4) +
         static_cast<std::size_t>(salience);
}

Variant parse_variant(std::string_view label) {
  auto parts = text::split(text::trim(label), '+');
  if (parts.size() == 2) {
    std::optional<PromptBase> base;
    if (parts[0] == "short") base = PromptBase::Short;
    if (parts[0] == "long") base = PromptBase::Long;
    auto kind = parse_salience_kind(parts[1]);
    if (base && kind) return Variant{*base, *kind};
  }
  throw Error(ErrorCode::InvalidArgument, std::string(label),
              "not a prompt variant (expected e.g. short+none, long+human)");
}

std::vector<Variant> enumerate_variants() {
  std::vector<Variant> out;
  for (auto base : {PromptBase::Short, PromptBase::Long}) {
    for (auto kind : kAllSalienceKinds) out.push_back(Variant{base, kind});
  }
  return out;
}

const SalienceEntry& SalienceCorpus::selected(PresentationClass c) const {
  auto it = entries.find(c);
  if (it == entries.end() || it->second.empty()) {
    throw Error(ErrorCode::MissingSalience, std::string(to_string(c)));
  }
  std::size_t index = 0;
  if (auto sel = selector.find(c); sel != selector.end()) index = sel->second;
  if (index >= it->second.size()) {
    throw Error(ErrorCode::MissingSalience, std::string(to_string(c)),
                "selector index " + std::to_string(index) + " out of range");
  }
  return it->second[index];
}

SalienceCorpus parse_salience_corpus(std::string_view content) {
  SalienceCorpus corpus;
  std::size_t line_no = 0;
  while (!content.empty()) {
    ++line_no;
    auto pos = content.find('\n');
    auto line = content.substr(0, pos);
    content.remove_prefix(pos == std::string_view::npos ? content.size()
                                                        : pos + 1);
    if (text::is_skippable(line)) continue;
    auto fields = text::split(line, '|', 3);
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedRow, std::to_string(line_no),
                  "expected 'class | entry_id | text'");
    }
    auto cls = require_class(text::trim(fields[0]));
    SalienceEntry entry{std::string(text::trim(fields[1])),
                        std::string(text::trim(fields[2]))};
    if (entry.text.empty()) {
      throw Error(ErrorCode::MalformedRow, std::to_string(line_no),
                  "empty salience text");
    }
    corpus.entries[cls].push_back(std::move(entry));
  }
  return corpus;
}

SalienceCorpus load_salience_corpus(const std::filesystem::path& path) {
  return parse_salience_corpus(text::read_file(path));
}

std::string format_salience_corpus(const SalienceCorpus& corpus) {
  std::string out;
  for (const auto& [cls, list] : corpus.entries) {
    for (const auto& e : list) {
      out += to_string(cls);
      out += " | ";
      out += e.entry_id;
      out += " | ";
      out += e.text;
      out += '\n';
    }
  }
  return out;
}

std::string render_short() { return std::string(kShortPrompt); }

std::string render_long() { return std::string(kLongPrompt); }

std::string render_base(PromptBase base) {
  return base == PromptBase::Short ? render_short() : render_long();
}

std::string inject_salience(std::string_view base_text,
                            const SalienceCorpus& corpus, SalienceKind kind,
                            std::span<const PresentationClass> classes) {
  if (kind == SalienceKind::None) {
    throw Error(ErrorCode::InvalidArgument, "kind",
                "salience injection requires a salience kind");
  }
  bool wanted[kClassCount] = {};
  for (auto c : classes) wanted[class_index(c)] = true;

  std::string out(base_text);
  out += kSalienceSeparator;
  bool first = true;
  for (auto c : kAllClasses) {
    if (!wanted[class_index(c)]) continue;
    const auto& entry = corpus.selected(c);
    if (!first) out += '\n';
    first = false;
    out += "[Exemplar: ";
    out += to_string(c);
    out += "] ";
    out += entry.text;
  }
  return out;
}

std::size_t estimate_tokens(std::string_view text) {
  return (text.size() + 3) / 4;
}

BudgetResult budget_check(const AssembledPrompt& prompt,
                          std::size_t context_limit,
                          std::size_t image_allowance) {
  const auto needed = prompt.token_estimate + image_allowance;
  if (needed <= context_limit) return {};
  return {false, needed - context_limit};
}

std::string render_variant(const Variant& variant,
                           const SalienceLibrary& library,
                           std::span<const PresentationClass> classes) {
  auto base = render_base(variant.base);
  if (variant.salience == SalienceKind::None) return base;
  auto it = library.find(variant.salience);
  if (it == library.end()) {
    throw Error(ErrorCode::MissingSalience,
                std::string(to_string(variant.salience)),
                "no corpus loaded for this salience kind");
  }
  return inject_salience(base, it->second, variant.salience, classes);
}

AssembledPrompt assemble_prompt(const Variant& variant,
                                const SampleRecord& sample,
                                const SalienceLibrary& library,
                                std::span<const PresentationClass> classes) {
  AssembledPrompt p;
  p.variant = variant;
  p.sample_id = sample.sample_id;
  p.image_ref = sample.image_ref;
  p.text = render_variant(variant, library, classes);
  p.token_estimate = estimate_tokens(p.text);
  return p;
}

double mean_selected_tokens(const SalienceCorpus& corpus,
                            std::span<const PresentationClass> classes) {
  if (classes.empty()) return 0.0;
  double total = 0.0;
  for (auto c : classes) {
    total += static_cast<double>(estimate_tokens(corpus.selected(c).text));
  }
  return total / static_cast<double>(classes.size());
}

}  // namespace irispad
