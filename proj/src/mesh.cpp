#include "irispad/mesh.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

constexpr std::string_view kMeshPromptHead =
    "You are assisting with iris presentation attack detection. One iris "
    "image is attached.\n"
    "\n"
    "Analysis Framework:\n"
    "First form your own assessment of the image. Examine, among other "
    "things, texture, reflections, artifacts, lighting, and any other "
    "indicators of a spoofed or unhealthy eye.\n"
    "\n"
    "Examiner Feedback Evaluation:\n"
    "Human examiners have already judged this image. Each feedback line "
    "reads: examiner_ID, expertise status, correct or incorrect "
    "classification, verbal description.\n"
    "<examiner_feedback>\n";

constexpr std::string_view kMeshPromptTail =
    "</examiner_feedback>\n"
    "\n"
    "Critical Synthesis:\n"
    "Check every examiner observation against what you see in the image. "
    "Give expert observations more weight, but keep useful intuitions from "
    "non-experts. Trust examiners whose classification was correct more than "
    "those whose classification was incorrect. Do not agree with an "
    "observation you cannot verify in the image; when observations conflict, "
    "prefer the one you can confirm. Diseased and post-mortem eyes are "
    "attacks for this task even though they are real eyes.\n"
    "\n"
    "Required Output Format:\n"
    "Answer with exactly these seven sections, in this order, each starting "
    "on a new line with the section name followed by a colon:\n"
    "Image Classification: normal or attack\n"
    "Confidence: a float number from 0 to 1 with 0 being real/healthy and 1 "
    "being synthetic/unhealthy\n"
    "Key Features Observed: the features that drive your decision\n"
    "Spoofing Indicators: the attack evidence present, or none\n"
    "Examiner Integration: how the examiner feedback changed or confirmed "
    "your analysis\n"
    "Technical Details: acquisition and image-quality observations\n"
    "Comprehensive Iris Description: one self-contained paragraph describing "
    "the whole image so that a reader who cannot see it understands what it "
    "shows and why it is normal or an attack";

struct HeaderMatch {
  std::size_t section = 0;
  std::string rest;
};

bool is_decoration(char c) {
  return c == '*' || c == '_' || c == '#' || c == '`' || c == ' ' ||
         c == '\t' || c == '-' || c == '>';
}

/// Recognizes "Name:" at line start, ignoring markdown decoration around
/// the name and the colon.
std::optional<HeaderMatch> match_header(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && is_decoration(line[i])) ++i;
  for (std::size_t s = 0; s < kMeshSections.size(); ++s) {
    const auto name = kMeshSections[s];
    if (line.size() - i < name.size()) continue;
    if (!text::iequals(line.substr(i, name.size()), name)) continue;
    std::size_t j = i + name.size();
    while (j < line.size() && (line[j] == '*' || line[j] == '_' || line[j] == ' ')) ++j;
    if (j >= line.size() || line[j] != ':') continue;
    ++j;
    while (j < line.size() && (line[j] == '*' || line[j] == '_')) ++j;
    return HeaderMatch{s, std::string(text::trim(line.substr(j)))};
  }
  return std::nullopt;
}

MeshClassification parse_classification(std::string_view text_value) {
  const auto lower = text::to_lower(text_value);
  auto has_word = [&](std::string_view word) {
    std::size_t pos = 0;
    while ((pos = lower.find(word, pos)) != std::string::npos) {
      const bool left = pos == 0 || !std::isalpha(static_cast<unsigned char>(lower[pos - 1]));
      const auto end = pos + word.size();
      const bool right = end >= lower.size() || !std::isalpha(static_cast<unsigned char>(lower[end]));
      if (left && right) return pos;
      pos = end;
    }
    return std::string::npos;
  };
  const auto attack = std::min({has_word("attack"), has_word("abnormal"),
                                has_word("spoof"), has_word("unhealthy")});
  const auto normal = std::min({has_word("normal"), has_word("bona fide"),
                                has_word("live"), has_word("genuine")});
  if (attack == std::string::npos && normal == std::string::npos) {
    throw Error(ErrorCode::BadClassification, std::string(text_value));
  }
  return attack < normal ? MeshClassification::Attack : MeshClassification::Normal;
}

std::string single_line(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == '\n' || c == '\r' || c == '\t' || c == ' ') {
      space = true;
      continue;
    }
    if (c == '|') c = '/';
    if (space && !out.empty()) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace

const std::string& MeshDescription::section(std::string_view name) const {
  auto it = sections.find(name);
  if (it == sections.end()) {
    throw Error(ErrorCode::MissingSection, std::string(name));
  }
  return it->second;
}

std::string format_examiner_feedback(
    std::span<const ExaminerAnnotation> annotations) {
  if (annotations.empty()) throw Error(ErrorCode::EmptyFeedback, "annotations");
  std::vector<const ExaminerAnnotation*> ordered;
  for (const auto& a : annotations) ordered.push_back(&a);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ExaminerAnnotation* a, const ExaminerAnnotation* b) {
                     if (a->expertise != b->expertise) {
                       return a->expertise == Expertise::Expert;
                     }
                     return a->examiner_id < b->examiner_id;
                   });
  std::string out;
  for (const auto* a : ordered) {
    if (!out.empty()) out += '\n';
    out += a->examiner_id;
    out += a->expertise == Expertise::Expert ? ", expert, " : ", non-expert, ";
    out += a->correct ? "correct, " : "incorrect, ";
    out += a->transcript;
  }
  return out;
}

AssembledPrompt build_mesh_request(const std::filesystem::path& image_ref,
                                   std::string_view feedback,
                                   std::string sample_id) {
  if (text::trim(feedback).empty()) {
    throw Error(ErrorCode::EmptyFeedback, "feedback");
  }
  AssembledPrompt p;
  p.sample_id = std::move(sample_id);
  p.image_ref = image_ref;
  p.text.reserve(kMeshPromptHead.size() + feedback.size() + kMeshPromptTail.size() + 1);
  p.text += kMeshPromptHead;
  p.text += feedback;
  p.text += '\n';
  p.text += kMeshPromptTail;
  p.token_estimate = estimate_tokens(p.text);
  return p;
}

MeshDescription parse_mesh_response(std::string_view raw) {
  std::array<std::optional<std::string>, kMeshSections.size()> found;
  std::optional<std::size_t> current;
  std::string_view rest = raw;
  auto flush_line = [&](std::string_view line) {
    if (auto header = match_header(line)) {
      current = header->section;
      // a repeated header restarts the section; the last occurrence wins
      found[*current] = header->rest;
      return;
    }
    if (!current) return;
    auto& body = *found[*current];
    if (!body.empty()) body += '\n';
    body += line;
  };
  while (!rest.empty()) {
    auto pos = rest.find('\n');
    auto line = rest.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    flush_line(line);
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }

  MeshDescription out;
  for (std::size_t s = 0; s < kMeshSections.size(); ++s) {
    const std::string name(kMeshSections[s]);
    if (!found[s]) throw Error(ErrorCode::MissingSection, name);
    auto value = std::string(text::trim(*found[s]));
    if (value.empty()) throw Error(ErrorCode::MissingSection, name, "empty section");
    out.sections.emplace(name, std::move(value));
  }

  const auto& confidence_text = out.sections.at("Confidence");
  auto tokens = numeric_tokens(confidence_text);
  if (tokens.empty()) throw Error(ErrorCode::BadConfidence, confidence_text);
  const auto& [token, value] = tokens.front();
  if (std::signbit(value) || value < 0.0 || value > 1.0) {
    throw Error(ErrorCode::BadConfidence, token);
  }
  out.confidence = value;
  out.classification = parse_classification(out.sections.at("Image Classification"));
  return out;
}

std::string serialize_mesh(const MeshDescription& description) {
  std::string out;
  for (auto name : kMeshSections) {
    if (!out.empty()) out += '\n';
    out += name;
    out += ": ";
    out += description.section(name);
  }
  return out;
}

MeshResult generate_mesh(ModelClient& client,
                         const std::filesystem::path& image_ref,
                         std::span<const ExaminerAnnotation> annotations,
                         int max_attempts, std::string sample_id,
                         TranscriptLog* log) {
  if (max_attempts < 1) {
    throw Error(ErrorCode::InvalidArgument, "max_attempts", "must be >= 1");
  }
  const auto prompt =
      build_mesh_request(image_ref, format_examiner_feedback(annotations),
                         std::move(sample_id));
  const ModelRequest request{prompt.sample_id, "mesh", prompt.text,
                             prompt.image_ref};
  std::string last_error;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    std::string raw;
    try {
      raw = client.complete(request);
    } catch (const Error& e) {
      if (log != nullptr) log->record(request, attempt, "error", e.what());
      if (e.code() != ErrorCode::TransportError) throw;
      last_error = e.what();
      continue;
    }
    if (log != nullptr) log->record(request, attempt, "reply", raw);
    try {
      return MeshResult{parse_mesh_response(raw), attempt, std::move(raw)};
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::AttemptsExhausted, std::to_string(max_attempts),
              last_error);
}

std::string mesh_salience_text(const MeshDescription& description,
                               bool full_document) {
  if (!full_document) return single_line(description.section(kComprehensiveSection));
  std::string out;
  for (auto name : kMeshSections) {
    if (!out.empty()) out += ' ';
    out += name;
    out += ": ";
    out += single_line(description.section(name));
  }
  return out;
}

}  // namespace irispad
