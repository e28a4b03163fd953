#include "irispad/manifest.hpp"

#include <algorithm>
#include <set>

#include "irispad/error.hpp"
#include "irispad/rng.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

namespace {

constexpr std::string_view kManifestHeader = "sample_id,class,image_path,source";

std::vector<std::string_view> content_lines(std::string_view content) {
  std::vector<std::string_view> lines;
  while (!content.empty()) {
    auto pos = content.find('\n');
    auto line = content.substr(0, pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (pos == std::string_view::npos) break;
    content.remove_prefix(pos + 1);
  }
  return lines;
}

bool sample_order(const SampleRecord& a, const SampleRecord& b) {
  if (a.cls != b.cls) return class_index(a.cls) < class_index(b.cls);
  return a.sample_id < b.sample_id;
}

}  // namespace

std::size_t Manifest::count(PresentationClass c) const {
  return static_cast<std::size_t>(std::count_if(
      samples.begin(), samples.end(),
      [c](const SampleRecord& s) { return s.cls == c; }));
}

const SampleRecord* Manifest::find(std::string_view sample_id) const {
  for (const auto& s : samples) {
    if (s.sample_id == sample_id) return &s;
  }
  return nullptr;
}

bool declaration_is_correct(Declared declared, PresentationClass truth) {
  return (declared == Declared::Normal) == is_bona_fide(truth);
}

Manifest parse_manifest(std::string_view content,
                        const std::filesystem::path& base_dir) {
  Manifest manifest;
  auto lines = content_lines(content);
  std::set<std::string, std::less<>> seen;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line_no = std::to_string(i + 1);
    auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kManifestHeader) {
        throw Error(ErrorCode::MalformedRow, line_no,
                    "expected header '" + std::string(kManifestHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    auto fields = text::split(line, ',');
    if (fields.size() != 4) {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "expected 4 fields, got " + std::to_string(fields.size()));
    }
    SampleRecord rec;
    rec.sample_id = std::string(text::trim(fields[0]));
    if (rec.sample_id.empty()) {
      throw Error(ErrorCode::MalformedRow, line_no, "empty sample_id");
    }
    rec.cls = require_class(text::trim(fields[1]));
    std::filesystem::path image(std::string(text::trim(fields[2])));
    if (image.empty()) {
      throw Error(ErrorCode::MalformedRow, line_no, "empty image_path");
    }
    rec.image_ref = image.is_relative() && !base_dir.empty() ? base_dir / image
                                                             : image;
    rec.source_tag = std::string(text::trim(fields[3]));
    if (!seen.insert(rec.sample_id).second) {
      throw Error(ErrorCode::DuplicateId, rec.sample_id);
    }
    manifest.samples.push_back(std::move(rec));
  }
  if (!header_seen) {
    throw Error(ErrorCode::MalformedRow, "1", "missing header");
  }
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(text::read_file(path), path.parent_path());
}

std::string format_manifest(const Manifest& manifest) {
  std::string out(kManifestHeader);
  out += '\n';
  for (const auto& s : manifest.samples) {
    out += s.sample_id;
    out += ',';
    out += to_string(s.cls);
    out += ',';
    out += s.image_ref.string();
    out += ',';
    out += s.source_tag;
    out += '\n';
  }
  return out;
}

Manifest sample_per_class(const Manifest& manifest, std::size_t cap,
                          std::uint64_t seed) {
  if (cap == 0) throw Error(ErrorCode::InvalidArgument, "cap", "must be >= 1");
  Manifest out;
  out.seed = seed;
  for (auto c : kAllClasses) {
    std::vector<SampleRecord> pool;
    for (const auto& s : manifest.samples) {
      if (s.cls == c) pool.push_back(s);
    }
    std::sort(pool.begin(), pool.end(), sample_order);
    if (pool.size() > cap) {
      std::mt19937_64 rng(derive_seed(seed, to_string(c)));
      for (std::size_t i = 0; i < cap; ++i) {
        auto j = i + uniform_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
      }
      pool.resize(cap);
      std::sort(pool.begin(), pool.end(), sample_order);
    }
    for (auto& s : pool) out.samples.push_back(std::move(s));
  }
  return out;
}

std::string_view to_string(Expertise e) {
  return e == Expertise::Expert ? "expert" : "non_expert";
}

std::string_view to_string(Declared d) {
  return d == Declared::Normal ? "normal" : "abnormal";
}

AnnotationMap parse_annotations(std::string_view content,
                                const Manifest& manifest) {
  AnnotationMap out;
  auto lines = content_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::is_skippable(lines[i])) continue;
    const auto line_no = std::to_string(i + 1);
    auto fields = text::split(lines[i], '|', 6);
    if (fields.size() != 6) {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "expected 6 '|'-separated fields");
    }
    for (auto& f : fields) f = text::trim(f);
    std::string sample_id(fields[0]);
    const auto* sample = manifest.find(sample_id);
    if (sample == nullptr) throw Error(ErrorCode::UnknownSample, sample_id);

    ExaminerAnnotation ann;
    ann.examiner_id = std::string(fields[1]);
    auto expertise = text::to_lower(fields[2]);
    if (expertise == "expert") {
      ann.expertise = Expertise::Expert;
    } else if (expertise == "non_expert" || expertise == "non-expert") {
      ann.expertise = Expertise::NonExpert;
    } else {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "bad expertise '" + std::string(fields[2]) + "'");
    }
    auto declared = text::to_lower(fields[3]);
    if (declared == "normal") {
      ann.declared = Declared::Normal;
    } else if (declared == "abnormal") {
      ann.declared = Declared::Abnormal;
    } else {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "bad declaration '" + std::string(fields[3]) + "'");
    }
    auto correct = text::to_lower(fields[4]);
    if (correct == "true" || correct == "correct") {
      ann.correct = true;
    } else if (correct == "false" || correct == "incorrect") {
      ann.correct = false;
    } else {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "bad correctness flag '" + std::string(fields[4]) + "'");
    }
    ann.transcript = std::string(fields[5]);
    if (ann.examiner_id.empty() || ann.transcript.empty()) {
      throw Error(ErrorCode::MalformedRow, line_no,
                  "empty examiner_id or transcript");
    }
    if (ann.correct != declaration_is_correct(ann.declared, sample->cls)) {
      throw Error(ErrorCode::InconsistentCorrectness,
                  sample_id + "," + ann.examiner_id);
    }
    out[sample_id].push_back(std::move(ann));
  }
  return out;
}

AnnotationMap load_annotations(const std::filesystem::path& path,
                               const Manifest& manifest) {
  return parse_annotations(text::read_file(path), manifest);
}

}  // namespace irispad
