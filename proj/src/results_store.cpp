#include "irispad/results_store.hpp"

#include <fstream>

#include "irispad/error.hpp"
#include "irispad/text_util.hpp"

namespace irispad {

std::string format_record(const StoreRecord& r) {
  std::string out = r.sample_id;
  out += " | ";
  out += to_string(r.cls);
  out += " | ";
  out += r.variant.label();
  out += " | ";
  out += text::format_double(r.confidence);
  out += " | ";
  out += to_string(r.decision);
  out += " | ";
  out += std::to_string(r.attempts);
  return out;
}

StoreRecord parse_record(std::string_view line, std::size_t line_no) {
  const auto where = std::to_string(line_no);
  auto fields = text::split(line, '|');
  if (fields.size() != 6) {
    throw Error(ErrorCode::MalformedRow, where, "expected 6 fields");
  }
  for (auto& f : fields) f = text::trim(f);
  StoreRecord r;
  r.sample_id = std::string(fields[0]);
  r.cls = require_class(fields[1]);
  r.variant = parse_variant(fields[2]);
  auto confidence = text::parse_double(fields[3]);
  if (!confidence || *confidence < 0.0 || *confidence > 1.0) {
    throw Error(ErrorCode::MalformedRow, where, "bad confidence");
  }
  r.confidence = *confidence;
  auto decision = parse_decision(fields[4]);
  if (!decision) throw Error(ErrorCode::MalformedRow, where, "bad decision");
  r.decision = *decision;
  auto attempts = text::parse_int(fields[5]);
  if (!attempts || *attempts < 1) {
    throw Error(ErrorCode::MalformedRow, where, "bad attempts");
  }
  r.attempts = static_cast<int>(*attempts);
  return r;
}

std::vector<StoreRecord> read_store(const std::filesystem::path& path) {
  std::vector<StoreRecord> out;
  if (!std::filesystem::exists(path)) return out;
  auto lines = text::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (text::is_skippable(lines[i])) continue;
    out.push_back(parse_record(lines[i], i + 1));
  }
  return out;
}

void write_store(const std::filesystem::path& path,
                 const std::vector<StoreRecord>& records) {
  std::string content;
  for (const auto& r : records) {
    content += format_record(r);
    content += '\n';
  }
  // replaced by rename; readers never observe a partial store
  auto tmp = path;
  tmp += ".tmp";
  text::write_file(tmp, content);
  std::filesystem::rename(tmp, path);
}

void append_record(const std::filesystem::path& path, const StoreRecord& record) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, path.string(), "cannot append");
  out << format_record(record) << '\n';
  out.flush();
}

std::map<std::size_t, std::vector<Verdict>> verdicts_by_variant(
    const std::vector<StoreRecord>& records) {
  std::map<std::size_t, std::vector<Verdict>> out;
  for (const auto& r : records) out[r.variant.index()].push_back(r.verdict());
  return out;
}

}  // namespace irispad
