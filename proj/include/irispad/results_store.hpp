#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "irispad/prompt.hpp"
#include "irispad/scoring.hpp"

namespace irispad {

/// One persisted verdict:
/// `sample_id | class | variant | confidence | decision | attempts`.
struct StoreRecord {
  std::string sample_id;
  PresentationClass cls = PresentationClass::Live;
  Variant variant;
  double confidence = 0.0;
  Decision decision = Decision::BonaFide;
  int attempts = 1;

  Verdict verdict() const { return {sample_id, cls, confidence, decision}; }

  bool operator==(const StoreRecord&) const = default;
};

std::string format_record(const StoreRecord& record);
StoreRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Missing file reads as an empty store.
std::vector<StoreRecord> read_store(const std::filesystem::path& path);

void write_store(const std::filesystem::path& path,
                 const std::vector<StoreRecord>& records);

void append_record(const std::filesystem::path& path, const StoreRecord& record);

/// Verdicts grouped by variant, in variant order.
std::map<std::size_t, std::vector<Verdict>> verdicts_by_variant(
    const std::vector<StoreRecord>& records);

}  // namespace irispad
