#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tracecls/report.hpp"

namespace tracecls {

inline constexpr std::string_view kReportSchema = "trace/1";
inline constexpr std::string_view kReportExtension = ".trace.json";

struct ParseOptions {
  // When false (the default), a structurally valid report whose api_calls
  // came out empty raises EmptyTrace instead of being returned.
  bool allow_empty_trace = false;
};

// Parse one report document. Raises SchemaError / EncodingError / EmptyTrace.
BehavioralReport parse_report(std::string_view raw,
                              std::string_view schema_version = kReportSchema,
                              const ParseOptions& options = {});

// Canonical serialization; parse(serialize(parse(x))) == parse(x).
std::string serialize_report(const BehavioralReport& report);

struct CorpusSummary {
  std::size_t loaded = 0;
  std::size_t discarded = 0;  // non-effective reports dropped by discard_empty
};

// Load every *.trace.json under `directory`, sorted by sample_id regardless
// of filesystem enumeration order. Raises IoError / DuplicateSampleId.
std::vector<BehavioralReport> load_corpus(const std::filesystem::path& directory,
                                          bool discard_empty,
                                          CorpusSummary* summary = nullptr);

// Fingerprint of a corpus: serialized reports in sample_id order.
std::string corpus_fingerprint(const std::vector<BehavioralReport>& corpus);

}  // namespace tracecls
