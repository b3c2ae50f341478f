#include "tracecls/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "tracecls/errors.hpp"
#include "tracecls/fingerprint.hpp"

namespace tracecls {

using json = nlohmann::ordered_json;

namespace {

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    std::size_t len;
    unsigned cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const unsigned char cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xc0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    if (len == 2 && cp < 0x80) return false;          // overlong
    if (len == 3 && cp < 0x800) return false;
    if (len == 4 && cp < 0x10000) return false;
    if (cp > 0x10ffff) return false;
    if (cp >= 0xd800 && cp <= 0xdfff) return false;   // surrogate
    i += len;
  }
  return true;
}

using Normalizer = std::string (*)(std::string_view);

TokenSet read_token_array(const json& arr, const std::string& where, Normalizer norm) {
  if (!arr.is_array()) throw SchemaError(where + ": expected an array of strings");
  TokenSet out;
  for (const auto& item : arr) {
    if (!item.is_string()) throw SchemaError(where + ": expected an array of strings");
    std::string token = norm(item.get_ref<const std::string&>());
    if (!token.empty()) out.insert(std::move(token));
  }
  return out;
}

template <typename Op, std::size_t N>
std::map<Op, TokenSet> read_op_section(const json& doc, const std::string& section,
                                       const std::array<Op, N>& ops, Normalizer norm) {
  std::map<Op, TokenSet> out;
  if (!doc.contains(section)) return out;  // omitted section: all sets empty
  const json& obj = doc.at(section);
  if (!obj.is_object()) throw SchemaError(section + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (Op op : ops) {
      if (key == to_string(op)) {
        TokenSet tokens = read_token_array(value, section + "." + key, norm);
        if (!tokens.empty()) out[op] = std::move(tokens);
        known = true;
        break;
      }
    }
    if (!known) throw SchemaError(section + ": unknown op key \"" + key + "\"");
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed on " + path.string());
  return buf.str();
}

json token_array(const TokenSet& tokens) {
  json arr = json::array();
  for (const auto& t : tokens) arr.push_back(t);
  return arr;
}

template <typename Op>
json op_section(const std::map<Op, TokenSet>& ops) {
  json obj = json::object();
  for (const auto& [op, tokens] : ops) {
    if (!tokens.empty()) obj[std::string(to_string(op))] = token_array(tokens);
  }
  return obj;
}

}  // namespace

BehavioralReport parse_report(std::string_view raw, std::string_view schema_version,
                              const ParseOptions& options) {
  if (!valid_utf8(raw)) throw EncodingError("report is not valid UTF-8");

  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("report must be a JSON object");

  if (!doc.contains("schema") || !doc.at("schema").is_string())
    throw SchemaError("missing required field \"schema\"");
  if (doc.at("schema").get_ref<const std::string&>() != schema_version)
    throw SchemaError("unsupported schema \"" +
                      doc.at("schema").get<std::string>() + "\", expected \"" +
                      std::string(schema_version) + "\"");

  BehavioralReport report;
  if (!doc.contains("sample_id") || !doc.at("sample_id").is_string())
    throw SchemaError("missing required field \"sample_id\"");
  report.sample_id = doc.at("sample_id").get<std::string>();
  if (report.sample_id.empty()) throw SchemaError("sample_id must be non-empty");

  if (doc.contains("label")) {
    const json& label = doc.at("label");
    if (!label.is_string()) throw SchemaError("label must be a string");
    const std::string& text = label.get_ref<const std::string&>();
    if (text == "ransomware")
      report.label = Label::Ransomware;
    else if (text == "goodware")
      report.label = Label::Goodware;
    else
      throw SchemaError("label must be \"ransomware\" or \"goodware\", got \"" + text + "\"");
  }
  if (doc.contains("family")) {
    const json& family = doc.at("family");
    if (!family.is_string()) throw SchemaError("family must be a string");
    std::string name = family.get<std::string>();
    if (name.empty()) throw SchemaError("family must be non-empty when present");
    report.family = std::move(name);
  }

  if (doc.contains("api_calls"))
    report.api_calls = read_token_array(doc.at("api_calls"), "api_calls", normalize_token);
  report.registry_ops = read_op_section(doc, "registry_ops", kAccessOps, normalize_path);
  report.file_ops = read_op_section(doc, "file_ops", kAccessOps, normalize_path);
  report.extension_ops = read_op_section(doc, "extension_ops", kAccessOps, normalize_extension);
  report.directory_ops = read_op_section(doc, "directory_ops", kDirOps, normalize_path);
  if (doc.contains("dropped_file_types"))
    report.dropped_file_types =
        read_token_array(doc.at("dropped_file_types"), "dropped_file_types", normalize_token);
  if (doc.contains("strings"))
    report.strings = read_token_array(doc.at("strings"), "strings", normalize_token);

  if (!options.allow_empty_trace && !report.effective())
    throw EmptyTrace("sample \"" + report.sample_id + "\" has no api calls");
  return report;
}

std::string serialize_report(const BehavioralReport& report) {
  json doc = json::object();
  doc["schema"] = std::string(kReportSchema);
  doc["sample_id"] = report.sample_id;
  if (report.label) doc["label"] = std::string(to_string(*report.label));
  if (report.family) doc["family"] = *report.family;
  doc["api_calls"] = token_array(report.api_calls);
  if (json obj = op_section(report.registry_ops); !obj.empty()) doc["registry_ops"] = obj;
  if (json obj = op_section(report.file_ops); !obj.empty()) doc["file_ops"] = obj;
  if (json obj = op_section(report.extension_ops); !obj.empty()) doc["extension_ops"] = obj;
  if (json obj = op_section(report.directory_ops); !obj.empty()) doc["directory_ops"] = obj;
  if (!report.dropped_file_types.empty())
    doc["dropped_file_types"] = token_array(report.dropped_file_types);
  if (!report.strings.empty()) doc["strings"] = token_array(report.strings);
  return doc.dump(2) + "\n";
}

std::vector<BehavioralReport> load_corpus(const std::filesystem::path& directory,
                                          bool discard_empty, CorpusSummary* summary) {
  std::error_code ec;
  if (!std::filesystem::is_directory(directory, ec))
    throw IoError("not a directory: " + directory.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory, ec)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > kReportExtension.size() &&
        name.ends_with(kReportExtension))
      files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot enumerate " + directory.string());

  ParseOptions options;
  options.allow_empty_trace = true;  // the discard policy is decided here

  CorpusSummary counts;
  std::vector<BehavioralReport> corpus;
  corpus.reserve(files.size());
  for (const auto& path : files) {
    BehavioralReport report;
    try {
      report = parse_report(read_file(path), kReportSchema, options);
    } catch (const EncodingError& e) {
      throw EncodingError(path.filename().string() + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError(path.filename().string() + ": " + e.what());
    }
    if (discard_empty && !report.effective()) {
      ++counts.discarded;
      continue;
    }
    corpus.push_back(std::move(report));
  }

  std::sort(corpus.begin(), corpus.end(),
            [](const BehavioralReport& a, const BehavioralReport& b) {
              return a.sample_id < b.sample_id;
            });
  for (std::size_t i = 1; i < corpus.size(); ++i) {
    if (corpus[i].sample_id == corpus[i - 1].sample_id)
      throw DuplicateSampleId("duplicate sample_id \"" + corpus[i].sample_id + "\"");
  }

  counts.loaded = corpus.size();
  if (summary) *summary = counts;
  return corpus;
}

std::string corpus_fingerprint(const std::vector<BehavioralReport>& corpus) {
  Fingerprint fp;
  for (const auto& report : corpus) fp.update(serialize_report(report)).sep();
  return fp.hex();
}

}  // namespace tracecls
