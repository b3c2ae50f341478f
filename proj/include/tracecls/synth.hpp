#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracecls/report.hpp"
#include "tracecls/vocabulary.hpp"

namespace tracecls {

struct FamilySpec {
  std::string name;
  int n_samples = 0;
};

// shared-core: every ransomware family exhibits the same core-signal
// features. disjoint: the core pool is partitioned across families, so a
// held-out family shares nothing with the training families.
enum class SynthMode { SharedCore, Disjoint };

std::string to_string(SynthMode mode);
SynthMode synth_mode_from_string(const std::string& name);

struct SynthConfig {
  std::uint64_t seed = 7;
  int n_goodware = 942;
  std::vector<FamilySpec> families;                    // default mirrors the corpus shape
  std::array<int, kFeatureClassCount> vocab_sizes{};   // default sums to 5000
  int n_core_signal = 50;
  int n_family_signal = 5;
  double signal_present_ransomware = 0.9;
  double signal_present_goodware = 0.1;
  double background_density = 0.15;
  // > 0 ties most core-signal features of a sample to one latent draw, so
  // they become pairwise correlated while keeping their marginals. Only
  // meaningful in shared-core mode.
  double signal_correlation = 0.0;
  SynthMode mode = SynthMode::SharedCore;
};

SynthConfig default_synth_config();

// Ground truth of where the signal was planted, by feature name.
struct Plantation {
  SynthMode mode = SynthMode::SharedCore;
  double signal_correlation = 0.0;
  std::vector<std::string> core;
  std::map<std::string, std::vector<std::string>> family_signal;
  std::map<std::string, std::vector<std::string>> core_partition;  // disjoint mode only
};

struct SynthOutput {
  std::vector<BehavioralReport> reports;  // goodware first, then families in config order
  Plantation plantation;
};

SynthOutput generate(const SynthConfig& config);

nlohmann::ordered_json plantation_to_json(const Plantation& plantation);
Plantation plantation_from_json(const nlohmann::json& j);

// One `<sample_id>.trace.json` per report, plus plantation.json and
// manifest.csv, all under `dir`.
void write_corpus(const SynthOutput& output, const std::filesystem::path& dir);

}  // namespace tracecls
