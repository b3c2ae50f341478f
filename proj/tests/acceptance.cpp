// End-to-end acceptance checks. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any of them fail. Tolerances and floors
// are pinned here as named constants.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tracecls/dataset.hpp"
#include "tracecls/design_matrix.hpp"
#include "tracecls/eval.hpp"
#include "tracecls/featurize.hpp"
#include "tracecls/ingest.hpp"
#include "tracecls/logistic.hpp"
#include "tracecls/metrics.hpp"
#include "tracecls/naive_bayes.hpp"
#include "tracecls/rng.hpp"
#include "tracecls/select.hpp"
#include "tracecls/synth.hpp"

namespace fs = std::filesystem;
using namespace tracecls;

namespace {

constexpr double kMiTol = 1e-12;         // criterion 1
constexpr double kGradientRelTol = 1e-5; // criterion 2
constexpr double kGradientStep = 1e-6;
constexpr double kCostGapTol = 1e-6;     // criterion 3
constexpr double kAucTol = 1e-12;        // criterion 4
constexpr double kNbTol = 1e-12;         // criterion 5
constexpr double kRecoveryFloor = 0.90;  // criterion 6
constexpr double kAucFloor = 0.98;       // criterion 7
constexpr double kDetectionFloor = 0.95;
constexpr double kFamilyFloor = 0.85;    // criterion 8
constexpr double kLooSlack = 0.05;

int worker_count() {
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 4u));
}

BinaryDataset random_dataset(Rng& rng, int n, int d, double density = 0.4) {
  BinaryDataset ds;
  ds.vocabulary_fingerprint = "fp-acceptance";
  ds.column_count = d;
  for (int i = 0; i < n; ++i) {
    SampleRow row;
    row.sample_id = "s" + std::to_string(i);
    row.label = i < 2 ? i : (rng.bernoulli(0.5) ? 1 : 0);
    for (ColumnId c = 0; c < d; ++c)
      if (rng.bernoulli(density)) row.present.push_back(c);
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

DesignMatrix full_design(const BinaryDataset& ds) {
  std::vector<ColumnId> all;
  for (ColumnId c = 0; c < ds.column_count; ++c) all.push_back(c);
  return restrict_dataset(ds, all);
}

struct PlantedData {
  BinaryDataset dataset;
  std::set<ColumnId> core_columns;
};

PlantedData build_planted(double signal_correlation) {
  SynthConfig config = default_synth_config();
  config.signal_correlation = signal_correlation;
  const SynthOutput output = generate(config);
  const FeatureVocabulary vocab = fit_vocabulary(output.reports);
  PlantedData data;
  data.dataset = transform(output.reports, vocab);
  for (const auto& name : output.plantation.core) {
    const ColumnId id = vocab.lookup(name);
    if (id >= 0) data.core_columns.insert(id);
  }
  return data;
}

const PlantedData& default_planted() {
  static const PlantedData data = build_planted(0.0);
  return data;
}

const PlantedData& dependent_planted() {
  static const PlantedData data = build_planted(0.9);
  return data;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// -- criterion bodies --------------------------------------------------------

bool mi_oracle(std::string& detail) {
  Rng rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng.bounded(48));
    const int d = 1 + static_cast<int>(rng.bounded(10));
    const BinaryDataset ds = random_dataset(rng, n, d);
    for (ColumnId c = 0; c < d; ++c) {
      double cell[2][2] = {{0, 0}, {0, 0}};
      for (const auto& row : ds.rows) {
        const bool present = std::binary_search(row.present.begin(), row.present.end(), c);
        cell[present ? 1 : 0][*row.label] += 1.0;
      }
      const double total = static_cast<double>(ds.rows.size());
      double expected = 0.0;
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
          const double joint = cell[x][y] / total;
          if (joint == 0.0) continue;
          const double px = (cell[x][0] + cell[x][1]) / total;
          const double py = (cell[0][y] + cell[1][y]) / total;
          expected += joint * std::log(joint / (px * py));
        }
      worst = std::max(worst, std::abs(mutual_information(ds, c) - expected));
    }
  }
  detail = "max deviation " + fmt(worst);
  return worst < kMiTol;
}

bool gradient_check(std::string& detail) {
  Rng rng(102);
  const BinaryDataset ds = random_dataset(rng, 20, 10);
  const DesignMatrix design = full_design(ds);
  double worst = 0.0;
  for (double lambda : {0.0, 2e-3}) {
    for (int point = 0; point < 10; ++point) {
      Eigen::VectorXd w(10);
      for (int j = 0; j < 10; ++j) w(j) = 2.0 * rng.next_double() - 1.0;
      const double b = 2.0 * rng.next_double() - 1.0;
      Eigen::VectorXd grad(10);
      double grad_b = 0.0;
      logreg_gradient(w, b, design, lambda, grad, grad_b);
      for (int j = 0; j <= 10; ++j) {
        double analytic, fd;
        if (j < 10) {
          Eigen::VectorXd lo = w, hi = w;
          lo(j) -= kGradientStep;
          hi(j) += kGradientStep;
          analytic = grad(j);
          fd = (logreg_cost(hi, b, design, lambda) - logreg_cost(lo, b, design, lambda)) /
               (2 * kGradientStep);
        } else {
          analytic = grad_b;
          fd = (logreg_cost(w, b + kGradientStep, design, lambda) -
                logreg_cost(w, b - kGradientStep, design, lambda)) /
               (2 * kGradientStep);
        }
        worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
      }
    }
  }
  detail = "max relative error " + fmt(worst);
  return worst < kGradientRelTol;
}

bool convex_uniqueness(std::string& detail) {
  Rng rng(103);
  const BinaryDataset ds = random_dataset(rng, 200, 50);
  const DesignMatrix design = full_design(ds);
  std::vector<ColumnId> all;
  for (ColumnId c = 0; c < ds.column_count; ++c) all.push_back(c);

  LogRegOptions from_zero;
  from_zero.lambda = 2e-3;
  from_zero.max_iters = 100000;
  from_zero.tol = 1e-14;
  LogRegOptions from_far = from_zero;
  Eigen::VectorXd start(50);
  for (int j = 0; j < 50; ++j) start(j) = 6.0 * rng.next_double() - 3.0;
  from_far.init_weights = start;
  from_far.init_bias = 2.0;

  const LogRegModel a = logreg_train(design, all, from_zero);
  const LogRegModel b = logreg_train(design, all, from_far);
  const double gap = std::abs(a.meta.final_cost - b.meta.final_cost);
  detail = "final cost gap " + fmt(gap);
  return gap < kCostGapTol;
}

bool auc_oracle(std::string& detail) {
  Rng rng(104);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng.bounded(196));
    std::vector<double> scores(static_cast<std::size_t>(n));
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      scores[static_cast<std::size_t>(i)] = static_cast<double>(rng.bounded(10)) / 10.0;
      labels[static_cast<std::size_t>(i)] = i < 2 ? i : (rng.bernoulli(0.5) ? 1 : 0);
    }
    double hits = 0.0, ties = 0.0, pairs = 0.0;
    for (int i = 0; i < n; ++i) {
      if (labels[static_cast<std::size_t>(i)] != 1) continue;
      for (int j = 0; j < n; ++j) {
        if (labels[static_cast<std::size_t>(j)] != 0) continue;
        pairs += 1.0;
        const double si = scores[static_cast<std::size_t>(i)];
        const double sj = scores[static_cast<std::size_t>(j)];
        if (si > sj) hits += 1.0;
        else if (si == sj) ties += 1.0;
      }
    }
    const double expected = (hits + 0.5 * ties) / pairs;
    worst = std::max(worst, std::abs(roc_and_auc(scores, labels).auc - expected));
  }
  detail = "max deviation " + fmt(worst);
  return worst < kAucTol;
}

bool nb_exactness(std::string& detail) {
  Rng rng(105);
  double worst = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 4 + static_cast<int>(rng.bounded(17));
    const int d = 1 + static_cast<int>(rng.bounded(8));
    const BinaryDataset ds = random_dataset(rng, n, d);
    std::vector<ColumnId> all;
    for (ColumnId c = 0; c < d; ++c) all.push_back(c);
    const NbModel model = nb_train(full_design(ds), all);

    double count[2] = {0, 0};
    std::vector<std::array<double, 2>> ones(static_cast<std::size_t>(d), {0, 0});
    for (const auto& row : ds.rows) {
      count[*row.label] += 1;
      for (ColumnId c : row.present) ones[static_cast<std::size_t>(c)][*row.label] += 1;
    }
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<ColumnId> row;
      for (ColumnId c = 0; c < d; ++c)
        if (rng.bernoulli(0.5)) row.push_back(c);
      double like[2];
      for (int cls = 0; cls < 2; ++cls) {
        like[cls] = count[cls] / (count[0] + count[1]);
        for (ColumnId c = 0; c < d; ++c) {
          const double p1 = (ones[static_cast<std::size_t>(c)][cls] + 1.0) / (count[cls] + 2.0);
          like[cls] *= std::binary_search(row.begin(), row.end(), c) ? p1 : 1.0 - p1;
        }
      }
      const double expected = like[1] / (like[0] + like[1]);
      worst = std::max(worst, std::abs(nb_predict(model, row) - expected));
    }
  }
  detail = "max deviation " + fmt(worst);
  return worst < kNbTol;
}

bool planted_recovery(std::string& detail) {
  const PlantedData& data = default_planted();
  const MiRanking ranking = rank_features(data.dataset);
  const std::size_t planted = data.core_columns.size();
  std::size_t hits = 0;
  for (std::size_t r = 0; r < planted && r < ranking.order.size(); ++r)
    if (data.core_columns.count(ranking.order[r])) ++hits;
  detail = std::to_string(hits) + " of " + std::to_string(planted) + " core columns in top-" +
           std::to_string(planted);
  return planted == 50 &&
         static_cast<double>(hits) >= kRecoveryFloor * static_cast<double>(planted);
}

bool protocol_reproduction(std::string& detail) {
  EvalOptions options;
  options.jobs = worker_count();
  SplitSpec split;
  split.repetitions = 20;
  ClassifierConfig logreg;

  const EvalReport base = repeated_split_eval(default_planted().dataset, logreg, split, 100, options);
  const bool headline = base.summary.auc.mean >= kAucFloor &&
                        base.summary.detection_rate.mean >= kDetectionFloor;

  ClassifierConfig nb;
  nb.kind = ClassifierKind::Nb;
  const EvalReport dep_lr =
      repeated_split_eval(dependent_planted().dataset, logreg, split, 100, options);
  const EvalReport dep_nb =
      repeated_split_eval(dependent_planted().dataset, nb, split, 100, options);
  const bool ordering = dep_lr.summary.auc.mean >= dep_nb.summary.auc.mean;

  detail = "auc " + fmt(base.summary.auc.mean) + ", detection " +
           fmt(base.summary.detection_rate.mean) + "; dependent corpus logreg " +
           fmt(dep_lr.summary.auc.mean) + " vs nb " + fmt(dep_nb.summary.auc.mean);
  return headline && ordering;
}

bool family_holdout(std::string& detail) {
  const int jobs = worker_count();
  const LooTable narrow = loo_table(default_planted().dataset, 100, 2e-3, jobs);
  const LooTable wide = loo_table(default_planted().dataset, 400, 2e-3, jobs);
  double worst = 2.0;
  std::string worst_family;
  for (const auto& row : narrow.rows) {
    if (row.detection_rate < worst) {
      worst = row.detection_rate;
      worst_family = row.family;
    }
  }
  detail = "weakest family " + worst_family + " " + fmt(worst) + "; weighted avg k100 " +
           fmt(narrow.weighted_avg) + " vs k400 " + fmt(wide.weighted_avg);
  return worst >= kFamilyFloor && narrow.weighted_avg >= wide.weighted_avg - kLooSlack;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(TRACECLS_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[fs::relative(entry.path(), root).string()] = buf.str();
  }
  return files;
}

// Runs the full pipeline twice into the SAME paths (wiping in between), with
// different --jobs values, and demands bit-for-bit identical outputs.
bool cli_determinism(std::string& detail) {
  const fs::path root = fs::temp_directory_path() / "tracecls-acceptance";

  const auto pipeline = [&](const std::string& jobs) {
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path corpus = root / "corpus";
    const fs::path feat = root / "feat";
    return run_cli("synth --out " + corpus.string() +
                   " --goodware 200 --family Fox=60 --family Owl=50 --family Wren=40"
                   " --core 20 --seed 3") == 0 &&
           run_cli("featurize --in " + corpus.string() + " --out " + feat.string()) == 0 &&
           run_cli("eval --dataset " + feat.string() + " --out " + (root / "eval").string() +
                   " --k 50 --reps 6 --jobs " + jobs) == 0 &&
           run_cli("cv --dataset " + feat.string() + " --out " + (root / "cv").string() +
                   " --k 50 --folds 4 --jobs " + jobs) == 0 &&
           run_cli("loo --dataset " + feat.string() + " --out " + (root / "loo").string() +
                   " --k 50 --jobs " + jobs) == 0;
  };

  if (!pipeline("1")) {
    detail = "pipeline command failed on the first pass";
    return false;
  }
  const auto first = snapshot_tree(root);
  if (!pipeline("4")) {
    detail = "pipeline command failed on the second pass";
    return false;
  }
  const auto second = snapshot_tree(root);
  fs::remove_all(root);

  if (first.size() != second.size()) {
    detail = "file counts differ between passes";
    return false;
  }
  for (const auto& [rel, bytes] : first) {
    const auto it = second.find(rel);
    if (it == second.end()) {
      detail = rel + " missing on the second pass";
      return false;
    }
    if (it->second != bytes) {
      detail = "byte difference in " + rel;
      return false;
    }
  }
  detail = std::to_string(first.size()) +
           " output files byte-identical across rerun with jobs 1 vs 4";
  return true;
}

bool leakage_guard(std::string& detail) {
  SplitSpec split;
  split.repetitions = 10;
  ClassifierConfig logreg;
  EvalOptions plain;
  plain.jobs = worker_count();
  EvalOptions permuted = plain;
  permuted.permute_test_labels = true;

  const EvalReport a = repeated_split_eval(default_planted().dataset, logreg, split, 100, plain);
  const EvalReport b =
      repeated_split_eval(default_planted().dataset, logreg, split, 100, permuted);
  if (a.reps.size() != b.reps.size()) {
    detail = "repetition counts differ";
    return false;
  }
  int changed = 0;
  for (std::size_t rep = 0; rep < a.reps.size(); ++rep)
    if (a.reps[rep].selected != b.reps[rep].selected) ++changed;
  detail = std::to_string(changed) + " of " + std::to_string(a.reps.size()) +
           " selections changed under permuted test labels";
  return changed == 0;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "mi matches contingency oracle", mi_oracle},
      {2, "logreg gradient finite differences", gradient_check},
      {3, "logreg cost unique across inits", convex_uniqueness},
      {4, "auc matches pair statistic", auc_oracle},
      {5, "nb matches enumerated bayes rule", nb_exactness},
      {6, "planted core recovered by mi", planted_recovery},
      {7, "split protocol auc and ordering", protocol_reproduction},
      {8, "family holdout detection floors", family_holdout},
      {9, "cli outputs byte-identical", cli_determinism},
      {10, "selection blind to test labels", leakage_guard},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string detail;
    try {
      ok = criterion.body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %2d %-36s %s  [%6.1fs]  %s\n", criterion.id, criterion.name,
                ok ? "PASS" : "FAIL", seconds, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  if (failures > 0) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
