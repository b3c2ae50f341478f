#include "tracecls/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "tracecls/design_matrix.hpp"
#include "tracecls/errors.hpp"
#include "tracecls/rng.hpp"
#include "tracecls/select.hpp"

namespace tracecls {

namespace {

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Runs fn(0..n-1) on up to `jobs` worker threads. Each task writes only its
// own slot, so the result is identical for any worker count.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) workers.emplace_back(worker);
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

struct ScoredTest {
  Eigen::VectorXd scores;
  std::vector<int> decisions;
};

ScoredTest train_and_score(const ClassifierConfig& config, const DesignMatrix& train,
                           const DesignMatrix& test, const std::vector<ColumnId>& selected,
                           std::uint64_t svm_seed) {
  ScoredTest out;
  double threshold = 0.5;
  switch (config.kind) {
    case ClassifierKind::LogReg: {
      LogRegOptions opts;
      opts.lambda = config.lambda;
      opts.learning_rate = config.learning_rate;
      opts.max_iters = config.max_iters;
      opts.tol = config.tol;
      const LogRegModel model = logreg_train(train, selected, opts);
      out.scores = logreg_scores(model, test);
      break;
    }
    case ClassifierKind::Nb: {
      const NbModel model = nb_train(train, selected, config.alpha);
      out.scores = nb_scores(model, test);
      break;
    }
    case ClassifierKind::Svm: {
      SvmOptions opts;
      opts.cost_c = config.cost_c;
      opts.epochs = config.epochs;
      opts.seed = svm_seed;
      const SvmModel model = svm_train(train, selected, opts);
      out.scores = svm_scores(model, test);
      threshold = 0.0;
      break;
    }
  }
  out.decisions.reserve(static_cast<std::size_t>(out.scores.size()));
  for (Eigen::Index i = 0; i < out.scores.size(); ++i)
    out.decisions.push_back(out.scores[i] >= threshold ? 1 : 0);
  return out;
}

MetricSummary summarize_metric(std::span<const RepRecord> reps, double RepRecord::* field) {
  MetricSummary s;
  const double n = static_cast<double>(reps.size());
  for (const auto& r : reps) s.mean += r.*field;
  s.mean /= n;
  if (reps.size() > 1) {
    double ss = 0.0;
    for (const auto& r : reps) {
      const double d = r.*field - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::vector<std::size_t> class_indices(const BinaryDataset& dataset, int label) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i)
    if (*dataset.rows[i].label == label) idx.push_back(i);
  return idx;
}

}  // namespace

EvalSummary summarize(std::span<const RepRecord> reps) {
  if (reps.empty()) throw EmptyDataset("no repetitions to summarize");
  EvalSummary s;
  s.auc = summarize_metric(reps, &RepRecord::auc);
  s.test_error = summarize_metric(reps, &RepRecord::test_error);
  s.fp_rate = summarize_metric(reps, &RepRecord::fp_rate);
  s.detection_rate = summarize_metric(reps, &RepRecord::detection_rate);
  return s;
}

EvalReport repeated_split_eval(const BinaryDataset& dataset, const ClassifierConfig& config,
                               const SplitSpec& split, int k_features,
                               const EvalOptions& options) {
  dataset.require_labels();
  if (split.repetitions < 1) throw InvalidConfig("repetitions must be at least 1");
  if (!(split.train_fraction > 0.0 && split.train_fraction < 1.0))
    throw InvalidConfig("train_fraction must lie strictly between 0 and 1");
  if (options.jobs < 1) throw InvalidConfig("jobs must be at least 1");
  if (k_features < 1 || static_cast<ColumnId>(k_features) > dataset.column_count)
    throw KOutOfRange("k must lie in [1, column count]");

  const auto neg = class_indices(dataset, 0);
  const auto pos = class_indices(dataset, 1);
  if (neg.empty() || pos.empty()) throw SingleClassData("dataset must hold both classes");

  std::vector<ColumnId> full_selected;
  if (options.select_on_full)
    full_selected = select_top(rank_features(dataset), static_cast<std::size_t>(k_features));

  EvalReport report;
  report.config = config;
  report.split = split;
  report.k_features = k_features;
  report.select_on_full = options.select_on_full;
  report.reps.resize(static_cast<std::size_t>(split.repetitions));
  std::vector<std::vector<double>> pooled_scores(report.reps.size());
  std::vector<std::vector<int>> pooled_labels(report.reps.size());

  parallel_for(report.reps.size(), options.jobs, [&](std::size_t rep) {
    Rng rng(split.seed, rep);
    const std::uint64_t svm_seed = rng.next_u64();

    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> test_idx;
    if (split.stratified) {
      for (const auto* cls : {&neg, &pos}) {
        std::vector<std::size_t> idx = *cls;
        rng.shuffle(idx);
        const auto n_train = static_cast<std::size_t>(
            std::llround(split.train_fraction * static_cast<double>(idx.size())));
        train_idx.insert(train_idx.end(), idx.begin(), idx.begin() + n_train);
        test_idx.insert(test_idx.end(), idx.begin() + n_train, idx.end());
      }
    } else {
      std::vector<std::size_t> idx(dataset.rows.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(idx);
      const auto n_train = static_cast<std::size_t>(
          std::llround(split.train_fraction * static_cast<double>(idx.size())));
      train_idx.assign(idx.begin(), idx.begin() + n_train);
      test_idx.assign(idx.begin() + n_train, idx.end());
    }
    if (train_idx.empty() || test_idx.empty())
      throw TooFewSamples("train fraction leaves an empty portion");
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    std::vector<int> test_labels;
    test_labels.reserve(test_idx.size());
    for (std::size_t i : test_idx) test_labels.push_back(*dataset.rows[i].label);
    if (options.permute_test_labels) rng.shuffle(test_labels);

    const std::vector<ColumnId> selected =
        options.select_on_full
            ? full_selected
            : select_top(rank_features(dataset, train_idx), static_cast<std::size_t>(k_features));

    const DesignMatrix train = restrict_dataset(dataset, selected, train_idx);
    const DesignMatrix test = restrict_dataset(dataset, selected, test_idx);
    const ScoredTest scored = train_and_score(config, train, test, selected, svm_seed);

    const std::vector<double> scores(scored.scores.data(),
                                     scored.scores.data() + scored.scores.size());
    const Rates r = rates(scored.decisions, test_labels);
    RepRecord& rec = report.reps[rep];
    rec.auc = roc_and_auc(scores, test_labels).auc;
    rec.test_error = r.test_error;
    rec.fp_rate = r.fp_rate;
    rec.detection_rate = r.detection_rate;
    rec.selected = selected;
    pooled_scores[rep] = scores;
    pooled_labels[rep] = test_labels;
  });

  report.summary = summarize(report.reps);
  std::vector<double> all_scores;
  std::vector<int> all_labels;
  for (std::size_t rep = 0; rep < report.reps.size(); ++rep) {
    all_scores.insert(all_scores.end(), pooled_scores[rep].begin(), pooled_scores[rep].end());
    all_labels.insert(all_labels.end(), pooled_labels[rep].begin(), pooled_labels[rep].end());
  }
  report.pooled_roc = roc_and_auc(all_scores, all_labels);
  return report;
}

nlohmann::ordered_json eval_report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["format"] = "eval/1";
  j["classifier"] = to_string(report.config.kind);
  j["k_features"] = report.k_features;
  j["select_on_full"] = report.select_on_full;
  j["split"] = {{"seed", report.split.seed},
                {"repetitions", report.split.repetitions},
                {"train_fraction", report.split.train_fraction},
                {"stratified", report.split.stratified}};
  nlohmann::ordered_json hyper;
  switch (report.config.kind) {
    case ClassifierKind::LogReg:
      hyper["lambda"] = report.config.lambda;
      hyper["learning_rate"] = report.config.learning_rate;
      hyper["max_iters"] = report.config.max_iters;
      break;
    case ClassifierKind::Nb:
      hyper["alpha"] = report.config.alpha;
      break;
    case ClassifierKind::Svm:
      hyper["cost_c"] = report.config.cost_c;
      hyper["epochs"] = report.config.epochs;
      break;
  }
  j["hyperparameters"] = std::move(hyper);
  nlohmann::ordered_json reps = nlohmann::ordered_json::array();
  for (const auto& r : report.reps) {
    nlohmann::ordered_json rec;
    rec["auc"] = r.auc;
    rec["test_error"] = r.test_error;
    rec["fp_rate"] = r.fp_rate;
    rec["detection_rate"] = r.detection_rate;
    rec["selected"] = r.selected;
    reps.push_back(std::move(rec));
  }
  j["repetitions"] = std::move(reps);
  auto metric = [](const MetricSummary& m) {
    return nlohmann::ordered_json{{"mean", m.mean}, {"stddev", m.stddev}};
  };
  j["summary"] = {{"auc", metric(report.summary.auc)},
                  {"test_error", metric(report.summary.test_error)},
                  {"fp_rate", metric(report.summary.fp_rate)},
                  {"detection_rate", metric(report.summary.detection_rate)}};
  j["pooled_auc"] = report.pooled_roc.auc;
  return j;
}

std::string eval_report_csv(const EvalReport& report) {
  std::string out = "rep,auc,test_error,fp_rate,detection_rate\n";
  for (std::size_t i = 0; i < report.reps.size(); ++i) {
    const auto& r = report.reps[i];
    out += std::to_string(i) + ',' + fmt_g(r.auc) + ',' + fmt_g(r.test_error) + ',' +
           fmt_g(r.fp_rate) + ',' + fmt_g(r.detection_rate) + '\n';
  }
  const auto& s = report.summary;
  out += "mean," + fmt_g(s.auc.mean) + ',' + fmt_g(s.test_error.mean) + ',' +
         fmt_g(s.fp_rate.mean) + ',' + fmt_g(s.detection_rate.mean) + '\n';
  out += "stddev," + fmt_g(s.auc.stddev) + ',' + fmt_g(s.test_error.stddev) + ',' +
         fmt_g(s.fp_rate.stddev) + ',' + fmt_g(s.detection_rate.stddev) + '\n';
  return out;
}

std::string roc_csv(const RocCurve& curve) {
  std::string out = "fa,det\n";
  for (const auto& p : curve.points)
    out += fmt_g(p.false_alarm) + ',' + fmt_g(p.detection) + '\n';
  return out;
}

CvResult cross_validate(const BinaryDataset& dataset, const ClassifierConfig& base,
                        std::span<const double> grid, int folds, std::uint64_t seed,
                        int k_features, const EvalOptions& options) {
  dataset.require_labels();
  if (grid.empty()) throw InvalidConfig("hyperparameter grid must be non-empty");
  if (folds < 2) throw InvalidConfig("folds must be at least 2");
  if (options.jobs < 1) throw InvalidConfig("jobs must be at least 1");
  if (k_features < 1 || static_cast<ColumnId>(k_features) > dataset.column_count)
    throw KOutOfRange("k must lie in [1, column count]");

  const auto neg = class_indices(dataset, 0);
  const auto pos = class_indices(dataset, 1);
  if (neg.size() < static_cast<std::size_t>(folds) || pos.size() < static_cast<std::size_t>(folds))
    throw TooFewSamples("need at least `folds` samples of each class");

  CvResult result;
  result.grid.assign(grid.begin(), grid.end());
  if (base.kind == ClassifierKind::LogReg &&
      std::find(result.grid.begin(), result.grid.end(), 0.0) == result.grid.end())
    result.grid.push_back(0.0);
  std::sort(result.grid.begin(), result.grid.end());
  result.grid.erase(std::unique(result.grid.begin(), result.grid.end()), result.grid.end());

  // Fold assignment: shuffle each class once, then deal round-robin.
  std::vector<int> fold_of(dataset.rows.size(), -1);
  int cls_stream = 0;
  for (const auto* cls : {&neg, &pos}) {
    std::vector<std::size_t> idx = *cls;
    Rng rng(seed, static_cast<std::uint64_t>(cls_stream++));
    rng.shuffle(idx);
    for (std::size_t i = 0; i < idx.size(); ++i)
      fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(folds));
  }

  const auto n_folds = static_cast<std::size_t>(folds);
  std::vector<std::vector<std::size_t>> train_sets(n_folds);
  std::vector<std::vector<std::size_t>> val_sets(n_folds);
  for (std::size_t i = 0; i < dataset.rows.size(); ++i)
    for (std::size_t f = 0; f < n_folds; ++f)
      (fold_of[i] == static_cast<int>(f) ? val_sets[f] : train_sets[f]).push_back(i);

  // Selection does not depend on the swept value, so it is done once per fold.
  std::vector<std::vector<ColumnId>> selected(n_folds);
  std::vector<ColumnId> full_selected;
  if (options.select_on_full)
    full_selected = select_top(rank_features(dataset), static_cast<std::size_t>(k_features));
  parallel_for(n_folds, options.jobs, [&](std::size_t f) {
    selected[f] = options.select_on_full
                      ? full_selected
                      : select_top(rank_features(dataset, train_sets[f]),
                                   static_cast<std::size_t>(k_features));
  });

  const std::size_t n_tasks = result.grid.size() * n_folds;
  std::vector<double> fold_auc(n_tasks, 0.0);
  parallel_for(n_tasks, options.jobs, [&](std::size_t task) {
    const std::size_t v = task / n_folds;
    const std::size_t f = task % n_folds;
    ClassifierConfig config = base;
    switch (config.kind) {
      case ClassifierKind::LogReg: config.lambda = result.grid[v]; break;
      case ClassifierKind::Nb: config.alpha = result.grid[v]; break;
      case ClassifierKind::Svm: config.cost_c = result.grid[v]; break;
    }
    const std::uint64_t svm_seed = mix64(seed ^ mix64(static_cast<std::uint64_t>(f) + 1));
    const DesignMatrix train = restrict_dataset(dataset, selected[f], train_sets[f]);
    const DesignMatrix val = restrict_dataset(dataset, selected[f], val_sets[f]);
    const ScoredTest scored = train_and_score(config, train, val, selected[f], svm_seed);
    std::vector<int> val_labels;
    val_labels.reserve(val_sets[f].size());
    for (std::size_t i : val_sets[f]) val_labels.push_back(*dataset.rows[i].label);
    const std::vector<double> scores(scored.scores.data(),
                                     scored.scores.data() + scored.scores.size());
    fold_auc[task] = roc_and_auc(scores, val_labels).auc;
  });

  result.mean_auc.resize(result.grid.size());
  for (std::size_t v = 0; v < result.grid.size(); ++v) {
    double sum = 0.0;
    for (std::size_t f = 0; f < n_folds; ++f) sum += fold_auc[v * n_folds + f];
    result.mean_auc[v] = sum / static_cast<double>(n_folds);
  }
  // Grid is ascending, so keeping only strictly better values resolves ties
  // toward the smaller hyperparameter.
  std::size_t best = 0;
  for (std::size_t v = 1; v < result.grid.size(); ++v)
    if (result.mean_auc[v] > result.mean_auc[best]) best = v;
  result.best = result.grid[best];
  return result;
}

std::string cv_csv(const CvResult& result) {
  std::string out = "value,mean_auc,best\n";
  for (std::size_t v = 0; v < result.grid.size(); ++v) {
    out += fmt_g(result.grid[v]) + ',' + fmt_g(result.mean_auc[v]) + ',' +
           (result.grid[v] == result.best ? "1" : "0") + '\n';
  }
  return out;
}

LooResult leave_one_family_out(const BinaryDataset& dataset, const std::string& family, int k,
                               double lambda) {
  dataset.require_labels();
  if (k < 1 || static_cast<ColumnId>(k) > dataset.column_count)
    throw KOutOfRange("k must lie in [1, column count]");

  std::vector<std::size_t> held;
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    if (dataset.rows[i].family && *dataset.rows[i].family == family) {
      held.push_back(i);
    } else {
      train_idx.push_back(i);
    }
  }
  if (held.empty()) throw UnknownFamily("no samples in family " + family);

  LooResult result;
  result.family = family;
  result.selected =
      select_top(rank_features(dataset, train_idx), static_cast<std::size_t>(k));

  LogRegOptions opts;
  opts.lambda = lambda;
  const DesignMatrix train = restrict_dataset(dataset, result.selected, train_idx);
  const LogRegModel model = logreg_train(train, result.selected, opts);

  int detected = 0;
  for (std::size_t i : held) {
    if (*dataset.rows[i].label != 1) continue;
    ++result.n_samples;
    if (logreg_predict(model, dataset.rows[i].present) >= 0.5) ++detected;
  }
  if (result.n_samples == 0)
    throw SingleClassLabels("family " + family + " holds no ransomware rows");
  result.detection_rate = static_cast<double>(detected) / static_cast<double>(result.n_samples);
  return result;
}

LooTable loo_table(const BinaryDataset& dataset, int k, double lambda, int jobs) {
  dataset.require_labels();
  if (jobs < 1) throw InvalidConfig("jobs must be at least 1");
  std::set<std::string> names;
  for (const auto& row : dataset.rows)
    if (*row.label == 1 && row.family) names.insert(*row.family);
  if (names.empty()) throw UnknownFamily("dataset carries no ransomware families");

  LooTable table;
  table.rows.resize(names.size());
  const std::vector<std::string> ordered(names.begin(), names.end());
  parallel_for(ordered.size(), jobs, [&](std::size_t i) {
    table.rows[i] = leave_one_family_out(dataset, ordered[i], k, lambda);
  });
  double weighted = 0.0;
  for (const auto& row : table.rows) {
    table.total_samples += row.n_samples;
    weighted += row.detection_rate * static_cast<double>(row.n_samples);
  }
  table.weighted_avg = weighted / static_cast<double>(table.total_samples);
  return table;
}

std::string loo_csv(const LooTable& table) {
  std::string out = "family,n_samples,detection_rate\n";
  for (const auto& row : table.rows)
    out += row.family + ',' + std::to_string(row.n_samples) + ',' +
           fmt_g(row.detection_rate) + '\n';
  out += "weighted_avg," + std::to_string(table.total_samples) + ',' +
         fmt_g(table.weighted_avg) + '\n';
  return out;
}

std::map<std::string, int> majority_vote(
    const std::map<std::string, std::vector<int>>& verdicts) {
  std::map<std::string, int> out;
  for (const auto& [sample_id, votes] : verdicts) {
    if (votes.empty()) continue;
    const auto malware = std::count(votes.begin(), votes.end(), 1);
    out[sample_id] = 2 * malware > static_cast<long>(votes.size()) ? 1 : 0;
  }
  return out;
}

std::map<std::string, std::vector<int>> parse_verdicts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty verdict file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "sample_id,vendor,verdict")
    throw SchemaError("verdict file must start with header sample_id,vendor,verdict");

  std::map<std::string, std::vector<int>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto first = line.find(',');
    const auto second = first == std::string::npos ? std::string::npos
                                                   : line.find(',', first + 1);
    if (second == std::string::npos || line.find(',', second + 1) != std::string::npos)
      throw SchemaError("verdict line " + std::to_string(line_no) + " needs exactly 3 fields");
    const std::string sample_id = line.substr(0, first);
    const std::string verdict = line.substr(second + 1);
    if (sample_id.empty())
      throw SchemaError("verdict line " + std::to_string(line_no) + " has an empty sample_id");
    int vote;
    if (verdict == "malware") {
      vote = 1;
    } else if (verdict == "clean") {
      vote = 0;
    } else {
      throw SchemaError("verdict line " + std::to_string(line_no) +
                        " must say malware or clean");
    }
    out[sample_id].push_back(vote);
  }
  return out;
}

std::string votes_csv(const std::map<std::string, int>& votes) {
  std::string out = "sample_id,label\n";
  for (const auto& [sample_id, label] : votes)
    out += sample_id + ',' + std::to_string(label) + '\n';
  return out;
}

}  // namespace tracecls
