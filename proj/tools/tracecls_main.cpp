#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tracecls/dataset.hpp"
#include "tracecls/errors.hpp"
#include "tracecls/eval.hpp"
#include "tracecls/featurize.hpp"
#include "tracecls/ingest.hpp"
#include "tracecls/model_io.hpp"
#include "tracecls/select.hpp"
#include "tracecls/synth.hpp"
#include "tracecls/vocabulary.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw tracecls::IoError("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw tracecls::IoError("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw tracecls::IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// run.json echoes the resolved configuration and artifact fingerprints.
// Execution details that do not influence results (worker counts) are
// deliberately left out so reruns stay byte-identical.
void write_run(const fs::path& out_dir, const std::string& subcommand, ordered_json config,
               ordered_json artifacts) {
  ordered_json j;
  j["format"] = "run/1";
  j["subcommand"] = subcommand;
  j["config"] = std::move(config);
  j["artifacts"] = std::move(artifacts);
  write_text(out_dir / "run.json", j.dump(2) + "\n");
}

fs::path resolve_input(const fs::path& path, const char* default_name) {
  return fs::is_directory(path) ? path / default_name : path;
}

// Shared classifier hyperparameter flags.
struct ClassifierFlags {
  std::string classifier = "logreg";
  double lambda = 2e-3;
  double eta = 0.8;
  int max_iters = 4000;
  double tol = 1e-8;
  double alpha = 1.0;
  double cost_c = 1.0;
  int epochs = 50;

  void add_to(CLI::App* cmd, bool with_kind = true) {
    if (with_kind)
      cmd->add_option("--classifier", classifier, "logreg, nb or svm")
          ->check(CLI::IsMember({"logreg", "nb", "svm"}))
          ->envname("TRACECLS_CLASSIFIER");
    cmd->add_option("--lambda", lambda, "logreg L2 regularization")
        ->envname("TRACECLS_LAMBDA");
    cmd->add_option("--eta", eta, "logreg learning rate")->envname("TRACECLS_ETA");
    cmd->add_option("--max-iters", max_iters, "logreg iteration cap")
        ->envname("TRACECLS_MAX_ITERS");
    cmd->add_option("--tol", tol, "logreg convergence tolerance on the cost");
    cmd->add_option("--alpha", alpha, "nb Laplace smoothing")->envname("TRACECLS_ALPHA");
    cmd->add_option("--cost-c", cost_c, "svm cost parameter")->envname("TRACECLS_COST_C");
    cmd->add_option("--epochs", epochs, "svm training epochs")->envname("TRACECLS_EPOCHS");
  }

  tracecls::ClassifierConfig to_config() const {
    tracecls::ClassifierConfig config;
    config.kind = tracecls::classifier_kind_from_string(classifier);
    config.lambda = lambda;
    config.learning_rate = eta;
    config.max_iters = max_iters;
    config.tol = tol;
    config.alpha = alpha;
    config.cost_c = cost_c;
    config.epochs = epochs;
    return config;
  }

  ordered_json echo() const {
    ordered_json j;
    j["classifier"] = classifier;
    if (classifier == "logreg") {
      j["lambda"] = lambda;
      j["eta"] = eta;
      j["max_iters"] = max_iters;
      j["tol"] = tol;
    } else if (classifier == "nb") {
      j["alpha"] = alpha;
    } else {
      j["cost_c"] = cost_c;
      j["epochs"] = epochs;
    }
    return j;
  }
};

void add_synth(CLI::App& app) {
  struct Opts {
    fs::path out;
    std::uint64_t seed = 7;
    int goodware = 942;
    int core = 50;
    int family_signal = 5;
    double p_ransomware = 0.9;
    double p_goodware = 0.1;
    double density = 0.15;
    double correlation = 0.0;
    std::string mode = "shared-core";
    std::vector<std::string> families;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  cmd->add_option("--out", opts->out, "corpus output directory")->required();
  cmd->add_option("--seed", opts->seed, "rng seed")->envname("TRACECLS_SEED");
  cmd->add_option("--goodware", opts->goodware, "number of goodware samples");
  cmd->add_option("--core", opts->core, "number of core-signal features");
  cmd->add_option("--family-signal", opts->family_signal, "signal features per family");
  cmd->add_option("--p-signal-ransomware", opts->p_ransomware,
                  "signal presence probability for ransomware");
  cmd->add_option("--p-signal-goodware", opts->p_goodware,
                  "signal presence probability for goodware");
  cmd->add_option("--density", opts->density, "background feature density")
      ->envname("TRACECLS_DENSITY");
  cmd->add_option("--signal-correlation", opts->correlation,
                  "latent correlation across core-signal features");
  cmd->add_option("--mode", opts->mode, "shared-core or disjoint")
      ->check(CLI::IsMember({"shared-core", "disjoint"}));
  cmd->add_option("--family", opts->families,
                  "family as NAME=COUNT, repeatable; replaces the default list");
  cmd->callback([opts] {
    tracecls::SynthConfig config = tracecls::default_synth_config();
    config.seed = opts->seed;
    config.n_goodware = opts->goodware;
    config.n_core_signal = opts->core;
    config.n_family_signal = opts->family_signal;
    config.signal_present_ransomware = opts->p_ransomware;
    config.signal_present_goodware = opts->p_goodware;
    config.background_density = opts->density;
    config.signal_correlation = opts->correlation;
    config.mode = tracecls::synth_mode_from_string(opts->mode);
    if (!opts->families.empty()) {
      config.families.clear();
      for (const auto& spec : opts->families) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
          throw tracecls::InvalidConfig("family must look like NAME=COUNT: " + spec);
        int count = 0;
        try {
          count = std::stoi(spec.substr(eq + 1));
        } catch (const std::exception&) {
          throw tracecls::InvalidConfig("family must look like NAME=COUNT: " + spec);
        }
        config.families.push_back({spec.substr(0, eq), count});
      }
    }

    const tracecls::SynthOutput output = tracecls::generate(config);
    tracecls::write_corpus(output, opts->out);

    ordered_json families = ordered_json::array();
    int n_ransomware = 0;
    for (const auto& f : config.families) {
      families.push_back({{"name", f.name}, {"n_samples", f.n_samples}});
      n_ransomware += f.n_samples;
    }
    ordered_json config_echo{{"seed", config.seed},
                             {"n_goodware", config.n_goodware},
                             {"families", families},
                             {"n_core_signal", config.n_core_signal},
                             {"n_family_signal", config.n_family_signal},
                             {"signal_present_ransomware", config.signal_present_ransomware},
                             {"signal_present_goodware", config.signal_present_goodware},
                             {"background_density", config.background_density},
                             {"signal_correlation", config.signal_correlation},
                             {"mode", to_string(config.mode)}};
    write_run(opts->out, "synth", std::move(config_echo),
              {{"corpus", tracecls::corpus_fingerprint(output.reports)}});
    std::cout << "wrote " << output.reports.size() << " reports (" << config.n_goodware
              << " goodware, " << n_ransomware << " ransomware in " << config.families.size()
              << " families) to " << opts->out.string() << "\n";
  });
}

void add_ingest(CLI::App& app) {
  struct Opts {
    fs::path in;
    fs::path out;
    bool keep_empty = false;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("ingest", "validate and normalize a report directory");
  cmd->add_option("--in", opts->in, "directory of .trace.json reports")->required();
  cmd->add_option("--out", opts->out, "directory for normalized reports");
  cmd->add_flag("--keep-empty", opts->keep_empty, "keep reports with no api calls");
  cmd->callback([opts] {
    tracecls::CorpusSummary summary;
    const auto corpus = tracecls::load_corpus(opts->in, !opts->keep_empty, &summary);
    const std::string fingerprint = tracecls::corpus_fingerprint(corpus);
    if (!opts->out.empty()) {
      fs::create_directories(opts->out);
      for (const auto& report : corpus)
        write_text(opts->out / (report.sample_id + ".trace.json"),
                   tracecls::serialize_report(report));
      write_run(opts->out, "ingest",
                {{"in", opts->in.string()}, {"keep_empty", opts->keep_empty}},
                {{"corpus", fingerprint}});
    }
    std::cout << "loaded " << summary.loaded << " reports, discarded " << summary.discarded
              << " without api calls; corpus fingerprint " << fingerprint << "\n";
  });
}

void add_featurize(CLI::App& app) {
  struct Opts {
    fs::path in;
    fs::path out;
    bool keep_empty = false;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("featurize", "fit a vocabulary and emit the binary dataset");
  cmd->add_option("--in", opts->in, "directory of .trace.json reports")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_flag("--keep-empty", opts->keep_empty, "keep reports with no api calls");
  cmd->callback([opts] {
    tracecls::CorpusSummary summary;
    const auto corpus = tracecls::load_corpus(opts->in, !opts->keep_empty, &summary);
    const auto vocab = tracecls::fit_vocabulary(corpus);
    const auto dataset = tracecls::transform(corpus, vocab);
    fs::create_directories(opts->out);
    vocab.save(opts->out / "vocabulary.json");
    dataset.save(opts->out / "dataset.jsonl");
    write_run(opts->out, "featurize",
              {{"in", opts->in.string()}, {"keep_empty", opts->keep_empty}},
              {{"corpus", vocab.corpus_fingerprint()},
               {"vocabulary", vocab.fingerprint()},
               {"dataset", dataset.fingerprint()}});
    std::cout << "vocabulary of " << vocab.size() << " features over " << dataset.size()
              << " samples (" << summary.discarded << " reports discarded)\n";
  });
}

void add_select(CLI::App& app) {
  struct Opts {
    fs::path dataset;
    fs::path vocab;
    fs::path out;
    int k = 400;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("select", "rank features by mutual information");
  cmd->add_option("--dataset", opts->dataset, "dataset.jsonl or its directory")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary.json or its directory")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--k", opts->k, "selection size")->envname("TRACECLS_K");
  cmd->callback([opts] {
    const auto dataset =
        tracecls::BinaryDataset::load(resolve_input(opts->dataset, "dataset.jsonl"));
    const auto vocab =
        tracecls::FeatureVocabulary::load(resolve_input(opts->vocab, "vocabulary.json"));
    if (dataset.vocabulary_fingerprint != vocab.fingerprint())
      throw tracecls::FingerprintMismatch("dataset was built against vocabulary " +
                                          dataset.vocabulary_fingerprint +
                                          " but --vocab carries " + vocab.fingerprint());
    const auto ranking = tracecls::rank_features(dataset);
    const auto selected = tracecls::select_top(ranking, static_cast<std::size_t>(opts->k));
    fs::create_directories(opts->out);
    write_text(opts->out / "ranking.csv", tracecls::ranking_csv(ranking, vocab));
    write_text(opts->out / "breakdown.csv", tracecls::class_breakdown_csv(selected, vocab));
    ordered_json sel;
    sel["format"] = "selection/1";
    sel["vocabulary_fingerprint"] = vocab.fingerprint();
    sel["k"] = opts->k;
    sel["columns"] = selected;
    ordered_json names = ordered_json::array();
    for (tracecls::ColumnId id : selected) names.push_back(vocab.entry(id).name);
    sel["names"] = std::move(names);
    write_text(opts->out / "selected.json", sel.dump(2) + "\n");
    write_run(opts->out, "select",
              {{"dataset", opts->dataset.string()}, {"vocab", opts->vocab.string()},
               {"k", opts->k}},
              {{"vocabulary", vocab.fingerprint()}, {"dataset", dataset.fingerprint()}});
    std::cout << "ranked " << ranking.order.size() << " features, selected top " << opts->k
              << "\n";
  });
}

void add_train(CLI::App& app) {
  struct Opts {
    fs::path dataset;
    fs::path out;
    int k = 400;
    std::uint64_t seed = 0;
    ClassifierFlags flags;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("train", "select features and train one classifier");
  cmd->add_option("--dataset", opts->dataset, "dataset.jsonl or its directory")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--k", opts->k, "selection size")->envname("TRACECLS_K");
  cmd->add_option("--seed", opts->seed, "svm sample-order seed")->envname("TRACECLS_SEED");
  opts->flags.add_to(cmd);
  cmd->callback([opts] {
    const auto dataset =
        tracecls::BinaryDataset::load(resolve_input(opts->dataset, "dataset.jsonl"));
    const auto ranking = tracecls::rank_features(dataset);
    const auto selected = tracecls::select_top(ranking, static_cast<std::size_t>(opts->k));
    const auto design = tracecls::restrict_dataset(dataset, selected);

    tracecls::TrainedModel model;
    model.kind = tracecls::classifier_kind_from_string(opts->flags.classifier);
    model.vocabulary_fingerprint = dataset.vocabulary_fingerprint;
    std::string detail;
    switch (model.kind) {
      case tracecls::ClassifierKind::LogReg: {
        tracecls::LogRegOptions lr;
        lr.lambda = opts->flags.lambda;
        lr.learning_rate = opts->flags.eta;
        lr.max_iters = opts->flags.max_iters;
        lr.tol = opts->flags.tol;
        auto trained = tracecls::logreg_train(design, selected, lr);
        detail = "final cost " + std::to_string(trained.meta.final_cost) + " after " +
                 std::to_string(trained.meta.iters_run) + " iterations";
        model.model = std::move(trained);
        break;
      }
      case tracecls::ClassifierKind::Nb: {
        model.model = tracecls::nb_train(design, selected, opts->flags.alpha);
        detail = "alpha " + std::to_string(opts->flags.alpha);
        break;
      }
      case tracecls::ClassifierKind::Svm: {
        tracecls::SvmOptions sv;
        sv.cost_c = opts->flags.cost_c;
        sv.epochs = opts->flags.epochs;
        sv.seed = opts->seed;
        auto trained = tracecls::svm_train(design, selected, sv);
        detail = "objective " + std::to_string(trained.meta.final_cost) + " after " +
                 std::to_string(trained.meta.iters_run) + " epochs";
        model.model = std::move(trained);
        break;
      }
    }
    fs::create_directories(opts->out);
    tracecls::save_model(model, opts->out / "model.json");
    ordered_json config = opts->flags.echo();
    config["k"] = opts->k;
    config["dataset"] = opts->dataset.string();
    if (model.kind == tracecls::ClassifierKind::Svm) config["seed"] = opts->seed;
    write_run(opts->out, "train", std::move(config),
              {{"vocabulary", dataset.vocabulary_fingerprint},
               {"dataset", dataset.fingerprint()}});
    std::cout << "trained " << opts->flags.classifier << " on " << dataset.size()
              << " samples, k=" << opts->k << " (" << detail << ")\n";
  });
}

void add_predict(CLI::App& app) {
  struct Opts {
    fs::path model;
    fs::path vocab;
    fs::path in;
    fs::path out;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("predict", "score reports with a trained model");
  cmd->add_option("--model", opts->model, "model.json")->required();
  cmd->add_option("--vocab", opts->vocab, "vocabulary.json or its directory")->required();
  cmd->add_option("--in", opts->in, "one .trace.json file or a directory of them")->required();
  cmd->add_option("--out", opts->out, "output directory (stdout when omitted)");
  cmd->callback([opts] {
    const auto model = tracecls::load_model(opts->model);
    const auto vocab =
        tracecls::FeatureVocabulary::load(resolve_input(opts->vocab, "vocabulary.json"));
    if (model.vocabulary_fingerprint != vocab.fingerprint())
      throw tracecls::FingerprintMismatch("model was trained against vocabulary " +
                                          model.vocabulary_fingerprint +
                                          " but --vocab carries " + vocab.fingerprint());
    std::vector<tracecls::BehavioralReport> reports;
    if (fs::is_directory(opts->in)) {
      reports = tracecls::load_corpus(opts->in, /*discard_empty=*/false);
    } else {
      tracecls::ParseOptions po;
      po.allow_empty_trace = true;
      reports.push_back(tracecls::parse_report(read_text(opts->in), tracecls::kReportSchema, po));
    }
    std::string csv = "sample_id,score,label\n";
    for (const auto& report : reports) {
      const auto present = tracecls::project(report, vocab);
      const double score = tracecls::model_score(model, present);
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12g", score);
      csv += report.sample_id + ',' + buf + ',' +
             std::to_string(tracecls::model_decide(model, score)) + '\n';
    }
    if (opts->out.empty()) {
      std::cout << csv;
    } else {
      fs::create_directories(opts->out);
      write_text(opts->out / "predictions.csv", csv);
      write_run(opts->out, "predict",
                {{"model", opts->model.string()}, {"vocab", opts->vocab.string()},
                 {"in", opts->in.string()}},
                {{"vocabulary", vocab.fingerprint()}});
      std::cout << "scored " << reports.size() << " reports\n";
    }
  });
}

void add_eval(CLI::App& app) {
  struct Opts {
    fs::path dataset;
    fs::path out;
    int k = 400;
    int reps = 100;
    double train_fraction = 0.8;
    bool no_stratify = false;
    bool select_on_full = false;
    std::uint64_t seed = 0;
    int jobs = 1;
    ClassifierFlags flags;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("eval", "repeated random-split evaluation");
  cmd->add_option("--dataset", opts->dataset, "dataset.jsonl or its directory")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--k", opts->k, "selection size")->envname("TRACECLS_K");
  cmd->add_option("--reps", opts->reps, "number of random splits")->envname("TRACECLS_REPS");
  cmd->add_option("--train-fraction", opts->train_fraction, "training portion per split")
      ->envname("TRACECLS_TRAIN_FRACTION");
  cmd->add_flag("--no-stratify", opts->no_stratify, "split without per-class stratification");
  cmd->add_flag("--select-on-full", opts->select_on_full,
                "rank features once on the full dataset (leaks test rows)");
  cmd->add_option("--seed", opts->seed, "rng seed")->envname("TRACECLS_SEED");
  cmd->add_option("--jobs", opts->jobs, "parallel repetitions")->envname("TRACECLS_JOBS");
  opts->flags.add_to(cmd);
  cmd->callback([opts] {
    const auto dataset =
        tracecls::BinaryDataset::load(resolve_input(opts->dataset, "dataset.jsonl"));
    tracecls::SplitSpec split;
    split.seed = opts->seed;
    split.repetitions = opts->reps;
    split.train_fraction = opts->train_fraction;
    split.stratified = !opts->no_stratify;
    tracecls::EvalOptions eval_opts;
    eval_opts.select_on_full = opts->select_on_full;
    eval_opts.jobs = opts->jobs;
    const auto report = tracecls::repeated_split_eval(dataset, opts->flags.to_config(), split,
                                                      opts->k, eval_opts);
    fs::create_directories(opts->out);
    write_text(opts->out / "eval.json", tracecls::eval_report_to_json(report).dump(2) + "\n");
    write_text(opts->out / "metrics.csv", tracecls::eval_report_csv(report));
    write_text(opts->out / "roc.csv", tracecls::roc_csv(report.pooled_roc));
    ordered_json config = opts->flags.echo();
    config["k"] = opts->k;
    config["reps"] = opts->reps;
    config["train_fraction"] = opts->train_fraction;
    config["stratified"] = !opts->no_stratify;
    config["select_on_full"] = opts->select_on_full;
    config["seed"] = opts->seed;
    config["dataset"] = opts->dataset.string();
    write_run(opts->out, "eval", std::move(config),
              {{"vocabulary", dataset.vocabulary_fingerprint},
               {"dataset", dataset.fingerprint()}});
    std::printf("mean auc %.4f, test error %.4f, fp rate %.4f, detection %.4f over %d splits\n",
                report.summary.auc.mean, report.summary.test_error.mean,
                report.summary.fp_rate.mean, report.summary.detection_rate.mean, opts->reps);
  });
}

void add_cv(CLI::App& app) {
  struct Opts {
    fs::path dataset;
    fs::path out;
    int k = 400;
    int folds = 5;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool select_on_full = false;
    std::vector<double> grid = {2e-5, 2e-4, 2e-3, 2e-2, 2e-1};
    ClassifierFlags flags;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("cv", "cross-validated hyperparameter grid");
  cmd->add_option("--dataset", opts->dataset, "dataset.jsonl or its directory")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--k", opts->k, "selection size")->envname("TRACECLS_K");
  cmd->add_option("--folds", opts->folds, "number of folds")->envname("TRACECLS_FOLDS");
  cmd->add_option("--seed", opts->seed, "rng seed")->envname("TRACECLS_SEED");
  cmd->add_option("--jobs", opts->jobs, "parallel fold tasks")->envname("TRACECLS_JOBS");
  cmd->add_flag("--select-on-full", opts->select_on_full,
                "rank features once on the full dataset (leaks validation rows)");
  cmd->add_option("--grid", opts->grid, "hyperparameter values (lambda, C or alpha)")
      ->delimiter(',');
  opts->flags.add_to(cmd);
  cmd->callback([opts] {
    const auto dataset =
        tracecls::BinaryDataset::load(resolve_input(opts->dataset, "dataset.jsonl"));
    tracecls::EvalOptions eval_opts;
    eval_opts.select_on_full = opts->select_on_full;
    eval_opts.jobs = opts->jobs;
    const auto result = tracecls::cross_validate(dataset, opts->flags.to_config(), opts->grid,
                                                 opts->folds, opts->seed, opts->k, eval_opts);
    fs::create_directories(opts->out);
    write_text(opts->out / "cv.csv", tracecls::cv_csv(result));
    ordered_json res;
    res["format"] = "cv/1";
    res["grid"] = result.grid;
    res["mean_auc"] = result.mean_auc;
    res["best"] = result.best;
    write_text(opts->out / "cv.json", res.dump(2) + "\n");
    ordered_json config = opts->flags.echo();
    config["k"] = opts->k;
    config["folds"] = opts->folds;
    config["seed"] = opts->seed;
    config["grid"] = opts->grid;
    config["select_on_full"] = opts->select_on_full;
    config["dataset"] = opts->dataset.string();
    write_run(opts->out, "cv", std::move(config),
              {{"vocabulary", dataset.vocabulary_fingerprint},
               {"dataset", dataset.fingerprint()}});
    std::printf("best value %g\n", result.best);
  });
}

void add_loo(CLI::App& app) {
  struct Opts {
    fs::path dataset;
    fs::path out;
    int k = 400;
    double lambda = 2e-3;
    int jobs = 1;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("loo", "leave-one-family-out generalization table");
  cmd->add_option("--dataset", opts->dataset, "dataset.jsonl or its directory")->required();
  cmd->add_option("--out", opts->out, "output directory")->required();
  cmd->add_option("--k", opts->k, "selection size")->envname("TRACECLS_K");
  cmd->add_option("--lambda", opts->lambda, "logreg L2 regularization")
      ->envname("TRACECLS_LAMBDA");
  cmd->add_option("--jobs", opts->jobs, "parallel families")->envname("TRACECLS_JOBS");
  cmd->callback([opts] {
    const auto dataset =
        tracecls::BinaryDataset::load(resolve_input(opts->dataset, "dataset.jsonl"));
    const auto table = tracecls::loo_table(dataset, opts->k, opts->lambda, opts->jobs);
    fs::create_directories(opts->out);
    write_text(opts->out / "loo.csv", tracecls::loo_csv(table));
    write_run(opts->out, "loo",
              {{"k", opts->k}, {"lambda", opts->lambda}, {"dataset", opts->dataset.string()}},
              {{"vocabulary", dataset.vocabulary_fingerprint},
               {"dataset", dataset.fingerprint()}});
    std::printf("weighted average detection %.4f over %zu families\n", table.weighted_avg,
                table.rows.size());
  });
}

void add_vote(CLI::App& app) {
  struct Opts {
    fs::path in;
    fs::path out;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("vote", "majority-vote external verdicts");
  cmd->add_option("--in", opts->in, "CSV of sample_id,vendor,verdict")->required();
  cmd->add_option("--out", opts->out, "output directory (stdout when omitted)");
  cmd->callback([opts] {
    std::ifstream in(opts->in);
    if (!in) throw tracecls::IoError("cannot open " + opts->in.string());
    const auto votes = tracecls::majority_vote(tracecls::parse_verdicts_csv(in));
    const std::string csv = tracecls::votes_csv(votes);
    if (opts->out.empty()) {
      std::cout << csv;
    } else {
      fs::create_directories(opts->out);
      write_text(opts->out / "votes.csv", csv);
      write_run(opts->out, "vote", {{"in", opts->in.string()}}, ordered_json::object());
      std::cout << "labeled " << votes.size() << " samples\n";
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"behavioral ransomware classification pipeline"};
  app.require_subcommand(1);
  add_synth(app);
  add_ingest(app);
  add_featurize(app);
  add_select(app);
  add_train(app);
  add_predict(app);
  add_eval(app);
  add_cv(app);
  add_loo(app);
  add_vote(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const tracecls::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
