#include "tracecls/model_io.hpp"

#include <fstream>

#include "tracecls/errors.hpp"

namespace tracecls {

namespace {

constexpr const char* kModelFormat = "model/1";

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& arr, const char* what) {
  if (!arr.is_array()) throw SchemaError(std::string(what) + " must be an array");
  Eigen::VectorXd v(arr.size());
  Eigen::Index i = 0;
  for (const auto& x : arr) {
    if (!x.is_number()) throw SchemaError(std::string(what) + " must hold numbers");
    v[i++] = x.get<double>();
  }
  return v;
}

nlohmann::ordered_json meta_to_json(const TrainingMeta& meta) {
  nlohmann::ordered_json j;
  j["learning_rate"] = meta.learning_rate;
  j["max_iters"] = meta.max_iters;
  j["final_cost"] = meta.final_cost;
  j["iters_run"] = meta.iters_run;
  j["converged"] = meta.converged;
  return j;
}

TrainingMeta meta_from_json(const nlohmann::json& j) {
  TrainingMeta meta;
  meta.learning_rate = j.at("learning_rate").get<double>();
  meta.max_iters = j.at("max_iters").get<int>();
  meta.final_cost = j.at("final_cost").get<double>();
  meta.iters_run = j.at("iters_run").get<int>();
  meta.converged = j.at("converged").get<bool>();
  return meta;
}

std::vector<ColumnId> selected_from_json(const nlohmann::json& arr) {
  if (!arr.is_array()) throw SchemaError("selected must be an array");
  std::vector<ColumnId> ids;
  ids.reserve(arr.size());
  for (const auto& x : arr) {
    if (!x.is_number_integer()) throw SchemaError("selected must hold integers");
    ids.push_back(x.get<ColumnId>());
  }
  for (std::size_t i = 1; i < ids.size(); ++i)
    if (ids[i] <= ids[i - 1]) throw SchemaError("selected ids must be strictly ascending");
  return ids;
}

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::LogReg: return "logreg";
    case ClassifierKind::Nb: return "nb";
    case ClassifierKind::Svm: return "svm";
  }
  throw InvalidConfig("unknown classifier kind");
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "logreg") return ClassifierKind::LogReg;
  if (name == "nb") return ClassifierKind::Nb;
  if (name == "svm") return ClassifierKind::Svm;
  throw InvalidConfig("unknown classifier: " + name);
}

const std::vector<ColumnId>& TrainedModel::selected() const {
  return std::visit([](const auto& m) -> const std::vector<ColumnId>& { return m.selected; },
                    model);
}

double model_score(const TrainedModel& model, std::span<const ColumnId> present) {
  switch (model.kind) {
    case ClassifierKind::LogReg:
      return logreg_predict(std::get<LogRegModel>(model.model), present);
    case ClassifierKind::Nb:
      return nb_predict(std::get<NbModel>(model.model), present);
    case ClassifierKind::Svm:
      return svm_score(std::get<SvmModel>(model.model), present);
  }
  throw InvalidConfig("unknown classifier kind");
}

int model_decide(const TrainedModel& model, double score) {
  const double threshold = model.kind == ClassifierKind::Svm ? 0.0 : 0.5;
  return score >= threshold ? 1 : 0;
}

Eigen::VectorXd model_scores(const TrainedModel& model, const BinaryDataset& dataset) {
  if (dataset.vocabulary_fingerprint != model.vocabulary_fingerprint)
    throw FingerprintMismatch("model was trained against vocabulary " +
                              model.vocabulary_fingerprint + " but the dataset carries " +
                              dataset.vocabulary_fingerprint);
  Eigen::VectorXd scores(static_cast<Eigen::Index>(dataset.rows.size()));
  Eigen::Index i = 0;
  for (const auto& row : dataset.rows) scores[i++] = model_score(model, row.present);
  return scores;
}

nlohmann::ordered_json model_to_json(const TrainedModel& model) {
  nlohmann::ordered_json j;
  j["format"] = kModelFormat;
  j["kind"] = to_string(model.kind);
  j["vocabulary_fingerprint"] = model.vocabulary_fingerprint;
  j["selected"] = model.selected();

  nlohmann::ordered_json params;
  nlohmann::ordered_json hyper;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  switch (model.kind) {
    case ClassifierKind::LogReg: {
      const auto& m = std::get<LogRegModel>(model.model);
      params["weights"] = vector_to_json(m.weights);
      params["bias"] = m.bias;
      hyper["lambda"] = m.lambda;
      meta = meta_to_json(m.meta);
      break;
    }
    case ClassifierKind::Nb: {
      const auto& m = std::get<NbModel>(model.model);
      params["log_prior"] = {m.log_prior[0], m.log_prior[1]};
      params["log_present"] = {vector_to_json(m.log_present.row(0).transpose()),
                               vector_to_json(m.log_present.row(1).transpose())};
      params["log_absent"] = {vector_to_json(m.log_absent.row(0).transpose()),
                              vector_to_json(m.log_absent.row(1).transpose())};
      hyper["alpha"] = m.alpha;
      break;
    }
    case ClassifierKind::Svm: {
      const auto& m = std::get<SvmModel>(model.model);
      params["weights"] = vector_to_json(m.weights);
      params["bias"] = m.bias;
      hyper["cost_c"] = m.cost_c;
      meta = meta_to_json(m.meta);
      break;
    }
  }
  j["parameters"] = std::move(params);
  j["hyperparameters"] = std::move(hyper);
  j["training_meta"] = std::move(meta);
  return j;
}

TrainedModel model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != kModelFormat)
    throw SchemaError("not a model/1 file");
  TrainedModel out;
  out.kind = classifier_kind_from_string(j.at("kind").get<std::string>());
  out.vocabulary_fingerprint = j.at("vocabulary_fingerprint").get<std::string>();
  auto selected = selected_from_json(j.at("selected"));
  const auto& params = j.at("parameters");
  const auto& hyper = j.at("hyperparameters");

  switch (out.kind) {
    case ClassifierKind::LogReg: {
      LogRegModel m;
      m.selected = std::move(selected);
      m.weights = vector_from_json(params.at("weights"), "weights");
      m.bias = params.at("bias").get<double>();
      m.lambda = hyper.at("lambda").get<double>();
      m.meta = meta_from_json(j.at("training_meta"));
      if (m.weights.size() != static_cast<Eigen::Index>(m.selected.size()))
        throw SchemaError("weights do not match the selection size");
      out.model = std::move(m);
      break;
    }
    case ClassifierKind::Nb: {
      NbModel m;
      m.selected = std::move(selected);
      m.alpha = hyper.at("alpha").get<double>();
      const auto& prior = params.at("log_prior");
      if (!prior.is_array() || prior.size() != 2) throw SchemaError("log_prior must have 2 entries");
      m.log_prior[0] = prior[0].get<double>();
      m.log_prior[1] = prior[1].get<double>();
      const auto& lp = params.at("log_present");
      const auto& la = params.at("log_absent");
      if (!lp.is_array() || lp.size() != 2 || !la.is_array() || la.size() != 2)
        throw SchemaError("log_present/log_absent must have one row per class");
      const Eigen::VectorXd p0 = vector_from_json(lp[0], "log_present");
      const Eigen::VectorXd p1 = vector_from_json(lp[1], "log_present");
      const Eigen::VectorXd a0 = vector_from_json(la[0], "log_absent");
      const Eigen::VectorXd a1 = vector_from_json(la[1], "log_absent");
      const auto d = static_cast<Eigen::Index>(m.selected.size());
      if (p0.size() != d || p1.size() != d || a0.size() != d || a1.size() != d)
        throw SchemaError("conditional tables do not match the selection size");
      m.log_present.resize(2, d);
      m.log_absent.resize(2, d);
      m.log_present.row(0) = p0.transpose();
      m.log_present.row(1) = p1.transpose();
      m.log_absent.row(0) = a0.transpose();
      m.log_absent.row(1) = a1.transpose();
      out.model = std::move(m);
      break;
    }
    case ClassifierKind::Svm: {
      SvmModel m;
      m.selected = std::move(selected);
      m.weights = vector_from_json(params.at("weights"), "weights");
      m.bias = params.at("bias").get<double>();
      m.cost_c = hyper.at("cost_c").get<double>();
      m.meta = meta_from_json(j.at("training_meta"));
      if (m.weights.size() != static_cast<Eigen::Index>(m.selected.size()))
        throw SchemaError("weights do not match the selection size");
      out.model = std::move(m);
      break;
    }
  }
  return out;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace tracecls
