#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

#include "stylo/digest.hpp"
#include "stylo/error.hpp"
#include "stylo/learners.hpp"

namespace stylo {
namespace {

using nlohmann::json;

constexpr int kModelFormatVersion = 1;

std::size_t argmax_lowest(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

json to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(r));
  }
  return rows;
}

Eigen::VectorXd vector_from(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto r = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(r.size()) != cols) throw DataError("model file: ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(i), c) = r[static_cast<std::size_t>(c)];
  }
  return m;
}

}  // namespace

std::string_view to_string(ModelKind kind) { return kind == ModelKind::svm_poly ? "svm_poly" : "logreg"; }

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  if (name == "svm_poly" || name == "svm") return ModelKind::svm_poly;
  if (name == "logreg") return ModelKind::logreg;
  return std::nullopt;
}

AttributionConfig AttributionConfig::svm_writeprints() { return {}; }

AttributionConfig AttributionConfig::logreg_koppel() {
  AttributionConfig c;
  c.kind = ModelKind::logreg;
  c.features = FeatureSetName::koppel512;
  return c;
}

AttributionConfig AttributionConfig::for_kind(ModelKind kind) {
  return kind == ModelKind::svm_poly ? svm_writeprints() : logreg_koppel();
}

Eigen::MatrixXd normalize_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows) {
  Eigen::MatrixXd out = rows;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).sum();
    if (s != 0.0) out.row(i) /= s;
  }
  return out;
}

TrainedModel fit_model(const Eigen::Ref<const Eigen::MatrixXd>& raw_rows, std::span<const std::string> labels,
                       const AttributionConfig& config) {
  const Eigen::MatrixXd normalized = normalize_rows(raw_rows);
  Scaler scaler = fit_scaler(normalized);
  const Eigen::MatrixXd scaled = scaler.apply_rows(normalized);
  TrainedModel model = config.kind == ModelKind::svm_poly ? train_svm(scaled, labels, config.svm)
                                                          : train_logreg(scaled, labels, config.logreg);
  model.feature_set = config.features;
  model.normalize = true;
  model.scaler = std::move(scaler);
  return model;
}

Eigen::VectorXd preprocess(const TrainedModel& model, std::span<const double> raw) {
  if (raw.size() != model.dimension)
    throw InvalidArgument(fmt::format("predict: dimension mismatch ({} vs {})", raw.size(), model.dimension));
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  if (model.normalize) {
    const double s = x.sum();
    if (s != 0.0) x /= s;
  }
  if (model.scaler) x = model.scaler->apply(x);
  return x;
}

Eigen::VectorXd logreg_logits(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  const auto* st = std::get_if<LogRegState>(&model.state);
  if (!st) throw InvalidArgument("logreg_logits: model is not logistic regression");
  if (x.size() != st->weights.cols()) throw InvalidArgument("logreg_logits: dimension mismatch");
  return st->weights * x + st->intercepts;
}

Prediction predict_preprocessed(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != model.dimension)
    throw InvalidArgument(fmt::format("predict: dimension mismatch ({} vs {})", x.size(), model.dimension));
  Prediction out;
  const std::size_t k = model.label_map.size();
  out.scores.assign(k, 0.0);
  if (const auto* st = std::get_if<SvmState>(&model.state)) {
    Eigen::VectorXd kv(st->support_vectors.rows());
    for (Eigen::Index s = 0; s < st->support_vectors.rows(); ++s) {
      const double dot = st->support_vectors.row(s).dot(x);
      double base = st->params.gamma * dot + st->params.coef0, r = 1.0;
      for (int p = 0; p < st->params.degree; ++p) r *= base;
      kv[s] = r;
    }
    for (const auto& pair : st->pairs) {
      double dec = pair.bias;
      for (std::size_t t = 0; t < pair.support.size(); ++t) dec += pair.coef[t] * kv[static_cast<Eigen::Index>(pair.support[t])];
      out.scores[dec > 0 ? pair.first : pair.second] += 1.0;
    }
  } else {
    const Eigen::VectorXd z = logreg_logits(model, x);
    const double m = z.maxCoeff();
    const Eigen::ArrayXd e = (z.array() - m).exp();
    const double s = e.sum();
    for (std::size_t i = 0; i < k; ++i) out.scores[i] = e[static_cast<Eigen::Index>(i)] / s;
  }
  out.label_index = argmax_lowest(out.scores);
  out.label = model.label_map[out.label_index];
  return out;
}

Prediction predict(const TrainedModel& model, std::span<const double> raw) {
  return predict_preprocessed(model, preprocess(model, raw));
}

Prediction predict(const TrainedModel& model, const FeatureVector& raw) {
  if (model.feature_set && raw.spec && raw.spec->name != *model.feature_set)
    throw InvalidArgument("predict: feature set differs from the one the model was trained on");
  return predict(model, std::span<const double>(raw.values));
}

std::string serialize_model(const TrainedModel& model) {
  json j;
  j["format"] = "stylo-model";
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.kind);
  if (model.feature_set) {
    j["feature_set"] = to_string(*model.feature_set);
    j["feature_version"] = feature_spec(*model.feature_set).version;
  } else {
    j["feature_set"] = nullptr;
  }
  j["label_map"] = model.label_map;
  j["dimension"] = model.dimension;
  j["normalize"] = model.normalize;
  if (model.scaler) j["scaler"] = {{"means", to_json(model.scaler->means())}, {"stds", to_json(model.scaler->stds())}};
  else j["scaler"] = nullptr;
  if (const auto* st = std::get_if<SvmState>(&model.state)) {
    const auto& p = st->params;
    json pairs = json::array();
    for (const auto& pr : st->pairs)
      pairs.push_back({{"first", pr.first}, {"second", pr.second}, {"support", pr.support}, {"coef", pr.coef},
                       {"bias", pr.bias}, {"iterations", pr.iterations}, {"converged", pr.converged}});
    j["svm"] = {{"params", {{"degree", p.degree}, {"cost", p.cost}, {"gamma", p.gamma}, {"coef0", p.coef0},
                            {"tolerance", p.tolerance}, {"max_passes", p.max_passes}}},
                {"support_vectors", to_json(st->support_vectors)},
                {"pairs", std::move(pairs)}};
  } else {
    const auto& st2 = std::get<LogRegState>(model.state);
    const auto& p = st2.params;
    j["logreg"] = {{"params", {{"lambda", p.lambda}, {"learning_rate", p.learning_rate}, {"max_iters", p.max_iters},
                               {"grad_tol", p.grad_tol}, {"history", p.history},
                               {"optimizer", p.optimizer == LogRegOptimizer::lbfgs ? "lbfgs" : "gradient_descent"}}},
                   {"weights", to_json(st2.weights)},
                   {"intercepts", to_json(st2.intercepts)},
                   {"iterations", st2.iterations},
                   {"converged", st2.converged},
                   {"grad_norm", st2.grad_norm}};
  }
  return j.dump(1);
}

TrainedModel deserialize_model(std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "stylo-model") throw DataError("not a stylo model file");
    if (j.at("version").get<int>() != kModelFormatVersion)
      throw DataError("unsupported model format version " + j.at("version").dump());
    TrainedModel m;
    auto kind = parse_model_kind(j.at("kind").get<std::string>());
    if (!kind) throw DataError("model file: unknown kind");
    m.kind = *kind;
    if (!j.at("feature_set").is_null()) {
      auto fs = parse_feature_set(j.at("feature_set").get<std::string>());
      if (!fs) throw DataError("model file: unknown feature set");
      m.feature_set = *fs;
      if (j.contains("feature_version") && j.at("feature_version") != feature_spec(*fs).version)
        throw DataError("model file was trained on a different feature-set version");
    }
    m.label_map = j.at("label_map").get<std::vector<std::string>>();
    m.dimension = j.at("dimension").get<std::size_t>();
    m.normalize = j.at("normalize").get<bool>();
    if (!j.at("scaler").is_null())
      m.scaler = Scaler(vector_from(j.at("scaler").at("means")), vector_from(j.at("scaler").at("stds")));
    const auto cols = static_cast<Eigen::Index>(m.dimension);
    if (m.kind == ModelKind::svm_poly) {
      const json& s = j.at("svm");
      SvmState st;
      const json& p = s.at("params");
      st.params.degree = p.at("degree");
      st.params.cost = p.at("cost");
      st.params.gamma = p.at("gamma");
      st.params.coef0 = p.at("coef0");
      st.params.tolerance = p.at("tolerance");
      st.params.max_passes = p.at("max_passes");
      st.support_vectors = matrix_from(s.at("support_vectors"), cols);
      for (const auto& pr : s.at("pairs")) {
        SvmPair pair;
        pair.first = pr.at("first");
        pair.second = pr.at("second");
        pair.support = pr.at("support").get<std::vector<std::size_t>>();
        pair.coef = pr.at("coef").get<std::vector<double>>();
        pair.bias = pr.at("bias");
        pair.iterations = pr.at("iterations");
        pair.converged = pr.at("converged");
        st.pairs.push_back(std::move(pair));
      }
      m.state = std::move(st);
    } else {
      const json& s = j.at("logreg");
      LogRegState st;
      const json& p = s.at("params");
      st.params.lambda = p.at("lambda");
      st.params.learning_rate = p.at("learning_rate");
      st.params.max_iters = p.at("max_iters");
      st.params.grad_tol = p.at("grad_tol");
      st.params.history = p.at("history");
      st.params.optimizer = p.at("optimizer") == "lbfgs" ? LogRegOptimizer::lbfgs : LogRegOptimizer::gradient_descent;
      st.weights = matrix_from(s.at("weights"), cols);
      st.intercepts = vector_from(s.at("intercepts"));
      st.iterations = s.at("iterations");
      st.converged = s.at("converged");
      st.grad_norm = s.at("grad_norm");
      m.state = std::move(st);
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << serialize_model(model);
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return deserialize_model(ss.str());
}

std::string model_digest(const TrainedModel& model) { return sha256_hex(serialize_model(model)); }

}  // namespace stylo
