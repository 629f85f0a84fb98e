#include "stylo/risk.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stylo/error.hpp"
#include "stylo/unicode.hpp"

namespace stylo {

RiskReport risk_report(const TrainedModel& model, std::string_view draft, std::size_t k) {
  if (unicode::count_words(draft) == 0) throw InvalidArgument("draft is empty");
  if (!model.feature_set) throw InvalidArgument("model has no feature set and cannot score text");
  const FeatureSpec& spec = feature_spec(*model.feature_set);
  const FeatureVector raw = extract(*model.feature_set, draft);
  const Eigen::VectorXd x = preprocess(model, raw.values);
  const Prediction pred = predict_preprocessed(model, x);

  RiskReport r;
  r.kind = model.kind;
  r.candidates = model.label_map;
  r.top_label = pred.label;
  if (model.kind == ModelKind::logreg) {
    const auto& st = std::get<LogRegState>(model.state);
    r.score_kind = "probability";
    r.scores = pred.scores;
    const auto top = static_cast<Eigen::Index>(pred.label_index);
    r.top_score = logreg_logits(model, x)(top);
    r.intercept = st.intercepts(top);
    std::vector<FeatureContribution> all(static_cast<std::size_t>(x.size()));
    for (Eigen::Index j = 0; j < x.size(); ++j)
      all[static_cast<std::size_t>(j)] = {spec.feature_names[static_cast<std::size_t>(j)], st.weights(top, j) * x(j)};
    // Stable on ties so equal contributions keep feature order.
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
      return std::abs(a.contribution) > std::abs(b.contribution);
    });
    all.resize(std::min(k, all.size()));
    r.top_features = std::move(all);
  } else {
    r.score_kind = "vote_share";
    const double total = std::accumulate(pred.scores.begin(), pred.scores.end(), 0.0);
    r.scores = pred.scores;
    if (total > 0)
      for (double& s : r.scores) s /= total;
    r.top_score = r.scores[pred.label_index];
  }
  return r;
}

RiskReport single_author_report(const std::string& author, ModelKind kind) {
  RiskReport r;
  r.kind = kind;
  r.candidates = {author};
  r.scores = {1.0};
  r.score_kind = kind == ModelKind::logreg ? "probability" : "vote_share";
  r.top_label = author;
  r.top_score = 1.0;
  return r;
}

nlohmann::json to_json(const RiskReport& r) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : r.top_features) features.push_back({{"feature", f.feature}, {"contribution", f.contribution}});
  nlohmann::json scores = nlohmann::json::object();
  for (std::size_t i = 0; i < r.candidates.size(); ++i) scores[r.candidates[i]] = r.scores[i];
  return {{"model_kind", to_string(r.kind)},
          {"pool", r.candidates},
          {"score_kind", r.score_kind},
          {"scores", scores},
          {"top_label", r.top_label},
          {"top_score", r.top_score},
          {"intercept", r.intercept},
          {"top_features", features}};
}

}  // namespace stylo
