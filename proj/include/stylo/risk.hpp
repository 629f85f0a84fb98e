#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stylo/learners.hpp"

namespace stylo {

struct FeatureContribution {
  std::string feature;
  double contribution = 0.0;
};

/// How attributable a draft is to each candidate in a model's pool.
struct RiskReport {
  ModelKind kind = ModelKind::logreg;
  std::vector<std::string> candidates;  // the pool, in label order
  /// Class probabilities (logreg) or one-vs-one vote shares (SVM).
  std::vector<double> scores;
  std::string score_kind;  // "probability" or "vote_share"
  std::string top_label;
  /// Logit of the top label (logreg) or its vote share (SVM).
  double top_score = 0.0;
  /// Intercept of the top label; with the contributions of all features it
  /// sums to top_score.
  double intercept = 0.0;
  /// weight x standardised value for the top label, by |contribution|
  /// descending. Empty for SVM models.
  std::vector<FeatureContribution> top_features;
};

/// Scores a draft against a trained model. k is clamped to the feature
/// dimension. Throws InvalidArgument for an empty draft or a model without a
/// feature set.
RiskReport risk_report(const TrainedModel& model, std::string_view draft, std::size_t k);

/// Report for a pool of one author: probability 1 and no features.
RiskReport single_author_report(const std::string& author, ModelKind kind);

nlohmann::json to_json(const RiskReport& report);

}  // namespace stylo
