#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stylo/features.hpp"

namespace stylo {

enum class ModelKind : std::uint8_t { svm_poly, logreg };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct SvmParams {
  int degree = 3;
  double cost = 0.01;
  double gamma = 0.001;
  double coef0 = 100.0;
  double tolerance = 1e-3;
  /// Iteration budget per binary problem is max_passes * n_samples.
  std::size_t max_passes = 10000;
};

enum class LogRegOptimizer : std::uint8_t { lbfgs, gradient_descent };

struct LogRegParams {
  double lambda = 1.0;
  /// Initial step for gradient descent; L-BFGS starts at a unit step.
  double learning_rate = 1.0;
  std::size_t max_iters = 2000;
  /// Convergence when the largest absolute gradient component drops below this.
  double grad_tol = 1e-4;
  LogRegOptimizer optimizer = LogRegOptimizer::lbfgs;
  std::size_t history = 10;
};

/// (gamma * <x, y> + coef0) ^ degree
double poly_kernel(std::span<const double> x, std::span<const double> y, const SvmParams& p);
/// Kernel between every row of a and every row of b.
Eigen::MatrixXd poly_gram(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b,
                          const SvmParams& p);

// ---------------------------------------------------------------------------
// Binary C-SVC dual, solved by SMO with second-order working-set selection.

struct BinarySvmSolution {
  Eigen::VectorXd alpha;
  /// Decision function is sum_j alpha_j y_j K(x_j, x) + bias.
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SmoTrace {
  /// Dual objective sum(alpha) - 0.5 alpha' Q alpha after every update.
  std::vector<double> dual_objective;
};

/// `gram` is the kernel matrix of the samples, `y` holds +1/-1 labels.
BinarySvmSolution solve_binary_svm(const Eigen::Ref<const Eigen::MatrixXd>& gram, std::span<const int> y, double cost,
                                   double tolerance, std::size_t max_iterations, SmoTrace* trace = nullptr);

/// Largest violation of the KKT conditions, measured on y_i f(x_i):
/// alpha = 0 needs >= 1, alpha = C needs <= 1, free alphas need == 1.
double kkt_violation(const Eigen::Ref<const Eigen::MatrixXd>& gram, std::span<const int> y,
                     const BinarySvmSolution& sol, double cost);

// ---------------------------------------------------------------------------
// Multinomial logistic regression.

/// Sum of per-sample cross-entropy plus (lambda / 2) * ||W||^2 (intercepts are
/// not penalised). `weights` is classes x features. Gradients are written when
/// the output pointers are non-null.
double logreg_objective(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y,
                        const Eigen::Ref<const Eigen::MatrixXd>& weights, const Eigen::Ref<const Eigen::VectorXd>& intercepts,
                        double lambda, Eigen::MatrixXd* grad_weights = nullptr, Eigen::VectorXd* grad_intercepts = nullptr);

struct LogRegTrace {
  /// Objective after every accepted step (first entry is the starting point).
  std::vector<double> objective;
};

// ---------------------------------------------------------------------------
// Trained models.

struct SvmPair {
  std::size_t first = 0;   // label index voted for when the decision is > 0
  std::size_t second = 0;  // label index voted for otherwise
  std::vector<std::size_t> support;  // rows of SvmState::support_vectors
  std::vector<double> coef;          // alpha_j * y_j
  double bias = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct SvmState {
  SvmParams params;
  Eigen::MatrixXd support_vectors;
  std::vector<SvmPair> pairs;
};

struct LogRegState {
  LogRegParams params;
  Eigen::MatrixXd weights;      // classes x features
  Eigen::VectorXd intercepts;   // classes
  std::size_t iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;       // max-abs gradient component at exit
};

struct TrainedModel {
  ModelKind kind = ModelKind::svm_poly;
  std::optional<FeatureSetName> feature_set;
  std::vector<std::string> label_map;  // sorted, duplicate-free
  std::size_t dimension = 0;
  /// Input preprocessing applied by predict: sum-normalisation, then scaling.
  bool normalize = false;
  std::optional<Scaler> scaler;
  std::variant<SvmState, LogRegState> state;
};

/// One-vs-one SVMs over already-preprocessed rows.
TrainedModel train_svm(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::span<const std::string> labels,
                       const SvmParams& params = {});
/// Multinomial logistic regression over already-preprocessed rows.
TrainedModel train_logreg(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::span<const std::string> labels,
                          const LogRegParams& params = {}, LogRegTrace* trace = nullptr);

struct Prediction {
  std::string label;
  std::size_t label_index = 0;
  /// Vote counts (SVM) or class probabilities (logistic regression), in label_map order.
  std::vector<double> scores;
};

/// Applies the model's preprocessing to a raw vector.
Eigen::VectorXd preprocess(const TrainedModel& model, std::span<const double> raw);
/// Predicts from a raw feature vector (preprocessing applied internally).
Prediction predict(const TrainedModel& model, std::span<const double> raw);
Prediction predict(const TrainedModel& model, const FeatureVector& raw);
/// Predicts from a vector that is already preprocessed.
Prediction predict_preprocessed(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
/// Logits W x + b of a logistic-regression model on a preprocessed vector.
Eigen::VectorXd logreg_logits(const TrainedModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Feature set and learner for one attribution model.
struct AttributionConfig {
  ModelKind kind = ModelKind::svm_poly;
  FeatureSetName features = FeatureSetName::writeprints_static;
  SvmParams svm;
  LogRegParams logreg;

  /// Writeprints-static with the polynomial SVM.
  static AttributionConfig svm_writeprints();
  /// Koppel-512 with logistic regression.
  static AttributionConfig logreg_koppel();
  static AttributionConfig for_kind(ModelKind kind);
};

/// Normalises each raw row by its sum, fits a scaler on the result, scales,
/// and trains the configured learner. The returned model carries that
/// preprocessing so predict() accepts raw vectors.
TrainedModel fit_model(const Eigen::Ref<const Eigen::MatrixXd>& raw_rows, std::span<const std::string> labels,
                       const AttributionConfig& config);

/// Sum-normalises every row.
Eigen::MatrixXd normalize_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows);

// ---------------------------------------------------------------------------
// Serialisation: versioned JSON; doubles round-trip bit-exactly.

std::string serialize_model(const TrainedModel& model);
TrainedModel deserialize_model(std::string_view json);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
/// SHA-256 of the serialised form.
std::string model_digest(const TrainedModel& model);

}  // namespace stylo
