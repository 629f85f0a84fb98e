#include <algorithm>
#include <cmath>
#include <deque>

#include "stylo/error.hpp"
#include "stylo/learners.hpp"

namespace stylo {
namespace detail {
std::vector<std::string> make_label_map(std::span<const std::string> labels, std::vector<std::size_t>& index_of_row);
void check_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::size_t n_labels);
}  // namespace detail

double logreg_objective(const Eigen::Ref<const Eigen::MatrixXd>& x, std::span<const int> y,
                        const Eigen::Ref<const Eigen::MatrixXd>& weights, const Eigen::Ref<const Eigen::VectorXd>& intercepts,
                        double lambda, Eigen::MatrixXd* grad_weights, Eigen::VectorXd* grad_intercepts) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = weights.rows();
  if (weights.cols() != x.cols() || intercepts.size() != k || static_cast<Eigen::Index>(y.size()) != n)
    throw InvalidArgument("logreg_objective: shape mismatch");

  Eigen::MatrixXd z = x * weights.transpose();
  z.rowwise() += intercepts.transpose();
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = z.row(i).maxCoeff();
    auto e = (z.row(i).array() - m).exp();
    const double s = e.sum();
    loss += m + std::log(s) - z(i, y[i]);
    z.row(i) = e / s;  // z now holds probabilities
  }
  loss += 0.5 * lambda * weights.squaredNorm();

  if (grad_weights || grad_intercepts) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, y[i]) -= 1.0;
    if (grad_weights) *grad_weights = z.transpose() * x + lambda * weights;
    if (grad_intercepts) *grad_intercepts = z.colwise().sum().transpose();
  }
  return loss;
}

namespace {

struct Problem {
  const Eigen::Ref<const Eigen::MatrixXd>& x;
  std::span<const int> y;
  Eigen::Index k;
  double lambda;

  Eigen::Index size() const { return k * x.cols() + k; }

  // theta packs W column-major followed by b.
  double eval(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
    const Eigen::Index d = x.cols();
    Eigen::Map<const Eigen::MatrixXd> w(theta.data(), k, d);
    Eigen::Map<const Eigen::VectorXd> b(theta.data() + k * d, k);
    Eigen::MatrixXd gw;
    Eigen::VectorXd gb;
    const double f = logreg_objective(x, y, w, b, lambda, &gw, &gb);
    grad.resize(size());
    Eigen::Map<Eigen::MatrixXd>(grad.data(), k, d) = gw;
    grad.tail(k) = gb;
    return f;
  }
};

}  // namespace

TrainedModel train_logreg(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::span<const std::string> labels,
                          const LogRegParams& params, LogRegTrace* trace) {
  if (!(params.lambda >= 0)) throw InvalidArgument("logreg: lambda must be non-negative");
  if (!(params.learning_rate > 0)) throw InvalidArgument("logreg: learning_rate must be positive");
  if (!(params.grad_tol > 0)) throw InvalidArgument("logreg: grad_tol must be positive");
  detail::check_rows(rows, labels.size());
  std::vector<std::size_t> cls;
  TrainedModel model;
  model.kind = ModelKind::logreg;
  model.label_map = detail::make_label_map(labels, cls);
  model.dimension = static_cast<std::size_t>(rows.cols());
  std::vector<int> y(cls.begin(), cls.end());

  const Problem prob{rows, y, static_cast<Eigen::Index>(model.label_map.size()), params.lambda};
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(prob.size());
  Eigen::VectorXd grad;
  double f = prob.eval(theta, grad);
  if (trace) trace->objective.push_back(f);

  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> history;  // (s, y) pairs
  double step_hint = params.learning_rate;
  LogRegState state;
  state.params = params;
  constexpr double kArmijo = 1e-4;

  while (state.iterations < params.max_iters) {
    if (grad.lpNorm<Eigen::Infinity>() <= params.grad_tol) break;

    Eigen::VectorXd dir = -grad;
    double step = step_hint;
    if (params.optimizer == LogRegOptimizer::lbfgs) {
      if (history.empty()) {
        step = std::min(1.0, 1.0 / grad.norm());
      } else {
        std::vector<double> a(history.size());
        Eigen::VectorXd q = grad;
        for (std::size_t m = history.size(); m-- > 0;) {
          const auto& [s, yv] = history[m];
          a[m] = s.dot(q) / yv.dot(s);
          q -= a[m] * yv;
        }
        const auto& [s_last, y_last] = history.back();
        q *= s_last.dot(y_last) / y_last.squaredNorm();
        for (std::size_t m = 0; m < history.size(); ++m) {
          const auto& [s, yv] = history[m];
          const double beta = yv.dot(q) / yv.dot(s);
          q += (a[m] - beta) * s;
        }
        dir = -q;
        step = 1.0;
      }
      if (grad.dot(dir) >= 0) {  // not a descent direction: restart
        history.clear();
        dir = -grad;
        step = std::min(1.0, 1.0 / grad.norm());
      }
    }

    const double slope = grad.dot(dir);
    Eigen::VectorXd next, next_grad;
    double next_f = f;
    bool accepted = false;
    for (int back = 0; back < 60; ++back) {
      next = theta + step * dir;
      next_f = prob.eval(next, next_grad);
      if (std::isfinite(next_f) && next_f <= f + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    ++state.iterations;
    if (params.optimizer == LogRegOptimizer::lbfgs) {
      Eigen::VectorXd s = next - theta, yv = next_grad - grad;
      if (s.dot(yv) > 1e-12 * s.norm() * yv.norm()) {
        history.emplace_back(std::move(s), std::move(yv));
        if (history.size() > std::max<std::size_t>(1, params.history)) history.pop_front();
      }
    } else {
      step_hint = step * 2.0;
    }
    const bool stalled = f - next_f <= 1e-15 * std::max(1.0, std::abs(f));
    theta = std::move(next);
    grad = std::move(next_grad);
    f = next_f;
    if (trace) trace->objective.push_back(f);
    if (stalled && grad.lpNorm<Eigen::Infinity>() > params.grad_tol) {
      if (history.empty()) break;
      history.clear();
    }
  }

  const Eigen::Index k = prob.k, d = rows.cols();
  state.weights = Eigen::Map<const Eigen::MatrixXd>(theta.data(), k, d);
  state.intercepts = theta.tail(k);
  state.grad_norm = grad.lpNorm<Eigen::Infinity>();
  state.converged = state.grad_norm <= params.grad_tol;
  model.state = std::move(state);
  return model;
}

}  // namespace stylo
