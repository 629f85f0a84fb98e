#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "stylo/error.hpp"
#include "stylo/learners.hpp"

namespace stylo {
namespace {

constexpr double kTau = 1e-12;

double ipow(double base, int exp) {
  double r = 1.0;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_params(const SvmParams& p) {
  if (p.degree < 1) throw InvalidArgument("svm: degree must be >= 1");
  if (!(p.cost > 0)) throw InvalidArgument("svm: cost must be positive");
  if (!(p.gamma > 0)) throw InvalidArgument("svm: gamma must be positive");
  if (!(p.tolerance > 0)) throw InvalidArgument("svm: tolerance must be positive");
}

}  // namespace

double poly_kernel(std::span<const double> x, std::span<const double> y, const SvmParams& p) {
  if (x.size() != y.size()) throw InvalidArgument(fmt::format("poly_kernel: dimension mismatch ({} vs {})", x.size(), y.size()));
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  return ipow(p.gamma * dot + p.coef0, p.degree);
}

Eigen::MatrixXd poly_gram(const Eigen::Ref<const Eigen::MatrixXd>& a, const Eigen::Ref<const Eigen::MatrixXd>& b,
                          const SvmParams& p) {
  if (a.cols() != b.cols()) throw InvalidArgument("poly_gram: dimension mismatch");
  Eigen::MatrixXd g = a * b.transpose();
  return g.unaryExpr([&](double dot) { return ipow(p.gamma * dot + p.coef0, p.degree); });
}

BinarySvmSolution solve_binary_svm(const Eigen::Ref<const Eigen::MatrixXd>& gram, std::span<const int> y, double cost,
                                   double tolerance, std::size_t max_iterations, SmoTrace* trace) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (gram.rows() != n || gram.cols() != n) throw InvalidArgument("solve_binary_svm: gram/label size mismatch");
  for (int yi : y)
    if (yi != 1 && yi != -1) throw InvalidArgument("solve_binary_svm: labels must be +1 or -1");

  auto Q = [&](Eigen::Index i, Eigen::Index j) { return y[i] * y[j] * gram(i, j); };
  BinarySvmSolution sol;
  Eigen::VectorXd& alpha = sol.alpha;
  alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd G = Eigen::VectorXd::Constant(n, -1.0);
  const double C = cost;
  auto at_upper = [&](Eigen::Index t) { return alpha[t] >= C; };
  auto at_lower = [&](Eigen::Index t) { return alpha[t] <= 0.0; };
  auto dual = [&] { return -0.5 * alpha.dot(G - Eigen::VectorXd::Ones(n)); };
  if (trace) trace->dual_objective.push_back(0.0);

  while (sol.iterations < max_iterations) {
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (y[t] == 1) {
        if (!at_upper(t) && -G[t] >= gmax) { gmax = -G[t]; i = t; }
      } else if (!at_lower(t) && G[t] >= gmax) {
        gmax = G[t];
        i = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j = -1;
    double best = std::numeric_limits<double>::infinity();
    if (i >= 0) {
      for (Eigen::Index t = 0; t < n; ++t) {
        if (y[t] == 1) {
          if (at_lower(t)) continue;
          const double grad_diff = gmax + G[t];
          gmax2 = std::max(gmax2, G[t]);
          if (grad_diff > 0) {
            double quad = gram(i, i) + gram(t, t) - 2.0 * y[i] * Q(i, t);
            const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
            if (obj <= best) { best = obj; j = t; }
          }
        } else {
          if (at_upper(t)) continue;
          const double grad_diff = gmax - G[t];
          gmax2 = std::max(gmax2, -G[t]);
          if (grad_diff > 0) {
            double quad = gram(i, i) + gram(t, t) + 2.0 * y[i] * Q(i, t);
            const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
            if (obj <= best) { best = obj; j = t; }
          }
        }
      }
    }
    if (i < 0 || j < 0 || gmax + gmax2 < tolerance) {
      sol.converged = true;
      break;
    }
    ++sol.iterations;

    const double old_i = alpha[i], old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = gram(i, i) + gram(j, j) + 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = C - diff; }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = gram(i, i) + gram(j, j) - 2.0 * Q(i, j);
      if (quad <= 0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) { alpha[i] = C; alpha[j] = sum - C; }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) { alpha[j] = C; alpha[i] = sum - C; }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (Eigen::Index k = 0; k < n; ++k) G[k] += Q(i, k) * di + Q(j, k) * dj;
    if (trace) trace->dual_objective.push_back(dual());
  }

  // Bias from free alphas, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0;
  std::size_t n_free = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (at_upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  sol.bias = -rho;
  return sol;
}

double kkt_violation(const Eigen::Ref<const Eigen::MatrixXd>& gram, std::span<const int> y, const BinarySvmSolution& sol,
                     double cost) {
  const auto n = static_cast<Eigen::Index>(y.size());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double f = sol.bias;
    for (Eigen::Index j = 0; j < n; ++j) f += sol.alpha[j] * y[j] * gram(j, i);
    const double margin = y[i] * f;
    double v;
    if (sol.alpha[i] <= 0.0) v = std::max(0.0, 1.0 - margin);
    else if (sol.alpha[i] >= cost) v = std::max(0.0, margin - 1.0);
    else v = std::abs(margin - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

namespace detail {

std::vector<std::string> make_label_map(std::span<const std::string> labels, std::vector<std::size_t>& index_of_row) {
  std::vector<std::string> map(labels.begin(), labels.end());
  std::sort(map.begin(), map.end());
  map.erase(std::unique(map.begin(), map.end()), map.end());
  if (map.size() < 2) throw InvalidArgument("training needs at least 2 distinct labels");
  index_of_row.resize(labels.size());
  for (std::size_t r = 0; r < labels.size(); ++r)
    index_of_row[r] = static_cast<std::size_t>(std::lower_bound(map.begin(), map.end(), labels[r]) - map.begin());
  return map;
}

void check_rows(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::size_t n_labels) {
  if (static_cast<std::size_t>(rows.rows()) != n_labels) throw InvalidArgument("rows and labels differ in length");
  if (!rows.allFinite()) throw InvalidArgument("training rows contain non-finite features");
}

}  // namespace detail

TrainedModel train_svm(const Eigen::Ref<const Eigen::MatrixXd>& rows, std::span<const std::string> labels,
                       const SvmParams& params) {
  check_params(params);
  detail::check_rows(rows, labels.size());
  std::vector<std::size_t> cls;
  TrainedModel model;
  model.kind = ModelKind::svm_poly;
  model.label_map = detail::make_label_map(labels, cls);
  model.dimension = static_cast<std::size_t>(rows.cols());

  const Eigen::MatrixXd gram = poly_gram(rows, rows, params);
  const std::size_t k = model.label_map.size();
  SvmState state;
  state.params = params;
  std::map<std::size_t, std::size_t> sv_slot;  // training row -> support row
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      std::vector<Eigen::Index> idx;
      std::vector<int> y;
      for (std::size_t r = 0; r < cls.size(); ++r) {
        if (cls[r] == a) { idx.push_back(static_cast<Eigen::Index>(r)); y.push_back(1); }
        else if (cls[r] == b) { idx.push_back(static_cast<Eigen::Index>(r)); y.push_back(-1); }
      }
      const Eigen::MatrixXd sub = gram(idx, idx);
      const auto sol = solve_binary_svm(sub, y, params.cost, params.tolerance, params.max_passes * idx.size());
      SvmPair pair;
      pair.first = a;
      pair.second = b;
      pair.bias = sol.bias;
      pair.iterations = sol.iterations;
      pair.converged = sol.converged;
      for (std::size_t t = 0; t < idx.size(); ++t) {
        if (sol.alpha[static_cast<Eigen::Index>(t)] <= 0.0) continue;
        const auto row = static_cast<std::size_t>(idx[t]);
        auto [it, inserted] = sv_slot.emplace(row, sv_slot.size());
        pair.support.push_back(it->second);
        pair.coef.push_back(sol.alpha[static_cast<Eigen::Index>(t)] * y[t]);
      }
      state.pairs.push_back(std::move(pair));
    }
  }
  state.support_vectors.resize(static_cast<Eigen::Index>(sv_slot.size()), rows.cols());
  for (const auto& [row, slot] : sv_slot) state.support_vectors.row(static_cast<Eigen::Index>(slot)) = rows.row(static_cast<Eigen::Index>(row));
  model.state = std::move(state);
  return model;
}

}  // namespace stylo
