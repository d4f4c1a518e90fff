// abxkit/probit.hpp

// Copyright 2026 The abxkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Maximum-likelihood probit regression, P(y = 1 | x) = Phi(x'beta), by
// Newton-Raphson on the log-likelihood
//
//   l(beta) = sum_i log Phi(q_i x_i'beta),   q_i = 2 y_i - 1.
//
// Per row, with t = q eta and lambda = phi(t) / Phi(t):
//   dl/deta   = q lambda
//   d2l/deta2 = -lambda (t + lambda)      (always < 0: l is concave)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abxkit/error.hpp"
#include "abxkit/normal.hpp"

namespace abxkit {

struct ProbitOptions {
  int max_iterations = 100;
  double step_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  double separation_threshold = 15.0;  // |coefficient| that triggers the ridge restart
  double ridge = 1e-4;                 // L2 weight on non-intercept coefficients
  std::optional<std::size_t> intercept_column = 0;
};

struct ProbitFit {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd standard_errors;
  double log_likelihood = 0.0;  // unpenalized
  double gradient_norm = 0.0;   // max-norm of the (penalized) score at the estimate
  bool converged = false;
  int iterations = 0;
  bool separation_flag = false;
  bool ridge_applied = false;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& message) : Error(ErrorKind::domain, message) {}
};

/// Per-row log-likelihood contributions at beta.
inline Eigen::VectorXd probit_row_log_likelihood(const Eigen::MatrixXd& x,
                                                 const Eigen::VectorXd& y,
                                                 const Eigen::VectorXd& beta) {
  Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd out(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    out[i] = log_normal_cdf(y[i] > 0.5 ? eta[i] : -eta[i]);
  return out;
}

inline double probit_log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                    const Eigen::VectorXd& beta) {
  return probit_row_log_likelihood(x, y, beta).sum();
}

namespace detail {

struct ProbitState {
  double objective;  // penalized log-likelihood
  double log_likelihood;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd neg_hessian;
};

inline ProbitState probit_state(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const Eigen::VectorXd& beta, const Eigen::VectorXd& penalty) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd eta = x * beta;
  Eigen::VectorXd score(n), weight(n);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double q = y[i] > 0.5 ? 1.0 : -1.0;
    double t = q * eta[i];
    double lambda = inverse_mills_ratio(t);
    ll += log_normal_cdf(t);
    score[i] = q * lambda;
    weight[i] = lambda * (t + lambda);
  }
  ProbitState s;
  s.log_likelihood = ll;
  s.objective = ll - 0.5 * (penalty.array() * beta.array().square()).sum();
  s.gradient = x.transpose() * score - (penalty.array() * beta.array()).matrix();
  s.neg_hessian = x.transpose() * weight.asDiagonal() * x;
  s.neg_hessian.diagonal() += penalty;
  return s;
}

inline constexpr double kPerfectFitLogProb = 1e-6;

inline double probit_row_log_likelihood_min(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                            const Eigen::VectorXd& beta) {
  return probit_row_log_likelihood(x, y, beta).minCoeff();
}

// LDLT pivots all positive and not negligible relative to the largest.
inline bool well_conditioned(const Eigen::LDLT<Eigen::MatrixXd>& solver) {
  const Eigen::VectorXd& d = solver.vectorD();
  double hi = d.maxCoeff();
  return hi > 0.0 && d.minCoeff() > hi * 1e-13;
}

}  // namespace detail

/// Fits the probit model to design `x` (rows = observations) and binary
/// `y`. Deterministic. If a coefficient exceeds the separation threshold,
/// every row is fitted with near certainty, or y is constant, the fit restarts with a small ridge penalty and sets
/// separation_flag. Non-convergence returns the best iterate with
/// converged = false; a singular information matrix throws FitError.
inline ProbitFit fit_probit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                            const ProbitOptions& options = {},
                            std::vector<std::string> names = {}) {
  const Eigen::Index n = x.rows(), k = x.cols();
  if (k == 0) throw FitError("design has no columns");
  if (n < k) throw FitError("fewer rows than columns");
  if (y.size() != n) throw FitError("response length differs from design rows");
  bool any_one = false, any_zero = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] != 0.0 && y[i] != 1.0) throw FitError("responses must be 0 or 1");
    (y[i] == 1.0 ? any_one : any_zero) = true;
  }
  if (!x.allFinite()) throw FitError("design has non-finite entries");
  if (names.empty())
    for (Eigen::Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j));

  auto run = [&](bool ridge, ProbitFit& fit) -> bool {
    Eigen::VectorXd penalty = Eigen::VectorXd::Zero(k);
    if (ridge) {
      penalty.setConstant(options.ridge);
      if (options.intercept_column && *options.intercept_column < static_cast<std::size_t>(k))
        penalty[static_cast<Eigen::Index>(*options.intercept_column)] = 0.0;
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    auto state = detail::probit_state(x, y, beta, penalty);
    fit.converged = false;
    for (int it = 1; it <= options.max_iterations; ++it) {
      fit.iterations += 1;
      if (state.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
        fit.converged = true;
        break;
      }
      Eigen::LDLT<Eigen::MatrixXd> solver(state.neg_hessian);
      if (solver.info() != Eigen::Success || !detail::well_conditioned(solver))
        throw FitError("information matrix is singular (collinear design columns?)");
      Eigen::VectorXd step = solver.solve(state.gradient);
      if (!step.allFinite()) throw FitError("information matrix is singular");

      // Step halving keeps the penalized objective non-decreasing.
      double scale = 1.0;
      Eigen::VectorXd candidate = beta + step;
      auto next = detail::probit_state(x, y, candidate, penalty);
      // Small slack so rounding noise near the optimum cannot block a step.
      const double slack = 1e-12 * (1.0 + std::abs(state.objective));
      for (int h = 0; h < 40 && !(next.objective >= state.objective - slack); ++h) {
        scale *= 0.5;
        candidate = beta + scale * step;
        next = detail::probit_state(x, y, candidate, penalty);
      }
      double moved = step.lpNorm<Eigen::Infinity>();
      beta = candidate;
      state = std::move(next);
      if (!ridge && beta.lpNorm<Eigen::Infinity>() > options.separation_threshold)
        return false;
      if (moved < options.step_tolerance) {
        fit.converged = true;
        break;
      }
    }
    // Every row predicted with near certainty: the unpenalized optimum is
    // at infinity even if the gradient has already flattened out.
    if (!ridge && detail::probit_row_log_likelihood_min(x, y, beta) > -detail::kPerfectFitLogProb)
      return false;
    fit.coefficients = beta;
    fit.log_likelihood = state.log_likelihood;
    fit.gradient_norm = state.gradient.lpNorm<Eigen::Infinity>();
    Eigen::LDLT<Eigen::MatrixXd> solver(state.neg_hessian);
    Eigen::MatrixXd cov = solver.solve(Eigen::MatrixXd::Identity(k, k));
    fit.standard_errors = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return true;
  };

  ProbitFit fit;
  fit.names = std::move(names);
  bool degenerate = !(any_one && any_zero);
  if (degenerate || !run(false, fit)) {
    fit.separation_flag = true;
    fit.ridge_applied = true;
    run(true, fit);
  }
  return fit;
}

}  // namespace abxkit
