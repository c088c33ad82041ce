#pragma once

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace vesselpose::internal {

struct LmOptions {
  int max_iterations = 100;
  double gradient_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

struct LmSummary {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double gradient_norm = 0.0;
};

// Dense Levenberg-Marquardt with Marquardt scaling. The damping factor is
// divided by 10 after an accepted step and multiplied by 10 after a
// rejected one.
//
// Problem must provide
//   using Params = ...;
//   int NumParams() const;
//   void Evaluate(const Params&, Eigen::VectorXd* r, Eigen::MatrixXd* J) const;
//   Params Plus(const Params&, const Eigen::VectorXd& delta) const;
template <typename Problem>
LmSummary MinimizeLm(const Problem& problem, typename Problem::Params* params,
                     const LmOptions& options) {
  LmSummary summary;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd jacobian;
  problem.Evaluate(*params, &residuals, &jacobian);
  double cost = residuals.squaredNorm();
  summary.initial_cost = cost;
  double damping = options.initial_damping;

  for (; summary.iterations < options.max_iterations; ++summary.iterations) {
    const Eigen::VectorXd gradient = jacobian.transpose() * residuals;
    summary.gradient_norm = gradient.norm();
    if (summary.gradient_norm < options.gradient_tolerance) break;

    const Eigen::MatrixXd hessian = jacobian.transpose() * jacobian;
    bool accepted = false;
    while (!accepted && damping < 1e32) {
      Eigen::MatrixXd damped = hessian;
      for (int i = 0; i < problem.NumParams(); ++i) {
        damped(i, i) += damping * std::max(hessian(i, i), 1e-12);
      }
      const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);
      typename Problem::Params candidate = problem.Plus(*params, delta);
      Eigen::VectorXd candidate_residuals;
      problem.Evaluate(candidate, &candidate_residuals, nullptr);
      const double candidate_cost = candidate_residuals.squaredNorm();
      if (std::isfinite(candidate_cost) && candidate_cost < cost) {
        *params = candidate;
        damping *= 0.1;
        accepted = true;
      } else {
        damping *= 10.0;
      }
    }
    if (!accepted) break;  // no descent possible at machine precision
    problem.Evaluate(*params, &residuals, &jacobian);
    cost = residuals.squaredNorm();
  }
  summary.final_cost = cost;
  return summary;
}

}  // namespace vesselpose::internal
