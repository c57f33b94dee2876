#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "core/types.hpp"

namespace fmps {

using LinearOperator = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct GmresOptions {
  double tol = 1e-6;  ///< on ||b - A x|| / ||b||
  int restart = 50;
  int maxiter = 1000;  ///< total Arnoldi steps
};

struct GmresResult {
  Eigen::VectorXcd x;
  int iterations = 0;
  double residual = 0.0;  ///< recomputed explicitly from the returned x
  bool converged = false;
  std::vector<double> history;  ///< Arnoldi residual estimate after every step
};

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations. Serial and
/// deterministic. On non-convergence the best iterate seen is returned with
/// converged = false; callers decide whether that is an error.
GmresResult gmres(const LinearOperator& apply, const Eigen::VectorXcd& b, const GmresOptions& options);

}  // namespace fmps
