#pragma once

// Internal numerical kernels shared by selection and the baselines.

#include "iissqda/common.hpp"

#include <vector>

namespace iissqda::detail {

/// Column-standardized copy of a design matrix (no intercept column).
struct Standardized {
  Matrix X;
  Vector mean;
  Vector scale;
  std::vector<bool> constant;  ///< zero-variance columns; their coefficients stay 0
};

Standardized standardize(const Matrix& X, bool enabled);

struct EnetSolution {
  double intercept = 0.0;
  Vector beta;
  int iterations = 0;
  double kktResidual = 0.0;
  bool converged = false;
  std::vector<double> objectiveTrace;
};

/// Mean logistic loss n^-1 sum [-y eta + log(1 + exp(eta))].
double logistic_loss(const Vector& eta, const Vector& y);

/// Elastic-net logistic regression on a fixed (already standardized) design.
class LogisticEnet {
 public:
  LogisticEnet(const Matrix& X, const Vector& y, std::vector<bool> excluded = {});

  EnetSolution solve(double lambda1, double lambda2, const EnetSolution* warm, double tol, int maxIter) const;

  double objective(double intercept, const Vector& beta, double lambda1, double lambda2) const;
  double kktResidual(double intercept, const Vector& beta, double lambda1, double lambda2) const;
  /// max_j |n^-1 sum x_ij (y_i - ybar)| over non-excluded columns.
  double lambdaMax() const;

  Index n() const { return X_.rows(); }
  Index m() const { return X_.cols(); }

 private:
  const Matrix& X_;
  const Vector& y_;
  std::vector<bool> excluded_;
};

/// Newton's method for (optionally ridge-penalized) logistic regression on a
/// small dense design. Returns false if the iteration diverges or fails to
/// converge in maxIter steps.
bool newton_logistic(const Matrix& X, const Vector& y, double lambda2, double& intercept, Vector& beta,
                     int maxIter, double tol, int* iterations = nullptr);

/// Lasso least squares (1/2n)|y - b0 - X beta|^2 + lambda |beta|_1 on a
/// standardized design, by cyclic coordinate descent.
struct LassoSolution {
  double intercept = 0.0;
  Vector beta;
};

LassoSolution lasso_least_squares(const Matrix& X, const Vector& y, double lambda, const LassoSolution* warm,
                                  double tol = 1e-9, int maxSweeps = 10000);

}  // namespace iissqda::detail
