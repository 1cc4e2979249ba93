#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"

#include <span>

namespace iissqda {

/// Per-class sample moments. Covariances use the n_k - 1 denominator.
struct CovarianceSummary {
  Matrix S1;
  Matrix S2;
  Vector m1;
  Vector m2;
  double pi1 = 0.5;  ///< n1 / n
  Index n1 = 0;
  Index n2 = 0;
};

CovarianceSummary class_covariances(const LabeledDataset& data);

/// Sample covariance of the rows of X (n - 1 denominator).
Matrix sample_covariance(const Matrix& X);

/// Sparse precision estimate together with its solver diagnostics.
struct PrecisionEstimate {
  Matrix matrix;
  double penalty = 0.0;
  Index maxRowNonzeros = 0;  ///< K'_p: largest count of nonzeros in any row
  double maxAbsEntry = 0.0;
  double kktResidual = 0.0;
  int iterations = 0;
  bool converged = true;
  bool psdRepaired = false;
  std::vector<double> objectiveTrace;  ///< penalized log-likelihood after each sweep

  /// Wraps a known matrix (e.g. a population precision) without solving anything.
  /// Throws SingularError unless the matrix is symmetric positive definite.
  static PrecisionEstimate fromMatrix(Matrix omega);
};

struct GlassoOptions {
  double tol = 1e-6;  ///< KKT residual target
  int maxIter = 200;  ///< outer sweeps over columns
};

/// Off-diagonal l1-penalized Gaussian likelihood maximizer
///   log det(Omega) - tr(S Omega) - rho * sum_{j != l} |Omega_jl|
/// solved by primal block coordinate descent: each column update is an exact
/// lasso subproblem, so iterates stay positive definite and the objective never
/// decreases. If the sweep budget runs out the estimate is still returned, with
/// converged = false and the final KKT residual recorded.
PrecisionEstimate graphical_lasso(const Matrix& S, double rho, const GlassoOptions& options = {},
                                  const Matrix* warmStart = nullptr);

/// Penalized log-likelihood maximized by graphical_lasso.
double glasso_objective(const Matrix& S, const Matrix& omega, double rho);

/// Max violation of the stationarity conditions for (S, Omega, rho).
double glasso_kkt_residual(const Matrix& S, const Matrix& omega, double rho);

/// Smallest rho that makes the solution diagonal: max |S_jl| over j != l.
double glasso_penalty_max(const Matrix& S);

/// `count` log-spaced penalties from glasso_penalty_max(S) down to minRatio times it.
std::vector<double> default_penalty_grid(const Matrix& S, int count = 6, double minRatio = 0.1);

struct PenaltyCvOptions {
  int folds = 5;
  std::uint64_t seed = 1;
  GlassoOptions glasso{1e-4, 100};
};

/// K-fold choice of rho for the rows of X (one class): maximizes the held-out
/// Gaussian log-likelihood log det(Omega) - tr(S_test Omega) averaged over folds.
/// Ties go to the larger (sparser) penalty. Throws DataError when a fold has
/// fewer than two rows on either side of the split.
double select_penalty_cv(const Matrix& X, std::span<const double> grid,
                         const PenaltyCvOptions& options = {});

struct AcceptabilityReport {
  double maxAbsError = 0.0;
  Index maxRowNonzeros = 0;
  double boundRatio = 0.0;  ///< maxAbsError / (Kp^2 sqrt(log p / n))
};

AcceptabilityReport acceptability_report(const PrecisionEstimate& est, const Matrix& truth,
                                         Index Kp, Index n);

}  // namespace iissqda
