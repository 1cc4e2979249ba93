#include "iissqda/precision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace iissqda {
namespace {

double soft_threshold(double u, double t) {
  if (u > t) {
    return u - t;
  }
  if (u < -t) {
    return u + t;
  }
  return 0.0;
}

double log_det_spd(const Matrix& A, bool* ok = nullptr) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    if (ok != nullptr) {
      *ok = false;
    }
    return -std::numeric_limits<double>::infinity();
  }
  if (ok != nullptr) {
    *ok = true;
  }
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

Matrix spd_inverse(const Matrix& A) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw SingularError("matrix is not positive definite");
  }
  return llt.solve(Matrix::Identity(A.rows(), A.cols()));
}

void fill_sparsity(PrecisionEstimate& est) {
  const Matrix& m = est.matrix;
  Index worst = 0;
  for (Index r = 0; r < m.rows(); ++r) {
    Index count = 0;
    for (Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) {
        ++count;
      }
    }
    worst = std::max(worst, count);
  }
  est.maxRowNonzeros = worst;
  est.maxAbsEntry = m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0;
}

// Exact minimizer of  s22 x'Mx + 2 s12'x + 2 rho |x|_1  over x (entry j fixed at 0),
// where M = W11 - w12 w12' / w22 is the inverse of Omega with row/column j removed.
// On return g holds s22 M x + s12.
void column_lasso(const Matrix& W, Index j, double s22, const Vector& s12, double rho,
                  double tol, Vector& x, Vector& g) {
  const Index p = W.rows();
  const double w22 = W(j, j);
  Vector w = W.col(j);
  w(j) = 0.0;

  // g = s22 * M x + s12, with x sparse.
  g = s12;
  double wx = 0.0;
  for (Index k = 0; k < p; ++k) {
    if (x(k) != 0.0) {
      g.noalias() += (s22 * x(k)) * W.col(k);
      wx += w(k) * x(k);
    }
  }
  g.noalias() -= (s22 * wx / w22) * w;
  g(j) = 0.0;

  auto update = [&](Index k) {
    const double q = s22 * (W(k, k) - w(k) * w(k) / w22);
    const double u = g(k) - q * x(k);
    const double next = -soft_threshold(u, rho) / q;
    const double delta = next - x(k);
    if (delta != 0.0) {
      x(k) = next;
      g.noalias() += (s22 * delta) * W.col(k);
      g.noalias() -= (s22 * delta * w(k) / w22) * w;
      g(j) = 0.0;
    }
    return q * std::abs(delta);
  };

  const int maxSweeps = 10000;
  for (int sweep = 0; sweep < maxSweeps; ++sweep) {
    double change = 0.0;
    for (Index k = 0; k < p; ++k) {
      if (k != j) {
        change = std::max(change, update(k));
      }
    }
    if (change < tol) {
      break;
    }
    // Cycle on the current support until it settles, then re-check everything.
    for (int inner = 0; inner < maxSweeps; ++inner) {
      double activeChange = 0.0;
      for (Index k = 0; k < p; ++k) {
        if (k != j && x(k) != 0.0) {
          activeChange = std::max(activeChange, update(k));
        }
      }
      if (activeChange < tol) {
        break;
      }
    }
  }
}

}  // namespace

Matrix sample_covariance(const Matrix& X) {
  if (X.rows() < 2) {
    throw DataError("covariance needs at least 2 rows");
  }
  const Vector mean = X.colwise().mean();
  const Matrix centered = X.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);
}

CovarianceSummary class_covariances(const LabeledDataset& data) {
  CovarianceSummary out;
  const Matrix x1 = data.classRows(1);
  const Matrix x2 = data.classRows(2);
  if (x1.rows() < 2 || x2.rows() < 2) {
    throw DataError("class_covariances: degenerate class size");
  }
  out.m1 = x1.colwise().mean();
  out.m2 = x2.colwise().mean();
  out.S1 = sample_covariance(x1);
  out.S2 = sample_covariance(x2);
  out.n1 = x1.rows();
  out.n2 = x2.rows();
  out.pi1 = static_cast<double>(out.n1) / static_cast<double>(data.n());
  return out;
}

PrecisionEstimate PrecisionEstimate::fromMatrix(Matrix omega) {
  if (omega.rows() != omega.cols()) {
    throw DimensionError("precision matrix must be square");
  }
  if ((omega - omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + omega.cwiseAbs().maxCoeff())) {
    throw SingularError("precision matrix is not symmetric");
  }
  Eigen::LLT<Matrix> llt(omega);
  if (llt.info() != Eigen::Success) {
    throw SingularError("precision matrix is not positive definite");
  }
  PrecisionEstimate est;
  est.matrix = std::move(omega);
  fill_sparsity(est);
  return est;
}

double glasso_objective(const Matrix& S, const Matrix& omega, double rho) {
  const double offL1 = omega.cwiseAbs().sum() - omega.diagonal().cwiseAbs().sum();
  return log_det_spd(omega) - (S.cwiseProduct(omega)).sum() - rho * offL1;
}

double glasso_kkt_residual(const Matrix& S, const Matrix& omega, double rho) {
  const Matrix W = spd_inverse(omega);
  const Index p = S.rows();
  double worst = 0.0;
  for (Index c = 0; c < p; ++c) {
    for (Index r = 0; r < p; ++r) {
      const double diff = W(r, c) - S(r, c);
      double v = 0.0;
      if (r == c) {
        v = std::abs(diff);
      } else if (omega(r, c) > 0.0) {
        v = std::abs(diff - rho);
      } else if (omega(r, c) < 0.0) {
        v = std::abs(diff + rho);
      } else {
        v = std::max(0.0, std::abs(diff) - rho);
      }
      worst = std::max(worst, v);
    }
  }
  return worst;
}

double glasso_penalty_max(const Matrix& S) {
  double best = 0.0;
  for (Index c = 0; c < S.cols(); ++c) {
    for (Index r = 0; r < S.rows(); ++r) {
      if (r != c) {
        best = std::max(best, std::abs(S(r, c)));
      }
    }
  }
  return best;
}

std::vector<double> default_penalty_grid(const Matrix& S, int count, double minRatio) {
  double top = glasso_penalty_max(S);
  if (top <= 0.0) {
    top = 1e-3 * std::max(1e-12, S.diagonal().mean());
  }
  std::vector<double> grid;
  if (count <= 1) {
    grid.push_back(top);
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(top * std::pow(minRatio, t));
  }
  return grid;
}

PrecisionEstimate graphical_lasso(const Matrix& Sin, double rho, const GlassoOptions& options,
                                  const Matrix* warmStart) {
  if (Sin.rows() != Sin.cols() || Sin.rows() == 0) {
    throw DimensionError("graphical_lasso: S must be square and nonempty");
  }
  if (!(rho > 0.0)) {
    throw DimensionError("graphical_lasso: rho must be positive");
  }
  const Index p = Sin.rows();
  Matrix S = 0.5 * (Sin + Sin.transpose());
  PrecisionEstimate est;
  est.penalty = rho;

  const double minEig = Eigen::SelfAdjointEigenSolver<Matrix>(S, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (minEig < 1e-10) {
    const double eps = 1e-8 * S.trace() / static_cast<double>(p);
    S.diagonal().array() += std::max(eps, 1e-12);
    est.psdRepaired = true;
  }
  if ((S.diagonal().array() <= 0.0).any()) {
    throw SingularError("graphical_lasso: covariance has a non-positive diagonal entry");
  }

  Matrix omega;
  if (warmStart != nullptr && warmStart->rows() == p && Eigen::LLT<Matrix>(*warmStart).info() == Eigen::Success) {
    omega = *warmStart;
  } else {
    omega = S.diagonal().cwiseInverse().asDiagonal();
  }
  Matrix W = spd_inverse(omega);

  est.objectiveTrace.push_back(glasso_objective(S, omega, rho));
  est.converged = false;
  const double innerTol = 1e-3 * options.tol;
  Vector x(p);
  Vector g(p);
  Vector s12(p);
  for (int iter = 0; iter < options.maxIter; ++iter) {
    for (Index j = 0; j < p; ++j) {
      const double s22 = S(j, j);
      s12 = S.col(j);
      s12(j) = 0.0;
      x = omega.col(j);
      x(j) = 0.0;
      column_lasso(W, j, s22, s12, rho, innerTol, x, g);

      // u = M x, where M is the inverse of the block with row/column j removed.
      Vector u = (g - s12) / s22;
      u(j) = 0.0;
      const double gamma = 1.0 / s22;
      omega.col(j) = x;
      omega.row(j) = x.transpose();
      omega(j, j) = gamma + x.dot(u);

      Vector w = W.col(j);
      const double w22 = W(j, j);
      w(j) = 0.0;
      W.noalias() -= (w / w22) * w.transpose();
      W.noalias() += (s22 * u) * u.transpose();
      W.col(j) = -s22 * u;
      W.row(j) = -s22 * u.transpose();
      W(j, j) = s22;
    }
    est.iterations = iter + 1;
    W = spd_inverse(omega);
    est.objectiveTrace.push_back(glasso_objective(S, omega, rho));
    est.kktResidual = glasso_kkt_residual(S, omega, rho);
    if (est.kktResidual <= options.tol) {
      est.converged = true;
      break;
    }
  }
  if (est.iterations == 0) {
    est.kktResidual = glasso_kkt_residual(S, omega, rho);
    est.converged = est.kktResidual <= options.tol;
  }
  est.matrix = std::move(omega);
  fill_sparsity(est);
  return est;
}

double select_penalty_cv(const Matrix& X, std::span<const double> grid, const PenaltyCvOptions& options) {
  if (grid.empty()) {
    throw DimensionError("select_penalty_cv: empty penalty grid");
  }
  if (options.folds < 2) {
    throw DimensionError("select_penalty_cv: need at least 2 folds");
  }
  if (grid.size() == 1) {
    return grid.front();
  }
  const Index n = X.rows();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(options.seed);
  std::shuffle(order.begin(), order.end(), rng);

  // Visit penalties from largest to smallest so each solve warm-starts from a sparser one.
  std::vector<std::size_t> byPenalty(grid.size());
  std::iota(byPenalty.begin(), byPenalty.end(), std::size_t{0});
  std::sort(byPenalty.begin(), byPenalty.end(), [&](std::size_t a, std::size_t b) { return grid[a] > grid[b]; });

  std::vector<double> score(grid.size(), 0.0);
  for (int fold = 0; fold < options.folds; ++fold) {
    std::vector<Index> train;
    std::vector<Index> test;
    for (Index pos = 0; pos < n; ++pos) {
      (pos % options.folds == fold ? test : train).push_back(order[static_cast<std::size_t>(pos)]);
    }
    if (train.size() < 2 || test.size() < 2) {
      throw DataError("select_penalty_cv: fold " + std::to_string(fold) + " is degenerate");
    }
    Matrix xtr(static_cast<Index>(train.size()), X.cols());
    Matrix xte(static_cast<Index>(test.size()), X.cols());
    for (std::size_t r = 0; r < train.size(); ++r) {
      xtr.row(static_cast<Index>(r)) = X.row(train[r]);
    }
    for (std::size_t r = 0; r < test.size(); ++r) {
      xte.row(static_cast<Index>(r)) = X.row(test[r]);
    }
    const Vector mean = xtr.colwise().mean();
    const Matrix Str = sample_covariance(xtr);
    const Matrix centered = xte.rowwise() - mean.transpose();
    const Matrix Ste = centered.transpose() * centered / static_cast<double>(xte.rows());

    Matrix previous;
    for (std::size_t idx : byPenalty) {
      const PrecisionEstimate est =
          graphical_lasso(Str, grid[idx], options.glasso, previous.size() > 0 ? &previous : nullptr);
      score[idx] += log_det_spd(est.matrix) - Ste.cwiseProduct(est.matrix).sum();
      previous = est.matrix;
    }
  }

  std::size_t best = byPenalty.front();
  for (std::size_t idx : byPenalty) {
    const double tolerance = 1e-10 * (1.0 + std::abs(score[best]));
    if (score[idx] > score[best] + tolerance) {
      best = idx;
    } else if (std::abs(score[idx] - score[best]) <= tolerance && grid[idx] > grid[best]) {
      best = idx;
    }
  }
  return grid[best];
}

AcceptabilityReport acceptability_report(const PrecisionEstimate& est, const Matrix& truth, Index Kp, Index n) {
  if (est.matrix.rows() != truth.rows() || est.matrix.cols() != truth.cols()) {
    throw DimensionError("acceptability_report: dimension mismatch");
  }
  AcceptabilityReport report;
  report.maxAbsError = (est.matrix - truth).cwiseAbs().maxCoeff();
  report.maxRowNonzeros = est.maxRowNonzeros;
  const double p = static_cast<double>(truth.rows());
  const double scale = static_cast<double>(Kp * Kp) * std::sqrt(std::log(p) / static_cast<double>(n));
  report.boundRatio = scale > 0.0 ? report.maxAbsError / scale : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace iissqda
