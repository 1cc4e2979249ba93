#include "iissqda/scenario.hpp"

#include <cmath>
#include <utility>

namespace iissqda {

namespace {

Matrix spd_inverse(const Matrix& A, const char* what) {
  if (A.rows() != A.cols()) {
    throw DimensionError(std::string(what) + " is not square");
  }
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) {
    throw SingularError(std::string(what) + " is not positive definite");
  }
  Matrix inv = llt.solve(Matrix::Identity(A.rows(), A.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

GaussianScenario GaussianScenario::fromPrecisions(std::string id, Matrix omega1, Matrix omega2, Vector delta,
                                                  double prior, double zeroTol) {
  const Index p = omega1.rows();
  if (omega2.rows() != p || omega2.cols() != p || delta.size() != p) {
    throw DimensionError("scenario: precision and delta dimensions disagree");
  }
  if (!(prior > 0.0 && prior < 1.0)) {
    throw DimensionError("scenario: prior must lie in (0, 1)");
  }
  GaussianScenario s;
  s.id = std::move(id);
  s.p = p;
  s.prior = prior;
  s.sigma1 = spd_inverse(omega1, "Omega1");
  s.sigma2 = spd_inverse(omega2, "Omega2");
  s.omega1 = std::move(omega1);
  s.omega2 = std::move(omega2);
  s.omega = s.omega2 - s.omega1;
  s.delta = std::move(delta);
  s.mu1 = s.sigma1 * s.delta;
  for (Index j = 0; j < p; ++j) {
    if (std::abs(s.delta(j)) > zeroTol) {
      s.trueMainSupport.push_back(j);
    }
  }
  for (Index j = 0; j < p; ++j) {
    bool rowNonzero = false;
    for (Index l = 0; l < p; ++l) {
      if (std::abs(s.omega(j, l)) > zeroTol) {
        rowNonzero = true;
        if (l >= j) {
          s.trueInteractionSupport.emplace_back(j, l);
        }
      }
    }
    if (rowNonzero) {
      s.trueInteractionVariables.push_back(j);
    }
  }
  return s;
}

GaussianScenario GaussianScenario::fromMean(std::string id, Matrix omega1, Matrix omega2, Vector mu1,
                                            double prior, double zeroTol) {
  if (mu1.size() != omega1.rows()) {
    throw DimensionError("scenario: mean and precision dimensions disagree");
  }
  Vector delta = omega1 * mu1;
  GaussianScenario s = fromPrecisions(std::move(id), std::move(omega1), std::move(omega2), std::move(delta),
                                      prior, zeroTol);
  s.mu1 = std::move(mu1);
  return s;
}

}  // namespace iissqda
