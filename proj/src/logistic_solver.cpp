#include "logistic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iissqda::detail {
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

// log(1 + exp(eta)) without overflow.
double log1pexp(double eta) {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double sigmoid(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

constexpr double kMinWeight = 1e-5;

}  // namespace

Standardized standardize(const Matrix& X, bool enabled) {
  Standardized s;
  const Index n = X.rows();
  const Index m = X.cols();
  s.mean = Vector::Zero(m);
  s.scale = Vector::Ones(m);
  s.constant.assign(static_cast<std::size_t>(m), false);
  s.X = X;
  for (Index j = 0; j < m; ++j) {
    const double mean = X.col(j).mean();
    const double var = (X.col(j).array() - mean).square().sum() / static_cast<double>(n);
    const double sd = std::sqrt(var);
    if (!(sd > 1e-12 * (1.0 + std::abs(mean)))) {
      s.constant[static_cast<std::size_t>(j)] = true;
      s.X.col(j).setZero();
      s.mean(j) = mean;
      continue;
    }
    if (enabled) {
      s.mean(j) = mean;
      s.scale(j) = sd;
      s.X.col(j) = (X.col(j).array() - mean) / sd;
    }
  }
  return s;
}

double logistic_loss(const Vector& eta, const Vector& y) {
  double total = 0.0;
  for (Index i = 0; i < eta.size(); ++i) {
    total += -y(i) * eta(i) + log1pexp(eta(i));
  }
  return total / static_cast<double>(eta.size());
}

LogisticEnet::LogisticEnet(const Matrix& X, const Vector& y, std::vector<bool> excluded)
    : X_(X), y_(y), excluded_(std::move(excluded)) {
  if (excluded_.empty()) {
    excluded_.assign(static_cast<std::size_t>(X.cols()), false);
  }
}

double LogisticEnet::objective(double intercept, const Vector& beta, double lambda1, double lambda2) const {
  const Vector eta = (X_ * beta).array() + intercept;
  return logistic_loss(eta, y_) + lambda1 * beta.lpNorm<1>() + lambda2 * beta.squaredNorm();
}

double LogisticEnet::kktResidual(double intercept, const Vector& beta, double lambda1, double lambda2) const {
  const Vector eta = (X_ * beta).array() + intercept;
  Vector resid(eta.size());
  for (Index i = 0; i < eta.size(); ++i) {
    resid(i) = sigmoid(eta(i)) - y_(i);
  }
  const double nInv = 1.0 / static_cast<double>(n());
  double worst = std::abs(resid.sum() * nInv);
  const Vector grad = (X_.transpose() * resid) * nInv + 2.0 * lambda2 * beta;
  for (Index j = 0; j < m(); ++j) {
    if (excluded_[static_cast<std::size_t>(j)]) {
      continue;
    }
    double v = 0.0;
    if (beta(j) > 0.0) {
      v = std::abs(grad(j) + lambda1);
    } else if (beta(j) < 0.0) {
      v = std::abs(grad(j) - lambda1);
    } else {
      v = std::max(0.0, std::abs(grad(j)) - lambda1);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double LogisticEnet::lambdaMax() const {
  const double ybar = y_.mean();
  double best = 0.0;
  for (Index j = 0; j < m(); ++j) {
    if (!excluded_[static_cast<std::size_t>(j)]) {
      best = std::max(best, std::abs((X_.col(j).array() * (y_.array() - ybar)).sum()) / static_cast<double>(n()));
    }
  }
  return best;
}

EnetSolution LogisticEnet::solve(double lambda1, double lambda2, const EnetSolution* warm, double tol,
                                 int maxIter) const {
  const Index nObs = n();
  const Index mCols = m();
  const double nInv = 1.0 / static_cast<double>(nObs);
  EnetSolution sol;
  if (warm != nullptr && warm->beta.size() == mCols) {
    sol.intercept = warm->intercept;
    sol.beta = warm->beta;
  } else {
    const double ybar = std::clamp(y_.mean(), 1e-12, 1.0 - 1e-12);
    sol.intercept = std::log(ybar / (1.0 - ybar));
    sol.beta = Vector::Zero(mCols);
  }

  Vector eta = (X_ * sol.beta).array() + sol.intercept;
  double F = logistic_loss(eta, y_) + lambda1 * sol.beta.lpNorm<1>() + lambda2 * sol.beta.squaredNorm();
  sol.objectiveTrace.push_back(F);

  Vector w(nObs);
  Vector r(nObs);
  Vector xwx(mCols);
  Vector cand(mCols);
  const double innerTol = 0.1 * tol;

  for (int iter = 0; iter < maxIter; ++iter) {
    sol.kktResidual = kktResidual(sol.intercept, sol.beta, lambda1, lambda2);
    if (sol.kktResidual <= tol) {
      sol.converged = true;
      break;
    }
    sol.iterations = iter + 1;
    for (Index i = 0; i < nObs; ++i) {
      const double prob = sigmoid(eta(i));
      w(i) = std::max(prob * (1.0 - prob), kMinWeight);
      r(i) = (y_(i) - prob) / w(i);
    }
    for (Index j = 0; j < mCols; ++j) {
      xwx(j) = excluded_[static_cast<std::size_t>(j)] ? 0.0 : X_.col(j).cwiseAbs2().dot(w) * nInv;
    }
    const double wsum = w.sum();

    // Coordinate descent on the weighted least-squares model around the current point.
    double c0 = sol.intercept;
    cand = sol.beta;
    auto coordinate = [&](Index j) {
      if (excluded_[static_cast<std::size_t>(j)] || xwx(j) <= 0.0) {
        return 0.0;
      }
      const double grad = X_.col(j).dot(w.cwiseProduct(r)) * nInv + xwx(j) * cand(j);
      const double next = soft_threshold(grad, lambda1) / (xwx(j) + 2.0 * lambda2);
      const double d = next - cand(j);
      if (d != 0.0) {
        r.noalias() -= d * X_.col(j);
        cand(j) = next;
      }
      return xwx(j) * std::abs(d);
    };
    auto interceptStep = [&]() {
      const double d = w.dot(r) / wsum;
      c0 += d;
      r.array() -= d;
      return std::abs(d) * wsum * nInv;
    };
    for (int sweep = 0; sweep < 1000; ++sweep) {
      double change = interceptStep();
      for (Index j = 0; j < mCols; ++j) {
        change = std::max(change, coordinate(j));
      }
      if (change < innerTol) {
        break;
      }
      for (int inner = 0; inner < 1000; ++inner) {
        double activeChange = interceptStep();
        for (Index j = 0; j < mCols; ++j) {
          if (cand(j) != 0.0) {
            activeChange = std::max(activeChange, coordinate(j));
          }
        }
        if (activeChange < innerTol) {
          break;
        }
      }
    }

    // Backtracking along the proximal Newton direction keeps the objective monotone.
    const double d0 = c0 - sol.intercept;
    const Vector dir = cand - sol.beta;
    const Vector etaDir = (X_ * dir).array() + d0;
    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 50; ++halvings) {
      const Vector trialBeta = sol.beta + step * dir;
      const Vector trialEta = eta + step * etaDir;
      const double trialF =
          logistic_loss(trialEta, y_) + lambda1 * trialBeta.lpNorm<1>() + lambda2 * trialBeta.squaredNorm();
      if (!std::isfinite(trialF)) {
        step *= 0.5;
        continue;
      }
      if (trialF <= F) {
        sol.intercept += step * d0;
        sol.beta = trialBeta;
        eta = trialEta;
        F = trialF;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    sol.objectiveTrace.push_back(F);
    if (!accepted) {
      break;
    }
  }
  if (!sol.converged) {
    sol.kktResidual = kktResidual(sol.intercept, sol.beta, lambda1, lambda2);
    sol.converged = sol.kktResidual <= tol;
  }
  return sol;
}

bool newton_logistic(const Matrix& X, const Vector& y, double lambda2, double& intercept, Vector& beta, int maxIter,
                     double tol, int* iterations) {
  const Index n = X.rows();
  const Index m = X.cols();
  Matrix D(n, m + 1);
  D.col(0).setOnes();
  D.rightCols(m) = X;
  Vector theta(m + 1);
  theta(0) = intercept;
  theta.tail(m) = beta;
  Vector penaltyDiag = Vector::Constant(m + 1, 2.0 * lambda2);
  penaltyDiag(0) = 0.0;
  const double nInv = 1.0 / static_cast<double>(n);

  auto objective = [&](const Vector& t) {
    return logistic_loss(D * t, y) + lambda2 * t.tail(m).squaredNorm();
  };
  double F = objective(theta);
  Vector eta = D * theta;
  // Without a ridge term, a fit that classifies every row correctly means the
  // classes are separable: the gradient only looks small because the
  // coefficients are running off to infinity.
  auto accept = [&]() {
    if (lambda2 == 0.0) {
      bool separated = true;
      for (Index i = 0; i < n && separated; ++i) {
        separated = y(i) > 0.5 ? eta(i) > 0.0 : eta(i) < 0.0;
      }
      if (separated) {
        return false;
      }
    }
    intercept = theta(0);
    beta = theta.tail(m);
    return true;
  };
  for (int iter = 0; iter < maxIter; ++iter) {
    if (iterations != nullptr) {
      *iterations = iter + 1;
    }
    Vector prob(n);
    Vector wts(n);
    for (Index i = 0; i < n; ++i) {
      prob(i) = sigmoid(eta(i));
      wts(i) = prob(i) * (1.0 - prob(i));
    }
    const Vector grad = D.transpose() * (prob - y) * nInv + penaltyDiag.cwiseProduct(theta);
    if (grad.cwiseAbs().maxCoeff() < tol) {
      return accept();
    }
    Matrix H = D.transpose() * wts.asDiagonal() * D * nInv;
    H.diagonal() += penaltyDiag;
    Eigen::LDLT<Matrix> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      return false;
    }
    const Vector stepDir = -ldlt.solve(grad);
    if (!stepDir.allFinite()) {
      return false;
    }
    const double decrement = -grad.dot(stepDir);
    if (decrement < tol * tol) {
      return accept();
    }
    // Near the optimum the objective only changes at rounding level.
    const double slack = 1e-13 * (1.0 + std::abs(F));
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < 50; ++h) {
      const Vector trial = theta + step * stepDir;
      const double trialF = objective(trial);
      if (std::isfinite(trialF) && trialF <= F + slack) {
        theta = trial;
        F = trialF;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) {
      return false;
    }
    eta = D * theta;
    if (theta.cwiseAbs().maxCoeff() > 1e4) {
      return false;
    }
  }
  return false;
}

LassoSolution lasso_least_squares(const Matrix& X, const Vector& y, double lambda, const LassoSolution* warm,
                                  double tol, int maxSweeps) {
  const Index n = X.rows();
  const Index m = X.cols();
  const double nInv = 1.0 / static_cast<double>(n);
  LassoSolution sol;
  if (warm != nullptr && warm->beta.size() == m) {
    sol = *warm;
  } else {
    sol.intercept = y.mean();
    sol.beta = Vector::Zero(m);
  }
  Vector xx(m);
  for (Index j = 0; j < m; ++j) {
    xx(j) = X.col(j).squaredNorm() * nInv;
  }
  Vector r = y - X * sol.beta;
  r.array() -= sol.intercept;
  auto coordinate = [&](Index j) {
    if (xx(j) <= 0.0) {
      return 0.0;
    }
    const double grad = X.col(j).dot(r) * nInv + xx(j) * sol.beta(j);
    const double next = soft_threshold(grad, lambda) / xx(j);
    const double d = next - sol.beta(j);
    if (d != 0.0) {
      r.noalias() -= d * X.col(j);
      sol.beta(j) = next;
    }
    return xx(j) * std::abs(d);
  };
  auto interceptStep = [&]() {
    const double d = r.mean();
    sol.intercept += d;
    r.array() -= d;
    return std::abs(d);
  };
  for (int sweep = 0; sweep < maxSweeps; ++sweep) {
    double change = interceptStep();
    for (Index j = 0; j < m; ++j) {
      change = std::max(change, coordinate(j));
    }
    if (change < tol) {
      break;
    }
    for (int inner = 0; inner < maxSweeps; ++inner) {
      double activeChange = interceptStep();
      for (Index j = 0; j < m; ++j) {
        if (sol.beta(j) != 0.0) {
          activeChange = std::max(activeChange, coordinate(j));
        }
      }
      if (activeChange < tol) {
        break;
      }
    }
  }
  return sol;
}

}  // namespace iissqda::detail
