#include "iissqda/baselines.hpp"

#include "logistic_solver.hpp"

#include <algorithm>
#include <cmath>

namespace iissqda {

QuadraticClassifier plr_baseline(const LabeledDataset& data, PlrBasis basis, const PlrOptions& options) {
  const Index p = data.p();
  if (basis == PlrBasis::AllInteractions && augmented_dimension(p) > options.maxAugmentedDimension &&
      !options.allowLargeBasis) {
    throw BudgetError("PLR2 needs " + std::to_string(augmented_dimension(p)) +
                      " augmented columns, above the limit of " + std::to_string(options.maxAugmentedDimension) +
                      "; raise the limit or allow large bases explicitly");
  }
  const ReducedIndexSet reduced = basis == PlrBasis::MainsOnly ? ReducedIndexSet::mainsOnly(p) : ReducedIndexSet::full(p);
  ElasticNetConfig base = options.selection;
  base.grid.lambda2Ratios = {0.0};
  return tune_fit_refit(data, reduced, base, options.seed, options.refit).final;
}

namespace {

constexpr double kSaturation = 1e-3;
// Coordinate-descent stopping rule, relative to the response variance.
constexpr double kLassoTol = 1e-7;

struct LassoPath {
  std::vector<double> lambda;
  std::vector<double> cvMean;
  std::vector<double> cvSe;
};

double mean_squared_error(const Matrix& X, const Vector& y, const detail::LassoSolution& sol) {
  const Vector r = (y - X * sol.beta).array() - sol.intercept;
  return r.squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

DiscriminantRule dsda_baseline(const LabeledDataset& data, const DsdaOptions& options) {
  const Index n = data.n();
  const Index p = data.p();
  const double nd = static_cast<double>(n);
  const double n1 = static_cast<double>(data.n1());
  const double n2 = static_cast<double>(data.n2());
  Vector y(n);
  for (Index i = 0; i < n; ++i) {
    y(i) = data.labels()[static_cast<std::size_t>(i)] == 1 ? nd / n1 : -nd / n2;
  }
  const detail::Standardized st = detail::standardize(data.features(), true);

  double top = 0.0;
  const Vector yc = y.array() - y.mean();
  for (Index j = 0; j < p; ++j) {
    top = std::max(top, std::abs(st.X.col(j).dot(yc)) / nd);
  }
  LassoPath path;
  const int count = std::max(1, options.nLambda);
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(count - 1);
    path.lambda.push_back(top * std::pow(options.minRatio, t));
  }

  std::size_t chosen = 0;
  if (top > 0.0 && count > 1) {
    const std::vector<int> fold = stratified_folds(data, options.folds, options.seed);
    std::vector<std::vector<double>> errors(path.lambda.size());
    std::size_t reached = path.lambda.size();
    for (int f = 0; f < options.folds; ++f) {
      std::vector<Index> train;
      std::vector<Index> test;
      for (Index i = 0; i < n; ++i) {
        (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
      }
      Matrix xtr(static_cast<Index>(train.size()), p);
      Matrix xte(static_cast<Index>(test.size()), p);
      Vector ytr(static_cast<Index>(train.size()));
      Vector yte(static_cast<Index>(test.size()));
      for (std::size_t r = 0; r < train.size(); ++r) {
        xtr.row(static_cast<Index>(r)) = data.features().row(train[r]);
        ytr(static_cast<Index>(r)) = y(train[r]);
      }
      for (std::size_t r = 0; r < test.size(); ++r) {
        xte.row(static_cast<Index>(r)) = data.features().row(test[r]);
        yte(static_cast<Index>(r)) = y(test[r]);
      }
      const detail::Standardized sf = detail::standardize(xtr, true);
      for (Index j = 0; j < p; ++j) {
        if (sf.constant[static_cast<std::size_t>(j)]) {
          xte.col(j).setZero();
        } else {
          xte.col(j) = (xte.col(j).array() - sf.mean(j)) / sf.scale(j);
        }
      }
      detail::LassoSolution warm;
      bool haveWarm = false;
      const double ytrVar = (ytr.array() - ytr.mean()).square().mean();
      for (std::size_t k = 0; k < reached; ++k) {
        warm = detail::lasso_least_squares(sf.X, ytr, path.lambda[k], haveWarm ? &warm : nullptr,
                                           kLassoTol * ytrVar);
        haveWarm = true;
        errors[k].push_back(mean_squared_error(xte, yte, warm));
        // Once the fold fit is saturated, the rest of the path only chases
        // interpolation and costs most of the run time when p >= n.
        if (mean_squared_error(sf.X, ytr, warm) < kSaturation * ytrVar) {
          reached = k + 1;
        }
      }
    }
    errors.resize(reached);
    path.lambda.resize(reached);
    for (const auto& e : errors) {
      double mean = 0.0;
      for (double v : e) {
        mean += v;
      }
      mean /= static_cast<double>(e.size());
      double var = 0.0;
      for (double v : e) {
        var += (v - mean) * (v - mean);
      }
      var /= static_cast<double>(e.size() - 1);
      path.cvMean.push_back(mean);
      path.cvSe.push_back(std::sqrt(var / static_cast<double>(e.size())));
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < path.cvMean.size(); ++k) {
      if (path.cvMean[k] < path.cvMean[best]) {
        best = k;
      }
    }
    chosen = best;
    if (options.oneStandardError) {
      const double limit = path.cvMean[best] + path.cvSe[best];
      for (std::size_t k = 0; k <= best; ++k) {
        if (path.cvMean[k] <= limit) {
          chosen = k;
          break;
        }
      }
    }
  }

  const double yVar = (y.array() - y.mean()).square().mean();
  // Fit along the full-data path down to the chosen penalty (warm starts).
  detail::LassoSolution fit;
  fit.intercept = y.mean();
  fit.beta = Vector::Zero(p);
  for (std::size_t k = 0; k <= chosen && top > 0.0; ++k) {
    fit = detail::lasso_least_squares(st.X, y, path.lambda[k], &fit, kLassoTol * yVar);
  }

  IndexList support;
  for (Index j = 0; j < p; ++j) {
    if (fit.beta(j) != 0.0) {
      support.push_back(j);
    }
  }
  Vector beta = Vector::Zero(p);
  for (Index j : support) {
    beta(j) = fit.beta(j) / st.scale(j);
  }
  const Index k = static_cast<Index>(support.size());
  if (options.refit && k > 0 && k < n - 1) {
    Matrix D(n, k + 1);
    D.col(0).setOnes();
    for (Index c = 0; c < k; ++c) {
      D.col(c + 1) = data.features().col(support[static_cast<std::size_t>(c)]);
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(D);
    qr.setThreshold(1e-10);
    if (qr.rank() == D.cols()) {
      const Vector coef = qr.solve(y);
      for (Index c = 0; c < k; ++c) {
        beta(support[static_cast<std::size_t>(c)]) = coef(c + 1);
      }
    }
  }

  DiscriminantRule rule;
  rule.delta = Vector::Zero(p);
  const double logOdds = std::log(n1 / n2);
  rule.zeta = logOdds;
  if (k == 0) {
    return rule;
  }
  const Vector s = data.features() * beta;
  double s1 = 0.0;
  double s2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    (data.labels()[static_cast<std::size_t>(i)] == 1 ? s1 : s2) += s(i);
  }
  s1 /= n1;
  s2 /= n2;
  double ss = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double c = data.labels()[static_cast<std::size_t>(i)] == 1 ? s1 : s2;
    ss += (s(i) - c) * (s(i) - c);
  }
  const double v = ss / (nd - 2.0);
  if (!(v > 0.0) || s1 == s2) {
    return rule;
  }
  const double gap = s1 - s2;
  rule.delta = beta * (gap / v);
  rule.zeta = -0.5 * (s1 + s2) * gap / v + logOdds;
  return rule;
}

}  // namespace iissqda
