#include "iissqda/selection.hpp"

#include "logistic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace iissqda {

std::string to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::Penalized:
      return "penalized";
    case Provenance::Refit:
      return "refit";
    case Provenance::Oracle:
      return "oracle";
    case Provenance::Bayes:
      return "bayes";
    case Provenance::Plugin:
      return "plugin";
  }
  return "penalized";
}

Provenance parse_provenance(const std::string& text) {
  for (Provenance p : {Provenance::Penalized, Provenance::Refit, Provenance::Oracle, Provenance::Bayes,
                       Provenance::Plugin}) {
    if (to_string(p) == text) {
      return p;
    }
  }
  throw DataError("unknown provenance '" + text + "'");
}

std::string to_string(CvCriterion criterion) {
  return criterion == CvCriterion::Deviance ? "deviance" : "misclassification";
}

CvCriterion parse_cv_criterion(const std::string& text) {
  if (text == "deviance") {
    return CvCriterion::Deviance;
  }
  if (text == "misclassification") {
    return CvCriterion::Misclassification;
  }
  throw DataError("unknown CV criterion '" + text + "'");
}

QuadraticClassifier QuadraticClassifier::fromCoefficients(Index p, const IndexList& columns, const Vector& values,
                                                          Provenance provenance) {
  if (static_cast<Index>(columns.size()) != values.size()) {
    throw DimensionError("fromCoefficients: column and value counts differ");
  }
  QuadraticClassifier c;
  c.p = p;
  c.provenance = provenance;
  c.theta = Vector::Zero(augmented_dimension(p));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const Index idx = columns[k];
    if (idx < 0 || idx >= c.theta.size()) {
      throw DimensionError("fromCoefficients: augmented index out of range");
    }
    c.theta(idx) = values(static_cast<Index>(k));
  }
  if (!c.theta.allFinite()) {
    throw ConvergenceError("classifier coefficients are not finite");
  }
  for (Index idx = 0; idx < c.theta.size(); ++idx) {
    if (c.theta(idx) != 0.0) {
      c.activeSet.push_back(idx);
    }
  }
  c.interceptIncluded = c.theta(0) != 0.0;
  return c;
}

double QuadraticClassifier::score(const Vector& z) const {
  if (z.size() != p) {
    throw DimensionError("classifier expects " + std::to_string(p) + " features, got " + std::to_string(z.size()));
  }
  const AugmentedIndexMap map(p);
  double s = 0.0;
  for (Index idx : activeSet) {
    const Term t = map.term(idx);
    switch (t.kind) {
      case TermKind::Intercept:
        s += theta(idx);
        break;
      case TermKind::Main:
        s += theta(idx) * z(t.first);
        break;
      case TermKind::Interaction:
        s += theta(idx) * z(t.first) * z(t.second);
        break;
    }
  }
  return s;
}

Vector QuadraticClassifier::scores(const Matrix& Z) const {
  if (Z.cols() != p) {
    throw DimensionError("classifier expects " + std::to_string(p) + " features, got " + std::to_string(Z.cols()));
  }
  const AugmentedIndexMap map(p);
  Vector s = Vector::Zero(Z.rows());
  for (Index idx : activeSet) {
    const Term t = map.term(idx);
    switch (t.kind) {
      case TermKind::Intercept:
        s.array() += theta(idx);
        break;
      case TermKind::Main:
        s.noalias() += theta(idx) * Z.col(t.first);
        break;
      case TermKind::Interaction:
        s.array() += theta(idx) * Z.col(t.first).array() * Z.col(t.second).array();
        break;
    }
  }
  return s;
}

IndexList QuadraticClassifier::activeTerms() const {
  IndexList out;
  for (Index idx : activeSet) {
    if (idx != 0) {
      out.push_back(idx);
    }
  }
  return out;
}

namespace {

// Penalized fit on standardized columns, mapped back to the original scale.
QuadraticClassifier back_transform(Index p, const IndexList& columns, const detail::Standardized& st,
                                   double intercept, const Vector& beta, Provenance provenance) {
  Vector values(static_cast<Index>(columns.size()));
  double b0 = intercept;
  Index k = 0;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] == 0) {
      continue;
    }
    const double coef = st.constant[static_cast<std::size_t>(k)] ? 0.0 : beta(k) / st.scale(k);
    b0 -= coef * (st.constant[static_cast<std::size_t>(k)] ? 0.0 : st.mean(k));
    values(static_cast<Index>(c)) = coef;
    ++k;
  }
  // The intercept sits at position 0 when present in `columns`.
  if (!columns.empty() && columns.front() == 0) {
    values(0) = b0;
  }
  return QuadraticClassifier::fromCoefficients(p, columns, values, provenance);
}

double fold_criterion(const Vector& eta, const Vector& y, CvCriterion criterion) {
  if (criterion == CvCriterion::Deviance) {
    return 2.0 * detail::logistic_loss(eta, y);
  }
  Index wrong = 0;
  for (Index i = 0; i < eta.size(); ++i) {
    const bool predictOne = eta(i) > 0.0;
    if (predictOne != (y(i) > 0.5)) {
      ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(eta.size());
}

}  // namespace

QuadraticClassifier fit_elastic_net_logistic(const LabeledDataset& data, const ReducedIndexSet& reduced,
                                             const ElasticNetConfig& config) {
  if (reduced.p() != data.p()) {
    throw DimensionError("fit_elastic_net_logistic: reduced index set built for a different p");
  }
  if (config.lambda1 < 0.0 || config.lambda2 < 0.0 || !(config.tol > 0.0)) {
    throw DimensionError("fit_elastic_net_logistic: penalties must be >= 0 and tol > 0");
  }
  const Matrix X = reduced_design(data.features(), reduced);
  const Vector y = data.response();
  const detail::Standardized st = detail::standardize(X, config.standardize);
  const detail::LogisticEnet solver(st.X, y, st.constant);
  const detail::EnetSolution sol = solver.solve(config.lambda1, config.lambda2, nullptr, config.tol, config.maxIter);
  if (!std::isfinite(sol.intercept) || !sol.beta.allFinite()) {
    throw ConvergenceError("elastic-net logistic fit produced non-finite coefficients");
  }
  QuadraticClassifier out =
      back_transform(data.p(), reduced.activeColumns(), st, sol.intercept, sol.beta, Provenance::Penalized);
  out.lambda1 = config.lambda1;
  out.lambda2 = config.lambda2;
  out.diagnostics.kktResidual = sol.kktResidual;
  out.diagnostics.iterations = sol.iterations;
  out.diagnostics.converged = sol.converged;
  out.diagnostics.objectiveTrace = sol.objectiveTrace;
  return out;
}

double lambda1_max(const LabeledDataset& data, const ReducedIndexSet& reduced, bool standardize) {
  const Matrix X = reduced_design(data.features(), reduced);
  const Vector y = data.response();
  const detail::Standardized st = detail::standardize(X, standardize);
  return detail::LogisticEnet(st.X, y, st.constant).lambdaMax();
}

CvGrid default_cv_grid(const LabeledDataset& data, const ReducedIndexSet& reduced, const LambdaGridSpec& spec,
                       bool standardize) {
  CvGrid grid;
  double top = lambda1_max(data, reduced, standardize);
  if (!(top > 0.0)) {
    top = 1e-6;
  }
  const int count = std::max(1, spec.nLambda);
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    grid.lambda1.push_back(top * std::pow(spec.minRatio, t));
  }
  grid.lambda2 = spec.lambda2Ratios.empty() ? std::vector<double>{0.0} : spec.lambda2Ratios;
  grid.lambda2Relative = true;
  return grid;
}

std::vector<int> stratified_folds(const LabeledDataset& data, int folds, std::uint64_t seed) {
  if (folds < 2) {
    throw DimensionError("cross-validation needs at least 2 folds");
  }
  if (data.n1() < folds || data.n2() < folds) {
    throw DataError("fold degeneracy: a class has fewer rows (n1=" + std::to_string(data.n1()) +
                    ", n2=" + std::to_string(data.n2()) + ") than folds (" + std::to_string(folds) + ")");
  }
  std::vector<int> assignment(static_cast<std::size_t>(data.n()), 0);
  std::mt19937_64 rng(seed);
  int position = 0;
  for (int k = 1; k <= 2; ++k) {
    std::vector<Index> rows;
    for (Index i = 0; i < data.n(); ++i) {
      if (data.labels()[static_cast<std::size_t>(i)] == k) {
        rows.push_back(i);
      }
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    for (Index i : rows) {
      assignment[static_cast<std::size_t>(i)] = position % folds;
      ++position;
    }
  }
  return assignment;
}

ElasticNetConfig cv_tune(const LabeledDataset& data, const ReducedIndexSet& reduced, const CvGrid& grid,
                         const ElasticNetConfig& base, std::uint64_t seed) {
  if (grid.lambda1.empty() || grid.lambda2.empty()) {
    throw DimensionError("cv_tune: empty tuning grid");
  }
  ElasticNetConfig chosen = base;
  if (grid.lambda1.size() == 1 && grid.lambda2.size() == 1) {
    chosen.lambda1 = grid.lambda1.front();
    chosen.lambda2 = grid.lambda2Relative ? grid.lambda2.front() * chosen.lambda1 : grid.lambda2.front();
    return chosen;
  }
  const std::vector<int> fold = stratified_folds(data, base.folds, seed);
  const Matrix X = reduced_design(data.features(), reduced);
  const Vector y = data.response();

  std::vector<std::size_t> order1(grid.lambda1.size());
  std::iota(order1.begin(), order1.end(), std::size_t{0});
  std::sort(order1.begin(), order1.end(),
            [&](std::size_t a, std::size_t b) { return grid.lambda1[a] > grid.lambda1[b]; });

  const std::size_t n1 = grid.lambda1.size();
  const std::size_t n2 = grid.lambda2.size();
  std::vector<double> total(n1 * n2, 0.0);
  const double cvTol = std::max(base.tol, 1e-5);

  for (int f = 0; f < base.folds; ++f) {
    std::vector<Index> train;
    std::vector<Index> test;
    for (Index i = 0; i < data.n(); ++i) {
      (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    }
    Matrix xtr(static_cast<Index>(train.size()), X.cols());
    Matrix xte(static_cast<Index>(test.size()), X.cols());
    Vector ytr(static_cast<Index>(train.size()));
    Vector yte(static_cast<Index>(test.size()));
    for (std::size_t r = 0; r < train.size(); ++r) {
      xtr.row(static_cast<Index>(r)) = X.row(train[r]);
      ytr(static_cast<Index>(r)) = y(train[r]);
    }
    for (std::size_t r = 0; r < test.size(); ++r) {
      xte.row(static_cast<Index>(r)) = X.row(test[r]);
      yte(static_cast<Index>(r)) = y(test[r]);
    }
    const detail::Standardized st = detail::standardize(xtr, base.standardize);
    Matrix xteStd = xte;
    for (Index j = 0; j < xte.cols(); ++j) {
      if (st.constant[static_cast<std::size_t>(j)]) {
        xteStd.col(j).setZero();
      } else {
        xteStd.col(j) = (xte.col(j).array() - st.mean(j)) / st.scale(j);
      }
    }
    const detail::LogisticEnet solver(st.X, ytr, st.constant);
    const double nullDeviance = [&] {
      const double ybar = std::clamp(ytr.mean(), 1e-12, 1.0 - 1e-12);
      return -2.0 * (ybar * std::log(ybar) + (1.0 - ybar) * std::log(1.0 - ybar));
    }();

    for (std::size_t b = 0; b < n2; ++b) {
      detail::EnetSolution warm;
      bool haveWarm = false;
      bool saturated = false;
      double last = 0.0;
      for (std::size_t a : order1) {
        if (!saturated) {
          const double l1 = grid.lambda1[a];
          const double l2 = grid.lambda2Relative ? grid.lambda2[b] * l1 : grid.lambda2[b];
          warm = solver.solve(l1, l2, haveWarm ? &warm : nullptr, cvTol, base.maxIter);
          haveWarm = true;
          const Vector etaTe = (xteStd * warm.beta).array() + warm.intercept;
          last = fold_criterion(etaTe, yte, base.criterion);
          const Vector etaTr = (st.X * warm.beta).array() + warm.intercept;
          const double devTrain = 2.0 * detail::logistic_loss(etaTr, ytr);
          // Stop the path once the training fit is essentially saturated.
          saturated = devTrain < 1e-3 * nullDeviance;
        }
        total[a * n2 + b] += last;
      }
    }
  }

  std::size_t bestA = order1.front();
  std::size_t bestB = 0;
  for (std::size_t a = 0; a < n1; ++a) {
    for (std::size_t b = 0; b < n2; ++b) {
      const double cur = total[a * n2 + b];
      const double best = total[bestA * n2 + bestB];
      const double tolerance = 1e-12 * (1.0 + std::abs(best));
      const bool better = cur < best - tolerance;
      const bool tie = std::abs(cur - best) <= tolerance;
      const bool preferTie = grid.lambda1[a] > grid.lambda1[bestA] ||
                             (grid.lambda1[a] == grid.lambda1[bestA] && grid.lambda2[b] > grid.lambda2[bestB]);
      if (better || (tie && preferTie)) {
        bestA = a;
        bestB = b;
      }
    }
  }
  chosen.lambda1 = grid.lambda1[bestA];
  chosen.lambda2 = grid.lambda2Relative ? grid.lambda2[bestB] * chosen.lambda1 : grid.lambda2[bestB];
  return chosen;
}

QuadraticClassifier refit_unpenalized(const LabeledDataset& data, const IndexList& supportIn) {
  IndexList support = supportIn;
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (support.empty() || support.front() != 0) {
    throw DimensionError("refit_unpenalized: support must include the intercept (index 0)");
  }
  if (static_cast<Index>(support.size()) >= data.n()) {
    throw DimensionError("refit_unpenalized: support size " + std::to_string(support.size()) +
                         " is not smaller than n=" + std::to_string(data.n()));
  }
  const AugmentedIndexMap map(data.p());
  const Matrix X = augmented_columns(data.features(), map, support);
  const Vector y = data.response();
  const detail::Standardized st = detail::standardize(X, true);
  for (bool c : st.constant) {
    if (c) {
      throw SingularError("refit_unpenalized: constant column in the selected support");
    }
  }
  Matrix D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = st.X;
  Eigen::ColPivHouseholderQR<Matrix> qr(D);
  qr.setThreshold(1e-10);
  if (qr.rank() < D.cols()) {
    throw SingularError("refit_unpenalized: design restricted to the support is rank deficient");
  }

  double intercept = 0.0;
  Vector beta = Vector::Zero(X.cols());
  {
    const double ybar = y.mean();
    intercept = std::log(ybar / (1.0 - ybar));
  }
  int iterations = 0;
  bool fallback = false;
  double ridge = 0.0;
  if (!detail::newton_logistic(st.X, y, 0.0, intercept, beta, 100, 1e-10, &iterations)) {
    fallback = true;
    ridge = 1e-4;
    const double ybar = y.mean();
    intercept = std::log(ybar / (1.0 - ybar));
    beta.setZero();
    if (!detail::newton_logistic(st.X, y, ridge, intercept, beta, 200, 1e-10, &iterations)) {
      throw ConvergenceError("refit_unpenalized: ridge fallback did not converge");
    }
  }
  QuadraticClassifier out = back_transform(data.p(), support, st, intercept, beta, Provenance::Refit);
  out.lambda2 = ridge;
  out.diagnostics.ridgeFallback = fallback;
  out.diagnostics.iterations = iterations;
  out.diagnostics.converged = true;
  return out;
}

SelectionOutcome tune_fit_refit(const LabeledDataset& data, const ReducedIndexSet& reduced,
                                const ElasticNetConfig& base, std::uint64_t seed, bool refit) {
  SelectionOutcome out;
  const CvGrid grid = default_cv_grid(data, reduced, base.grid, base.standardize);
  out.tuned = cv_tune(data, reduced, grid, base, seed);
  out.penalized = fit_elastic_net_logistic(data, reduced, out.tuned);
  out.final = out.penalized;
  if (!refit) {
    out.refitSkipped = "disabled";
    return out;
  }
  IndexList support = out.penalized.activeSet;
  if (support.empty() || support.front() != 0) {
    support.insert(support.begin(), 0);
  }
  try {
    out.final = refit_unpenalized(data, support);
    out.final.lambda1 = out.tuned.lambda1;
    out.final.lambda2 = out.tuned.lambda2;
    out.refitApplied = true;
  } catch (const DimensionError& e) {
    out.refitSkipped = e.what();
  } catch (const SingularError& e) {
    out.refitSkipped = e.what();
  }
  return out;
}

double mean_logistic_loss(const QuadraticClassifier& classifier, const LabeledDataset& data) {
  return detail::logistic_loss(classifier.scores(data.features()), data.response());
}

}  // namespace iissqda
