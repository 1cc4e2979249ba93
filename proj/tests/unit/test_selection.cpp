#include "helpers.hpp"

#include "iissqda/selection.hpp"
#include "logistic_solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace iissqda;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Labels drawn from a logistic model with linear predictor b0 + X b.
LabeledDataset logistic_sample(const Matrix& X, double b0, const Vector& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> labels;
  for (Index i = 0; i < X.rows(); ++i) {
    labels.push_back(u(rng) < sigmoid(b0 + X.row(i).dot(b)) ? 1 : 2);
  }
  return LabeledDataset(X, labels);
}

// Plain IRLS on [1, X]; the reference maximum-likelihood fit.
Vector irls(const Matrix& X, const Vector& y) {
  Matrix D(X.rows(), X.cols() + 1);
  D.col(0).setOnes();
  D.rightCols(X.cols()) = X;
  Vector theta = Vector::Zero(D.cols());
  for (int it = 0; it < 100; ++it) {
    const Vector eta = D * theta;
    Vector mu(eta.size());
    Vector w(eta.size());
    for (Index i = 0; i < eta.size(); ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = mu(i) * (1.0 - mu(i));
    }
    const Matrix H = D.transpose() * w.asDiagonal() * D;
    const Vector step = H.ldlt().solve(D.transpose() * (y - mu));
    theta += step;
    if (step.norm() < 1e-14) {
      break;
    }
  }
  return theta;
}

// Subgradient optimality violation of the original-scale problem, computed
// from scratch: mean loss + lambda1 |beta|_1 + lambda2 |beta|^2.
double kkt_violation(const Matrix& X, const Vector& y, double b0, const Vector& b, double l1, double l2) {
  const Index n = X.rows();
  Vector r(n);
  for (Index i = 0; i < n; ++i) {
    r(i) = sigmoid(b0 + X.row(i).dot(b)) - y(i);
  }
  double worst = std::abs(r.mean());
  for (Index j = 0; j < X.cols(); ++j) {
    const double g = X.col(j).dot(r) / static_cast<double>(n) + 2.0 * l2 * b(j);
    const double v = b(j) > 0 ? std::abs(g + l1) : b(j) < 0 ? std::abs(g - l1) : std::max(0.0, std::abs(g) - l1);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace

TEST_CASE("classifier built from coefficients") {
  const AugmentedIndexMap map(2);
  Vector values(3);
  values << 0.5, 0.0, -2.0;
  const IndexList cols{0, map.mainIndex(1), map.interactionIndex(0, 1)};
  const QuadraticClassifier c = QuadraticClassifier::fromCoefficients(2, cols, values, Provenance::Refit);
  CHECK(c.theta.size() == 6);
  CHECK(c.activeSet == IndexList{0, map.interactionIndex(0, 1)});
  CHECK(c.activeTerms() == IndexList{map.interactionIndex(0, 1)});
  Vector z(2);
  z << 3.0, 4.0;
  CHECK(c.score(z) == doctest::Approx(0.5 - 2.0 * 12.0));
  Matrix Z(2, 2);
  Z << 3, 4, 1, 1;
  const Vector s = c.scores(Z);
  CHECK(s(1) == doctest::Approx(-1.5));
  CHECK(to_string(Provenance::Refit) == "refit");
  CHECK(parse_provenance("penalized") == Provenance::Penalized);
  CHECK(parse_cv_criterion("misclassification") == CvCriterion::Misclassification);
  CHECK_THROWS_AS(parse_cv_criterion("auc"), DataError);
}

TEST_CASE("heavy penalty leaves the intercept at the class log-odds") {
  std::mt19937_64 rng(1);
  const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(80, 4, rng), 30);
  ElasticNetConfig cfg;
  cfg.lambda1 = 10.0 * lambda1_max(d, ReducedIndexSet::full(4));
  const QuadraticClassifier c = fit_elastic_net_logistic(d, ReducedIndexSet::full(4), cfg);
  CHECK(c.activeSet == IndexList{0});
  CHECK(c.theta(0) == doctest::Approx(std::log(30.0 / 50.0)).epsilon(1e-7));
}

TEST_CASE("unpenalized fit agrees with an independent Newton solver") {
  std::mt19937_64 rng(2);
  const Matrix X = testutil::gaussian_matrix(50, 2, rng);
  Vector b(2);
  b << 0.8, -0.6;
  const LabeledDataset d = logistic_sample(X, 0.2, b, rng);
  const Vector oracle = irls(X, d.response());
  for (bool standardize : {true, false}) {
    ElasticNetConfig cfg;
    cfg.tol = 1e-11;
    cfg.standardize = standardize;
    const QuadraticClassifier c = fit_elastic_net_logistic(d, ReducedIndexSet::mainsOnly(2), cfg);
    CHECK(std::abs(c.theta(0) - oracle(0)) < 1e-6);
    CHECK(std::abs(c.theta(1) - oracle(1)) < 1e-6);
    CHECK(std::abs(c.theta(2) - oracle(2)) < 1e-6);
  }
}

TEST_CASE("a weakly correlated predictor is screened out exactly") {
  std::mt19937_64 rng(3);
  const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(60, 1, rng), 30);
  const Vector x = d.features().col(0);
  const double sd = std::sqrt((x.array() - x.mean()).square().mean());
  const Vector xs = (x.array() - x.mean()) / sd;
  const Vector y = d.response();
  const double score = std::abs(xs.dot((y.array() - y.mean()).matrix())) / 60.0;
  ElasticNetConfig cfg;
  cfg.lambda1 = 2.5 * score;  // score < lambda1 / 2
  const QuadraticClassifier c = fit_elastic_net_logistic(d, ReducedIndexSet::mainsOnly(1), cfg);
  CHECK(c.theta(1) == 0.0);
  CHECK(lambda1_max(d, ReducedIndexSet::mainsOnly(1)) == doctest::Approx(score));
}

TEST_CASE("penalized fits satisfy the optimality conditions") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    const Index p = 3 + rep % 5;
    const Matrix X = testutil::gaussian_matrix(120, p, rng);
    Vector b = Vector::Zero(p);
    b(0) = 1.0;
    b(p - 1) = -0.7;
    const LabeledDataset d = logistic_sample(X, -0.3, b, rng);
    const ReducedIndexSet reduced(p, {0, p - 1});
    const double top = lambda1_max(d, reduced, false);
    ElasticNetConfig cfg;
    cfg.standardize = rep % 2 == 0;
    cfg.lambda1 = (0.02 + 0.03 * (rep % 7)) * (cfg.standardize ? lambda1_max(d, reduced) : top);
    cfg.lambda2 = rep % 3 == 0 ? 0.0 : 0.1 * cfg.lambda1 * (rep % 3);
    const QuadraticClassifier c = fit_elastic_net_logistic(d, reduced, cfg);
    CHECK(c.diagnostics.converged);
    CHECK(c.diagnostics.kktResidual <= 1e-6);
    for (std::size_t k = 1; k < c.diagnostics.objectiveTrace.size(); ++k) {
      CHECK(c.diagnostics.objectiveTrace[k] <= c.diagnostics.objectiveTrace[k - 1] + 1e-12);
    }
    // Recompute the conditions on the scale the penalty was applied to.
    const Matrix D = reduced_design(d.features(), reduced);
    const IndexList& cols = reduced.activeColumns();
    Vector beta(D.cols());
    for (Index j = 0; j < D.cols(); ++j) {
      beta(j) = c.theta(cols[static_cast<std::size_t>(j) + 1]);
    }
    if (cfg.standardize) {
      Matrix Ds = D;
      Vector scaledBeta = beta;
      double b0 = c.theta(0);
      for (Index j = 0; j < D.cols(); ++j) {
        const double mean = D.col(j).mean();
        const double sd = std::sqrt((D.col(j).array() - mean).square().mean());
        Ds.col(j) = (D.col(j).array() - mean) / sd;
        scaledBeta(j) = beta(j) * sd;
        b0 += beta(j) * mean;
      }
      CHECK(kkt_violation(Ds, d.response(), b0, scaledBeta, cfg.lambda1, cfg.lambda2) <= 1e-6);
    } else {
      CHECK(kkt_violation(D, d.response(), c.theta(0), beta, cfg.lambda1, cfg.lambda2) <= 1e-6);
    }
  }
}

TEST_CASE("optimality residual agrees with finite differences of the objective") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix X = testutil::gaussian_matrix(40, 4, rng);
    Vector y(40);
    for (Index i = 0; i < 40; ++i) {
      y(i) = i % 2 == 0 ? 1.0 : 0.0;
    }
    const detail::LogisticEnet enet(X, y);
    const double l2 = 0.25;
    const double b0 = 0.5 * g(rng);
    Vector beta(4);
    for (Index j = 0; j < 4; ++j) {
      beta(j) = g(rng);
    }
    // With lambda1 = 0 the residual is the largest absolute partial derivative.
    const double h = 1e-6;
    double fdMax = std::abs((enet.objective(b0 + h, beta, 0.0, l2) - enet.objective(b0 - h, beta, 0.0, l2)) / (2 * h));
    for (Index j = 0; j < 4; ++j) {
      Vector up = beta;
      Vector down = beta;
      up(j) += h;
      down(j) -= h;
      fdMax = std::max(fdMax, std::abs((enet.objective(b0, up, 0.0, l2) - enet.objective(b0, down, 0.0, l2)) / (2 * h)));
    }
    const double analytic = enet.kktResidual(b0, beta, 0.0, l2);
    CHECK(std::abs(analytic - fdMax) / std::max(1e-12, analytic) < 1e-5);
    // Mean loss matches its definition.
    const Vector eta = (X * beta).array() + b0;
    double loss = 0.0;
    for (Index i = 0; i < 40; ++i) {
      loss += -y(i) * eta(i) + std::log1p(std::exp(eta(i)));
    }
    CHECK(detail::logistic_loss(eta, y) == doctest::Approx(loss / 40.0).epsilon(1e-12));
  }
}

TEST_CASE("stratified folds") {
  std::mt19937_64 rng(6);
  const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(47, 2, rng), 20);
  const std::vector<int> f = stratified_folds(d, 5, 9);
  CHECK(f == stratified_folds(d, 5, 9));
  CHECK(f != stratified_folds(d, 5, 10));
  for (int k = 0; k < 5; ++k) {
    int c1 = 0;
    int c2 = 0;
    for (Index i = 0; i < d.n(); ++i) {
      if (f[static_cast<std::size_t>(i)] == k) {
        (d.labels()[static_cast<std::size_t>(i)] == 1 ? c1 : c2)++;
      }
    }
    CHECK(c1 >= 3);
    CHECK(c1 <= 5);
    CHECK(c2 >= 5);
    CHECK(c2 <= 6);
  }
  const LabeledDataset tiny = testutil::two_class(testutil::gaussian_matrix(10, 2, rng), 3);
  CHECK_THROWS_AS(stratified_folds(tiny, 5, 1), DataError);
}

TEST_CASE("cross-validated tuning") {
  std::mt19937_64 rng(7);
  const ReducedIndexSet mains = ReducedIndexSet::mainsOnly(6);
  SUBCASE("single-point grid") {
    const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(40, 6, rng), 20);
    CvGrid grid{{0.05}, {0.3}, true};
    const ElasticNetConfig c = cv_tune(d, mains, grid, {}, 1);
    CHECK(c.lambda1 == 0.05);
    CHECK(c.lambda2 == doctest::Approx(0.015));
    grid.lambda2Relative = false;
    CHECK(cv_tune(d, mains, grid, {}, 1).lambda2 == 0.3);
  }
  SUBCASE("equal scores go to the larger lambda1") {
    const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(40, 6, rng), 20);
    const double top = lambda1_max(d, mains);
    CvGrid grid{{2.0 * top, 3.0 * top}, {0.0}, true};
    CHECK(cv_tune(d, mains, grid, {}, 1).lambda1 == 3.0 * top);
  }
  SUBCASE("pure noise stays at the top of the path") {
    // Minimum-CV deviance: just below lambda1_max the held-out change has a
    // random sign, so the top value wins most but not all of the time
    // (about two thirds over these seeds).
    int largest = 0;
    for (int s = 0; s < 20; ++s) {
      std::mt19937_64 r(300 + s);
      const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(100, 6, r), 50);
      const CvGrid grid = default_cv_grid(d, mains, LambdaGridSpec{});
      const ElasticNetConfig c = cv_tune(d, mains, grid, {}, static_cast<std::uint64_t>(s));
      if (c.lambda1 == grid.lambda1.front()) {
        ++largest;
      }
      CHECK(c.lambda1 >= grid.lambda1[20]);
    }
    CHECK(largest >= 12);
  }
  SUBCASE("signal is picked up") {
    const Matrix X = testutil::gaussian_matrix(200, 6, rng);
    Vector b = Vector::Zero(6);
    b(2) = 1.5;
    const LabeledDataset d = logistic_sample(X, 0.0, b, rng);
    const SelectionOutcome o = tune_fit_refit(d, mains, ElasticNetConfig{}, 3);
    CHECK(o.refitApplied);
    CHECK(o.final.provenance == Provenance::Refit);
    CHECK(std::find(o.final.activeSet.begin(), o.final.activeSet.end(), 3) != o.final.activeSet.end());
    CHECK(o.final.lambda1 == o.tuned.lambda1);
  }
}

TEST_CASE("unpenalized refit") {
  std::mt19937_64 rng(8);
  SUBCASE("intercept only") {
    const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(70, 3, rng), 25);
    const QuadraticClassifier c = refit_unpenalized(d, {0});
    CHECK(c.theta(0) == doctest::Approx(std::log(25.0 / 45.0)).epsilon(1e-9));
    CHECK_FALSE(c.diagnostics.ridgeFallback);
  }
  SUBCASE("true support in a large sample") {
    const Index n = 2000;
    const Matrix X = testutil::gaussian_matrix(n, 2, rng);
    Vector b(2);
    b << 1.0, -0.5;
    const LabeledDataset d = logistic_sample(X, -0.3, b, rng);
    const QuadraticClassifier c = refit_unpenalized(d, {0, 1, 2});
    // Standard errors from the observed information at the estimate.
    Matrix D(n, 3);
    D.col(0).setOnes();
    D.rightCols(2) = X;
    Matrix info = Matrix::Zero(3, 3);
    for (Index i = 0; i < n; ++i) {
      const double m = sigmoid(D.row(i).dot(c.theta.head(3)));
      info += m * (1 - m) * D.row(i).transpose() * D.row(i);
    }
    const Vector se = info.inverse().diagonal().cwiseSqrt();
    const Vector truth = (Vector(3) << -0.3, 1.0, -0.5).finished();
    for (Index k = 0; k < 3; ++k) {
      CHECK(std::abs(c.theta(k) - truth(k)) < 3.0 * se(k));
    }
  }
  SUBCASE("separable data falls back to ridge") {
    Matrix X(20, 1);
    for (Index i = 0; i < 20; ++i) {
      X(i, 0) = i < 10 ? 1.0 + 0.1 * static_cast<double>(i) : -1.0 - 0.1 * static_cast<double>(i);
    }
    const QuadraticClassifier c = refit_unpenalized(testutil::two_class(X, 10), {0, 1});
    CHECK(c.diagnostics.ridgeFallback);
    CHECK(c.lambda2 == doctest::Approx(1e-4));
    CHECK(c.theta(1) > 0.0);
  }
  SUBCASE("preconditions") {
    const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(6, 6, rng), 3);
    CHECK_THROWS_AS(refit_unpenalized(d, {1, 2}), DimensionError);
    CHECK_THROWS_AS(refit_unpenalized(d, {0, 1, 2, 3, 4, 5}), DimensionError);
    Matrix X = testutil::gaussian_matrix(12, 2, rng);
    X.col(1) = 2.0 * X.col(0);
    CHECK_THROWS_AS(refit_unpenalized(testutil::two_class(X, 6), {0, 1, 2}), SingularError);
  }
}

TEST_CASE("mean logistic loss of a classifier") {
  std::mt19937_64 rng(9);
  const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(30, 2, rng), 12);
  Vector v(2);
  v << 0.3, -0.7;
  const QuadraticClassifier c = QuadraticClassifier::fromCoefficients(2, {0, 2}, v, Provenance::Refit);
  double want = 0.0;
  for (Index i = 0; i < 30; ++i) {
    const double eta = 0.3 - 0.7 * d.features()(i, 1);
    const double y = d.labels()[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
    want += -y * eta + std::log1p(std::exp(eta));
  }
  CHECK(mean_logistic_loss(c, d) == doctest::Approx(want / 30.0));
}
