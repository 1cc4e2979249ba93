#include "helpers.hpp"

#include "iissqda/precision.hpp"
#include "iissqda/simbench.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <numeric>

using namespace iissqda;

namespace {

// Maximizer of a concave function on [lo, hi] by ternary search.
double argmax_concave(const std::function<double(double)>& f, double lo, double hi, int iters = 90) {
  for (int k = 0; k < iters; ++k) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (f(a) < f(b)) {
      lo = a;
    } else {
      hi = b;
    }
  }
  return 0.5 * (lo + hi);
}

double objective2(const Matrix& S, double rho, double a, double b, double c) {
  const double det = a * c - b * b;
  if (a <= 0.0 || c <= 0.0 || det <= 0.0) {
    return -1e300;
  }
  return std::log(det) - (S(0, 0) * a + 2.0 * S(0, 1) * b + S(1, 1) * c) - 2.0 * rho * std::abs(b);
}

Matrix permute(const Matrix& S, const std::vector<Index>& perm) {
  const Index p = S.rows();
  Matrix out(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      out(i, j) = S(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("class moments of a two-point class") {
  Matrix X(4, 2);
  X << 0, 0, 2, 0, 5, 1, 7, 3;
  const CovarianceSummary c = class_covariances(testutil::two_class(X, 2));
  CHECK(c.m1(0) == doctest::Approx(1.0));
  CHECK(c.m1(1) == doctest::Approx(0.0));
  CHECK(c.S1(0, 0) == doctest::Approx(2.0));
  CHECK(c.S1(0, 1) == doctest::Approx(0.0));
  CHECK(c.S1(1, 1) == doctest::Approx(0.0));
  CHECK(c.pi1 == doctest::Approx(0.5));
}

TEST_CASE("sample covariance converges for a large standard normal sample") {
  std::mt19937_64 rng(2024);
  const Matrix X = testutil::gaussian_matrix(100000, 5, rng);
  const Matrix S = sample_covariance(X);
  CHECK((S - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("glasso on a diagonal covariance returns its inverse exactly") {
  Vector d(5);
  d << 0.5, 1.0, 2.0, 3.5, 10.0;
  const Matrix S = d.asDiagonal();
  CHECK_THROWS_AS(graphical_lasso(S, 0.0), DimensionError);
  for (double rho : {1e-8, 0.01, 0.3, 5.0}) {
    const PrecisionEstimate est = graphical_lasso(S, rho);
    for (Index i = 0; i < 5; ++i) {
      for (Index j = 0; j < 5; ++j) {
        const double want = i == j ? 1.0 / d(i) : 0.0;
        CHECK(est.matrix(i, j) == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("a penalty above the largest off-diagonal gives a diagonal estimate") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix S = testutil::random_spd(6, rng);
    const double top = glasso_penalty_max(S);
    double brute = 0.0;
    for (Index i = 0; i < 6; ++i) {
      for (Index j = 0; j < 6; ++j) {
        if (i != j) {
          brute = std::max(brute, std::abs(S(i, j)));
        }
      }
    }
    CHECK(top == doctest::Approx(brute));
    const PrecisionEstimate est = graphical_lasso(S, 1.01 * top);
    const Matrix off = est.matrix - Matrix(est.matrix.diagonal().asDiagonal());
    CHECK(off.cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 0; i < 6; ++i) {
      CHECK(est.matrix(i, i) == doctest::Approx(1.0 / S(i, i)).epsilon(1e-10));
    }
  }
}

TEST_CASE("2x2 glasso matches a brute-force maximization") {
  Matrix S(2, 2);
  S << 1.0, 0.5, 0.5, 1.0;
  const double rho = 0.1;
  // Nested one-dimensional searches; the objective is jointly concave.
  auto bestOverAC = [&](double b, double* aOut, double* cOut) {
    auto bestC = [&](double a) {
      return argmax_concave([&](double c) { return objective2(S, rho, a, b, c); }, 1e-6, 20.0);
    };
    const double a = argmax_concave([&](double a) { return objective2(S, rho, a, b, bestC(a)); }, 1e-6, 20.0);
    const double c = bestC(a);
    if (aOut != nullptr) {
      *aOut = a;
      *cOut = c;
    }
    return objective2(S, rho, a, b, c);
  };
  const double b = argmax_concave([&](double b) { return bestOverAC(b, nullptr, nullptr); }, -5.0, 5.0);
  double a = 0.0;
  double c = 0.0;
  bestOverAC(b, &a, &c);

  GlassoOptions tight;
  tight.tol = 1e-10;
  const PrecisionEstimate est = graphical_lasso(S, rho, tight);
  CHECK(std::abs(est.matrix(0, 1) - b) < 1e-4);
  CHECK(std::abs(est.matrix(0, 0) - a) < 1e-4);
  CHECK(std::abs(est.matrix(1, 1) - c) < 1e-4);
  // Closed form: the off-diagonal of W = inverse is S_12 - rho.
  const Matrix W = est.matrix.inverse();
  CHECK(std::abs(W(0, 1) - 0.4) < 1e-8);
}

TEST_CASE("glasso is permutation equivariant") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix S = sample_covariance(testutil::gaussian_matrix(40, 8, rng) * testutil::random_spd(8, rng));
    std::vector<Index> perm(8);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const double rho = 0.3 * glasso_penalty_max(S);
    GlassoOptions tight;
    tight.tol = 1e-9;
    const Matrix direct = permute(graphical_lasso(S, rho, tight).matrix, perm);
    const Matrix viaPermuted = graphical_lasso(permute(S, perm), rho, tight).matrix;
    CHECK((direct - viaPermuted).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("glasso objective never decreases and KKT holds at convergence") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const Index p = 5 + rep;
    const Matrix S = sample_covariance(testutil::gaussian_matrix(3 * p, p, rng));
    const double rho = (0.05 + 0.05 * rep) * glasso_penalty_max(S);
    const PrecisionEstimate est = graphical_lasso(S, rho);
    REQUIRE(est.objectiveTrace.size() >= 2);
    for (std::size_t k = 1; k < est.objectiveTrace.size(); ++k) {
      CHECK(est.objectiveTrace[k] >= est.objectiveTrace[k - 1] - 1e-10 * (1.0 + std::abs(est.objectiveTrace[k])));
    }
    CHECK(est.converged);
    CHECK(est.kktResidual <= 1e-6);
    CHECK(glasso_kkt_residual(S, est.matrix, rho) == doctest::Approx(est.kktResidual));
    CHECK(est.objectiveTrace.back() == doctest::Approx(glasso_objective(S, est.matrix, rho)));
    Eigen::LLT<Matrix> llt(est.matrix);
    CHECK(llt.info() == Eigen::Success);
    CHECK((est.matrix - est.matrix.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("glasso handles p > n sample covariances") {
  std::mt19937_64 rng(29);
  const Matrix S = sample_covariance(testutil::gaussian_matrix(15, 30, rng));
  const PrecisionEstimate est = graphical_lasso(S, 0.2 * glasso_penalty_max(S));
  CHECK(est.converged);
  CHECK(est.matrix.allFinite());
  CHECK(Eigen::LLT<Matrix>(est.matrix).info() == Eigen::Success);
}

TEST_CASE("penalty grid layout") {
  std::mt19937_64 rng(31);
  const Matrix S = testutil::random_spd(5, rng);
  const std::vector<double> grid = default_penalty_grid(S, 6, 0.1);
  REQUIRE(grid.size() == 6);
  CHECK(grid.front() == doctest::Approx(glasso_penalty_max(S)));
  CHECK(grid.back() == doctest::Approx(0.1 * glasso_penalty_max(S)));
  for (std::size_t k = 1; k < grid.size(); ++k) {
    CHECK(grid[k] < grid[k - 1]);
    CHECK(grid[k] / grid[k - 1] == doctest::Approx(grid[1] / grid[0]));
  }
}

TEST_CASE("penalty cross-validation") {
  std::mt19937_64 rng(37);
  SUBCASE("single value grid") {
    const Matrix X = testutil::gaussian_matrix(50, 6, rng);
    const std::vector<double> grid{0.123};
    CHECK(select_penalty_cv(X, grid) == 0.123);
  }
  SUBCASE("equal scores go to the larger penalty") {
    const Matrix X = testutil::gaussian_matrix(50, 6, rng);
    const double big = 10.0 * glasso_penalty_max(sample_covariance(X));
    // Both values make every fold estimate diagonal, so the scores tie.
    const std::vector<double> grid{big, 2.0 * big};
    CHECK(select_penalty_cv(X, grid) == 2.0 * big);
  }
  SUBCASE("diagonal truth favours the heavy penalty") {
    int heavy = 0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
      std::mt19937_64 r(1000 + s);
      const Matrix X = testutil::gaussian_matrix(200, 20, r);
      PenaltyCvOptions o;
      o.seed = static_cast<std::uint64_t>(s);
      const std::vector<double> grid{0.01, 0.5};
      if (select_penalty_cv(X, grid, o) == 0.5) {
        ++heavy;
      }
    }
    CHECK(heavy >= 18);
  }
  SUBCASE("too few rows per fold") {
    const Matrix X = testutil::gaussian_matrix(6, 3, rng);
    const std::vector<double> grid{0.1, 0.2};
    CHECK_THROWS_AS(select_penalty_cv(X, grid), DataError);
  }
}

TEST_CASE("acceptability report") {
  std::mt19937_64 rng(41);
  const Matrix truth = testutil::random_spd(4, rng);
  const PrecisionEstimate same = PrecisionEstimate::fromMatrix(truth);
  CHECK(acceptability_report(same, truth, 2, 100).maxAbsError == 0.0);
  Matrix bumped = truth;
  bumped(0, 0) += 0.1;
  const AcceptabilityReport r = acceptability_report(PrecisionEstimate::fromMatrix(bumped), truth, 2, 100);
  CHECK(r.maxAbsError == doctest::Approx(0.1));
  CHECK(r.boundRatio == doctest::Approx(0.1 / (4.0 * std::sqrt(std::log(4.0) / 100.0))));
  Matrix notPd = -Matrix::Identity(3, 3);
  CHECK_THROWS_AS(PrecisionEstimate::fromMatrix(notPd), SingularError);
}

TEST_CASE("model 2 glasso estimate yields a finite error ratio") {
  const GaussianScenario sc = make_scenario("m2", 50);
  const LabeledDataset d = sample(sc, 100, 100, 99);
  const Matrix X1 = d.classRows(1);
  const Matrix S = sample_covariance(X1);
  const double rho = select_penalty_cv(X1, default_penalty_grid(S));
  const PrecisionEstimate est = graphical_lasso(S, rho);
  const AcceptabilityReport r = acceptability_report(est, sc.omega1, std::max<Index>(1, est.maxRowNonzeros), 100);
  CHECK(std::isfinite(r.boundRatio));
  CHECK(r.maxAbsError < 1.0);
}
