#include "iissqda/screening.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace iissqda {

std::string to_string(ScreeningMode mode) {
  return mode == ScreeningMode::Stepwise ? "stepwise" : "threshold";
}

ScreeningMode parse_screening_mode(const std::string& text) {
  if (text == "threshold") {
    return ScreeningMode::Threshold;
  }
  if (text == "stepwise") {
    return ScreeningMode::Stepwise;
  }
  throw DataError("unknown screening mode '" + text + "' (expected threshold or stepwise)");
}

Matrix innovated_transform(const Matrix& Z, const PrecisionEstimate& omegaHat) {
  if (Z.cols() != omegaHat.matrix.rows()) {
    throw DimensionError("innovated_transform: Z has " + std::to_string(Z.cols()) +
                         " columns, precision is " + std::to_string(omegaHat.matrix.rows()) + " wide");
  }
  // omega is symmetric, so (omega z_i)^T = z_i^T omega.
  return Z * omegaHat.matrix;
}

double variance_statistic(std::span<const double> column, std::span<const int> labels, Index n1, Index n2) {
  if (column.size() != labels.size()) {
    throw DimensionError("variance_statistic: column and label lengths differ");
  }
  double sum[2] = {0.0, 0.0};
  Index count[2] = {0, 0};
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int k = labels[i] - 1;
    sum[k] += column[i];
    ++count[k];
  }
  if (count[0] != n1 || count[1] != n2) {
    throw DimensionError("variance_statistic: class counts do not match labels");
  }
  const double mean[2] = {sum[0] / static_cast<double>(n1), sum[1] / static_cast<double>(n2)};
  double ss[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int k = labels[i] - 1;
    const double d = column[i] - mean[k];
    ss[k] += d * d;
  }
  const double v1 = ss[0] / static_cast<double>(n1);
  const double v2 = ss[1] / static_cast<double>(n2);
  if (!(v1 > 0.0) || !(v2 > 0.0)) {
    throw DataError("degenerate transformed feature");
  }
  const double n = static_cast<double>(n1 + n2);
  const double w1 = static_cast<double>(n1) / n;
  const double w2 = static_cast<double>(n2) / n;
  const double d = std::log(w1 * v1 + w2 * v2) - w1 * std::log(v1) - w2 * std::log(v2);
  // Jensen: d >= 0 exactly; rounding can leave a tiny negative.
  return std::max(d, 0.0);
}

namespace {

double chi2_cutoff(double df, Index n, Index p, double alpha) {
  boost::math::chi_squared dist(df);
  const double level = alpha / static_cast<double>(p);
  return boost::math::quantile(boost::math::complement(dist, level)) / static_cast<double>(n);
}

Vector column_statistics(const Matrix& T, const LabeledDataset& data) {
  Vector stats(T.cols());
  const std::span<const int> labels(data.labels());
  for (Index j = 0; j < T.cols(); ++j) {
    stats(j) = variance_statistic(std::span<const double>(T.col(j).data(), static_cast<std::size_t>(T.rows())),
                                  labels, data.n1(), data.n2());
  }
  return stats;
}

IndexList above(const Vector& stats, double threshold) {
  IndexList out;
  for (Index j = 0; j < stats.size(); ++j) {
    if (stats(j) > threshold) {
      out.push_back(j);
    }
  }
  return out;
}

IndexList set_union(const IndexList& a, const IndexList& b) {
  IndexList out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Residual sums of squares of every column of `target` after least squares on
// `design` (full column rank assumed, checked through the QR rank).
Vector residual_ss(const Matrix& design, const Matrix& target) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < design.cols()) {
    throw DataError("degenerate transformed feature");
  }
  const Matrix fitted = design * qr.solve(target);
  return (target - fitted).colwise().squaredNorm().transpose();
}

// Conditional variance-difference statistics of `candidates` given `given`,
// computed on the transformed matrix T. The null model shares slopes across
// classes (class-specific intercepts); the alternative fits each class alone.
Vector conditional_statistics(const Matrix& T, const LabeledDataset& data, const IndexList& given,
                              const IndexList& candidates) {
  const Index n = data.n();
  const auto c = static_cast<Index>(given.size());
  const auto& labels = data.labels();
  const Index nk[2] = {data.n1(), data.n2()};

  Matrix pooled(n, 2 + c);
  Matrix classDesign[2] = {Matrix(nk[0], 1 + c), Matrix(nk[1], 1 + c)};
  Matrix target(n, static_cast<Index>(candidates.size()));
  Matrix classTarget[2] = {Matrix(nk[0], target.cols()), Matrix(nk[1], target.cols())};
  Index row[2] = {0, 0};
  for (Index i = 0; i < n; ++i) {
    const int k = labels[static_cast<std::size_t>(i)] - 1;
    pooled(i, 0) = k == 0 ? 1.0 : 0.0;
    pooled(i, 1) = k == 1 ? 1.0 : 0.0;
    classDesign[k](row[k], 0) = 1.0;
    for (Index a = 0; a < c; ++a) {
      const double v = T(i, given[static_cast<std::size_t>(a)]);
      pooled(i, 2 + a) = v;
      classDesign[k](row[k], 1 + a) = v;
    }
    for (Index b = 0; b < target.cols(); ++b) {
      const double v = T(i, candidates[static_cast<std::size_t>(b)]);
      target(i, b) = v;
      classTarget[k](row[k], b) = v;
    }
    ++row[k];
  }
  const Vector pooledVar = residual_ss(pooled, target) / static_cast<double>(n);
  const Vector v1 = residual_ss(classDesign[0], classTarget[0]) / static_cast<double>(nk[0]);
  const Vector v2 = residual_ss(classDesign[1], classTarget[1]) / static_cast<double>(nk[1]);
  const double w1 = static_cast<double>(nk[0]) / static_cast<double>(n);
  const double w2 = 1.0 - w1;
  Vector stats(target.cols());
  for (Index b = 0; b < target.cols(); ++b) {
    if (!(v1(b) > 0.0) || !(v2(b) > 0.0)) {
      throw DataError("degenerate transformed feature");
    }
    stats(b) = std::max(0.0, std::log(pooledVar(b)) - w1 * std::log(v1(b)) - w2 * std::log(v2(b)));
  }
  return stats;
}

IndexList stepwise_refine(const Matrix& T, const LabeledDataset& data, IndexList current,
                          const StepwiseOptions& options) {
  const Index p = T.cols();
  const Index n = data.n();
  // Keep every class regression over-determined.
  const Index maxSize = std::max<Index>(0, std::min(data.n1(), data.n2()) - 3);
  std::vector<bool> removed(static_cast<std::size_t>(p), false);
  std::sort(current.begin(), current.end());

  for (Index move = 0; move < 2 * p + 1; ++move) {
    bool changed = false;

    // Forward: strongest candidate given the current set.
    if (static_cast<Index>(current.size()) < maxSize) {
      IndexList candidates;
      for (Index j = 0; j < p; ++j) {
        if (!removed[static_cast<std::size_t>(j)] && !std::binary_search(current.begin(), current.end(), j)) {
          candidates.push_back(j);
        }
      }
      if (!candidates.empty()) {
        const Vector stats = conditional_statistics(T, data, current, candidates);
        Index best = 0;
        stats.maxCoeff(&best);
        const double cutoff = chi2_cutoff(1.0 + static_cast<double>(current.size()), n, p, options.alphaEnter);
        if (stats(best) > cutoff) {
          current.push_back(candidates[static_cast<std::size_t>(best)]);
          std::sort(current.begin(), current.end());
          changed = true;
        }
      }
    }

    // Backward: drop the weakest member if it no longer clears the stay cutoff.
    if (current.size() > 1) {
      double weakest = std::numeric_limits<double>::infinity();
      std::size_t weakestPos = 0;
      for (std::size_t pos = 0; pos < current.size(); ++pos) {
        IndexList rest = current;
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
        const double s = conditional_statistics(T, data, rest, {current[pos]})(0);
        if (s < weakest) {
          weakest = s;
          weakestPos = pos;
        }
      }
      const double cutoff = chi2_cutoff(static_cast<double>(current.size()), n, p, options.alphaStay);
      if (weakest < cutoff) {
        removed[static_cast<std::size_t>(current[weakestPos])] = true;
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(weakestPos));
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }
  return current;
}

}  // namespace

double default_threshold(Index n, Index p, double alpha) {
  if (n <= 2 || p < 1 || !(alpha > 0.0 && alpha < 1.0)) {
    throw DimensionError("default_threshold: need n > 2, p >= 1, alpha in (0,1)");
  }
  return chi2_cutoff(1.0, n, p, alpha);
}

ScreeningResult screen(const LabeledDataset& data, const PrecisionEstimate& omega1,
                       const PrecisionEstimate& omega2, double threshold) {
  if (threshold < 0.0) {
    throw DimensionError("screen: threshold must be nonnegative");
  }
  ScreeningResult result;
  result.mode = ScreeningMode::Threshold;
  result.threshold = threshold;
  result.statsOmega1 = column_statistics(innovated_transform(data.features(), omega1), data);
  result.statsOmega2 = column_statistics(innovated_transform(data.features(), omega2), data);
  result.A1hat = above(result.statsOmega1, threshold);
  result.A2hat = above(result.statsOmega2, threshold);
  result.Ihat = set_union(result.A1hat, result.A2hat);
  return result;
}

ScreeningResult stepwise_screen(const LabeledDataset& data, const PrecisionEstimate& omega1,
                                const PrecisionEstimate& omega2, const StepwiseOptions& options) {
  const double start = options.initialThreshold >= 0.0
                           ? options.initialThreshold
                           : default_threshold(data.n(), data.p(), options.alphaEnter);
  ScreeningResult result = screen(data, omega1, omega2, start);
  result.mode = ScreeningMode::Stepwise;
  const Matrix t1 = innovated_transform(data.features(), omega1);
  const Matrix t2 = innovated_transform(data.features(), omega2);
  result.A1hat = stepwise_refine(t1, data, result.A1hat, options);
  result.A2hat = stepwise_refine(t2, data, result.A2hat, options);
  result.Ihat = set_union(result.A1hat, result.A2hat);
  return result;
}

PopulationInteractionSets population_interaction_sets(const Matrix& omega1, const Matrix& omega2, double zeroTol) {
  if (omega1.rows() != omega2.rows() || omega1.rows() != omega1.cols() || omega2.rows() != omega2.cols()) {
    throw DimensionError("population_interaction_sets: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt1(omega1);
  Eigen::LLT<Matrix> llt2(omega2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success) {
    throw SingularError("population_interaction_sets: precision matrices must be positive definite");
  }
  // diag(Omega1 Sigma2 Omega1) - diag(Omega1) and diag(Omega2) - diag(Omega2 Sigma1 Omega2).
  const Matrix sigma2Omega1 = llt2.solve(omega1);
  const Matrix sigma1Omega2 = llt1.solve(omega2);
  PopulationInteractionSets sets;
  for (Index j = 0; j < omega1.rows(); ++j) {
    const double d1 = omega1.col(j).dot(sigma2Omega1.col(j)) - omega1(j, j);
    const double d2 = omega2(j, j) - omega2.col(j).dot(sigma1Omega2.col(j));
    if (std::abs(d1) > zeroTol) {
      sets.A1.push_back(j);
    }
    if (std::abs(d2) > zeroTol) {
      sets.A2.push_back(j);
    }
  }
  sets.I = set_union(sets.A1, sets.A2);
  return sets;
}

PopulationInteractionSets population_interaction_set(const GaussianScenario& scenario) {
  return population_interaction_sets(scenario.omega1, scenario.omega2);
}

}  // namespace iissqda
