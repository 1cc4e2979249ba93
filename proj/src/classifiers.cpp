#include "iissqda/classifiers.hpp"

#include "iissqda/precision.hpp"

#include <algorithm>
#include <cmath>

namespace iissqda {

namespace {

constexpr double kMinReciprocalCondition = 1e-12;

// Cholesky factor of an SPD matrix, rejecting numerically singular input.
Eigen::LLT<Matrix> checked_llt(const Matrix& A, const std::string& what) {
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success || (A.rows() > 0 && llt.rcond() < kMinReciprocalCondition)) {
    throw SingularError(what + " is singular; plug-in rules need more observations than features, "
                               "use a sparse method (IIS-SQDA, PLR or DSDA) instead");
  }
  return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace

double DiscriminantRule::score(const Vector& z) const {
  if (z.size() != p()) {
    throw DimensionError("rule expects " + std::to_string(p()) + " features, got " + std::to_string(z.size()));
  }
  double s = delta.dot(z) + zeta;
  if (!linear()) {
    s += 0.5 * z.dot(omega * z);
  }
  return s;
}

Vector DiscriminantRule::scores(const Matrix& Z) const {
  if (Z.cols() != p()) {
    throw DimensionError("rule expects " + std::to_string(p()) + " features, got " + std::to_string(Z.cols()));
  }
  Vector s = Z * delta;
  s.array() += zeta;
  if (!linear()) {
    s.array() += 0.5 * ((Z * omega).array() * Z.array()).rowwise().sum();
  }
  return s;
}

BayesRule bayes_rule(const GaussianScenario& scenario) {
  const auto l1 = checked_llt(scenario.omega1, "Omega1");
  const auto l2 = checked_llt(scenario.omega2, "Omega2");
  BayesRule rule;
  rule.omega = scenario.omega2 - scenario.omega1;
  rule.delta = scenario.omega1 * scenario.mu1;
  // log|Sigma2| - log|Sigma1| = log|Omega1| - log|Omega2|.
  rule.zeta = std::log(scenario.prior / (1.0 - scenario.prior)) + 0.5 * (log_det(l1) - log_det(l2)) -
              0.5 * scenario.mu1.dot(scenario.omega1 * scenario.mu1);
  return rule;
}

double log_density_ratio(const GaussianScenario& scenario, const Vector& z) {
  const auto s1 = checked_llt(scenario.sigma1, "Sigma1");
  const auto s2 = checked_llt(scenario.sigma2, "Sigma2");
  const Vector r1 = s1.matrixL().solve(z - scenario.mu1);
  const Vector r2 = s2.matrixL().solve(z);
  const double logPhi1 = -0.5 * log_det(s1) - 0.5 * r1.squaredNorm();
  const double logPhi2 = -0.5 * log_det(s2) - 0.5 * r2.squaredNorm();
  return std::log(scenario.prior) + logPhi1 - std::log(1.0 - scenario.prior) - logPhi2;
}

int classify(const DiscriminantRule& rule, const Vector& z) { return rule.score(z) > 0.0 ? 1 : 2; }

int classify(const QuadraticClassifier& classifier, const Vector& z) { return classifier.score(z) > 0.0 ? 1 : 2; }

namespace {

std::vector<int> labels_from_scores(const Vector& s) {
  std::vector<int> out(static_cast<std::size_t>(s.size()));
  for (Index i = 0; i < s.size(); ++i) {
    out[static_cast<std::size_t>(i)] = s(i) > 0.0 ? 1 : 2;
  }
  return out;
}

double error_rate(const Vector& s, const LabeledDataset& test) {
  Index wrong = 0;
  for (Index i = 0; i < s.size(); ++i) {
    const int predicted = s(i) > 0.0 ? 1 : 2;
    if (predicted != test.labels()[static_cast<std::size_t>(i)]) {
      ++wrong;
    }
  }
  return static_cast<double>(wrong) / static_cast<double>(test.n());
}

}  // namespace

std::vector<int> classify_all(const DiscriminantRule& rule, const Matrix& Z) {
  return labels_from_scores(rule.scores(Z));
}

std::vector<int> classify_all(const QuadraticClassifier& classifier, const Matrix& Z) {
  return labels_from_scores(classifier.scores(Z));
}

QuadraticClassifier to_classifier(const DiscriminantRule& rule, Provenance provenance) {
  const Index p = rule.p();
  const AugmentedIndexMap map(p);
  IndexList columns;
  std::vector<double> values;
  columns.push_back(0);
  values.push_back(rule.zeta);
  for (Index j = 0; j < p; ++j) {
    if (rule.delta(j) != 0.0) {
      columns.push_back(map.mainIndex(j));
      values.push_back(rule.delta(j));
    }
  }
  if (!rule.linear()) {
    for (Index j = 0; j < p; ++j) {
      for (Index l = j; l < p; ++l) {
        const double w = l == j ? 0.5 * rule.omega(j, j) : 0.5 * (rule.omega(j, l) + rule.omega(l, j));
        if (w != 0.0) {
          columns.push_back(map.interactionIndex(j, l));
          values.push_back(w);
        }
      }
    }
  }
  std::vector<std::size_t> order(columns.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    order[k] = k;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return columns[a] < columns[b]; });
  IndexList sortedColumns;
  Vector sortedValues(static_cast<Index>(order.size()));
  for (std::size_t k = 0; k < order.size(); ++k) {
    sortedColumns.push_back(columns[order[k]]);
    sortedValues(static_cast<Index>(k)) = values[order[k]];
  }
  return QuadraticClassifier::fromCoefficients(p, sortedColumns, sortedValues, provenance);
}

DiscriminantRule lda_plugin(const LabeledDataset& data) {
  const CovarianceSummary cs = class_covariances(data);
  const double n = static_cast<double>(data.n());
  const Matrix pooled = (static_cast<double>(cs.n1 - 1) * cs.S1 + static_cast<double>(cs.n2 - 1) * cs.S2) / (n - 2.0);
  const auto llt = checked_llt(pooled, "pooled covariance");
  DiscriminantRule rule;
  rule.delta = llt.solve(cs.m1 - cs.m2);
  rule.zeta = std::log(cs.pi1 / (1.0 - cs.pi1)) - 0.5 * (cs.m1 + cs.m2).dot(rule.delta);
  return rule;
}

DiscriminantRule qda_plugin(const LabeledDataset& data) {
  const CovarianceSummary cs = class_covariances(data);
  const auto l1 = checked_llt(cs.S1, "class 1 covariance");
  const auto l2 = checked_llt(cs.S2, "class 2 covariance");
  const Index p = data.p();
  const Matrix omega1 = l1.solve(Matrix::Identity(p, p));
  const Matrix omega2 = l2.solve(Matrix::Identity(p, p));
  DiscriminantRule rule;
  rule.omega = omega2 - omega1;
  rule.omega = 0.5 * (rule.omega + rule.omega.transpose()).eval();
  const Vector a1 = omega1 * cs.m1;
  const Vector a2 = omega2 * cs.m2;
  rule.delta = a1 - a2;
  rule.zeta = std::log(cs.pi1 / (1.0 - cs.pi1)) + 0.5 * (log_det(l2) - log_det(l1)) - 0.5 * cs.m1.dot(a1) +
              0.5 * cs.m2.dot(a2);
  return rule;
}

QuadraticClassifier oracle_classifier(const GaussianScenario& scenario, const LabeledDataset& data) {
  if (scenario.p != data.p()) {
    throw DimensionError("oracle_classifier: scenario and data dimensions differ");
  }
  IndexList support = scenario.trueMainSupport;
  support.insert(support.end(), scenario.trueInteractionVariables.begin(), scenario.trueInteractionVariables.end());
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const Index k = static_cast<Index>(support.size());
  if (k >= std::min(data.n1(), data.n2()) - 1) {
    throw DimensionError("oracle_classifier: true support of size " + std::to_string(k) +
                         " is too large for the class sizes");
  }
  DiscriminantRule full;
  full.omega = Matrix::Zero(data.p(), data.p());
  full.delta = Vector::Zero(data.p());
  if (k == 0) {
    full.zeta = std::log(static_cast<double>(data.n1()) / static_cast<double>(data.n2()));
    return to_classifier(full, Provenance::Oracle);
  }
  Matrix Zs(data.n(), k);
  for (Index c = 0; c < k; ++c) {
    Zs.col(c) = data.features().col(support[static_cast<std::size_t>(c)]);
  }
  const DiscriminantRule local = qda_plugin(LabeledDataset(Zs, data.labels()));
  for (Index a = 0; a < k; ++a) {
    const Index ja = support[static_cast<std::size_t>(a)];
    full.delta(ja) = local.delta(a);
    for (Index b = 0; b < k; ++b) {
      full.omega(ja, support[static_cast<std::size_t>(b)]) = local.omega(a, b);
    }
  }
  full.zeta = local.zeta;
  return to_classifier(full, Provenance::Oracle);
}

double misclassification_rate(const DiscriminantRule& rule, const LabeledDataset& test) {
  return error_rate(rule.scores(test.features()), test);
}

double misclassification_rate(const QuadraticClassifier& classifier, const LabeledDataset& test) {
  return error_rate(classifier.scores(test.features()), test);
}

}  // namespace iissqda
