#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"
#include "iissqda/scenario.hpp"
#include "iissqda/selection.hpp"

#include <vector>

namespace iissqda {

/// Discriminant Q(z) = 1/2 z' Omega z + delta' z + zeta; class 1 iff Q(z) > 0.
/// An empty `omega` (0 x 0) denotes a linear rule.
struct DiscriminantRule {
  Matrix omega;
  Vector delta;
  double zeta = 0.0;

  Index p() const { return delta.size(); }
  bool linear() const { return omega.size() == 0; }
  double score(const Vector& z) const;
  Vector scores(const Matrix& Z) const;
};

/// Population Bayes rule of a Gaussian scenario.
using BayesRule = DiscriminantRule;

/// Bayes rule with zeta = log(pi/(1-pi)) + 1/2 log(|Sigma2|/|Sigma1|) - 1/2 mu1' Omega1 mu1.
/// Throws SingularError if a precision is not positive definite.
BayesRule bayes_rule(const GaussianScenario& scenario);

/// log[pi phi1(z)] - log[(1-pi) phi2(z)] evaluated from the Gaussian densities directly.
double log_density_ratio(const GaussianScenario& scenario, const Vector& z);

/// 1 if the score is positive, otherwise 2 (a zero score goes to class 2).
int classify(const DiscriminantRule& rule, const Vector& z);
int classify(const QuadraticClassifier& classifier, const Vector& z);
std::vector<int> classify_all(const DiscriminantRule& rule, const Matrix& Z);
std::vector<int> classify_all(const QuadraticClassifier& classifier, const Matrix& Z);

/// Same rule on the augmented basis: intercept zeta, mains delta_j,
/// Z_j^2 with Omega_jj / 2 and Z_j Z_l (j < l) with Omega_jl.
QuadraticClassifier to_classifier(const DiscriminantRule& rule, Provenance provenance);

/// Plug-in LDA: sample means, pooled covariance (n - 2 denominator), prior n1/n.
/// Throws SingularError when the pooled covariance is not invertible.
DiscriminantRule lda_plugin(const LabeledDataset& data);

/// Plug-in QDA with per-class sample covariances (n_k - 1 denominator).
/// Throws SingularError when either class covariance is not invertible.
DiscriminantRule qda_plugin(const LabeledDataset& data);

/// Plug-in QDA restricted to the union of the true main-effect and
/// interaction variables, embedded back into p dimensions.
/// Throws DimensionError if that union is not smaller than min(n1, n2) - 1.
QuadraticClassifier oracle_classifier(const GaussianScenario& scenario, const LabeledDataset& data);

/// Fraction of rows whose predicted label differs from the stored one.
double misclassification_rate(const DiscriminantRule& rule, const LabeledDataset& test);
double misclassification_rate(const QuadraticClassifier& classifier, const LabeledDataset& test);

}  // namespace iissqda
