#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace iissqda {

enum class Provenance { Penalized, Refit, Oracle, Bayes, Plugin };

std::string to_string(Provenance provenance);
Provenance parse_provenance(const std::string& text);

struct FitDiagnostics {
  double kktResidual = 0.0;
  int iterations = 0;
  bool converged = true;
  bool ridgeFallback = false;
  std::vector<double> objectiveTrace;
};

/// Linear score x' theta over the augmented basis of p features.
/// `theta` has length pTilde and is zero outside `activeSet`.
struct QuadraticClassifier {
  Index p = 0;
  Vector theta;
  IndexList activeSet;
  bool interceptIncluded = true;
  Provenance provenance = Provenance::Penalized;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  FitDiagnostics diagnostics;

  /// Builds theta from values on `columns` (sorted augmented indices); the
  /// active set keeps the columns whose value is nonzero.
  static QuadraticClassifier fromCoefficients(Index p, const IndexList& columns, const Vector& values,
                                              Provenance provenance);

  double score(const Vector& z) const;
  Vector scores(const Matrix& Z) const;
  /// Active indices other than the intercept.
  IndexList activeTerms() const;
};

enum class CvCriterion { Deviance, Misclassification };

std::string to_string(CvCriterion criterion);
CvCriterion parse_cv_criterion(const std::string& text);

/// How the automatic lambda grid is laid out.
struct LambdaGridSpec {
  int nLambda = 50;
  double minRatio = 1e-3;  ///< smallest lambda1 as a fraction of lambda1_max
  std::vector<double> lambda2Ratios{0.0, 0.01, 0.1, 1.0};  ///< lambda2 = ratio * lambda1
};

/// Penalty (lambda1 |theta|_1 + lambda2 |theta|_2^2, intercept unpenalized)
/// and solver settings.
struct ElasticNetConfig {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double tol = 1e-7;  ///< KKT residual target
  int maxIter = 100;  ///< outer (IRLS) iterations
  bool standardize = true;
  LambdaGridSpec grid;
  int folds = 5;
  CvCriterion criterion = CvCriterion::Deviance;
};

/// Explicit tuning grid. lambda2 values are absolute unless `lambda2Relative`,
/// in which case each is a multiplier of the paired lambda1.
struct CvGrid {
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  bool lambda2Relative = true;
};

/// Elastic-net penalized logistic regression restricted to the reduced basis.
/// Minimizes n^-1 sum l(x_i' theta, Delta_i) + pen(theta) by proximal Newton
/// steps (IRLS quadratic model solved by cyclic coordinate descent, then a
/// backtracking line search) on standardized columns; coefficients are
/// reported on the original scale. Throws ConvergenceError only for
/// non-finite iterates; an unconverged fit is flagged in its diagnostics.
QuadraticClassifier fit_elastic_net_logistic(const LabeledDataset& data, const ReducedIndexSet& reduced,
                                             const ElasticNetConfig& config);

/// Smallest lambda1 at which every penalized coefficient is zero.
double lambda1_max(const LabeledDataset& data, const ReducedIndexSet& reduced, bool standardize = true);

/// Automatic grid: nLambda log-spaced lambda1 values from lambda1_max down.
CvGrid default_cv_grid(const LabeledDataset& data, const ReducedIndexSet& reduced, const LambdaGridSpec& spec,
                       bool standardize = true);

/// Stratified K-fold choice of (lambda1, lambda2) minimizing the mean
/// held-out criterion. Ties go to the larger lambda1, then the larger lambda2.
ElasticNetConfig cv_tune(const LabeledDataset& data, const ReducedIndexSet& reduced, const CvGrid& grid,
                         const ElasticNetConfig& base, std::uint64_t seed);

/// Stratified fold assignment (fold id per row), reproducible from `seed`.
std::vector<int> stratified_folds(const LabeledDataset& data, int folds, std::uint64_t seed);

/// Unpenalized logistic MLE on `support` (sorted augmented indices; must
/// contain 0). When the likelihood has no finite maximizer the fit falls back
/// to ridge with lambda2 = 1e-4 and sets diagnostics.ridgeFallback.
/// Throws DimensionError if |support| >= n and SingularError if the design
/// restricted to the support is rank deficient.
QuadraticClassifier refit_unpenalized(const LabeledDataset& data, const IndexList& support);

/// CV tuning on default_cv_grid(base.grid), penalized fit at the chosen
/// penalties, then (optionally) an unpenalized refit on the selected support.
/// The refit is skipped, with the reason recorded, when the support is not
/// smaller than n or the restricted design is singular.
struct SelectionOutcome {
  ElasticNetConfig tuned;
  QuadraticClassifier penalized;
  QuadraticClassifier final;
  bool refitApplied = false;
  std::string refitSkipped;
};

SelectionOutcome tune_fit_refit(const LabeledDataset& data, const ReducedIndexSet& reduced,
                                const ElasticNetConfig& base, std::uint64_t seed, bool refit = true);

/// Mean logistic loss n^-1 sum l(x_i' theta, Delta_i) of a classifier on data.
double mean_logistic_loss(const QuadraticClassifier& classifier, const LabeledDataset& data);

}  // namespace iissqda
