#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"
#include "iissqda/precision.hpp"
#include "iissqda/scenario.hpp"

#include <span>
#include <string>

namespace iissqda {

enum class ScreeningMode { Threshold, Stepwise };

std::string to_string(ScreeningMode mode);
ScreeningMode parse_screening_mode(const std::string& text);

/// Variance-difference statistics under both innovated transforms and the
/// selected index sets. All index sets are 0-based and sorted.
struct ScreeningResult {
  Vector statsOmega1;
  Vector statsOmega2;
  double threshold = 0.0;
  IndexList A1hat;
  IndexList A2hat;
  IndexList Ihat;
  ScreeningMode mode = ScreeningMode::Threshold;
};

/// Row-wise innovated transform: row i of the output is omega * z_i (i.e. Z * omega).
Matrix innovated_transform(const Matrix& Z, const PrecisionEstimate& omegaHat);

/// log(weighted variance) - sum_k (n_k/n) log(class variance) for one column.
///
/// Class variances use the n_k denominator and the pooled variance is their
/// n_k/n-weighted average, so n * D equals the Gaussian likelihood-ratio
/// statistic for equal variances. Throws DataError("degenerate transformed
/// feature") when either class variance is zero.
double variance_statistic(std::span<const double> column, std::span<const int> labels, Index n1, Index n2);

/// Bonferroni chi-square(1) cutoff on the n * D scale, divided by n:
/// q_{chi2_1}(1 - alpha / p) / n.
double default_threshold(Index n, Index p, double alpha);

/// Threshold-mode screening: A_k = { j : D_j(Omega_k transform) > threshold }.
ScreeningResult screen(const LabeledDataset& data, const PrecisionEstimate& omega1,
                       const PrecisionEstimate& omega2, double threshold);

struct StepwiseOptions {
  double alphaEnter = 0.05;
  double alphaStay = 0.05;
  /// Threshold for the starting (threshold-mode) sets; negative means
  /// default_threshold(n, p, alphaEnter).
  double initialThreshold = -1.0;
};

/// Forward/backward refinement of the threshold-mode sets. A candidate's
/// statistic is computed on the residual of its transformed column after
/// within-class regression on the currently selected transformed columns.
/// Variables leave when their statistic given the rest drops below the stay
/// cutoff and never re-enter, so the loop ends after at most 2p moves.
ScreeningResult stepwise_screen(const LabeledDataset& data, const PrecisionEstimate& omega1,
                                const PrecisionEstimate& omega2, const StepwiseOptions& options = {});

/// Population index sets of nonzero diagonals of
///   Sigma~1 = Omega1 Sigma2 Omega1 - Omega1  and  Sigma~2 = Omega2 - Omega2 Sigma1 Omega2
/// and their union. `zeroTol` decides what counts as a nonzero diagonal.
struct PopulationInteractionSets {
  IndexList A1;
  IndexList A2;
  IndexList I;
};

PopulationInteractionSets population_interaction_sets(const Matrix& omega1, const Matrix& omega2,
                                                      double zeroTol = 1e-10);

/// Population sets of a scenario; I coincides with the nonzero rows of Omega.
PopulationInteractionSets population_interaction_set(const GaussianScenario& scenario);

}  // namespace iissqda
