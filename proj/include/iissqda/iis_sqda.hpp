#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"
#include "iissqda/precision.hpp"
#include "iissqda/scenario.hpp"
#include "iissqda/screening.hpp"
#include "iissqda/selection.hpp"

#include <cstdint>
#include <string>

namespace iissqda {

enum class PrecisionSource { Glasso, Oracle };

std::string to_string(PrecisionSource source);
PrecisionSource parse_precision_source(const std::string& text);

/// Selection settings used by the pipeline: misclassification-rate CV over
/// lambda2 in {1, 2, 5} * lambda1. A lasso-heavy mix tends to keep the square
/// terms and drop the correlated cross terms of the same variables.
ElasticNetConfig iis_sqda_selection_defaults();

struct IisSqdaOptions {
  PrecisionSource precision = PrecisionSource::Glasso;
  /// Fixed glasso penalty; a non-positive value selects it by cross-validation.
  double glassoPenalty = 0.0;
  int penaltyGridSize = 6;
  double penaltyMinRatio = 0.1;
  PenaltyCvOptions penaltyCv;
  GlassoOptions glasso;

  ScreeningMode mode = ScreeningMode::Stepwise;
  double alpha = 0.05;
  /// Screening threshold on the D scale; negative means default_threshold(n, p, alpha).
  double threshold = -1.0;

  ElasticNetConfig selection = iis_sqda_selection_defaults();
  bool refit = true;
  std::uint64_t seed = 1;
};

struct IisSqdaFit {
  PrecisionEstimate omega1;
  PrecisionEstimate omega2;
  ScreeningResult screening;
  SelectionOutcome selection;
  const QuadraticClassifier& classifier() const { return selection.final; }
};

/// Class-wise precision estimate: glasso on the class sample covariance with
/// the penalty fixed or chosen by K-fold likelihood cross-validation.
PrecisionEstimate estimate_precision(const Matrix& classRows, const IisSqdaOptions& options, std::uint64_t seed);

/// Both precisions (estimated, or the scenario's when options.precision is
/// Oracle) followed by interaction screening only.
IisSqdaFit screen_stage(const LabeledDataset& data, const IisSqdaOptions& options,
                        const GaussianScenario* scenario = nullptr);

/// Full two-stage procedure: precision estimation, interaction screening,
/// elastic-net logistic selection over mains plus screened interactions,
/// refit. `scenario` is required only for Oracle precisions.
IisSqdaFit fit_iis_sqda(const LabeledDataset& data, const IisSqdaOptions& options,
                        const GaussianScenario* scenario = nullptr);

}  // namespace iissqda
