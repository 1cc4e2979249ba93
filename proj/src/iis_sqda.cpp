#include "iissqda/iis_sqda.hpp"

namespace iissqda {

std::string to_string(PrecisionSource source) {
  return source == PrecisionSource::Glasso ? "glasso" : "oracle";
}

PrecisionSource parse_precision_source(const std::string& text) {
  if (text == "glasso") {
    return PrecisionSource::Glasso;
  }
  if (text == "oracle") {
    return PrecisionSource::Oracle;
  }
  throw DataError("unknown precision source '" + text + "' (expected glasso or oracle)");
}

ElasticNetConfig iis_sqda_selection_defaults() {
  ElasticNetConfig config;
  config.criterion = CvCriterion::Misclassification;
  config.grid.lambda2Ratios = {1.0, 2.0, 5.0};
  return config;
}

PrecisionEstimate estimate_precision(const Matrix& classRows, const IisSqdaOptions& options, std::uint64_t seed) {
  const Matrix S = sample_covariance(classRows);
  double rho = options.glassoPenalty;
  if (!(rho > 0.0)) {
    const std::vector<double> grid = default_penalty_grid(S, options.penaltyGridSize, options.penaltyMinRatio);
    PenaltyCvOptions cv = options.penaltyCv;
    cv.seed = seed;
    rho = select_penalty_cv(classRows, grid, cv);
  }
  return graphical_lasso(S, rho, options.glasso);
}

IisSqdaFit screen_stage(const LabeledDataset& data, const IisSqdaOptions& options,
                        const GaussianScenario* scenario) {
  IisSqdaFit fit;
  if (options.precision == PrecisionSource::Oracle) {
    if (scenario == nullptr) {
      throw DataError("oracle precisions need a known scenario");
    }
    if (scenario->p != data.p()) {
      throw DimensionError("scenario and data dimensions differ");
    }
    fit.omega1 = PrecisionEstimate::fromMatrix(scenario->omega1);
    fit.omega2 = PrecisionEstimate::fromMatrix(scenario->omega2);
  } else {
    fit.omega1 = estimate_precision(data.classRows(1), options, derive_seed(options.seed, 1));
    fit.omega2 = estimate_precision(data.classRows(2), options, derive_seed(options.seed, 2));
  }
  if (options.mode == ScreeningMode::Threshold) {
    const double threshold =
        options.threshold >= 0.0 ? options.threshold : default_threshold(data.n(), data.p(), options.alpha);
    fit.screening = screen(data, fit.omega1, fit.omega2, threshold);
  } else {
    StepwiseOptions step;
    step.alphaEnter = options.alpha;
    step.alphaStay = options.alpha;
    step.initialThreshold = options.threshold;
    fit.screening = stepwise_screen(data, fit.omega1, fit.omega2, step);
  }
  return fit;
}

IisSqdaFit fit_iis_sqda(const LabeledDataset& data, const IisSqdaOptions& options,
                        const GaussianScenario* scenario) {
  IisSqdaFit fit = screen_stage(data, options, scenario);
  const ReducedIndexSet reduced(data.p(), fit.screening.Ihat);
  fit.selection = tune_fit_refit(data, reduced, options.selection, derive_seed(options.seed, 3), options.refit);
  return fit;
}

}  // namespace iissqda
