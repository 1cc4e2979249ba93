#pragma once

#include "iissqda/iis_sqda.hpp"
#include "iissqda/scenario.hpp"
#include "iissqda/screening.hpp"
#include "iissqda/selection.hpp"
#include "iissqda/simbench.hpp"

#include <json.hpp>

#include <array>
#include <string>

namespace iissqda {

using Json = nlohmann::ordered_json;

// Feature indices in every JSON/CSV document are 1-based.

/// {format, p, classNames, provenance, tuning, activeSet: [{kind, j, l, value}]}.
Json classifier_to_json(const QuadraticClassifier& classifier,
                        const std::array<std::string, 2>& classNames = {"1", "2"});

/// Inverse of classifier_to_json. Throws DataError on malformed documents.
QuadraticClassifier classifier_from_json(const Json& doc, std::array<std::string, 2>* classNames = nullptr);

Json screening_to_json(const ScreeningResult& result, const std::vector<std::string>& featureNames = {});

/// Scenario parameters: id, p, prior, mu1, delta, precisions as (i, j, value)
/// upper-triangle entries, and the true supports.
Json scenario_to_json(const GaussianScenario& scenario);

/// Benchmark configuration schema:
///   {model, p, n1, n2, reps, testSize, methods[], seed, workers, screeningOnly,
///    screening: {alpha, mode, precision, threshold, glassoPenalty},
///    selection: {folds, nLambda, minRatio, lambda2Ratios[], criterion, tol, refit},
///    plr2: {maxDimension, allowLarge}}
/// Missing keys keep the values of `defaults`; unknown keys raise DataError.
BenchmarkConfig benchmark_config_from_json(const Json& doc, const BenchmarkConfig& defaults = {});
Json benchmark_config_to_json(const BenchmarkConfig& config);

/// Summary table, seeds, notes, timing and the raw per-replication log.
Json report_to_json(const PerformanceReport& report);

/// Method x measure table; cells read "mean (se)", "--" where a measure does not apply.
std::string report_table_csv(const PerformanceReport& report);

/// One row per (replication, method) with every recorded measure.
std::string report_records_csv(const PerformanceReport& report);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace iissqda
