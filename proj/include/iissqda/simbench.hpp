#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"
#include "iissqda/iis_sqda.hpp"
#include "iissqda/scenario.hpp"
#include "iissqda/selection.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace iissqda {

/// Known scenario ids: example1, m1, m2, m3, m4, m5.
const std::vector<std::string>& scenario_models();

/// Smallest p that hosts the fixed nonzero coordinates of a model.
Index minimum_dimension(const std::string& model);

/// Builds one of the simulation designs. All coordinates below are 1-based:
///   m1, m4   Omega1_ij = 0.5^|i-j|; Omega on {5, 25, 45}: -0.29 diagonal, -0.15 off
///   m2       Omega1 = I; Omega on {10, 30, 50}: -0.6 diagonal, -0.15 off
///   m3       tridiagonal Omega1 (1 on the diagonal, 0.3 next to it), fixed Omega on {10, 30, 50}
///   m5       2 x 2 blocks (1, 0.4); Omega on {3, 6, 9, 12}; delta there ~ U[0.3, 0.7] drawn from `seed`
///   example1 m2 precisions with zero means
/// Other models use delta = (0.6, 0.8, 0, ..., 0) and mu1 = Sigma1 delta; prior 1/2.
/// Throws DimensionError for unknown models or p too small, SingularError if Omega2 is not SPD.
GaussianScenario make_scenario(const std::string& model, Index p, std::uint64_t seed = 0);

/// n1 draws from class 1 followed by n2 draws from class 2, via Cholesky factors of Sigma_k.
LabeledDataset sample(const GaussianScenario& scenario, Index n1, Index n2, std::uint64_t seed);

struct SelectionScore {
  Index fpMain = 0;
  Index fpInter = 0;
  Index fnMain = 0;
  Index fnInter = 0;
};

/// Selected main effects / interaction terms (squares included) against the truth.
SelectionScore score_selection(const QuadraticClassifier& classifier, const GaussianScenario& scenario);

struct ScreeningScore {
  Index fp = 0;  ///< kept variables outside the true interaction variables
  Index fn = 0;  ///< true interaction variables not kept
};

ScreeningScore score_screening(const IndexList& kept, const GaussianScenario& scenario);

/// Methods known to the harness.
const std::vector<std::string>& method_names();  // IIS-SQDA, Oracle, Bayes, PLR, PLR2, DSDA, LDA, QDA

struct BenchmarkConfig {
  std::string model = "m2";
  Index p = 50;
  Index n1 = 100;
  Index n2 = 100;
  int reps = 20;
  Index testSize = 10000;
  std::vector<std::string> methods{"IIS-SQDA", "Oracle", "PLR", "DSDA"};
  std::uint64_t seed = 1;
  int workers = 1;
  IisSqdaOptions iis;
  /// Used by PLR and PLR2 (lambda2 is forced to 0 there).
  ElasticNetConfig selection;
  Index plr2MaxDimension = 50000;
  bool allowLargePlr2 = false;
  /// Only run the screening stage of IIS-SQDA (no selection, MR not computed);
  /// the other methods are dropped.
  bool screeningOnly = false;
};

/// One method on one replication.
struct ReplicationRecord {
  int replication = 0;
  std::string method;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::optional<double> mr;
  std::optional<SelectionScore> selection;
  std::optional<ScreeningScore> screening;
  bool ridgeFallback = false;
  double seconds = 0.0;
};

struct Moment {
  int count = 0;
  double mean = 0.0;
  double se = 0.0;  ///< sd / sqrt(count); 0 when count < 2
};

/// Mean and standard error of a sample.
Moment summarize(const std::vector<double>& values);

struct MethodSummary {
  std::string method;
  int succeeded = 0;
  int failed = 0;
  std::optional<Moment> mr;
  std::optional<Moment> fpMain;
  std::optional<Moment> fpInter;
  std::optional<Moment> fnMain;
  std::optional<Moment> fnInter;
  std::optional<Moment> screeningFp;
  std::optional<Moment> screeningFn;
};

struct PerformanceReport {
  std::string scenario;
  BenchmarkConfig config;
  std::vector<std::uint64_t> replicationSeeds;
  std::vector<MethodSummary> methods;
  std::vector<ReplicationRecord> records;
  double seconds = 0.0;
  std::vector<std::string> notes;

  const MethodSummary* find(const std::string& method) const;
};

/// Seed of replication r: derive_seed(master, r). Inside a replication the
/// training sample uses stream 1, the test sample stream 2, and method m
/// stream 100 + (position of m in method_names()), so results do not depend
/// on which other methods run or in which order.
std::uint64_t replication_seed(std::uint64_t master, int replication);
std::uint64_t method_seed(std::uint64_t replicationSeed, const std::string& method);

/// Runs every method on `config.reps` independent train/test draws, on up to
/// `config.workers` threads. Method failures are recorded, never thrown.
/// Throws DimensionError for invalid configurations (reps < 1, unknown method).
PerformanceReport run_replications(const GaussianScenario& scenario, const BenchmarkConfig& config);

/// Aggregates per-replication records into per-method summaries (in `methods` order).
std::vector<MethodSummary> aggregate(const std::vector<ReplicationRecord>& records,
                                     const std::vector<std::string>& methods);

}  // namespace iissqda
