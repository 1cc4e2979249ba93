#include "iissqda/simbench.hpp"

#include "iissqda/baselines.hpp"
#include "iissqda/classifiers.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <thread>

namespace iissqda {

const std::vector<std::string>& scenario_models() {
  static const std::vector<std::string> models{"example1", "m1", "m2", "m3", "m4", "m5"};
  return models;
}

Index minimum_dimension(const std::string& model) {
  if (model == "m1" || model == "m4") {
    return 45;
  }
  if (model == "m5") {
    return 12;
  }
  if (model == "example1" || model == "m2" || model == "m3") {
    return 50;
  }
  throw DimensionError("unknown model '" + model + "' (expected example1, m1, m2, m3, m4 or m5)");
}

namespace {

// Sets a symmetric pair using 1-based coordinates.
void set_sym(Matrix& M, Index i, Index j, double value) {
  M(i - 1, j - 1) = value;
  M(j - 1, i - 1) = value;
}

Matrix three_variable_difference(Index p, Index a, Index b, Index c, double diag, double off) {
  Matrix omega = Matrix::Zero(p, p);
  for (Index v : {a, b, c}) {
    set_sym(omega, v, v, diag);
  }
  set_sym(omega, a, b, off);
  set_sym(omega, a, c, off);
  set_sym(omega, b, c, off);
  return omega;
}

Vector leading_delta(Index p) {
  Vector delta = Vector::Zero(p);
  delta(0) = 0.6;
  delta(1) = 0.8;
  return delta;
}

}  // namespace

GaussianScenario make_scenario(const std::string& model, Index p, std::uint64_t seed) {
  const Index minimum = minimum_dimension(model);
  if (p < minimum) {
    throw DimensionError("model " + model + " needs p >= " + std::to_string(minimum) + ", got " +
                         std::to_string(p));
  }
  Matrix omega1;
  Matrix omega;
  Vector delta = leading_delta(p);
  if (model == "m1" || model == "m4") {
    omega1.resize(p, p);
    for (Index i = 0; i < p; ++i) {
      for (Index j = 0; j < p; ++j) {
        omega1(i, j) = std::pow(0.5, static_cast<double>(std::abs(i - j)));
      }
    }
    omega = three_variable_difference(p, 5, 25, 45, -0.29, -0.15);
  } else if (model == "m2" || model == "example1") {
    omega1 = Matrix::Identity(p, p);
    omega = three_variable_difference(p, 10, 30, 50, -0.6, -0.15);
  } else if (model == "m3") {
    omega1 = Matrix::Identity(p, p);
    for (Index i = 0; i + 1 < p; ++i) {
      omega1(i, i + 1) = 0.3;
      omega1(i + 1, i) = 0.3;
    }
    omega = Matrix::Zero(p, p);
    set_sym(omega, 10, 10, -0.3785);
    set_sym(omega, 10, 30, 0.0616);
    set_sym(omega, 10, 50, 0.2037);
    set_sym(omega, 30, 30, -0.5482);
    set_sym(omega, 30, 50, 0.0286);
    set_sym(omega, 50, 50, -0.4614);
  } else if (model == "m5") {
    omega1 = Matrix::Identity(p, p);
    for (Index i = 0; i + 1 < p; i += 2) {
      omega1(i, i + 1) = 0.4;
      omega1(i + 1, i) = 0.4;
    }
    omega = Matrix::Zero(p, p);
    for (Index v : {3, 6, 9, 12}) {
      set_sym(omega, v, v, -0.2);
    }
    set_sym(omega, 3, 6, 0.4);
    set_sym(omega, 9, 12, 0.4);
    set_sym(omega, 3, 9, -0.4);
    set_sym(omega, 3, 12, -0.4);
    set_sym(omega, 6, 9, -0.4);
    set_sym(omega, 6, 12, -0.4);
    delta = Vector::Zero(p);
    std::mt19937_64 rng(derive_seed(seed, 5));
    std::uniform_real_distribution<double> unif(0.3, 0.7);
    for (Index v : {3, 6, 9, 12}) {
      delta(v - 1) = unif(rng);
    }
  }
  Matrix omega2 = omega1 + omega;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(omega2, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw SingularError("model " + model + ": Omega2 is not positive definite at p = " + std::to_string(p));
  }
  if (model == "example1") {
    return GaussianScenario::fromMean(model, omega1, omega2, Vector::Zero(p));
  }
  return GaussianScenario::fromPrecisions(model, omega1, omega2, delta);
}

LabeledDataset sample(const GaussianScenario& scenario, Index n1, Index n2, std::uint64_t seed) {
  if (n1 < 2 || n2 < 2) {
    throw DimensionError("sample: each class needs at least two rows");
  }
  const Index p = scenario.p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix X(n1 + n2, p);
  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(n1 + n2));
  for (int k = 1; k <= 2; ++k) {
    const Matrix& sigma = k == 1 ? scenario.sigma1 : scenario.sigma2;
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success) {
      throw SingularError("sample: Sigma" + std::to_string(k) + " has no Cholesky factor");
    }
    const Index rows = k == 1 ? n1 : n2;
    const Index offset = k == 1 ? 0 : n1;
    Matrix E(rows, p);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < p; ++j) {
        E(i, j) = normal(rng);
      }
    }
    X.middleRows(offset, rows) = E * llt.matrixU();
    if (k == 1) {
      X.middleRows(offset, rows).rowwise() += scenario.mu1.transpose();
    }
    labels.insert(labels.end(), static_cast<std::size_t>(rows), k);
  }
  return LabeledDataset(std::move(X), std::move(labels));
}

SelectionScore score_selection(const QuadraticClassifier& classifier, const GaussianScenario& scenario) {
  if (classifier.p != scenario.p) {
    throw DimensionError("score_selection: classifier and scenario dimensions differ");
  }
  const AugmentedIndexMap map(scenario.p);
  std::set<Index> mains;
  std::set<std::pair<Index, Index>> inters;
  for (Index idx : classifier.activeTerms()) {
    const Term t = map.term(idx);
    if (t.kind == TermKind::Main) {
      mains.insert(t.first);
    } else if (t.kind == TermKind::Interaction) {
      inters.emplace(t.first, t.second);
    }
  }
  const std::set<Index> trueMains(scenario.trueMainSupport.begin(), scenario.trueMainSupport.end());
  const std::set<std::pair<Index, Index>> trueInters(scenario.trueInteractionSupport.begin(),
                                                     scenario.trueInteractionSupport.end());
  SelectionScore s;
  for (Index j : mains) {
    s.fpMain += trueMains.count(j) == 0 ? 1 : 0;
  }
  for (Index j : trueMains) {
    s.fnMain += mains.count(j) == 0 ? 1 : 0;
  }
  for (const auto& t : inters) {
    s.fpInter += trueInters.count(t) == 0 ? 1 : 0;
  }
  for (const auto& t : trueInters) {
    s.fnInter += inters.count(t) == 0 ? 1 : 0;
  }
  return s;
}

ScreeningScore score_screening(const IndexList& kept, const GaussianScenario& scenario) {
  const std::set<Index> truth(scenario.trueInteractionVariables.begin(), scenario.trueInteractionVariables.end());
  const std::set<Index> got(kept.begin(), kept.end());
  ScreeningScore s;
  for (Index j : got) {
    s.fp += truth.count(j) == 0 ? 1 : 0;
  }
  for (Index j : truth) {
    s.fn += got.count(j) == 0 ? 1 : 0;
  }
  return s;
}

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"IIS-SQDA", "Oracle", "Bayes", "PLR", "PLR2", "DSDA", "LDA", "QDA"};
  return names;
}

namespace {

bool linear_method(const std::string& method) {
  return method == "PLR" || method == "DSDA" || method == "LDA";
}

std::size_t method_position(const std::string& method) {
  const auto& names = method_names();
  const auto it = std::find(names.begin(), names.end(), method);
  if (it == names.end()) {
    throw DimensionError("unknown method '" + method + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

void run_method(const std::string& method, const GaussianScenario& scenario, const BenchmarkConfig& config,
                const LabeledDataset& train, const LabeledDataset* test, ReplicationRecord& rec) {
  auto withClassifier = [&](const QuadraticClassifier& c) {
    if (test != nullptr) {
      rec.mr = misclassification_rate(c, *test);
    }
    rec.selection = score_selection(c, scenario);
    rec.ridgeFallback = c.diagnostics.ridgeFallback;
  };
  auto withRule = [&](const DiscriminantRule& rule, Provenance provenance) {
    if (test != nullptr) {
      rec.mr = misclassification_rate(rule, *test);
    }
    rec.selection = score_selection(to_classifier(rule, provenance), scenario);
  };
  if (method == "IIS-SQDA") {
    IisSqdaOptions options = config.iis;
    options.seed = rec.seed;
    if (config.screeningOnly) {
      const IisSqdaFit fit = screen_stage(train, options, &scenario);
      rec.screening = score_screening(fit.screening.Ihat, scenario);
    } else {
      const IisSqdaFit fit = fit_iis_sqda(train, options, &scenario);
      rec.screening = score_screening(fit.screening.Ihat, scenario);
      withClassifier(fit.classifier());
    }
  } else if (method == "Oracle") {
    withClassifier(oracle_classifier(scenario, train));
  } else if (method == "Bayes") {
    withRule(bayes_rule(scenario), Provenance::Bayes);
  } else if (method == "PLR" || method == "PLR2") {
    PlrOptions options;
    options.selection = config.selection;
    options.maxAugmentedDimension = config.plr2MaxDimension;
    options.allowLargeBasis = config.allowLargePlr2;
    options.seed = rec.seed;
    withClassifier(plr_baseline(train, method == "PLR" ? PlrBasis::MainsOnly : PlrBasis::AllInteractions, options));
  } else if (method == "DSDA") {
    DsdaOptions options;
    options.folds = config.selection.folds;
    options.seed = rec.seed;
    withRule(dsda_baseline(train, options), Provenance::Refit);
  } else if (method == "LDA") {
    withRule(lda_plugin(train), Provenance::Plugin);
  } else if (method == "QDA") {
    withRule(qda_plugin(train), Provenance::Plugin);
  }
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t master, int replication) {
  return derive_seed(master, static_cast<std::uint64_t>(replication));
}

std::uint64_t method_seed(std::uint64_t replicationSeed, const std::string& method) {
  return derive_seed(replicationSeed, 100 + method_position(method));
}

Moment summarize(const std::vector<double>& values) {
  Moment m;
  m.count = static_cast<int>(values.size());
  if (values.empty()) {
    return m;
  }
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  m.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - m.mean) * (v - m.mean);
    }
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    m.se = sd / std::sqrt(static_cast<double>(values.size()));
  }
  return m;
}

std::vector<MethodSummary> aggregate(const std::vector<ReplicationRecord>& records,
                                     const std::vector<std::string>& methods) {
  std::vector<MethodSummary> out;
  for (const std::string& method : methods) {
    MethodSummary s;
    s.method = method;
    std::vector<double> mr, fpMain, fpInter, fnMain, fnInter, sfp, sfn;
    for (const ReplicationRecord& r : records) {
      if (r.method != method) {
        continue;
      }
      if (!r.ok) {
        ++s.failed;
        continue;
      }
      ++s.succeeded;
      if (r.mr) {
        mr.push_back(*r.mr);
      }
      if (r.selection) {
        fpMain.push_back(static_cast<double>(r.selection->fpMain));
        fnMain.push_back(static_cast<double>(r.selection->fnMain));
        fpInter.push_back(static_cast<double>(r.selection->fpInter));
        fnInter.push_back(static_cast<double>(r.selection->fnInter));
      }
      if (r.screening) {
        sfp.push_back(static_cast<double>(r.screening->fp));
        sfn.push_back(static_cast<double>(r.screening->fn));
      }
    }
    auto put = [](std::optional<Moment>& slot, const std::vector<double>& v) {
      if (!v.empty()) {
        slot = summarize(v);
      }
    };
    put(s.mr, mr);
    put(s.fpMain, fpMain);
    put(s.fnMain, fnMain);
    if (!linear_method(method)) {
      put(s.fpInter, fpInter);
      put(s.fnInter, fnInter);
    }
    put(s.screeningFp, sfp);
    put(s.screeningFn, sfn);
    out.push_back(std::move(s));
  }
  return out;
}

const MethodSummary* PerformanceReport::find(const std::string& method) const {
  for (const MethodSummary& m : methods) {
    if (m.method == method) {
      return &m;
    }
  }
  return nullptr;
}

PerformanceReport run_replications(const GaussianScenario& scenario, const BenchmarkConfig& requested) {
  BenchmarkConfig config = requested;
  if (config.screeningOnly) {
    // Nothing else produces a screening set, and there is no test sample.
    config.methods = {"IIS-SQDA"};
  }
  if (config.reps < 1) {
    throw DimensionError("run_replications: reps must be at least 1");
  }
  if (config.methods.empty()) {
    throw DimensionError("run_replications: no methods requested");
  }
  for (const std::string& m : config.methods) {
    method_position(m);
  }
  if (config.n1 < 2 || config.n2 < 2) {
    throw DimensionError("run_replications: n1 and n2 must be at least 2");
  }
  if (!config.screeningOnly && config.testSize < 4) {
    throw DimensionError("run_replications: testSize must be at least 4");
  }
  const auto start = std::chrono::steady_clock::now();
  PerformanceReport report;
  report.scenario = scenario.id;
  report.config = config;
  const std::size_t nm = config.methods.size();
  std::vector<ReplicationRecord> records(static_cast<std::size_t>(config.reps) * nm);
  for (int r = 0; r < config.reps; ++r) {
    report.replicationSeeds.push_back(replication_seed(config.seed, r));
  }

  const Index test1 = static_cast<Index>(std::llround(static_cast<double>(config.testSize) * scenario.prior));
  const Index test2 = config.testSize - test1;

  auto runOne = [&](int r) {
    const std::uint64_t repSeed = report.replicationSeeds[static_cast<std::size_t>(r)];
    const LabeledDataset train = sample(scenario, config.n1, config.n2, derive_seed(repSeed, 1));
    std::optional<LabeledDataset> test;
    if (!config.screeningOnly) {
      test.emplace(sample(scenario, test1, test2, derive_seed(repSeed, 2)));
    }
    for (std::size_t m = 0; m < nm; ++m) {
      ReplicationRecord& rec = records[static_cast<std::size_t>(r) * nm + m];
      rec.replication = r;
      rec.method = config.methods[m];
      rec.seed = method_seed(repSeed, rec.method);
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run_method(rec.method, scenario, config, train, test ? &*test : nullptr, rec);
        rec.ok = true;
      } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        rec.mr.reset();
        rec.selection.reset();
        rec.screening.reset();
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const int workers = std::max(1, std::min(config.workers, config.reps));
  if (workers == 1) {
    for (int r = 0; r < config.reps; ++r) {
      runOne(r);
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < config.reps; r = next++) {
          runOne(r);
        }
      });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  report.records = std::move(records);
  report.methods = aggregate(report.records, config.methods);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.notes.push_back("training sizes n1 = " + std::to_string(config.n1) + ", n2 = " + std::to_string(config.n2) +
                         " are an assumption for models without stated sample sizes");
  return report;
}

}  // namespace iissqda
