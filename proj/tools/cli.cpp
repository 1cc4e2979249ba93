#include "cli.hpp"

#include "iissqda/baselines.hpp"
#include "iissqda/classifiers.hpp"
#include "iissqda/iis_sqda.hpp"
#include "iissqda/serialization.hpp"
#include "iissqda/simbench.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace iissqda::cli {

namespace {

/// Bad flags or configuration; reported with exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw DataError("cannot create output directory '" + dir + "'");
  }
}

// Fills options of `sub` that were not given on the command line from a
// JSON object whose keys are the long option names.
void apply_config(CLI::App* sub, const std::string& path) {
  const Json doc = read_json_file(path);
  if (!doc.is_object()) {
    throw UsageError("config '" + path + "' must be a JSON object");
  }
  for (const auto& item : doc.items()) {
    CLI::Option* opt = item.key() == "config" ? nullptr : sub->get_option_no_throw("--" + item.key());
    if (opt == nullptr) {
      throw UsageError("config '" + path + "': unknown key '" + item.key() + "' for " + sub->get_name());
    }
    if (opt->count() > 0) {
      continue;
    }
    const Json& v = item.value();
    std::vector<std::string> values;
    auto text = [](const Json& x) { return x.is_string() ? x.get<std::string>() : x.dump(); };
    if (v.is_array()) {
      for (const Json& x : v) {
        values.push_back(text(x));
      }
    } else {
      values.push_back(text(v));
    }
    try {
      for (const std::string& s : values) {
        opt->add_result(s);
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw UsageError("config '" + path + "': bad value for '" + item.key() + "': " + e.what());
    }
  }
}

struct DataArgs {
  std::string data;
  std::string labelColumn = "class";
  std::string class1;
};

void add_data_options(CLI::App* sub, DataArgs& d) {
  sub->add_option("--data", d.data, "CSV file with a header row");
  sub->add_option("--label-column", d.labelColumn, "Name of the class label column")->capture_default_str();
  sub->add_option("--class1", d.class1, "Label value treated as class 1 (default: smaller label)");
}

LabeledDataset load_data(const DataArgs& d) {
  if (d.data.empty()) {
    throw UsageError("--data is required");
  }
  CsvOptions options;
  options.labelColumn = d.labelColumn;
  if (!d.class1.empty()) {
    options.class1Label = d.class1;
  }
  return load_csv(d.data, options);
}

struct ScreenArgs {
  std::string precision = "glasso";
  double glassoPenalty = 0.0;
  std::string mode = "threshold";
  double alpha = 0.05;
  double omega = -1.0;
  std::uint64_t seed = 1;
};

void add_screen_options(CLI::App* sub, ScreenArgs& s) {
  sub->add_option("--precision", s.precision, "Precision estimator")
      ->check(CLI::IsMember({"glasso"}))
      ->capture_default_str();
  sub->add_option("--glasso-penalty", s.glassoPenalty, "Fixed glasso penalty (<= 0: cross-validated)")
      ->capture_default_str();
  sub->add_option("--mode", s.mode, "Screening mode")
      ->check(CLI::IsMember({"threshold", "stepwise"}))
      ->capture_default_str();
  sub->add_option("--alpha", s.alpha, "Family-wise level of the chi-square cutoffs")
      ->check(CLI::Range(1e-12, 1.0))
      ->capture_default_str();
  sub->add_option("--omega", s.omega, "Screening threshold on the statistic scale (< 0: chi-square default)")
      ->capture_default_str();
  sub->add_option("--seed", s.seed, "Seed for cross-validation folds")->capture_default_str();
}

IisSqdaOptions iis_options(const ScreenArgs& s) {
  IisSqdaOptions o;
  o.precision = parse_precision_source(s.precision);
  o.glassoPenalty = s.glassoPenalty;
  o.mode = parse_screening_mode(s.mode);
  o.alpha = s.alpha;
  o.threshold = s.omega;
  o.seed = s.seed;
  return o;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string model = "m2";
  Index p = 50;
  Index n1 = 100;
  Index n2 = 100;
  Index testSize = 0;
  std::uint64_t seed = 1;
  std::string outDir = ".";
  std::string prefix;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const GaussianScenario scenario = make_scenario(a.model, a.p, a.seed);
  const std::string prefix =
      a.prefix.empty() ? a.model + "_p" + std::to_string(a.p) + "_seed" + std::to_string(a.seed) : a.prefix;
  ensure_dir(a.outDir);
  const LabeledDataset train = sample(scenario, a.n1, a.n2, derive_seed(a.seed, 1));
  const std::string trainPath = join_path(a.outDir, prefix + "_train.csv");
  write_csv(train, trainPath);
  out << "wrote " << trainPath << '\n';
  if (a.testSize > 0) {
    const Index t1 = std::max<Index>(2, a.testSize / 2);
    const Index t2 = std::max<Index>(2, a.testSize - t1);
    const LabeledDataset test = sample(scenario, t1, t2, derive_seed(a.seed, 2));
    const std::string testPath = join_path(a.outDir, prefix + "_test.csv");
    write_csv(test, testPath);
    out << "wrote " << testPath << '\n';
  }
  Json doc = scenario_to_json(scenario);
  doc["command"] = {{"model", a.model}, {"p", a.p},       {"n1", a.n1},
                    {"n2", a.n2},       {"seed", a.seed}, {"test-size", a.testSize}};
  const std::string scenarioPath = join_path(a.outDir, prefix + "_scenario.json");
  write_text_file(scenarioPath, doc.dump(2) + "\n");
  out << "wrote " << scenarioPath << '\n';
  return 0;
}

// ---- screen -----------------------------------------------------------------

struct ScreenCommand {
  DataArgs data;
  ScreenArgs screen;
  std::string outDir = ".";
  std::string prefix = "screening";
};

int cmd_screen(const ScreenCommand& a, std::ostream& out) {
  const LabeledDataset data = load_data(a.data);
  const IisSqdaFit fit = screen_stage(data, iis_options(a.screen));
  const ScreeningResult& r = fit.screening;
  ensure_dir(a.outDir);
  Json doc = screening_to_json(r, data.featureNames());
  doc["penalties"] = {fit.omega1.penalty, fit.omega2.penalty};
  doc["seed"] = a.screen.seed;
  const std::string jsonPath = join_path(a.outDir, a.prefix + ".json");
  write_text_file(jsonPath, doc.dump(2) + "\n");

  std::ostringstream csv;
  csv.precision(17);
  csv << "feature,D1,D2,selected\n";
  for (Index j = 0; j < data.p(); ++j) {
    const bool kept = std::binary_search(r.Ihat.begin(), r.Ihat.end(), j);
    csv << data.featureNames()[static_cast<std::size_t>(j)] << ',' << r.statsOmega1(j) << ','
        << r.statsOmega2(j) << ',' << (kept ? 1 : 0) << '\n';
  }
  const std::string csvPath = join_path(a.outDir, a.prefix + ".csv");
  write_text_file(csvPath, csv.str());
  out << "kept " << r.Ihat.size() << " of " << data.p() << " variables (" << to_string(r.mode) << ")";
  for (Index j : r.Ihat) {
    out << ' ' << data.featureNames()[static_cast<std::size_t>(j)];
  }
  out << "\nwrote " << jsonPath << "\nwrote " << csvPath << '\n';
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct FitCommand {
  DataArgs data;
  ScreenArgs screen;
  std::string method = "iis-sqda";
  int folds = 5;
  int nLambda = 50;
  std::string criterion;  // empty: the method's own default
  bool noRefit = false;
  bool allowLarge = false;
  std::string out = "model.json";
};

int cmd_fit(FitCommand a, std::ostream& out) {
  const LabeledDataset data = load_data(a.data);
  ElasticNetConfig selection = a.method == "iis-sqda" ? iis_sqda_selection_defaults() : ElasticNetConfig{};
  selection.folds = a.folds;
  selection.grid.nLambda = a.nLambda;
  if (!a.criterion.empty()) {
    selection.criterion = parse_cv_criterion(a.criterion);
  }
  QuadraticClassifier model;
  Json extra;
  if (a.method == "iis-sqda") {
    IisSqdaOptions o = iis_options(a.screen);
    o.selection = selection;
    o.refit = !a.noRefit;
    const IisSqdaFit fit = fit_iis_sqda(data, o);
    model = fit.classifier();
    Json screening = screening_to_json(fit.screening, data.featureNames());
    screening.erase("D1");
    screening.erase("D2");
    extra["screening"] = screening;
    if (!fit.selection.refitApplied) {
      extra["refitSkipped"] = fit.selection.refitSkipped;
    }
  } else if (a.method == "plr" || a.method == "plr2") {
    PlrOptions o;
    o.selection = selection;
    o.refit = !a.noRefit;
    o.seed = a.screen.seed;
    o.allowLargeBasis = a.allowLarge;
    model = plr_baseline(data, a.method == "plr" ? PlrBasis::MainsOnly : PlrBasis::AllInteractions, o);
  } else if (a.method == "dsda") {
    DsdaOptions o;
    o.folds = a.folds;
    o.seed = a.screen.seed;
    o.refit = !a.noRefit;
    model = to_classifier(dsda_baseline(data, o), a.noRefit ? Provenance::Penalized : Provenance::Refit);
  } else if (a.method == "lda") {
    model = to_classifier(lda_plugin(data), Provenance::Plugin);
  } else {
    model = to_classifier(qda_plugin(data), Provenance::Plugin);
  }
  Json doc = classifier_to_json(model, data.classNames());
  doc["method"] = a.method;
  doc["seed"] = a.screen.seed;
  doc["featureNames"] = data.featureNames();
  for (const auto& item : extra.items()) {
    doc[item.key()] = item.value();
  }
  write_text_file(a.out, doc.dump(2) + "\n");
  out << "method " << a.method << ": " << model.activeTerms().size() << " active terms, training error "
      << misclassification_rate(model, data) << "\nwrote " << a.out << '\n';
  return 0;
}

// ---- predict ----------------------------------------------------------------

struct PredictCommand {
  std::string model;
  DataArgs data;
  std::string out = "predictions.csv";
};

int cmd_predict(const PredictCommand& a, std::ostream& out) {
  if (a.model.empty()) {
    throw UsageError("--model is required");
  }
  if (a.data.data.empty()) {
    throw UsageError("--data is required");
  }
  std::array<std::string, 2> classNames;
  const QuadraticClassifier model = classifier_from_json(read_json_file(a.model), &classNames);
  const Matrix X = load_feature_csv(a.data.data, a.data.labelColumn);
  if (X.cols() != model.p) {
    throw DimensionError("model expects " + std::to_string(model.p) + " features but '" + a.data.data + "' has " +
                         std::to_string(X.cols()));
  }
  const Vector s = model.scores(X);
  std::ostringstream csv;
  csv.precision(17);
  csv << "row,score,predicted\n";
  for (Index i = 0; i < s.size(); ++i) {
    csv << i + 1 << ',' << s(i) << ',' << classNames[s(i) > 0.0 ? 0 : 1] << '\n';
  }
  write_text_file(a.out, csv.str());
  out << "wrote " << a.out << " (" << s.size() << " rows)\n";
  // Report the error rate when the file carries labels of both model classes.
  try {
    CsvOptions options;
    options.labelColumn = a.data.labelColumn;
    options.class1Label = classNames[0];
    const LabeledDataset labelled = load_csv(a.data.data, options);
    if (labelled.classNames() == classNames) {
      out << "misclassification rate " << misclassification_rate(model, labelled) << '\n';
    }
  } catch (const Error&) {
  }
  return 0;
}

// ---- benchmark --------------------------------------------------------------

struct BenchmarkCommand {
  std::string config;
  std::string model;
  Index p = 0;
  Index n1 = 0;
  Index n2 = 0;
  int reps = 0;
  Index testSize = 0;
  std::vector<std::string> methods;
  std::uint64_t seed = 0;
  int workers = 0;
  std::string mode;
  std::string precision;
  double alpha = 0.0;
  bool screeningOnly = false;
  std::string outDir = ".";
  std::string prefix = "benchmark";
};

int cmd_benchmark(const BenchmarkCommand& a, const CLI::App* sub, std::ostream& out, std::ostream& err) {
  BenchmarkConfig cfg;
  if (!a.config.empty()) {
    try {
      cfg = benchmark_config_from_json(read_json_file(a.config));
    } catch (const DataError& e) {
      throw UsageError(e.what());
    }
  }
  auto given = [&](const char* name) { return sub->get_option(name)->count() > 0; };
  if (given("--model")) cfg.model = a.model;
  if (given("--p")) cfg.p = a.p;
  if (given("--n1")) cfg.n1 = a.n1;
  if (given("--n2")) cfg.n2 = a.n2;
  if (given("--reps")) cfg.reps = a.reps;
  if (given("--test-size")) cfg.testSize = a.testSize;
  if (given("--methods")) cfg.methods = a.methods;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--workers")) cfg.workers = a.workers;
  if (given("--mode")) cfg.iis.mode = parse_screening_mode(a.mode);
  if (given("--precision")) cfg.iis.precision = parse_precision_source(a.precision);
  if (given("--alpha")) cfg.iis.alpha = a.alpha;
  if (given("--screening-only")) cfg.screeningOnly = a.screeningOnly;

  const auto& models = scenario_models();
  if (std::find(models.begin(), models.end(), cfg.model) == models.end()) {
    throw UsageError("unknown model '" + cfg.model + "'");
  }
  for (const std::string& m : cfg.methods) {
    const auto& names = method_names();
    if (std::find(names.begin(), names.end(), m) == names.end()) {
      throw UsageError("unknown method '" + m + "'");
    }
  }
  const GaussianScenario scenario = make_scenario(cfg.model, cfg.p, cfg.seed);
  const PerformanceReport report = run_replications(scenario, cfg);

  ensure_dir(a.outDir);
  const std::string base = join_path(a.outDir, a.prefix);
  write_text_file(base + "_config.json", benchmark_config_to_json(cfg).dump(2) + "\n");
  write_text_file(base + "_report.json", report_to_json(report).dump(2) + "\n");
  const std::string table = report_table_csv(report);
  write_text_file(base + "_table.csv", table);
  write_text_file(base + "_records.csv", report_records_csv(report));
  out << table << "wrote " << base << "_{config.json,report.json,table.csv,records.csv}\n";

  int failures = 0;
  for (const ReplicationRecord& r : report.records) {
    if (!r.ok) {
      ++failures;
      err << "error: replication " << r.replication << ", " << r.method << ": " << r.error << '\n';
    }
  }
  return failures == 0 ? 0 : 3;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interaction screening and sparse quadratic discriminant analysis"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "Draw a training (and test) sample from a model");
  std::string simConfig;
  simulate->add_option("--config", simConfig, "JSON file with option values");
  simulate->add_option("--model", sim.model, "Scenario")->check(CLI::IsMember(scenario_models()))->capture_default_str();
  simulate->add_option("--p", sim.p, "Dimension")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--n1", sim.n1, "Class 1 training size")->check(CLI::Range(2, 100000000))->capture_default_str();
  simulate->add_option("--n2", sim.n2, "Class 2 training size")->check(CLI::Range(2, 100000000))->capture_default_str();
  simulate->add_option("--test-size", sim.testSize, "Also write a test sample of this size")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  simulate->add_option("--out-dir", sim.outDir, "Output directory")->capture_default_str();
  simulate->add_option("--prefix", sim.prefix, "File name prefix (default <model>_p<p>_seed<seed>)");

  ScreenCommand scr;
  CLI::App* screenCmd = app.add_subcommand("screen", "Interaction screening on a labelled CSV");
  std::string screenConfig;
  screenCmd->add_option("--config", screenConfig, "JSON file with option values");
  add_data_options(screenCmd, scr.data);
  add_screen_options(screenCmd, scr.screen);
  screenCmd->add_option("--out-dir", scr.outDir, "Output directory")->capture_default_str();
  screenCmd->add_option("--prefix", scr.prefix, "File name prefix")->capture_default_str();

  FitCommand fitArgs;
  fitArgs.screen.mode = "stepwise";
  CLI::App* fitCmd = app.add_subcommand("fit", "Fit a classifier and write it as JSON");
  std::string fitConfig;
  fitCmd->add_option("--config", fitConfig, "JSON file with option values");
  add_data_options(fitCmd, fitArgs.data);
  add_screen_options(fitCmd, fitArgs.screen);
  fitCmd->add_option("--method", fitArgs.method, "Classifier")
      ->check(CLI::IsMember({"iis-sqda", "plr", "plr2", "dsda", "lda", "qda"}))
      ->capture_default_str();
  fitCmd->add_option("--folds", fitArgs.folds, "Cross-validation folds")->check(CLI::Range(2, 1000))->capture_default_str();
  fitCmd->add_option("--n-lambda", fitArgs.nLambda, "lambda1 grid size")->check(CLI::Range(1, 10000))->capture_default_str();
  fitCmd->add_option("--criterion", fitArgs.criterion,
                     "Cross-validation criterion (default: misclassification for iis-sqda, deviance otherwise)")
      ->check(CLI::IsMember({"deviance", "misclassification"}));
  fitCmd->add_flag("--no-refit", fitArgs.noRefit, "Keep the penalized coefficients");
  fitCmd->add_flag("--allow-large", fitArgs.allowLarge, "Lift the PLR2 basis-size guard");
  fitCmd->add_option("--out", fitArgs.out, "Model JSON path")->capture_default_str();

  PredictCommand pred;
  CLI::App* predictCmd = app.add_subcommand("predict", "Label the rows of a CSV with a fitted model");
  std::string predictConfig;
  predictCmd->add_option("--config", predictConfig, "JSON file with option values");
  predictCmd->add_option("--model", pred.model, "Model JSON written by fit");
  add_data_options(predictCmd, pred.data);
  predictCmd->add_option("--out", pred.out, "Predictions CSV path")->capture_default_str();

  BenchmarkCommand bench;
  CLI::App* benchCmd = app.add_subcommand("benchmark", "Replicated simulation study");
  benchCmd->add_option("--config", bench.config, "Benchmark JSON configuration");
  benchCmd->add_option("--model", bench.model, "Scenario");
  benchCmd->add_option("--p", bench.p, "Dimension")->check(CLI::PositiveNumber);
  benchCmd->add_option("--n1", bench.n1, "Class 1 training size");
  benchCmd->add_option("--n2", bench.n2, "Class 2 training size");
  benchCmd->add_option("--reps", bench.reps, "Replications")->check(CLI::PositiveNumber);
  benchCmd->add_option("--test-size", bench.testSize, "Test sample size");
  benchCmd->add_option("--methods", bench.methods, "Methods")->delimiter(',');
  benchCmd->add_option("--seed", bench.seed, "Master seed");
  benchCmd->add_option("--workers", bench.workers, "Worker threads")->check(CLI::PositiveNumber);
  benchCmd->add_option("--mode", bench.mode, "Screening mode")->check(CLI::IsMember({"threshold", "stepwise"}));
  benchCmd->add_option("--precision", bench.precision, "Precision source")->check(CLI::IsMember({"glasso", "oracle"}));
  benchCmd->add_option("--alpha", bench.alpha, "Screening level");
  benchCmd->add_flag("--screening-only", bench.screeningOnly, "Run only the screening stage of IIS-SQDA");
  benchCmd->add_option("--out-dir", bench.outDir, "Output directory")->capture_default_str();
  benchCmd->add_option("--prefix", bench.prefix, "File name prefix")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      if (!simConfig.empty()) {
        apply_config(simulate, simConfig);
      }
      return cmd_simulate(sim, out);
    }
    if (screenCmd->parsed()) {
      if (!screenConfig.empty()) {
        apply_config(screenCmd, screenConfig);
      }
      return cmd_screen(scr, out);
    }
    if (fitCmd->parsed()) {
      if (!fitConfig.empty()) {
        apply_config(fitCmd, fitConfig);
      }
      return cmd_fit(fitArgs, out);
    }
    if (predictCmd->parsed()) {
      if (!predictConfig.empty()) {
        apply_config(predictCmd, predictConfig);
      }
      return cmd_predict(pred, out);
    }
    return cmd_benchmark(bench, benchCmd, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace iissqda::cli
