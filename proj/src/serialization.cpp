#include "iissqda/serialization.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace iissqda {

namespace {

constexpr const char* kModelFormat = "iissqda-model";

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& context) {
  if (!obj.is_object()) {
    throw DataError(context + ": expected a JSON object");
  }
  for (const auto& item : obj.items()) {
    if (allowed.count(item.key()) == 0) {
      throw DataError(context + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read_into(const Json& obj, const char* key, T& target, const std::string& context) {
  if (!obj.contains(key)) {
    return;
  }
  try {
    target = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": bad value for '" + key + "': " + e.what());
  }
}

Json index_list(const IndexList& list) {
  Json out = Json::array();
  for (Index j : list) {
    out.push_back(j + 1);
  }
  return out;
}

Json upper_entries(const Matrix& M) {
  Json out = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = i; j < M.cols(); ++j) {
      if (M(i, j) != 0.0) {
        out.push_back(Json::array({i + 1, j + 1, M(i, j)}));
      }
    }
  }
  return out;
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) {
    out.push_back(v(i));
  }
  return out;
}

void read_selection(const Json& s, ElasticNetConfig& sel, const std::string& sctx) {
  read_into(s, "folds", sel.folds, sctx);
  read_into(s, "nLambda", sel.grid.nLambda, sctx);
  read_into(s, "minRatio", sel.grid.minRatio, sctx);
  read_into(s, "lambda2Ratios", sel.grid.lambda2Ratios, sctx);
  read_into(s, "tol", sel.tol, sctx);
  if (s.contains("criterion")) {
    std::string criterion;
    read_into(s, "criterion", criterion, sctx);
    sel.criterion = parse_cv_criterion(criterion);
  }
}

}  // namespace

Json classifier_to_json(const QuadraticClassifier& classifier, const std::array<std::string, 2>& classNames) {
  const AugmentedIndexMap map(classifier.p);
  Json doc;
  doc["format"] = kModelFormat;
  doc["p"] = classifier.p;
  doc["classNames"] = Json::array({classNames[0], classNames[1]});
  doc["provenance"] = to_string(classifier.provenance);
  doc["tuning"] = {{"lambda1", classifier.lambda1},
                   {"lambda2", classifier.lambda2},
                   {"ridgeFallback", classifier.diagnostics.ridgeFallback},
                   {"converged", classifier.diagnostics.converged}};
  Json active = Json::array();
  for (Index idx : classifier.activeSet) {
    const Term t = map.term(idx);
    Json rec;
    switch (t.kind) {
      case TermKind::Intercept:
        rec = {{"kind", "intercept"}, {"j", nullptr}, {"l", nullptr}};
        break;
      case TermKind::Main:
        rec = {{"kind", "main"}, {"j", t.first + 1}, {"l", nullptr}};
        break;
      case TermKind::Interaction:
        rec = {{"kind", "interaction"}, {"j", t.first + 1}, {"l", t.second + 1}};
        break;
    }
    rec["value"] = classifier.theta(idx);
    active.push_back(rec);
  }
  doc["activeSet"] = active;
  return doc;
}

QuadraticClassifier classifier_from_json(const Json& doc, std::array<std::string, 2>* classNames) {
  const std::string context = "model";
  try {
    if (!doc.is_object() || doc.value("format", std::string()) != kModelFormat) {
      throw DataError("model: not an iissqda model document");
    }
    const Index p = doc.at("p").get<Index>();
    if (p < 1) {
      throw DataError("model: p must be positive");
    }
    const AugmentedIndexMap map(p);
    IndexList columns;
    std::vector<double> values;
    for (const Json& rec : doc.at("activeSet")) {
      const std::string kind = rec.at("kind").get<std::string>();
      Term t;
      if (kind == "intercept") {
        t = Term{};
      } else if (kind == "main") {
        const Index j = rec.at("j").get<Index>() - 1;
        t = Term{TermKind::Main, j, j};
      } else if (kind == "interaction") {
        t = Term{TermKind::Interaction, rec.at("j").get<Index>() - 1, rec.at("l").get<Index>() - 1};
      } else {
        throw DataError("model: unknown term kind '" + kind + "'");
      }
      if (t.kind != TermKind::Intercept &&
          (t.first < 0 || t.second < t.first || t.second >= p)) {
        throw DataError("model: feature index out of range in activeSet");
      }
      columns.push_back(map.index(t));
      values.push_back(rec.at("value").get<double>());
    }
    std::vector<std::size_t> order(columns.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
      order[k] = k;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return columns[a] < columns[b]; });
    IndexList sortedColumns;
    Vector sortedValues(static_cast<Index>(order.size()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k > 0 && columns[order[k]] == sortedColumns.back()) {
        throw DataError("model: duplicate term in activeSet");
      }
      sortedColumns.push_back(columns[order[k]]);
      sortedValues(static_cast<Index>(k)) = values[order[k]];
    }
    const Provenance prov = parse_provenance(doc.value("provenance", std::string("penalized")));
    QuadraticClassifier c = QuadraticClassifier::fromCoefficients(p, sortedColumns, sortedValues, prov);
    if (doc.contains("tuning")) {
      const Json& tuning = doc.at("tuning");
      c.lambda1 = tuning.value("lambda1", 0.0);
      c.lambda2 = tuning.value("lambda2", 0.0);
      c.diagnostics.ridgeFallback = tuning.value("ridgeFallback", false);
      c.diagnostics.converged = tuning.value("converged", true);
    }
    if (classNames != nullptr) {
      (*classNames)[0] = "1";
      (*classNames)[1] = "2";
      if (doc.contains("classNames")) {
        const auto names = doc.at("classNames").get<std::vector<std::string>>();
        if (names.size() != 2) {
          throw DataError("model: classNames must have two entries");
        }
        (*classNames)[0] = names[0];
        (*classNames)[1] = names[1];
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(context + ": " + e.what());
  }
}

Json screening_to_json(const ScreeningResult& result, const std::vector<std::string>& featureNames) {
  Json doc;
  doc["mode"] = to_string(result.mode);
  doc["threshold"] = result.threshold;
  doc["A1"] = index_list(result.A1hat);
  doc["A2"] = index_list(result.A2hat);
  doc["I"] = index_list(result.Ihat);
  if (!featureNames.empty()) {
    Json names = Json::array();
    for (Index j : result.Ihat) {
      names.push_back(featureNames[static_cast<std::size_t>(j)]);
    }
    doc["Inames"] = names;
  }
  doc["D1"] = vector_json(result.statsOmega1);
  doc["D2"] = vector_json(result.statsOmega2);
  return doc;
}

Json scenario_to_json(const GaussianScenario& scenario) {
  Json doc;
  doc["id"] = scenario.id;
  doc["p"] = scenario.p;
  doc["prior"] = scenario.prior;
  doc["mu1"] = vector_json(scenario.mu1);
  doc["delta"] = vector_json(scenario.delta);
  doc["omega1"] = upper_entries(scenario.omega1);
  doc["omega2"] = upper_entries(scenario.omega2);
  doc["trueMainSupport"] = index_list(scenario.trueMainSupport);
  Json inter = Json::array();
  for (const auto& [j, l] : scenario.trueInteractionSupport) {
    inter.push_back(Json::array({j + 1, l + 1}));
  }
  doc["trueInteractionSupport"] = inter;
  doc["trueInteractionVariables"] = index_list(scenario.trueInteractionVariables);
  return doc;
}

BenchmarkConfig benchmark_config_from_json(const Json& doc, const BenchmarkConfig& defaults) {
  const std::string ctx = "config";
  check_keys(doc,
             {"model", "p", "n1", "n2", "reps", "testSize", "methods", "seed", "workers", "screeningOnly",
              "screening", "selection", "baselineSelection", "plr2"},
             ctx);
  BenchmarkConfig c = defaults;
  read_into(doc, "model", c.model, ctx);
  read_into(doc, "p", c.p, ctx);
  read_into(doc, "n1", c.n1, ctx);
  read_into(doc, "n2", c.n2, ctx);
  read_into(doc, "reps", c.reps, ctx);
  read_into(doc, "testSize", c.testSize, ctx);
  read_into(doc, "methods", c.methods, ctx);
  read_into(doc, "seed", c.seed, ctx);
  read_into(doc, "workers", c.workers, ctx);
  read_into(doc, "screeningOnly", c.screeningOnly, ctx);
  if (doc.contains("screening")) {
    const Json& s = doc.at("screening");
    const std::string sctx = ctx + ".screening";
    check_keys(s, {"alpha", "mode", "precision", "threshold", "glassoPenalty"}, sctx);
    read_into(s, "alpha", c.iis.alpha, sctx);
    read_into(s, "threshold", c.iis.threshold, sctx);
    read_into(s, "glassoPenalty", c.iis.glassoPenalty, sctx);
    if (s.contains("mode")) {
      std::string mode;
      read_into(s, "mode", mode, sctx);
      c.iis.mode = parse_screening_mode(mode);
    }
    if (s.contains("precision")) {
      std::string precision;
      read_into(s, "precision", precision, sctx);
      c.iis.precision = parse_precision_source(precision);
    }
  }
  if (doc.contains("selection")) {
    // Applies to the IIS-SQDA stage and the baselines; unspecified keys keep
    // each one's own defaults.
    const Json& s = doc.at("selection");
    const std::string sctx = ctx + ".selection";
    check_keys(s, {"folds", "nLambda", "minRatio", "lambda2Ratios", "criterion", "tol", "refit"}, sctx);
    read_selection(s, c.iis.selection, sctx);
    read_selection(s, c.selection, sctx);
    read_into(s, "refit", c.iis.refit, sctx);
  }
  if (doc.contains("baselineSelection")) {
    const Json& s = doc.at("baselineSelection");
    const std::string sctx = ctx + ".baselineSelection";
    check_keys(s, {"folds", "nLambda", "minRatio", "lambda2Ratios", "criterion", "tol"}, sctx);
    read_selection(s, c.selection, sctx);
  }
  if (doc.contains("plr2")) {
    const Json& s = doc.at("plr2");
    check_keys(s, {"maxDimension", "allowLarge"}, ctx + ".plr2");
    read_into(s, "maxDimension", c.plr2MaxDimension, ctx + ".plr2");
    read_into(s, "allowLarge", c.allowLargePlr2, ctx + ".plr2");
  }
  return c;
}

Json benchmark_config_to_json(const BenchmarkConfig& c) {
  Json doc;
  doc["model"] = c.model;
  doc["p"] = c.p;
  doc["n1"] = c.n1;
  doc["n2"] = c.n2;
  doc["reps"] = c.reps;
  doc["testSize"] = c.testSize;
  doc["methods"] = c.methods;
  doc["seed"] = c.seed;
  doc["workers"] = c.workers;
  doc["screeningOnly"] = c.screeningOnly;
  doc["screening"] = {{"alpha", c.iis.alpha},
                      {"mode", to_string(c.iis.mode)},
                      {"precision", to_string(c.iis.precision)},
                      {"threshold", c.iis.threshold},
                      {"glassoPenalty", c.iis.glassoPenalty}};
  auto selectionJson = [](const ElasticNetConfig& sel) {
    return Json{{"folds", sel.folds},
                {"nLambda", sel.grid.nLambda},
                {"minRatio", sel.grid.minRatio},
                {"lambda2Ratios", sel.grid.lambda2Ratios},
                {"criterion", to_string(sel.criterion)},
                {"tol", sel.tol}};
  };
  doc["selection"] = selectionJson(c.iis.selection);
  doc["selection"]["refit"] = c.iis.refit;
  doc["baselineSelection"] = selectionJson(c.selection);
  doc["plr2"] = {{"maxDimension", c.plr2MaxDimension}, {"allowLarge", c.allowLargePlr2}};
  return doc;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path + "'");
  }
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw DataError("cannot write '" + path + "'");
  }
  out << text;
  if (!out) {
    throw DataError("failed writing '" + path + "'");
  }
}

}  // namespace iissqda
