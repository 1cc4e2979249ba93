#include "helpers.hpp"

#include "cli.hpp"
#include "iissqda/classifiers.hpp"
#include "iissqda/serialization.hpp"

#include <doctest.h>

#include <sstream>

using namespace iissqda;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("simulate is deterministic") {
  testutil::TempDir dir("cli_sim");
  const std::string a = dir.file("a");
  const std::string b = dir.file("b");
  for (const std::string& d : {a, b}) {
    const Outcome o = run_cli({"simulate", "--model", "m2", "--p", "50", "--n1", "100", "--n2", "100", "--seed", "7",
                               "--test-size", "40", "--out-dir", d});
    REQUIRE(o.code == 0);
  }
  for (const std::string& name : {"m2_p50_seed7_train.csv", "m2_p50_seed7_test.csv", "m2_p50_seed7_scenario.json"}) {
    const std::string left = testutil::slurp(a + "/" + name);
    CHECK_FALSE(left.empty());
    CHECK(left == testutil::slurp(b + "/" + name));
  }
  const LabeledDataset train = load_csv(a + "/m2_p50_seed7_train.csv");
  CHECK(train.n1() == 100);
  CHECK(train.p() == 50);

  CHECK(run_cli({"simulate", "--model", "m9", "--out-dir", a}).code == 2);
  CHECK(run_cli({"simulate", "--model", "m2", "--p", "10", "--out-dir", a}).code == 1);
  CHECK(run_cli({"nonsense"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("screen, fit and predict") {
  testutil::TempDir dir("cli_pipeline");
  const std::string d = dir.path().string();
  REQUIRE(run_cli({"simulate", "--model", "m2", "--p", "50", "--seed", "3", "--test-size", "400", "--prefix", "s",
                   "--out-dir", d})
              .code == 0);
  REQUIRE(run_cli({"simulate", "--model", "m2", "--p", "60", "--seed", "3", "--prefix", "wide", "--out-dir", d})
              .code == 0);
  const std::string train = dir.file("s_train.csv");

  SUBCASE("screening modes and thresholds") {
    REQUIRE(run_cli({"screen", "--data", train, "--alpha", "0.05", "--out-dir", d, "--prefix", "thr"}).code == 0);
    REQUIRE(run_cli({"screen", "--data", train, "--mode", "stepwise", "--out-dir", d, "--prefix", "step"}).code == 0);
    REQUIRE(run_cli({"screen", "--data", train, "--omega", "0", "--out-dir", d, "--prefix", "all"}).code == 0);
    const Json thr = read_json_file(dir.file("thr.json"));
    const Json step = read_json_file(dir.file("step.json"));
    const Json all = read_json_file(dir.file("all.json"));
    CHECK(thr.at("mode") == "threshold");
    CHECK(step.at("mode") == "stepwise");
    std::vector<std::string> keysA;
    std::vector<std::string> keysB;
    for (const auto& item : thr.items()) keysA.push_back(item.key());
    for (const auto& item : step.items()) keysB.push_back(item.key());
    CHECK(keysA == keysB);
    CHECK(all.at("I").size() == 50);
    CHECK(thr.at("I").size() <= 50);
    CHECK_FALSE(testutil::slurp(dir.file("thr.csv")).empty());
  }

  SUBCASE("fit then predict") {
    for (const std::string method : {"iis-sqda", "plr", "dsda", "lda", "qda"}) {
      CAPTURE(method);
      const std::string model = dir.file(method + ".json");
      const Outcome fit = run_cli({"fit", "--data", train, "--method", method, "--out", model});
      if (method == "qda") {
        // p = 50 < n_k = 100, so QDA fits; this only guards the exit code.
        CHECK(fit.code == 0);
        continue;
      }
      REQUIRE(fit.code == 0);
      const QuadraticClassifier c = classifier_from_json(read_json_file(model));
      CHECK(misclassification_rate(c, load_csv(train)) <= 0.5);
      const std::string preds = dir.file(method + "_pred.csv");
      const Outcome pred = run_cli({"predict", "--model", model, "--data", dir.file("s_test.csv"), "--out", preds});
      REQUIRE(pred.code == 0);
      CHECK(pred.out.find("misclassification rate") != std::string::npos);
      const std::string text = testutil::slurp(preds);
      CHECK(std::count(text.begin(), text.end(), '\n') == 401);
    }
    const Outcome mismatch =
        run_cli({"predict", "--model", dir.file("lda.json"), "--data", dir.file("wide_train.csv"), "--out",
                 dir.file("bad.csv")});
    CHECK(mismatch.code == 1);
    CHECK(mismatch.err.find("features") != std::string::npos);
    CHECK(run_cli({"predict", "--data", train}).code == 2);
    CHECK(run_cli({"fit", "--data", train, "--method", "svm"}).code == 2);
  }
}

TEST_CASE("benchmark files and replay") {
  testutil::TempDir dir("cli_bench");
  const std::string d = dir.path().string();
  const std::string config = dir.file("bench.json");
  testutil::spit(config, R"({"model": "m2", "p": 50, "reps": 2, "testSize": 300,
                             "methods": ["Oracle", "Bayes", "LDA"], "seed": 4})");
  const Outcome first = run_cli({"benchmark", "--config", config, "--out-dir", d, "--prefix", "one"});
  REQUIRE(first.code == 0);
  for (const std::string suffix : {"_config.json", "_report.json", "_table.csv", "_records.csv"}) {
    CHECK_FALSE(testutil::slurp(dir.file("one" + suffix)).empty());
  }
  const Outcome replay =
      run_cli({"benchmark", "--config", dir.file("one_config.json"), "--out-dir", d, "--prefix", "two"});
  REQUIRE(replay.code == 0);
  CHECK(testutil::slurp(dir.file("one_table.csv")) == testutil::slurp(dir.file("two_table.csv")));
  CHECK(testutil::slurp(dir.file("one_records.csv")).size() > 0);
  const Json a = read_json_file(dir.file("one_report.json"));
  const Json b = read_json_file(dir.file("two_report.json"));
  CHECK(a.at("methods") == b.at("methods"));
  CHECK(a.at("replicationSeeds") == b.at("replicationSeeds"));

  // Flags take precedence over the file.
  REQUIRE(run_cli({"benchmark", "--config", config, "--reps", "1", "--out-dir", d, "--prefix", "three"}).code == 0);
  CHECK(read_json_file(dir.file("three_config.json")).at("reps") == 1);

  testutil::spit(dir.file("bad.json"), R"({"model": "m2", "replications": 3})");
  CHECK(run_cli({"benchmark", "--config", dir.file("bad.json"), "--out-dir", d}).code == 2);
  CHECK(run_cli({"benchmark", "--methods", "SVM", "--out-dir", d}).code == 2);

  // Oracle QDA cannot be fitted on four rows per class: recorded, exit code 3.
  const Outcome failing = run_cli({"benchmark", "--config", config, "--n1", "4", "--n2", "4", "--methods",
                                   "Oracle,Bayes", "--out-dir", d, "--prefix", "four"});
  CHECK(failing.code == 3);
  CHECK(failing.err.find("Oracle") != std::string::npos);
}
