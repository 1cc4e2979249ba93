#include "helpers.hpp"

#include "iissqda/datamodel.hpp"

#include <doctest.h>

#include <set>

using namespace iissqda;

TEST_CASE("augmented basis of two features") {
  const AugmentedIndexMap map(2);
  CHECK(map.pTilde() == 6);
  Vector z(2);
  z << 3.0, -2.0;
  const Vector x = augment(z, map);
  REQUIRE(x.size() == 6);
  Vector expected(6);
  expected << 1.0, 3.0, -2.0, 9.0, -6.0, 4.0;
  CHECK((x - expected).norm() == 0.0);
}

TEST_CASE("augmented basis of one feature") {
  const AugmentedIndexMap map(1);
  Vector z(1);
  z << 3.0;
  const Vector x = augment(z, map);
  REQUIRE(x.size() == 3);
  CHECK(x(0) == 1.0);
  CHECK(x(1) == 3.0);
  CHECK(x(2) == 9.0);
}

TEST_CASE("augmented dimension counts") {
  CHECK(augmented_dimension(200) == 20301);
  CHECK(AugmentedIndexMap(200).pTilde() == 20301);
  for (Index p = 1; p <= 60; ++p) {
    // Brute-force count: 1 + p + #{j <= l}.
    Index count = 1 + p;
    for (Index j = 0; j < p; ++j) {
      for (Index l = j; l < p; ++l) {
        ++count;
      }
    }
    CHECK(augmented_dimension(p) == count);
  }
}

TEST_CASE("index map round trips") {
  for (Index p : {1, 2, 3, 7, 25}) {
    const AugmentedIndexMap map(p);
    std::set<Index> seen;
    for (Index idx = 0; idx < map.pTilde(); ++idx) {
      const Term t = map.term(idx);
      CHECK(map.index(t) == idx);
      seen.insert(idx);
    }
    CHECK(static_cast<Index>(seen.size()) == map.pTilde());
    // Row-major order over j <= l after the mains.
    Index expected = p + 1;
    for (Index j = 0; j < p; ++j) {
      CHECK(map.mainIndex(j) == j + 1);
      for (Index l = j; l < p; ++l) {
        CHECK(map.interactionIndex(j, l) == expected);
        CHECK(map.interactionIndex(l, j) == expected);
        ++expected;
      }
    }
  }
  CHECK_THROWS_AS(AugmentedIndexMap(3).term(10), DimensionError);
  CHECK_THROWS_AS(AugmentedIndexMap(3).mainIndex(3), DimensionError);
  CHECK_THROWS_AS(AugmentedIndexMap(0), DimensionError);
}

TEST_CASE("reduced index set layouts") {
  SUBCASE("no screened variables keeps intercept and mains") {
    const ReducedIndexSet r = ReducedIndexSet::mainsOnly(4);
    CHECK(r.size() == 5);
    Vector z = Vector::LinSpaced(4, 1.0, 4.0);
    const Vector x = reduced_augment(z, r);
    CHECK(x(0) == 1.0);
    CHECK((x.tail(4) - z).norm() == 0.0);
  }
  SUBCASE("all screened equals the full basis") {
    const ReducedIndexSet r = ReducedIndexSet::full(3);
    Vector z(3);
    z << 0.5, -1.5, 2.0;
    CHECK((reduced_augment(z, r) - augment(z, AugmentedIndexMap(3))).norm() == 0.0);
  }
  SUBCASE("p = 3 with variables 1 and 3 screened") {
    const ReducedIndexSet r(3, {0, 2});
    const AugmentedIndexMap map(3);
    const IndexList expected{0,
                             map.mainIndex(0),
                             map.mainIndex(1),
                             map.mainIndex(2),
                             map.interactionIndex(0, 0),
                             map.interactionIndex(0, 2),
                             map.interactionIndex(2, 2)};
    CHECK(r.activeColumns() == expected);
    Vector z(3);
    z << 2.0, 3.0, 5.0;
    Vector want(7);
    want << 1.0, 2.0, 3.0, 5.0, 4.0, 10.0, 25.0;
    CHECK((reduced_augment(z, r) - want).norm() == 0.0);
  }
  CHECK_THROWS_AS(ReducedIndexSet(3, {3}), DimensionError);
}

TEST_CASE("reduced design matches row-wise augmentation") {
  std::mt19937_64 rng(3);
  const Matrix Z = testutil::gaussian_matrix(6, 4, rng);
  const ReducedIndexSet r(4, {1, 3});
  const Matrix D = reduced_design(Z, r);
  REQUIRE(D.cols() == r.size() - 1);
  for (Index i = 0; i < Z.rows(); ++i) {
    const Vector x = reduced_augment(Z.row(i).transpose(), r);
    CHECK((D.row(i).transpose() - x.tail(x.size() - 1)).norm() < 1e-14);
  }
}

TEST_CASE("labelled dataset validation") {
  Matrix X(4, 2);
  X << 0, 1, 2, 3, 4, 5, 6, 7;
  const LabeledDataset d(X, {1, 2, 1, 2});
  CHECK(d.n() == 4);
  CHECK(d.n1() == 2);
  CHECK(d.n2() == 2);
  CHECK(d.p() == 2);
  CHECK(d.response()(0) == 1.0);
  CHECK(d.response()(1) == 0.0);
  CHECK(d.classRows(2)(1, 0) == 6.0);
  CHECK(d.featureNames().size() == 2);

  CHECK_THROWS_AS(LabeledDataset(X, {1, 3, 1, 2}), DataError);
  CHECK_THROWS_AS(LabeledDataset(X, {1, 1, 1, 2}), DataError);
  CHECK_THROWS_AS(LabeledDataset(X, {1, 2, 1}), DimensionError);
  Matrix bad = X;
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(LabeledDataset(bad, {1, 2, 1, 2}), DataError);

  const std::vector<Index> rows{0, 1, 2, 3};
  const LabeledDataset s = d.subset(rows);
  CHECK(s.features() == d.features());
  const std::vector<Index> oneClass{0, 2, 1};
  CHECK_THROWS_AS(d.subset(oneClass), DataError);
}

TEST_CASE("csv loading") {
  testutil::TempDir dir("csv");
  SUBCASE("small file") {
    testutil::spit(dir.file("a.csv"), "x1,x2,class\n0.5,1,1\n1.5,2,1\n2.5,3,2\n3.5,4,2\n");
    const LabeledDataset d = load_csv(dir.file("a.csv"));
    CHECK(d.n() == 4);
    CHECK(d.n1() == 2);
    CHECK(d.n2() == 2);
    CHECK(d.p() == 2);
    CHECK(d.features()(2, 0) == 2.5);
    CHECK(d.featureNames()[1] == "x2");
  }
  SUBCASE("label column in the middle, custom class 1") {
    testutil::spit(dir.file("b.csv"), "a,y,b\n1,yes,2\n3,no,4\n5,yes,6\n7,no,8\n");
    CsvOptions o;
    o.labelColumn = "y";
    o.class1Label = "yes";
    const LabeledDataset d = load_csv(dir.file("b.csv"), o);
    CHECK(d.p() == 2);
    CHECK(d.labels()[0] == 1);
    CHECK(d.labels()[1] == 2);
    CHECK(d.classNames()[0] == "yes");
    CHECK(d.features()(1, 1) == 4.0);
  }
  SUBCASE("three labels is rejected") {
    testutil::spit(dir.file("c.csv"), "x,class\n1,1\n2,1\n3,2\n4,2\n5,3\n");
    try {
      load_csv(dir.file("c.csv"));
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("not a two-class problem") != std::string::npos);
    }
  }
  SUBCASE("wide file with unbalanced classes") {
    // 77 rows, 231 features + label: 44 of class 1 and 33 of class 2.
    std::mt19937_64 rng(11);
    std::string text;
    for (int j = 0; j < 231; ++j) {
      text += "g" + std::to_string(j) + ",";
    }
    text += "class\n";
    std::normal_distribution<double> g;
    for (int i = 0; i < 77; ++i) {
      for (int j = 0; j < 231; ++j) {
        text += std::to_string(g(rng)) + ",";
      }
      text += i < 44 ? "1\n" : "2\n";
    }
    testutil::spit(dir.file("wide.csv"), text);
    const LabeledDataset d = load_csv(dir.file("wide.csv"));
    CHECK(d.n1() == 44);
    CHECK(d.n2() == 33);
    CHECK(d.p() == 231);
  }
  SUBCASE("ragged and non-numeric rows") {
    testutil::spit(dir.file("r.csv"), "x,class\n1,1\n2\n");
    CHECK_THROWS_AS(load_csv(dir.file("r.csv")), DataError);
    testutil::spit(dir.file("n.csv"), "x,class\n1,1\nabc,1\n3,2\n4,2\n");
    CHECK_THROWS_AS(load_csv(dir.file("n.csv")), DataError);
    CHECK_THROWS_AS(load_csv(dir.file("missing.csv")), DataError);
  }
  SUBCASE("write then read") {
    std::mt19937_64 rng(5);
    const LabeledDataset d = testutil::two_class(testutil::gaussian_matrix(9, 3, rng), 4);
    write_csv(d, dir.file("w.csv"));
    const LabeledDataset back = load_csv(dir.file("w.csv"));
    CHECK(back.labels() == d.labels());
    CHECK((back.features() - d.features()).cwiseAbs().maxCoeff() == 0.0);
    std::vector<std::string> names;
    const Matrix X = load_feature_csv(dir.file("w.csv"), "class", &names);
    CHECK(X.cols() == 3);
    CHECK(names.size() == 3);
  }
}
