#pragma once

#include "iissqda/common.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iissqda {

/// Two-class labelled sample: an n x p feature matrix and labels in {1, 2}.
///
/// Class 1 plays the role of the "success" class of the logistic model
/// (Delta = 1); class 2 is Delta = 0. Instances are validated on
/// construction and immutable afterwards.
class LabeledDataset {
 public:
  /// Validates and wraps the data. Throws DataError when a label is not 1/2,
  /// a feature is non-finite, or either class has fewer than two rows.
  LabeledDataset(Matrix features, std::vector<int> labels,
                 std::vector<std::string> featureNames = {},
                 std::array<std::string, 2> classNames = {"1", "2"});

  const Matrix& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& featureNames() const { return featureNames_; }
  const std::array<std::string, 2>& classNames() const { return classNames_; }

  Index n() const { return features_.rows(); }
  Index p() const { return features_.cols(); }
  Index n1() const { return n1_; }
  Index n2() const { return n2_; }

  /// 1.0 for class 1 rows, 0.0 for class 2 rows.
  Vector response() const;
  /// Rows of class k (k in {1, 2}) in their original order.
  Matrix classRows(int k) const;
  /// New dataset with the given rows (validated again).
  LabeledDataset subset(std::span<const Index> rows) const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  std::vector<std::string> featureNames_;
  std::array<std::string, 2> classNames_;
  Index n1_ = 0;
  Index n2_ = 0;
};

enum class TermKind { Intercept, Main, Interaction };

/// One coordinate of the augmented basis. Feature indices are 0-based;
/// for interactions first <= second, and first == second is the square term.
struct Term {
  TermKind kind = TermKind::Intercept;
  Index first = -1;
  Index second = -1;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Bijection between augmented indices [0, pTilde) and terms.
///
/// Layout: intercept, Z_1..Z_p, then interactions row-major over j <= l:
/// Z_1^2, Z_1 Z_2, ..., Z_1 Z_p, Z_2^2, ..., Z_p^2.
class AugmentedIndexMap {
 public:
  explicit AugmentedIndexMap(Index p);

  Index p() const { return p_; }
  Index pTilde() const { return (p_ + 1) * (p_ + 2) / 2; }

  Term term(Index index) const;
  Index index(const Term& term) const;
  Index mainIndex(Index j) const;
  Index interactionIndex(Index j, Index l) const;

 private:
  Index p_;
};

/// (p+1)(p+2)/2 without constructing a map.
constexpr Index augmented_dimension(Index p) { return (p + 1) * (p + 2) / 2; }

/// Screened interaction variables and the augmented columns they induce:
/// intercept, every main effect, and every Z_j Z_l with j, l screened.
class ReducedIndexSet {
 public:
  ReducedIndexSet(Index p, IndexList screenedVariables);

  Index p() const { return p_; }
  const IndexList& screenedVariables() const { return screened_; }
  const IndexList& activeColumns() const { return columns_; }
  Index size() const { return static_cast<Index>(columns_.size()); }

  /// Main effects only (no screened variables).
  static ReducedIndexSet mainsOnly(Index p) { return {p, {}}; }
  /// Every interaction kept.
  static ReducedIndexSet full(Index p);

 private:
  Index p_;
  IndexList screened_;
  IndexList columns_;
};

/// Full augmented feature vector x = (1, z, z_j z_l for j <= l).
Vector augment(const Vector& z, const AugmentedIndexMap& map);

/// Entries of augment(z) at reduced.activeColumns(), in that order.
Vector reduced_augment(const Vector& z, const ReducedIndexSet& reduced);

/// Design matrix of the reduced basis without the intercept column:
/// n x (size() - 1), columns in activeColumns() order minus the leading 0.
Matrix reduced_design(const Matrix& Z, const ReducedIndexSet& reduced);

/// Design matrix for an arbitrary sorted list of augmented indices (the
/// intercept index 0, if present, is skipped).
Matrix augmented_columns(const Matrix& Z, const AugmentedIndexMap& map, const IndexList& columns);

struct CsvOptions {
  std::string labelColumn = "class";
  /// Label value that becomes class 1; defaults to the lexicographically smaller one.
  std::optional<std::string> class1Label;
};

/// Reads a comma-separated file with a header row. Feature columns keep
/// their order; the label column may sit anywhere.
LabeledDataset load_csv(const std::string& path, const CsvOptions& options = {});

/// Writes features and labels (as class names) with a header row.
void write_csv(const LabeledDataset& data, const std::string& path,
               const std::string& labelColumn = "class");

/// Reads an unlabelled (or labelled, label ignored) feature matrix; used by predict.
Matrix load_feature_csv(const std::string& path, const std::string& labelColumn,
                        std::vector<std::string>* names = nullptr);

}  // namespace iissqda
