#include "iissqda/datamodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iissqda {

LabeledDataset::LabeledDataset(Matrix features, std::vector<int> labels,
                               std::vector<std::string> featureNames,
                               std::array<std::string, 2> classNames)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      featureNames_(std::move(featureNames)),
      classNames_(std::move(classNames)) {
  if (static_cast<Index>(labels_.size()) != features_.rows()) {
    throw DimensionError("label count " + std::to_string(labels_.size()) +
                         " does not match row count " + std::to_string(features_.rows()));
  }
  for (int label : labels_) {
    if (label == 1) {
      ++n1_;
    } else if (label == 2) {
      ++n2_;
    } else {
      throw DataError("label " + std::to_string(label) + " is not 1 or 2");
    }
  }
  if (n1_ < 2 || n2_ < 2) {
    throw DataError("each class needs at least 2 samples (n1=" + std::to_string(n1_) +
                    ", n2=" + std::to_string(n2_) + ")");
  }
  if (!features_.allFinite()) {
    throw DataError("feature matrix contains non-finite entries");
  }
  if (featureNames_.empty()) {
    featureNames_.reserve(static_cast<std::size_t>(features_.cols()));
    for (Index j = 0; j < features_.cols(); ++j) {
      featureNames_.push_back("z" + std::to_string(j + 1));
    }
  } else if (static_cast<Index>(featureNames_.size()) != features_.cols()) {
    throw DimensionError("feature name count does not match column count");
  }
}

Vector LabeledDataset::response() const {
  Vector y(n());
  for (Index i = 0; i < n(); ++i) {
    y(i) = labels_[static_cast<std::size_t>(i)] == 1 ? 1.0 : 0.0;
  }
  return y;
}

Matrix LabeledDataset::classRows(int k) const {
  const Index count = k == 1 ? n1_ : n2_;
  Matrix out(count, p());
  Index r = 0;
  for (Index i = 0; i < n(); ++i) {
    if (labels_[static_cast<std::size_t>(i)] == k) {
      out.row(r++) = features_.row(i);
    }
  }
  return out;
}

LabeledDataset LabeledDataset::subset(std::span<const Index> rows) const {
  Matrix x(static_cast<Index>(rows.size()), p());
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index i = rows[r];
    if (i < 0 || i >= n()) {
      throw DimensionError("row index out of range in subset");
    }
    x.row(static_cast<Index>(r)) = features_.row(i);
    y.push_back(labels_[static_cast<std::size_t>(i)]);
  }
  return {std::move(x), std::move(y), featureNames_, classNames_};
}

AugmentedIndexMap::AugmentedIndexMap(Index p) : p_(p) {
  if (p < 1) {
    throw DimensionError("augmented basis needs p >= 1");
  }
}

Index AugmentedIndexMap::mainIndex(Index j) const {
  if (j < 0 || j >= p_) {
    throw DimensionError("main effect index out of range");
  }
  return 1 + j;
}

Index AugmentedIndexMap::interactionIndex(Index j, Index l) const {
  if (j > l) {
    std::swap(j, l);
  }
  if (j < 0 || l >= p_) {
    throw DimensionError("interaction index out of range");
  }
  // Rows 0..j-1 of the upper triangle hold sum_{i<j} (p - i) entries.
  return 1 + p_ + j * p_ - j * (j - 1) / 2 + (l - j);
}

Index AugmentedIndexMap::index(const Term& term) const {
  switch (term.kind) {
    case TermKind::Intercept:
      return 0;
    case TermKind::Main:
      return mainIndex(term.first);
    case TermKind::Interaction:
      return interactionIndex(term.first, term.second);
  }
  return 0;
}

Term AugmentedIndexMap::term(Index index) const {
  if (index < 0 || index >= pTilde()) {
    throw DimensionError("augmented index " + std::to_string(index) + " out of range");
  }
  if (index == 0) {
    return {};
  }
  if (index <= p_) {
    return {TermKind::Main, index - 1, index - 1};
  }
  Index offset = index - 1 - p_;
  Index j = 0;
  while (offset >= p_ - j) {
    offset -= p_ - j;
    ++j;
  }
  return {TermKind::Interaction, j, j + offset};
}

ReducedIndexSet::ReducedIndexSet(Index p, IndexList screenedVariables)
    : p_(p), screened_(std::move(screenedVariables)) {
  std::sort(screened_.begin(), screened_.end());
  screened_.erase(std::unique(screened_.begin(), screened_.end()), screened_.end());
  for (Index j : screened_) {
    if (j < 0 || j >= p_) {
      throw DimensionError("screened variable " + std::to_string(j) + " out of range");
    }
  }
  const AugmentedIndexMap map(p_);
  const auto d = static_cast<Index>(screened_.size());
  columns_.reserve(static_cast<std::size_t>(1 + p_ + d * (d + 1) / 2));
  for (Index c = 0; c <= p_; ++c) {
    columns_.push_back(c);
  }
  for (std::size_t a = 0; a < screened_.size(); ++a) {
    for (std::size_t b = a; b < screened_.size(); ++b) {
      columns_.push_back(map.interactionIndex(screened_[a], screened_[b]));
    }
  }
  // Row-major over screened pairs is already increasing in augmented index.
}

ReducedIndexSet ReducedIndexSet::full(Index p) {
  IndexList all(static_cast<std::size_t>(p));
  std::iota(all.begin(), all.end(), Index{0});
  return {p, std::move(all)};
}

Vector augment(const Vector& z, const AugmentedIndexMap& map) {
  const Index p = map.p();
  if (z.size() != p) {
    throw DimensionError("augment: vector length " + std::to_string(z.size()) +
                         " does not match p=" + std::to_string(p));
  }
  Vector x(map.pTilde());
  x(0) = 1.0;
  x.segment(1, p) = z;
  Index k = 1 + p;
  for (Index j = 0; j < p; ++j) {
    for (Index l = j; l < p; ++l) {
      x(k++) = z(j) * z(l);
    }
  }
  return x;
}

Vector reduced_augment(const Vector& z, const ReducedIndexSet& reduced) {
  if (z.size() != reduced.p()) {
    throw DimensionError("reduced_augment: vector length does not match p");
  }
  const AugmentedIndexMap map(reduced.p());
  const auto& cols = reduced.activeColumns();
  Vector x(static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const Term t = map.term(cols[c]);
    switch (t.kind) {
      case TermKind::Intercept:
        x(static_cast<Index>(c)) = 1.0;
        break;
      case TermKind::Main:
        x(static_cast<Index>(c)) = z(t.first);
        break;
      case TermKind::Interaction:
        x(static_cast<Index>(c)) = z(t.first) * z(t.second);
        break;
    }
  }
  return x;
}

Matrix augmented_columns(const Matrix& Z, const AugmentedIndexMap& map, const IndexList& columns) {
  if (Z.cols() != map.p()) {
    throw DimensionError("design: column count does not match p");
  }
  IndexList kept;
  kept.reserve(columns.size());
  for (Index c : columns) {
    if (c != 0) {
      kept.push_back(c);
    }
  }
  Matrix X(Z.rows(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    const Term t = map.term(kept[c]);
    if (t.kind == TermKind::Main) {
      X.col(static_cast<Index>(c)) = Z.col(t.first);
    } else {
      X.col(static_cast<Index>(c)) = Z.col(t.first).cwiseProduct(Z.col(t.second));
    }
  }
  return X;
}

Matrix reduced_design(const Matrix& Z, const ReducedIndexSet& reduced) {
  return augmented_columns(Z, AugmentedIndexMap(reduced.p()), reduced.activeColumns());
}

}  // namespace iissqda
