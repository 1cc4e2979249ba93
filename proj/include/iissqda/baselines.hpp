#pragma once

#include "iissqda/classifiers.hpp"
#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"
#include "iissqda/selection.hpp"

#include <cstdint>

namespace iissqda {

enum class PlrBasis { MainsOnly, AllInteractions };

struct PlrOptions {
  ElasticNetConfig selection;
  /// PLR2 refuses designs with more augmented columns than this unless overridden.
  Index maxAugmentedDimension = 50000;
  bool allowLargeBasis = false;
  bool refit = true;
  std::uint64_t seed = 1;
};

/// Lasso-logistic (lambda2 = 0) over the main effects (PLR) or the whole
/// augmented basis (PLR2), tuned by cross-validation and refit on its support.
/// Throws BudgetError when the PLR2 basis exceeds maxAugmentedDimension.
QuadraticClassifier plr_baseline(const LabeledDataset& data, PlrBasis basis, const PlrOptions& options = {});

struct DsdaOptions {
  int folds = 5;
  int nLambda = 50;
  double minRatio = 1e-3;
  /// Pick the largest lambda whose CV error is within one standard error of the minimum.
  bool oneStandardError = true;
  bool refit = true;
  std::uint64_t seed = 1;
};

/// Linear rule from a lasso least-squares fit of recoded labels
/// (n/n1 for class 1, -n/n2 for class 2). The score z' beta is turned into a
/// decision by one-dimensional LDA on the training scores: class 1 iff
///   (s - (s1 + s2)/2)(s1 - s2)/v + log(pi/(1-pi)) > 0
/// with class score means s1, s2 and pooled score variance v. An empty fit
/// leaves the prior-only rule.
DiscriminantRule dsda_baseline(const LabeledDataset& data, const DsdaOptions& options = {});

}  // namespace iissqda
