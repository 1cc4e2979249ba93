#pragma once

#include "iissqda/common.hpp"

#include <string>
#include <utility>
#include <vector>

namespace iissqda {

/// Two-class Gaussian population: class 1 ~ N(mu1, Sigma1) with prior pi,
/// class 2 ~ N(0, Sigma2). Omega = Omega2 - Omega1, delta = Omega1 mu1.
struct GaussianScenario {
  std::string id;
  Index p = 0;
  double prior = 0.5;
  Vector mu1;
  Matrix sigma1;
  Matrix sigma2;
  Matrix omega1;
  Matrix omega2;
  Matrix omega;
  Vector delta;
  IndexList trueMainSupport;                            ///< nonzero entries of delta
  std::vector<std::pair<Index, Index>> trueInteractionSupport;  ///< nonzero Omega_jl, j <= l
  IndexList trueInteractionVariables;                   ///< nonzero rows of Omega

  /// Builds a scenario from the two precisions, the prior and delta
  /// (mu1 = Sigma1 delta); supports are read off with tolerance `zeroTol`.
  /// Throws SingularError if either precision is not positive definite.
  static GaussianScenario fromPrecisions(std::string id, Matrix omega1, Matrix omega2, Vector delta,
                                         double prior = 0.5, double zeroTol = 0.0);

  /// Same as fromPrecisions but with an explicit class-1 mean.
  static GaussianScenario fromMean(std::string id, Matrix omega1, Matrix omega2, Vector mu1,
                                   double prior = 0.5, double zeroTol = 0.0);
};

}  // namespace iissqda
