#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iissqda {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<Index>;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (bad CSV, wrong labels, degenerate classes).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Argument shapes or ranges that violate an operation's precondition.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be invertible / positive definite is not.
class SingularError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A requested computation exceeds a configured resource budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// SplitMix64 finalizer, used to derive independent child seeds from a master seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Child seed `stream` of `master`; position-derived, so independent of call order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

}  // namespace iissqda
