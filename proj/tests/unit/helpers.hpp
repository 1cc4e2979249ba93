#pragma once

#include "iissqda/common.hpp"
#include "iissqda/datamodel.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

namespace testutil {

using iissqda::Index;
using iissqda::Matrix;
using iissqda::Vector;

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = g(rng);
    }
  }
  return m;
}

inline Matrix random_spd(Index p, std::mt19937_64& rng, double ridge = 0.5) {
  const Matrix a = gaussian_matrix(p, p, rng);
  return a * a.transpose() / static_cast<double>(p) + ridge * Matrix::Identity(p, p);
}

/// Rows 0..n1-1 are class 1, the rest class 2.
inline iissqda::LabeledDataset two_class(const Matrix& X, Index n1) {
  std::vector<int> labels(static_cast<std::size_t>(X.rows()), 2);
  for (Index i = 0; i < n1; ++i) {
    labels[static_cast<std::size_t>(i)] = 1;
  }
  return iissqda::LabeledDataset(X, labels);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("iissqda_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace testutil
