#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace iconicity {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

using Index = Eigen::Index;

// Error taxonomy. The CLI maps these onto exit codes 1, 2 and 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProviderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Items as rows, dimensions as columns. Used for both the pooled phonetic
/// space and dense semantic vectors.
template <typename Scalar>
struct BasicEmbeddingMatrix {
  std::vector<std::string> ids;
  std::vector<std::string> columns;  // feature names; empty for dense semantic vectors
  Matrix<Scalar> values;

  Index size() const { return values.rows(); }
  Index dims() const { return values.cols(); }
};

/// Symmetric pairwise similarity over one ordered item set.
template <typename Scalar>
struct BasicSimilarityMatrix {
  std::vector<std::string> ids;
  Matrix<Scalar> values;

  Index size() const { return values.rows(); }
};

using EmbeddingMatrix = BasicEmbeddingMatrix<double>;
using SimilarityMatrix = BasicSimilarityMatrix<double>;

}  // namespace iconicity
