#pragma once

#include "iconicity/corpus.hpp"
#include "iconicity/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace iconicity {

inline constexpr double kZeroVarianceThreshold = 1e-12;
inline constexpr double kZeroNormThreshold = 1e-12;

struct Tokenization {
  std::vector<std::string> segments;
  std::vector<std::string> unknown;  // skipped code points, in input order
};

/// Greedy longest-match segmentation over the table's keys. Characters that
/// start no key are skipped and reported. Never throws on empty output.
Tokenization try_tokenize_ipa(std::string_view transcription, const SegmentFeatureTable& table);

/// As try_tokenize_ipa, but an empty segment list is an InputError.
Tokenization tokenize_ipa(std::string_view transcription, const SegmentFeatureTable& table);

/// Component-wise mean of the segments' feature vectors.
Vector<double> mean_pool(std::span<const std::string> segments, const SegmentFeatureTable& table);

// ------------------------------------------------------------ column statistics

/// Population moments per column (divisor n).
template <typename Derived>
RowVector<typename Derived::Scalar> column_means(const Eigen::MatrixBase<Derived>& m) {
  return m.colwise().mean();
}

template <typename Derived>
RowVector<typename Derived::Scalar> column_population_sd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const RowVector<Scalar> mean = column_means(m);
  return ((m.rowwise() - mean).array().square().colwise().sum() / Scalar(m.rows())).sqrt().matrix();
}

/// Sample variance (divisor n-1) per column.
template <typename Derived>
RowVector<typename Derived::Scalar> column_sample_variance(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const RowVector<Scalar> mean = column_means(m);
  return ((m.rowwise() - mean).array().square().colwise().sum() / Scalar(m.rows() - 1)).matrix();
}

/// Indices of columns whose sample variance exceeds the threshold.
template <typename Derived>
std::vector<Index> varying_columns(const Eigen::MatrixBase<Derived>& m,
                                   double threshold = kZeroVarianceThreshold) {
  const auto var = column_sample_variance(m);
  std::vector<Index> kept;
  for (Index c = 0; c < m.cols(); ++c)
    if (var(c) > threshold) kept.push_back(c);
  return kept;
}

struct ColumnDrop {
  EmbeddingMatrix matrix;
  std::vector<Index> kept;  // original column indices, ascending
};

ColumnDrop drop_zero_variance(const EmbeddingMatrix& matrix);

enum class Normalization { z_score, min_max };

/// Per-column affine map x -> (x - offset) / scale.
struct ColumnTransform {
  RowVector<double> offset;
  RowVector<double> scale;

  template <typename Derived>
  Matrix<double> apply(const Eigen::MatrixBase<Derived>& m) const {
    return ((m.rowwise() - offset).array().rowwise() / scale.array()).matrix();
  }
};

ColumnTransform fit_normalization(const Matrix<double>& values, Normalization mode);

EmbeddingMatrix normalize_dataset(const EmbeddingMatrix& matrix,
                                  Normalization mode = Normalization::z_score);

// ------------------------------------------------------------ similarity

/// Cosine similarity of all row pairs. Rows must have non-zero norm.
/// The result is exactly symmetric with a unit diagonal.
template <typename Derived>
Matrix<typename Derived::Scalar> cosine_similarity(const Eigen::MatrixBase<Derived>& rows) {
  using Scalar = typename Derived::Scalar;
  const Vector<Scalar> norms = rows.rowwise().norm();
  const Matrix<Scalar> unit = norms.cwiseInverse().asDiagonal() * rows;
  Matrix<Scalar> sim = unit * unit.transpose();
  for (Index i = 0; i < sim.rows(); ++i) {
    sim(i, i) = Scalar(1);
    for (Index j = i + 1; j < sim.cols(); ++j) {
      const Scalar v = std::clamp((sim(i, j) + sim(j, i)) / Scalar(2), Scalar(-1), Scalar(1));
      sim(i, j) = v;
      sim(j, i) = v;
    }
  }
  return sim;
}

struct CosineResult {
  SimilarityMatrix matrix;
  std::vector<std::string> excluded;  // zero-norm items
};

CosineResult cosine_similarity_matrix(const EmbeddingMatrix& matrix);

// ------------------------------------------------------------ phonetic space

struct PhoneticItem {
  std::string id;
  std::string transcription;
};

struct ExcludedItem {
  std::string id;
  std::string reason;
};

struct PooledEmbeddings {
  EmbeddingMatrix matrix;  // raw means over all table features
  std::vector<ExcludedItem> excluded;
  std::map<std::string, std::size_t> unknown_characters;
};

PooledEmbeddings pool_transcriptions(std::span<const PhoneticItem> items,
                                     const SegmentFeatureTable& table);

struct PhoneticSpace {
  EmbeddingMatrix embeddings;  // normalized, kept columns named
  std::vector<Index> kept_features;
  ColumnTransform transform;   // maps raw kept-column values into the space
  std::vector<ExcludedItem> excluded;
  std::map<std::string, std::size_t> unknown_characters;
};

/// Tokenize, pool, drop zero-variance dimensions and normalize over the
/// given item population.
PhoneticSpace build_phonetic_space(std::span<const PhoneticItem> items,
                                   const SegmentFeatureTable& table,
                                   Normalization mode = Normalization::z_score);

// ------------------------------------------------------------ export

/// `<base>.bin` holds row-major little-endian float64; `<base>.ids` one id per line.
void write_similarity_binary(const std::filesystem::path& base, const SimilarityMatrix& sim);
SimilarityMatrix read_similarity_binary(const std::filesystem::path& base);
void write_similarity_tsv(std::ostream& out, const SimilarityMatrix& sim);

}  // namespace iconicity
