#pragma once

#include "iconicity/corpus.hpp"
#include "iconicity/permutation.hpp"
#include "iconicity/stats.hpp"
#include "iconicity/types.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace iconicity {

struct CcaOptions {
  Index n_components = 5;
  double ridge = 1e-8;  // added to both within-space covariance diagonals
};

/// Canonical correlation model between a phonetic (X) and semantic (Y) space.
/// Weights act on column-centered inputs; variate pair c is oriented so that
/// the phonetic loading of largest magnitude is positive.
template <typename Scalar>
struct BasicCcaModel {
  Index n_components = 0;
  double ridge = 0.0;
  Matrix<Scalar> weights_phonetic;   // dims_x x components
  Matrix<Scalar> weights_semantic;   // dims_y x components
  Matrix<Scalar> scores_phonetic;    // items x components
  Matrix<Scalar> scores_semantic;    // items x components
  Vector<Scalar> canonical_pearson;  // non-increasing
  Matrix<Scalar> loadings_phonetic;  // dims_x x components
  Matrix<Scalar> loadings_semantic;  // dims_y x components
  RowVector<Scalar> mean_phonetic;
  RowVector<Scalar> mean_semantic;
  /// Per-column scale that took raw semantic coordinates to the fitted
  /// inputs (z = (x - offset) / scale). Ones when the inputs were raw.
  RowVector<Scalar> semantic_scale;
};

using CcaModel = BasicCcaModel<double>;

struct StructureLoadings {
  Vector<double> values;
  std::vector<Index> constant_columns;  // loading forced to 0
};

/// Pearson correlation of every original column with one variate's scores.
template <typename DM, typename DS>
StructureLoadings structure_loadings(const Eigen::MatrixBase<DM>& original, const Eigen::MatrixBase<DS>& scores) {
  if (original.rows() != scores.size()) throw AnalysisError("structure_loadings: row count mismatch");
  const Vector<double> s = scores.template cast<double>().array() - scores.template cast<double>().mean();
  const double ss = s.squaredNorm();
  if (!(ss > 0.0)) throw AnalysisError("structure_loadings: constant variate scores");
  StructureLoadings out;
  out.values.resize(original.cols());
  for (Index c = 0; c < original.cols(); ++c) {
    const Vector<double> col = original.col(c).template cast<double>().array() - original.col(c).template cast<double>().mean();
    const double cc = col.squaredNorm();
    if (!(cc > 0.0)) {
      out.values(c) = 0.0;
      out.constant_columns.push_back(c);
      continue;
    }
    out.values(c) = std::clamp(col.dot(s) / std::sqrt(cc * ss), -1.0, 1.0);
  }
  return out;
}

/// Inverse square root of a symmetric positive-definite matrix. Throws
/// AnalysisError when the smallest eigenvalue is not resolvable from zero.
template <typename Derived>
Matrix<typename Derived::Scalar> inverse_sqrt_spd(const Eigen::MatrixBase<Derived>& cov, const char* what) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(cov);
  if (es.info() != Eigen::Success) throw AnalysisError(std::string("eigendecomposition failed for ") + what);
  const auto& ev = es.eigenvalues();
  const Scalar top = ev.maxCoeff();
  const Scalar floor = top * static_cast<Scalar>(cov.rows()) * std::numeric_limits<Scalar>::epsilon() * Scalar(10);
  if (!(ev.minCoeff() > floor) || !std::isfinite(static_cast<double>(top)))
    throw AnalysisError(std::string("rank-deficient ") + what + " covariance beyond ridge repair");
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

/// Holds the centered inputs and within-space whitening so that the fit can be
/// repeated under relabelings of the semantic rows; only the cross-covariance
/// depends on the pairing.
template <typename Scalar>
class CcaFitter {
 public:
  template <typename DX, typename DY>
  CcaFitter(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, const CcaOptions& options)
      : options_(options) {
    const Index n = x.rows();
    if (y.rows() != n) throw AnalysisError("CCA inputs have different row counts");
    if (n <= std::max(x.cols(), y.cols()))
      throw AnalysisError("CCA needs more items than dimensions (N=" + std::to_string(n) + ")");
    if (options.n_components < 1 || options.n_components > std::min(x.cols(), y.cols()))
      throw AnalysisError("n_components must lie in [1, min(dims)] (got " + std::to_string(options.n_components) + ")");
    if (!(options.ridge >= 0.0)) throw AnalysisError("ridge must be non-negative");

    mean_x_ = x.colwise().mean();
    mean_y_ = y.colwise().mean();
    xc_ = x.rowwise() - mean_x_;
    yc_ = y.rowwise() - mean_y_;
    const Scalar denom = Scalar(n - 1);
    Matrix<Scalar> cxx = xc_.transpose() * xc_ / denom;
    Matrix<Scalar> cyy = yc_.transpose() * yc_ / denom;
    cxx.diagonal().array() += Scalar(options.ridge);
    cyy.diagonal().array() += Scalar(options.ridge);
    kx_ = inverse_sqrt_spd(cxx, "phonetic");
    ky_ = inverse_sqrt_spd(cyy, "semantic");
    xw_ = xc_ * kx_;
  }

  Index items() const { return xc_.rows(); }

  /// Full model for the identity pairing.
  BasicCcaModel<Scalar> fit() const {
    const auto svd = decompose(yc_);
    const Index k = options_.n_components;
    BasicCcaModel<Scalar> m;
    m.n_components = k;
    m.ridge = options_.ridge;
    m.weights_phonetic = kx_ * svd.matrixU().leftCols(k);
    m.weights_semantic = ky_ * svd.matrixV().leftCols(k);
    m.scores_phonetic = xc_ * m.weights_phonetic;
    m.scores_semantic = yc_ * m.weights_semantic;
    m.canonical_pearson = svd.singularValues().head(k);
    m.mean_phonetic = mean_x_;
    m.mean_semantic = mean_y_;
    m.semantic_scale = RowVector<Scalar>::Ones(yc_.cols());
    m.loadings_phonetic.resize(xc_.cols(), k);
    m.loadings_semantic.resize(yc_.cols(), k);
    for (Index c = 0; c < k; ++c) {
      auto lx = structure_loadings(xc_, m.scores_phonetic.col(c)).values;
      Index top = 0;
      for (Index d = 1; d < lx.size(); ++d)
        if (std::abs(lx(d)) > std::abs(lx(top))) top = d;
      if (lx(top) < 0) {
        m.weights_phonetic.col(c) *= Scalar(-1);
        m.weights_semantic.col(c) *= Scalar(-1);
        m.scores_phonetic.col(c) *= Scalar(-1);
        m.scores_semantic.col(c) *= Scalar(-1);
        lx = -lx;
      }
      m.loadings_phonetic.col(c) = lx.template cast<Scalar>();
      m.loadings_semantic.col(c) =
          structure_loadings(yc_, m.scores_semantic.col(c)).values.template cast<Scalar>();
    }
    return m;
  }

  /// Spearman correlation of each variate pair after re-fitting with semantic
  /// row perm[i] paired to phonetic row i.
  std::vector<double> rank_correlations(std::span<const Index> perm) const {
    Matrix<Scalar> yp(yc_.rows(), yc_.cols());
    for (Index i = 0; i < yc_.rows(); ++i) yp.row(i) = yc_.row(perm[static_cast<std::size_t>(i)]);
    const auto svd = decompose(yp);
    const Index k = options_.n_components;
    const Matrix<Scalar> sx = xw_ * svd.matrixU().leftCols(k);
    const Matrix<Scalar> sy = yp * (ky_ * svd.matrixV().leftCols(k));
    std::vector<double> out(static_cast<std::size_t>(k));
    for (Index c = 0; c < k; ++c) out[static_cast<std::size_t>(c)] = spearman_rho(sx.col(c), sy.col(c));
    return out;
  }

 private:
  Eigen::BDCSVD<Matrix<Scalar>> decompose(const Matrix<Scalar>& y_centered) const {
    const Matrix<Scalar> cxy = xc_.transpose() * y_centered / Scalar(xc_.rows() - 1);
    const Matrix<Scalar> whitened = kx_ * cxy * ky_;
    Eigen::BDCSVD<Matrix<Scalar>> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw AnalysisError("SVD of the whitened cross-covariance failed");
    return svd;
  }

  CcaOptions options_;
  RowVector<Scalar> mean_x_, mean_y_;
  Matrix<Scalar> xc_, yc_, kx_, ky_, xw_;
};

/// Ridge-regularized CCA. Inputs are expected column-standardized.
template <typename DX, typename DY>
BasicCcaModel<typename DX::Scalar> fit_cca(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y,
                                           const CcaOptions& options = {}) {
  return CcaFitter<typename DX::Scalar>(x, y, options).fit();
}

enum class CcaNull {
  refit,   // shuffle item pairing and re-fit the whole model per shuffle
  scores,  // fast mode: shuffle the fitted semantic scores only
};

/// Spearman's rho of each variate pair, with permutation p-values.
std::vector<AlignmentResult> canonical_rank_correlations(const CcaModel& model, const Matrix<double>& x,
                                                         const Matrix<double>& y, const CcaOptions& options,
                                                         const PermutationOptions& permutation,
                                                         CcaNull null = CcaNull::refit);

enum class PoleSign { positive, negative };

struct PoleFeature {
  std::string name;
  double loading = 0.0;
  friend bool operator==(const PoleFeature&, const PoleFeature&) = default;
};

/// Features whose loading has the given sign, reaches the percentile of that
/// sign's subset (linear interpolation, inclusive) and the absolute threshold.
/// Sorted by |loading| descending, then name.
std::vector<PoleFeature> extract_phonetic_pole(std::span<const std::string> names, const Vector<double>& loadings,
                                               PoleSign sign, double percentile = 75.0, double threshold = 0.05);

enum class PoleDirection { weights, loadings };

struct PoleWord {
  std::string word;
  double similarity = 0.0;
  friend bool operator==(const PoleWord&, const PoleWord&) = default;
};

struct PoleNeighbors {
  std::vector<PoleWord> words;
  bool short_list = false;  // fewer than k candidates
};

/// Semantic pole direction of a component in raw embedding coordinates.
Vector<double> semantic_pole_direction(const CcaModel& model, Index component, PoleSign sign,
                                       PoleDirection mode = PoleDirection::weights);

/// Nearest words (cosine) to a semantic pole among lexicon words above the
/// zipf cutoff that have vectors. `vectors` holds raw embeddings by word.
PoleNeighbors semantic_pole_neighbors(const CcaModel& model, Index component, PoleSign sign,
                                      const EmbeddingMatrix& vectors, const Lexicon& lexicon, Index k = 10,
                                      double zipf_cutoff = 4.5, PoleDirection mode = PoleDirection::weights);

/// Ranked cosine neighbors of an arbitrary direction; exposed for reuse.
PoleNeighbors nearest_words(const Vector<double>& direction, const EmbeddingMatrix& vectors,
                            const Lexicon& candidates, Index k);

struct PoleReport {
  Index component = 0;  // 1-based
  double rho = 0.0;
  double p_value = 1.0;
  std::vector<PoleFeature> phonetic_pos, phonetic_neg;
  std::vector<PoleWord> semantic_pos, semantic_neg;
  bool semantic_pos_short = false;
  bool semantic_neg_short = false;
};

struct PoleOptions {
  double percentile = 75.0;
  double threshold = 0.05;
  Index neighbors = 10;
  double zipf_cutoff = 4.5;
  PoleDirection direction = PoleDirection::weights;
};

/// `component` is 0-based.
PoleReport build_pole_report(const CcaModel& model, Index component, std::span<const std::string> feature_names,
                             const EmbeddingMatrix& vectors, const Lexicon& lexicon, const PoleOptions& options);

}  // namespace iconicity
