#pragma once

#include "iconicity/corpus.hpp"
#include "iconicity/permutation.hpp"
#include "iconicity/phono_embed.hpp"
#include "iconicity/scales.hpp"
#include "iconicity/types.hpp"

#include <string>
#include <vector>

namespace iconicity {

enum class Space { phonetic, semantic };

/// Line through the negative-pole centroid (t = 0) and the positive-pole
/// centroid (t = 1).
struct CentroidLine {
  Vector<double> origin;
  Vector<double> direction;
  Space space = Space::semantic;
};

/// Rows of `pos` and `neg` are exemplar embeddings.
template <typename DP, typename DN>
CentroidLine build_line(const Eigen::MatrixBase<DP>& pos, const Eigen::MatrixBase<DN>& neg, Space space) {
  if (pos.rows() == 0 || neg.rows() == 0) throw InputError("centroid line needs non-empty exemplar sets");
  if (pos.cols() != neg.cols()) throw InputError("exemplar sets differ in dimension");
  CentroidLine line;
  line.space = space;
  line.origin = neg.colwise().mean().transpose().template cast<double>();
  line.direction = pos.colwise().mean().transpose().template cast<double>() - line.origin;
  if (!(line.direction.squaredNorm() > 0.0)) throw AnalysisError("coincident exemplar centroids");
  return line;
}

/// Coordinate along the line: (p - origin).d / |d|^2.
template <typename Derived>
double project(const Eigen::MatrixBase<Derived>& point, const CentroidLine& line) {
  if (point.size() != line.direction.size()) throw AnalysisError("projection dimension mismatch");
  return (point.template cast<double>() - line.origin).dot(line.direction) / line.direction.squaredNorm();
}

template <typename Derived>
double perpendicular_distance(const Eigen::MatrixBase<Derived>& point, const CentroidLine& line) {
  const double t = project(point, line);
  return (point.template cast<double>() - line.origin - t * line.direction).norm();
}

/// Row-wise projections of a matrix of points.
template <typename Derived>
Vector<double> project_rows(const Eigen::MatrixBase<Derived>& points, const CentroidLine& line) {
  if (points.cols() != line.direction.size()) throw AnalysisError("projection dimension mismatch");
  return (points.template cast<double>().rowwise() - line.origin.transpose()) * line.direction /
         line.direction.squaredNorm();
}

struct WordSelection {
  std::vector<Index> rows;  // into the vocabulary matrix, nearest first
  std::vector<double> distances;
  bool short_pool = false;  // vocabulary had fewer than n words
};

/// The n rows nearest the line by perpendicular distance; ties by id.
WordSelection select_words(const EmbeddingMatrix& vocabulary, const CentroidLine& line, std::size_t n = 10000);

struct ProjectedWord {
  std::string word;
  double semantic = 0.0;
  double phonetic = 0.0;
};

struct ScaleResult {
  std::string scale;
  std::string language;
  double rho = 0.0;
  double p_value = 1.0;
  AlignmentResult alignment;
  std::size_t n_words = 0;
  std::size_t missing_embedding = 0;   // pool words without a vector
  std::size_t missing_ipa = 0;         // pool words without a transcription
  std::size_t untokenizable = 0;       // transcriptions matching no segment
  bool short_pool = false;
  std::vector<std::string> kept_features;
  std::vector<ProjectedWord> projections;
};

struct SubspaceOptions {
  std::size_t n_words = 10000;
  std::size_t pool_top = 0;  // restrict the candidate pool to the top-N lexicon words; 0 = all
  Normalization normalization = Normalization::z_score;
  PermutationOptions permutation{.n_shuffles = 5000, .null_points = 5000, .seed = 0,
                                 .alternative = Alternative::two_sided, .workers = 1};
};

/// Vectors for lexicon words and exemplar words of one language.
struct SemanticVocabulary {
  const EmbeddingMatrix& vectors;
  const Lexicon& lexicon;
};

/// Correlates word projections onto a scale's paired semantic and phonetic
/// lines. The phonetic space (kept dimensions and normalization) is fitted
/// over the selected words; exemplar segments are mapped through the same
/// transform.
ScaleResult scale_alignment(const ScaleConfig& scale, const std::string& language, const SemanticVocabulary& vocabulary,
                            const SegmentFeatureTable& table, const SubspaceOptions& options = {});

/// Exchanges positive and negative poles in the chosen modality.
ScaleConfig swap_poles(const ScaleConfig& scale, bool phonetic, bool semantic);

}  // namespace iconicity
