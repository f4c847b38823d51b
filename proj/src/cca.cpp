#include "iconicity/cca.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

namespace iconicity {

std::vector<AlignmentResult> canonical_rank_correlations(const CcaModel& model, const Matrix<double>& x,
                                                         const Matrix<double>& y, const CcaOptions& options,
                                                         const PermutationOptions& permutation, CcaNull null) {
  const Index k = model.n_components;
  std::vector<double> observed(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c)
    observed[static_cast<std::size_t>(c)] = spearman_rho(model.scores_phonetic.col(c), model.scores_semantic.col(c));

  MultiStatistic statistic;
  if (null == CcaNull::refit) {
    if (options.n_components != k) throw AnalysisError("CCA options disagree with the fitted model");
    auto fitter = std::make_shared<CcaFitter<double>>(x, y, options);
    statistic = [fitter](std::span<const Index> perm) { return fitter->rank_correlations(perm); };
  } else {
    // Ranks of each score column are fixed; only their pairing moves.
    auto rx = std::make_shared<Matrix<double>>(model.scores_phonetic.rows(), k);
    auto ry = std::make_shared<Matrix<double>>(model.scores_semantic.rows(), k);
    for (Index c = 0; c < k; ++c) {
      rx->col(c) = midranks(model.scores_phonetic.col(c));
      ry->col(c) = midranks(model.scores_semantic.col(c));
    }
    statistic = [rx, ry, k](std::span<const Index> perm) {
      std::vector<double> out(static_cast<std::size_t>(k));
      Vector<double> permuted(ry->rows());
      for (Index c = 0; c < k; ++c) {
        for (Index i = 0; i < ry->rows(); ++i) permuted(i) = (*ry)(perm[static_cast<std::size_t>(i)], c);
        out[static_cast<std::size_t>(c)] = pearson(rx->col(c), permuted);
      }
      return out;
    };
  }

  const auto outcomes = permutation_test(model.scores_phonetic.rows(), statistic, observed, permutation);
  std::vector<AlignmentResult> results;
  for (Index c = 0; c < k; ++c)
    results.push_back(make_alignment_result("cca_cv" + std::to_string(c + 1), observed[static_cast<std::size_t>(c)],
                                            outcomes[static_cast<std::size_t>(c)], permutation));
  return results;
}

std::vector<PoleFeature> extract_phonetic_pole(std::span<const std::string> names, const Vector<double>& loadings,
                                               PoleSign sign, double percentile, double threshold) {
  if (static_cast<Index>(names.size()) != loadings.size())
    throw AnalysisError("feature names and loadings differ in length");
  const double s = sign == PoleSign::positive ? 1.0 : -1.0;
  std::vector<double> subset;
  for (Index d = 0; d < loadings.size(); ++d) {
    if (!std::isfinite(loadings(d))) throw AnalysisError("non-finite loading");
    if (s * loadings(d) > 0.0) subset.push_back(s * loadings(d));
  }
  std::vector<PoleFeature> out;
  if (subset.empty()) return out;
  const double cut = percentile_linear(subset, percentile);
  for (Index d = 0; d < loadings.size(); ++d) {
    const double v = s * loadings(d);
    if (v > 0.0 && v >= cut && v >= threshold) out.push_back({names[static_cast<std::size_t>(d)], loadings(d)});
  }
  std::sort(out.begin(), out.end(), [](const PoleFeature& a, const PoleFeature& b) {
    if (std::abs(a.loading) != std::abs(b.loading)) return std::abs(a.loading) > std::abs(b.loading);
    return a.name < b.name;
  });
  return out;
}

Vector<double> semantic_pole_direction(const CcaModel& model, Index component, PoleSign sign, PoleDirection mode) {
  if (component < 0 || component >= model.n_components) throw AnalysisError("component index out of range");
  const Vector<double> base = mode == PoleDirection::weights ? Vector<double>(model.weights_semantic.col(component))
                                                             : Vector<double>(model.loadings_semantic.col(component));
  Vector<double> scale = model.semantic_scale.transpose();
  if (scale.size() != base.size()) scale = Vector<double>::Ones(base.size());
  const double s = sign == PoleSign::positive ? 1.0 : -1.0;
  return s * base.cwiseProduct(scale);
}

PoleNeighbors nearest_words(const Vector<double>& direction, const EmbeddingMatrix& vectors,
                            const Lexicon& candidates, Index k) {
  if (direction.size() != vectors.dims()) throw AnalysisError("pole direction and vectors differ in dimension");
  const double dn = direction.norm();
  if (!(dn > 0.0)) throw AnalysisError("zero pole direction");
  std::unordered_map<std::string, Index> row_of;
  for (std::size_t r = 0; r < vectors.ids.size(); ++r) row_of.emplace(vectors.ids[r], static_cast<Index>(r));

  std::vector<PoleWord> scored;
  for (const auto& lx : candidates.entries) {
    auto it = row_of.find(lx.word);
    if (it == row_of.end()) continue;
    const auto v = vectors.values.row(it->second);
    const double vn = v.norm();
    if (!(vn > 0.0)) continue;
    scored.push_back({lx.word, v.dot(direction) / (vn * dn)});
  }
  std::sort(scored.begin(), scored.end(), [](const PoleWord& a, const PoleWord& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.word < b.word;
  });
  scored.erase(std::unique(scored.begin(), scored.end(),
                           [](const PoleWord& a, const PoleWord& b) { return a.word == b.word; }),
               scored.end());
  PoleNeighbors out;
  out.short_list = static_cast<Index>(scored.size()) < k;
  if (!out.short_list) scored.resize(static_cast<std::size_t>(k));
  out.words = std::move(scored);
  return out;
}

PoleNeighbors semantic_pole_neighbors(const CcaModel& model, Index component, PoleSign sign,
                                      const EmbeddingMatrix& vectors, const Lexicon& lexicon, Index k,
                                      double zipf_cutoff, PoleDirection mode) {
  return nearest_words(semantic_pole_direction(model, component, sign, mode), vectors,
                       zipf_filter(lexicon, zipf_cutoff), k);
}

PoleReport build_pole_report(const CcaModel& model, Index component, std::span<const std::string> feature_names,
                             const EmbeddingMatrix& vectors, const Lexicon& lexicon, const PoleOptions& options) {
  PoleReport r;
  r.component = component + 1;
  const Vector<double> loadings = model.loadings_phonetic.col(component);
  r.phonetic_pos = extract_phonetic_pole(feature_names, loadings, PoleSign::positive, options.percentile,
                                         options.threshold);
  r.phonetic_neg = extract_phonetic_pole(feature_names, loadings, PoleSign::negative, options.percentile,
                                         options.threshold);
  const auto filtered = zipf_filter(lexicon, options.zipf_cutoff);
  auto pos = nearest_words(semantic_pole_direction(model, component, PoleSign::positive, options.direction),
                           vectors, filtered, options.neighbors);
  auto neg = nearest_words(semantic_pole_direction(model, component, PoleSign::negative, options.direction),
                           vectors, filtered, options.neighbors);
  r.semantic_pos = std::move(pos.words);
  r.semantic_pos_short = pos.short_list;
  r.semantic_neg = std::move(neg.words);
  r.semantic_neg_short = neg.short_list;
  return r;
}

}  // namespace iconicity
