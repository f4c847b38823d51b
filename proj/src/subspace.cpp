#include "iconicity/subspace.hpp"

#include "iconicity/stats.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <unordered_map>

namespace iconicity {

WordSelection select_words(const EmbeddingMatrix& vocabulary, const CentroidLine& line, std::size_t n) {
  if (vocabulary.size() == 0) throw InputError("word selection over an empty vocabulary");
  const auto& v = vocabulary.values;
  const Vector<double> t = project_rows(v, line);
  const Matrix<double> residual = (v.rowwise() - line.origin.transpose()) - t * line.direction.transpose();
  const Vector<double> dist = residual.rowwise().norm();

  std::vector<Index> order(static_cast<std::size_t>(v.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  const auto before = [&](Index a, Index b) {
    if (dist(a) != dist(b)) return dist(a) < dist(b);
    return vocabulary.ids[static_cast<std::size_t>(a)] < vocabulary.ids[static_cast<std::size_t>(b)];
  };
  WordSelection out;
  out.short_pool = order.size() < n;
  const auto take = std::min(n, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), before);
  order.resize(take);
  for (Index r : order) out.distances.push_back(dist(r));
  out.rows = std::move(order);
  return out;
}

ScaleConfig swap_poles(const ScaleConfig& scale, bool phonetic, bool semantic) {
  ScaleConfig out = scale;
  if (phonetic) std::swap(out.phonetic_pos, out.phonetic_neg);
  if (semantic)
    for (auto& [lang, poles] : out.semantic) std::swap(poles.pos, poles.neg);
  return out;
}

namespace {

Matrix<double> rows_for(const std::vector<std::string>& words, const std::unordered_map<std::string, Index>& row_of,
                        const EmbeddingMatrix& vectors, const std::string& context) {
  Matrix<double> out(static_cast<Index>(words.size()), vectors.dims());
  for (std::size_t i = 0; i < words.size(); ++i) {
    auto it = row_of.find(words[i]);
    if (it == row_of.end()) throw InputError(context + ": semantic exemplar '" + words[i] + "' has no vector");
    out.row(static_cast<Index>(i)) = vectors.values.row(it->second);
  }
  return out;
}

Matrix<double> segment_rows(const std::vector<std::string>& segments, const SegmentFeatureTable& table,
                            const std::string& context) {
  Matrix<double> out(static_cast<Index>(segments.size()), table.feature_count());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto row = table.find(segments[i]);
    if (!row) throw InputError(context + ": phonetic exemplar '" + segments[i] + "' is not in the feature table");
    out.row(static_cast<Index>(i)) = table.row(*row);
  }
  return out;
}

}  // namespace

ScaleResult scale_alignment(const ScaleConfig& scale, const std::string& language, const SemanticVocabulary& vocabulary,
                            const SegmentFeatureTable& table, const SubspaceOptions& options) {
  const std::string context = "scale '" + scale.name + "' language " + language;
  auto poles = scale.semantic.find(language);
  if (poles == scale.semantic.end()) throw InputError(context + ": no semantic exemplars configured");

  const auto& vectors = vocabulary.vectors;
  std::unordered_map<std::string, Index> row_of;
  for (std::size_t r = 0; r < vectors.ids.size(); ++r) row_of.emplace(vectors.ids[r], static_cast<Index>(r));

  // Exemplars are validated before any work so errors name the missing item.
  const Matrix<double> sem_pos = rows_for(poles->second.pos, row_of, vectors, context);
  const Matrix<double> sem_neg = rows_for(poles->second.neg, row_of, vectors, context);
  const Matrix<double> pho_pos = segment_rows(scale.phonetic_pos, table, context);
  const Matrix<double> pho_neg = segment_rows(scale.phonetic_neg, table, context);
  const CentroidLine semantic_line = build_line(sem_pos, sem_neg, Space::semantic);

  ScaleResult result;
  result.scale = scale.name;
  result.language = language;

  // Candidate pool: lexicon words with a vector and a usable transcription.
  const Lexicon pool = options.pool_top > 0 ? top_n(vocabulary.lexicon, options.pool_top) : vocabulary.lexicon;
  EmbeddingMatrix candidates;
  std::vector<Vector<double>> pooled;
  std::vector<Index> candidate_rows;
  std::unordered_map<std::string, bool> seen;
  for (const auto& lx : pool.entries) {
    if (!seen.emplace(lx.word, true).second) continue;
    auto it = row_of.find(lx.word);
    if (it == row_of.end()) {
      ++result.missing_embedding;
      continue;
    }
    if (!lx.transcribable()) {
      ++result.missing_ipa;
      continue;
    }
    const auto tok = try_tokenize_ipa(lx.ipa, table);
    if (tok.segments.empty()) {
      ++result.untokenizable;
      continue;
    }
    candidates.ids.push_back(lx.word);
    candidate_rows.push_back(it->second);
    pooled.push_back(mean_pool(tok.segments, table));
  }
  if (candidates.ids.empty()) throw AnalysisError(context + ": no candidate words with vectors and transcriptions");
  candidates.values = vectors.values(candidate_rows, Eigen::all);

  const auto selection = select_words(candidates, semantic_line, options.n_words);
  result.short_pool = selection.short_pool;
  const auto n = static_cast<Index>(selection.rows.size());
  if (n < 3) throw AnalysisError(context + ": fewer than 3 words selected");

  EmbeddingMatrix phon;
  phon.columns = table.feature_names();
  phon.values.resize(n, table.feature_count());
  for (Index i = 0; i < n; ++i) {
    const Index r = selection.rows[static_cast<std::size_t>(i)];
    phon.ids.push_back(candidates.ids[static_cast<std::size_t>(r)]);
    phon.values.row(i) = pooled[static_cast<std::size_t>(r)].transpose();
  }
  const auto dropped = drop_zero_variance(phon);
  const auto transform = fit_normalization(dropped.matrix.values, options.normalization);
  const Matrix<double> words_phon = transform.apply(dropped.matrix.values);
  const CentroidLine phonetic_line = build_line(transform.apply(pho_pos(Eigen::all, dropped.kept)),
                                                transform.apply(pho_neg(Eigen::all, dropped.kept)), Space::phonetic);
  result.kept_features = dropped.matrix.columns;

  Vector<double> sem_coord(n);
  for (Index i = 0; i < n; ++i)
    sem_coord(i) = project(candidates.values.row(selection.rows[static_cast<std::size_t>(i)]).transpose(), semantic_line);
  const Vector<double> pho_coord = project_rows(words_phon, phonetic_line);

  result.n_words = static_cast<std::size_t>(n);
  for (Index i = 0; i < n; ++i)
    result.projections.push_back({phon.ids[static_cast<std::size_t>(i)], sem_coord(i), pho_coord(i)});

  const double observed = spearman_rho(sem_coord, pho_coord);
  const Vector<double> rank_s = midranks(sem_coord);
  const Vector<double> rank_p = midranks(pho_coord);
  auto shared_s = std::make_shared<Vector<double>>(rank_s);
  auto shared_p = std::make_shared<Vector<double>>(rank_p);
  const Statistic stat = [shared_s, shared_p](std::span<const Index> perm) {
    Vector<double> permuted(shared_p->size());
    for (Index i = 0; i < permuted.size(); ++i) permuted(i) = (*shared_p)(perm[static_cast<std::size_t>(i)]);
    return pearson(*shared_s, permuted);
  };
  const auto outcome = permutation_test(n, stat, observed, options.permutation);
  result.alignment = make_alignment_result("subspace_rho", observed, outcome, options.permutation);
  result.rho = observed;
  result.p_value = outcome.p_value;
  return result;
}

}  // namespace iconicity
