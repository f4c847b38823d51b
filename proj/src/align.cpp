#include "iconicity/align.hpp"

#include "iconicity/stats.hpp"

#include <cmath>
#include <memory>

namespace iconicity {

double mutual_information_bits(std::span<const int> bins_x, std::span<const int> bins_y, int bins) {
  if (bins_x.size() != bins_y.size()) throw AnalysisError("mutual information: length mismatch");
  if (bins_x.empty()) throw AnalysisError("mutual information of empty samples");
  const auto b = static_cast<std::size_t>(bins);
  std::vector<double> joint(b * b, 0.0), mx(b, 0.0), my(b, 0.0);
  for (std::size_t i = 0; i < bins_x.size(); ++i) {
    const auto x = static_cast<std::size_t>(bins_x[i]);
    const auto y = static_cast<std::size_t>(bins_y[i]);
    joint[x * b + y] += 1.0;
    mx[x] += 1.0;
    my[y] += 1.0;
  }
  const auto n = static_cast<double>(bins_x.size());
  double mi = 0.0;
  for (std::size_t x = 0; x < b; ++x) {
    if (mx[x] == 0.0) continue;
    for (std::size_t y = 0; y < b; ++y) {
      const double c = joint[x * b + y];
      if (c == 0.0) continue;
      mi += c / n * std::log2(c * n / (mx[x] * my[y]));
    }
  }
  return std::max(mi, 0.0);
}

double neighbor_overlap(const std::vector<std::vector<Index>>& a, const std::vector<std::vector<Index>>& b,
                        Index k) {
  if (a.size() != b.size()) throw AnalysisError("neighbor lists over different item counts");
  if (a.empty()) throw AnalysisError("neighbor overlap of zero items");
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Index shared = 0;
    for (Index x : a[i])
      if (std::find(b[i].begin(), b[i].end(), x) != b[i].end()) ++shared;
    total += static_cast<double>(shared) / static_cast<double>(k);
  }
  return total / static_cast<double>(a.size());
}

void require_same_items(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  if (a.values.rows() != a.values.cols() || b.values.rows() != b.values.cols())
    throw InputError("similarity matrices must be square");
  if (a.ids != b.ids) throw InputError("similarity matrices cover different item ids or orders");
  if (static_cast<Index>(a.ids.size()) != a.size()) throw InputError("similarity matrix id count mismatch");
}

namespace {

// Pairs (i<j) visited in the same order as pair_vector.
template <typename F>
void for_each_pair(Index n, F&& f) {
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) f(k++, i, j);
}

}  // namespace

Statistic rsa_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b) {
  require_same_items(a, b);
  const Index n = a.size();
  if (n * (n - 1) / 2 < 3) throw AnalysisError("RSA needs at least 3 item pairs");

  auto ra = std::make_shared<Vector<double>>(midranks(pair_vector(a.values)));
  const Vector<double> rb_pairs = midranks(pair_vector(b.values));
  const double mean = 0.5 * static_cast<double>(ra->size() + 1);  // midranks always average (P+1)/2
  ra->array() -= mean;
  auto rb = std::make_shared<Matrix<double>>(Matrix<double>::Zero(n, n));
  for_each_pair(n, [&](Index k, Index i, Index j) {
    (*rb)(i, j) = rb_pairs(k) - mean;
    (*rb)(j, i) = rb_pairs(k) - mean;
  });
  const double sxx = ra->squaredNorm();
  const double syy = (rb_pairs.array() - mean).matrix().squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0)) throw AnalysisError("RSA undefined: constant similarities");
  const double denom = std::sqrt(sxx * syy);

  return [ra, rb, n, denom](std::span<const Index> perm) {
    double acc = 0.0;
    Index k = 0;
    for (Index i = 0; i < n; ++i) {
      const Index pi = perm[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < n; ++j) acc += (*ra)(k++) * (*rb)(pi, perm[static_cast<std::size_t>(j)]);
    }
    return std::clamp(acc / denom, -1.0, 1.0);
  };
}

Statistic pair_mutual_information_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b, int bins) {
  require_same_items(a, b);
  const Index n = a.size();
  const auto pairs = n * (n - 1) / 2;
  if (pairs < bins) throw AnalysisError("mutual information needs at least as many pairs as bins");
  auto bx = std::make_shared<std::vector<int>>(equal_width_bins(pair_vector(a.values), bins));
  const auto by_pairs = equal_width_bins(pair_vector(b.values), bins);
  auto by = std::make_shared<Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>>(
      Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n));
  for_each_pair(n, [&](Index k, Index i, Index j) {
    (*by)(i, j) = by_pairs[static_cast<std::size_t>(k)];
    (*by)(j, i) = by_pairs[static_cast<std::size_t>(k)];
  });

  return [bx, by, n, bins](std::span<const Index> perm) {
    std::vector<int> permuted(bx->size());
    for_each_pair(n, [&](Index k, Index i, Index j) {
      permuted[static_cast<std::size_t>(k)] = (*by)(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    });
    return mutual_information_bits(*bx, permuted, bins);
  };
}

Statistic vector_mutual_information_statistic(const Vector<double>& x, const Vector<double>& y, int bins) {
  if (x.size() != y.size()) throw AnalysisError("mutual information: length mismatch");
  if (x.size() < bins) throw AnalysisError("mutual information needs at least as many samples as bins");
  auto bx = std::make_shared<std::vector<int>>(equal_width_bins(x, bins));
  auto by = std::make_shared<std::vector<int>>(equal_width_bins(y, bins));
  return [bx, by, bins](std::span<const Index> perm) {
    std::vector<int> permuted(by->size());
    for (std::size_t i = 0; i < permuted.size(); ++i) permuted[i] = (*by)[static_cast<std::size_t>(perm[i])];
    return mutual_information_bits(*bx, permuted, bins);
  };
}

namespace {

// Neighborhood of one row of the second space, split at the k-th place:
// `strict` holds the members ranked strictly above the k-th value, `boundary`
// every other item tied with it. Which boundary members enter the top k
// depends on the index order after relabeling.
struct RowNeighborhood {
  std::vector<Index> strict;
  std::vector<Index> boundary;
};

std::vector<RowNeighborhood> neighborhoods(const Matrix<double>& sim, Index k) {
  const Index n = sim.rows();
  const auto top = nearest_neighbors(sim, k);
  std::vector<RowNeighborhood> out(static_cast<std::size_t>(n));
  for (Index r = 0; r < n; ++r) {
    const double cut = sim(r, top[static_cast<std::size_t>(r)].back());
    auto& nb = out[static_cast<std::size_t>(r)];
    for (Index j = 0; j < n; ++j) {
      if (j == r) continue;
      if (sim(r, j) > cut) nb.strict.push_back(j);
      else if (sim(r, j) == cut) nb.boundary.push_back(j);
    }
  }
  return out;
}

}  // namespace

Statistic knn_overlap_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b, Index k) {
  require_same_items(a, b);
  if (k < 1) throw AnalysisError("k must be positive");
  auto na = std::make_shared<std::vector<std::vector<Index>>>(nearest_neighbors(a.values, k));
  auto nb = std::make_shared<std::vector<RowNeighborhood>>(neighborhoods(b.values, k));
  const Index n = a.size();

  return [na, nb, n, k](std::span<const Index> perm) {
    std::vector<Index> inverse(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) inverse[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = i;
    std::vector<char> marked(static_cast<std::size_t>(n), 0);
    std::vector<Index> tied;
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      const auto& mine = (*na)[static_cast<std::size_t>(i)];
      for (Index x : mine) marked[static_cast<std::size_t>(x)] = 1;
      const auto& row = (*nb)[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      Index shared = 0;
      for (Index j : row.strict) shared += marked[static_cast<std::size_t>(inverse[static_cast<std::size_t>(j)])];
      const auto need = static_cast<std::size_t>(k) - row.strict.size();
      tied.clear();
      for (Index j : row.boundary) tied.push_back(inverse[static_cast<std::size_t>(j)]);
      if (need < tied.size()) {
        std::nth_element(tied.begin(), tied.begin() + static_cast<std::ptrdiff_t>(need), tied.end());
        tied.resize(need);
      }
      for (Index j : tied) shared += marked[static_cast<std::size_t>(j)];
      for (Index x : mine) marked[static_cast<std::size_t>(x)] = 0;
      total += static_cast<double>(shared) / static_cast<double>(k);
    }
    return total / static_cast<double>(n);
  };
}

AlignmentResult rsa(const SimilarityMatrix& a, const SimilarityMatrix& b, const PermutationOptions& options) {
  const auto stat = rsa_statistic(a, b);
  const double observed = spearman_rho(pair_vector(a.values), pair_vector(b.values));
  return make_alignment_result("rsa", observed, permutation_test(a.size(), stat, observed, options), options);
}

AlignmentResult mutual_information(const Vector<double>& x, const Vector<double>& y, int bins,
                                   const PermutationOptions& options) {
  const auto stat = vector_mutual_information_statistic(x, y, bins);
  const double observed = mutual_information_bits(x, y, bins);
  return make_alignment_result("mi", observed, permutation_test(x.size(), stat, observed, options), options);
}

AlignmentResult mutual_information(const SimilarityMatrix& a, const SimilarityMatrix& b, int bins,
                                   const PermutationOptions& options) {
  const auto stat = pair_mutual_information_statistic(a, b, bins);
  const double observed = mutual_information_bits(pair_vector(a.values), pair_vector(b.values), bins);
  return make_alignment_result("mi", observed, permutation_test(a.size(), stat, observed, options), options);
}

AlignmentResult knn_overlap(const SimilarityMatrix& a, const SimilarityMatrix& b, Index k,
                            const PermutationOptions& options) {
  require_same_items(a, b);
  const double observed = neighbor_overlap(nearest_neighbors(a.values, k), nearest_neighbors(b.values, k), k);
  const auto stat = knn_overlap_statistic(a, b, k);
  return make_alignment_result("knn_overlap", observed, permutation_test(a.size(), stat, observed, options),
                               options);
}

}  // namespace iconicity
