#pragma once

#include "iconicity/permutation.hpp"
#include "iconicity/types.hpp"

namespace iconicity {

inline constexpr int kDefaultBins = 20;
inline constexpr Index kDefaultNeighbors = 10;

// Statistic factories. Each returned closure evaluates the statistic with the
// second space's items relabeled by `perm` (item i paired with perm[i]); the
// identity permutation reproduces the observed value. Closures own copies of
// whatever they precompute and are safe to call concurrently.

/// Spearman correlation of the two matrices' strict upper triangles.
Statistic rsa_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b);

/// Binned mutual information (bits) between the upper triangles.
Statistic pair_mutual_information_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b, int bins);

/// Binned mutual information with y's entries reassigned: x_i paired with y_perm[i].
Statistic vector_mutual_information_statistic(const Vector<double>& x, const Vector<double>& y, int bins);

/// Mean shared-neighbor proportion at k.
Statistic knn_overlap_statistic(const SimilarityMatrix& a, const SimilarityMatrix& b, Index k);

/// Representational similarity analysis: Spearman's rho over all item pairs.
AlignmentResult rsa(const SimilarityMatrix& a, const SimilarityMatrix& b, const PermutationOptions& options = {});

AlignmentResult mutual_information(const Vector<double>& x, const Vector<double>& y, int bins = kDefaultBins,
                                   const PermutationOptions& options = {});

/// Mutual information between the two spaces' pairwise similarities; the null
/// permutes items of the second space.
AlignmentResult mutual_information(const SimilarityMatrix& a, const SimilarityMatrix& b, int bins = kDefaultBins,
                                   const PermutationOptions& options = {});

AlignmentResult knn_overlap(const SimilarityMatrix& a, const SimilarityMatrix& b, Index k = kDefaultNeighbors,
                            const PermutationOptions& options = {});

/// Throws InputError unless both matrices are square over the same ids.
void require_same_items(const SimilarityMatrix& a, const SimilarityMatrix& b);

}  // namespace iconicity
