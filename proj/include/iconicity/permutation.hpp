#pragma once

#include "iconicity/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace iconicity {

enum class Alternative { greater, two_sided };

std::string to_string(Alternative alternative);
Alternative alternative_from_string(const std::string& text);

struct PermutationOptions {
  std::size_t n_shuffles = 1000;
  std::size_t null_points = 500;  // the null sample is the first null_points shuffles
  std::uint64_t seed = 0;
  Alternative alternative = Alternative::greater;
  unsigned workers = 1;
};

struct NullSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double max = 0.0;
};

struct PermutationOutcome {
  double p_value = 1.0;
  std::vector<double> null_sample;
};

/// A statistic evaluated under a relabeling of the second space's items:
/// item i of the first space is paired with item perm[i] of the second.
using Statistic = std::function<double(std::span<const Index> perm)>;
using MultiStatistic = std::function<std::vector<double>(std::span<const Index> perm)>;

/// Permutation of shuffle `index` under `seed`; depends on nothing else.
std::vector<Index> shuffle_permutation(Index n_items, std::uint64_t seed, std::size_t index);

/// Add-one p-value: (1 + #{null at least as extreme}) / (1 + |null|).
/// Comparisons allow a relative slack of 1e-12 so that statistics which are
/// invariant under permutation up to rounding tie the observed value.
double permutation_p_value(std::span<const double> null_sample, double observed, Alternative alternative);

NullSummary summarize_null(std::span<const double> null_sample);

PermutationOutcome permutation_test(Index n_items, const Statistic& statistic, double observed,
                                    const PermutationOptions& options);

/// Several statistics sharing one shuffle sequence, e.g. all canonical
/// variates of a re-fitted model. Returns one outcome per observed value.
std::vector<PermutationOutcome> permutation_test(Index n_items, const MultiStatistic& statistic,
                                                 std::span<const double> observed,
                                                 const PermutationOptions& options);

struct AlignmentResult {
  std::string statistic;
  double value = 0.0;
  double p_value = 1.0;
  NullSummary null_summary;
  std::size_t n_shuffles = 0;
  std::size_t null_points = 0;
  std::uint64_t seed = 0;
  Alternative alternative = Alternative::greater;
};

AlignmentResult make_alignment_result(std::string statistic, double value, const PermutationOutcome& outcome,
                                      const PermutationOptions& options);

/// "*" p<0.05, "**" p<0.01, "***" p<0.001, strict inequalities.
std::string significance_stars(double p_value);

}  // namespace iconicity
