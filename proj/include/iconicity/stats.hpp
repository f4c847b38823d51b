#pragma once

#include "iconicity/types.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace iconicity {

/// 1-based ranks with ties assigned the average of the positions they span.
template <typename Derived>
Vector<double> midranks(const Eigen::DenseBase<Derived>& values) {
  const Index n = values.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  for (Index i = 0; i < n; ++i)
    if (!std::isfinite(static_cast<double>(values(i)))) throw AnalysisError("rank of a non-finite value");
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values(a) < values(b); });

  Vector<double> ranks(n);
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && values(order[static_cast<std::size_t>(end)]) == values(order[static_cast<std::size_t>(start)])) ++end;
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    for (Index k = start; k < end; ++k) ranks(order[static_cast<std::size_t>(k)]) = rank;
    start = end;
  }
  return ranks;
}

/// Pearson correlation. Throws AnalysisError when either input is constant.
template <typename DX, typename DY>
double pearson(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.size() != y.size()) throw AnalysisError("correlation of vectors with different lengths");
  if (x.size() < 2) throw AnalysisError("correlation needs at least 2 observations");
  const Vector<double> xc = x.template cast<double>().array() - x.template cast<double>().mean();
  const Vector<double> yc = y.template cast<double>().array() - y.template cast<double>().mean();
  const double sxx = xc.squaredNorm();
  const double syy = yc.squaredNorm();
  if (!(sxx > 0.0) || !(syy > 0.0)) throw AnalysisError("correlation undefined: constant input");
  return std::clamp(xc.dot(yc) / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Spearman's rank correlation with midrank tie handling.
template <typename DX, typename DY>
double spearman_rho(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y) {
  if (x.size() != y.size()) throw AnalysisError("spearman_rho: length mismatch");
  if (x.size() < 3) throw AnalysisError("spearman_rho: need at least 3 observations");
  return pearson(midranks(x), midranks(y));
}

inline double spearman_rho(std::span<const double> x, std::span<const double> y) {
  using Map = Eigen::Map<const Vector<double>>;
  return spearman_rho(Map(x.data(), static_cast<Index>(x.size())), Map(y.data(), static_cast<Index>(y.size())));
}

/// Strict upper triangle of a square matrix in (i<j) row-major order.
template <typename Derived>
Vector<typename Derived::Scalar> pair_vector(const Eigen::MatrixBase<Derived>& sim) {
  const Index n = sim.rows();
  Vector<typename Derived::Scalar> out(n * (n - 1) / 2);
  Index k = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) out(k++) = sim(i, j);
  return out;
}

/// Equal-width bin index over [min, max]; the maximum lands in the last bin.
/// A constant input occupies bin 0.
template <typename Derived>
std::vector<int> equal_width_bins(const Eigen::MatrixBase<Derived>& x, int bins) {
  if (bins < 1) throw AnalysisError("bin count must be positive");
  const double lo = static_cast<double>(x.minCoeff());
  const double hi = static_cast<double>(x.maxCoeff());
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw AnalysisError("binning of non-finite values");
  std::vector<int> out(static_cast<std::size_t>(x.size()), 0);
  const double width = hi - lo;
  if (!(width > 0.0)) return out;
  for (Index i = 0; i < x.size(); ++i) {
    const double pos = (static_cast<double>(x(i)) - lo) / width * bins;
    out[static_cast<std::size_t>(i)] = std::clamp(static_cast<int>(std::floor(pos)), 0, bins - 1);
  }
  return out;
}

/// Plug-in mutual information in bits from precomputed bin labels.
double mutual_information_bits(std::span<const int> bins_x, std::span<const int> bins_y, int bins);

template <typename DX, typename DY>
double mutual_information_bits(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DY>& y, int bins) {
  if (x.size() != y.size()) throw AnalysisError("mutual information: length mismatch");
  const auto bx = equal_width_bins(x, bins);
  const auto by = equal_width_bins(y, bins);
  return mutual_information_bits(bx, by, bins);
}

/// Top-k most similar other items per row, most similar first; ties go to the
/// lower column index.
template <typename Derived>
std::vector<std::vector<Index>> nearest_neighbors(const Eigen::MatrixBase<Derived>& sim, Index k) {
  const Index n = sim.rows();
  if (k >= n) throw AnalysisError("k must be smaller than the item count (k=" + std::to_string(k) +
                                  ", N=" + std::to_string(n) + ")");
  std::vector<std::vector<Index>> out(static_cast<std::size_t>(n));
  std::vector<Index> cand;
  for (Index i = 0; i < n; ++i) {
    cand.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) cand.push_back(j);
    const auto before = [&](Index a, Index b) {
      return sim(i, a) != sim(i, b) ? sim(i, a) > sim(i, b) : a < b;
    };
    std::partial_sort(cand.begin(), cand.begin() + k, cand.end(), before);
    out[static_cast<std::size_t>(i)].assign(cand.begin(), cand.begin() + k);
  }
  return out;
}

/// Mean over items of |A_i ∩ B_i| / k.
double neighbor_overlap(const std::vector<std::vector<Index>>& a,
                        const std::vector<std::vector<Index>>& b, Index k);

/// Percentile of a sample by linear interpolation between order statistics
/// (position (n-1)*q/100 in the ascending sort).
inline double percentile_linear(std::vector<double> values, double percent) {
  if (values.empty()) throw AnalysisError("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = (static_cast<double>(values.size()) - 1.0) * percent / 100.0;
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  if (frac == 0.0 || lo == hi) return values[lo];
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace iconicity
