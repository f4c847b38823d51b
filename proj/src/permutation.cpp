#include "iconicity/permutation.hpp"

#include "iconicity/rng.hpp"
#include "iconicity/stats.hpp"

#include <cmath>
#include <exception>
#include <thread>

namespace iconicity {

std::string to_string(Alternative alternative) {
  return alternative == Alternative::greater ? "greater" : "two-sided";
}

Alternative alternative_from_string(const std::string& text) {
  if (text == "greater") return Alternative::greater;
  if (text == "two-sided" || text == "two_sided") return Alternative::two_sided;
  throw InputError("unknown alternative '" + text + "'");
}

std::vector<Index> shuffle_permutation(Index n_items, std::uint64_t seed, std::size_t index) {
  std::mt19937_64 gen(substream_seed(seed, index));
  return random_permutation(n_items, gen);
}

double permutation_p_value(std::span<const double> null_sample, double observed, Alternative alternative) {
  const double target = alternative == Alternative::greater ? observed : std::abs(observed);
  const double slack = 1e-12 * std::max(1.0, std::abs(observed));
  std::size_t extreme = 0;
  for (double v : null_sample) {
    const double s = alternative == Alternative::greater ? v : std::abs(v);
    if (s >= target - slack) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(1 + null_sample.size());
}

NullSummary summarize_null(std::span<const double> null_sample) {
  NullSummary s;
  if (null_sample.empty()) return s;
  const auto n = static_cast<double>(null_sample.size());
  double sum = 0.0;
  for (double v : null_sample) sum += v;
  s.mean = sum / n;
  double ss = 0.0;
  for (double v : null_sample) ss += (v - s.mean) * (v - s.mean);
  s.sd = null_sample.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::vector<double> values(null_sample.begin(), null_sample.end());
  s.q05 = percentile_linear(values, 5);
  s.q50 = percentile_linear(values, 50);
  s.q95 = percentile_linear(values, 95);
  s.max = *std::max_element(values.begin(), values.end());
  return s;
}

std::vector<PermutationOutcome> permutation_test(Index n_items, const MultiStatistic& statistic,
                                                 std::span<const double> observed,
                                                 const PermutationOptions& options) {
  if (options.n_shuffles < 1) throw AnalysisError("permutation test needs at least one shuffle");
  if (options.null_points > options.n_shuffles)
    throw AnalysisError("null_points (" + std::to_string(options.null_points) + ") exceeds n_shuffles (" +
                        std::to_string(options.n_shuffles) + ")");

  // Only the shuffles that enter the null sample are evaluated; shuffle i is a
  // pure function of (seed, i), so the sample equals the first null_points of
  // a full n_shuffles run.
  const std::size_t count = options.null_points;
  std::vector<std::vector<double>> values(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(count)));
  std::vector<std::exception_ptr> errors(count);

  const auto run = [&](unsigned worker) {
    for (std::size_t i = worker; i < count; i += workers) {
      try {
        const auto perm = shuffle_permutation(n_items, options.seed, i);
        values[i] = statistic(perm);
      } catch (...) {
        errors[i] = std::current_exception();
        return;
      }
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<PermutationOutcome> out(observed.size());
  for (std::size_t s = 0; s < observed.size(); ++s) {
    auto& sample = out[s].null_sample;
    sample.reserve(count);
    for (const auto& v : values) {
      if (v.size() != observed.size()) throw AnalysisError("statistic returned the wrong number of values");
      sample.push_back(v[s]);
    }
    out[s].p_value = permutation_p_value(sample, observed[s], options.alternative);
  }
  return out;
}

PermutationOutcome permutation_test(Index n_items, const Statistic& statistic, double observed,
                                    const PermutationOptions& options) {
  const MultiStatistic wrapped = [&statistic](std::span<const Index> perm) {
    return std::vector<double>{statistic(perm)};
  };
  const double obs[] = {observed};
  return std::move(permutation_test(n_items, wrapped, obs, options).front());
}

AlignmentResult make_alignment_result(std::string statistic, double value, const PermutationOutcome& outcome,
                                      const PermutationOptions& options) {
  AlignmentResult r;
  r.statistic = std::move(statistic);
  r.value = value;
  r.p_value = outcome.p_value;
  r.null_summary = summarize_null(outcome.null_sample);
  r.n_shuffles = options.n_shuffles;
  r.null_points = outcome.null_sample.size();
  r.seed = options.seed;
  r.alternative = options.alternative;
  return r;
}

std::string significance_stars(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

}  // namespace iconicity
