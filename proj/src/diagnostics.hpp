#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "distributions.hpp"

namespace recsp {

struct McEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  uint64_t n_mc = 0;
};

/// Extra codelength introduced by partitioning into J bins:
/// E_{z~Q}[max{0, log2 J - log2 q(z)/p(z)}], by Monte Carlo from Q.
McEstimate epsilon_cost(const RecTask& task, uint64_t total_bins, uint64_t n_mc, uint64_t seed);

struct BoundReport {
  double kl_bits = 0.0;
  double log2_j = 0.0;
  double epsilon_hat = 0.0;
  double codelength_bound_bits = 0.0;
  std::optional<double> epsilon_gaussian_cap;  // 0.849 sqrt(KL), gaussian tasks only
};

/// One-shot two-part codelength bound:
/// kl + eps + log2(kl - log2 J + eps + 1) + 4. Throws when the log argument
/// is not positive.
BoundReport codelength_bound(const RecTask& task, uint64_t total_bins, double epsilon_hat);

struct TvBounds {
  double upper = 0.0;      // raw, may exceed 1
  double lower = 0.0;      // raw, may be negative
  double tail_upper = 0.0; // P(log r >  kl + t/2), Monte Carlo
  double tail_lower = 0.0; // P(log r <= kl - t/2), Monte Carlo
};

/// Total-variation bounds for ORC run with N = 2^(kl +- t) candidates:
///   upper = 4 (2^{-t/4} + 2 sqrt(tail_upper))^{1/2}
///   lower = 1 - 2^{-t/2} - tail_lower
/// Raw values are reported; clamp to [0, 1] where a TV estimate is needed.
TvBounds tv_bounds(const RecTask& task, double t, uint64_t n_mc, uint64_t seed);

struct MmdOptions {
  std::optional<double> bandwidth;  // RBF width; defaults to the median heuristic
};

struct MmdResult {
  double mmd2 = 0.0;
  double bandwidth = 0.0;
};

/// Unbiased two-sample MMD^2 with an RBF kernel. The default bandwidth is
/// the median pairwise distance of the pooled sample.
MmdResult mmd_rbf(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b,
                  const MmdOptions& opts = {});

/// Permutation test p-value for the null "a and b share a distribution",
/// via the same kernel and a bandwidth fixed on the pooled sample.
double mmd_permutation_pvalue(std::span<const std::vector<double>> a,
                              std::span<const std::vector<double>> b, uint32_t n_permutations,
                              uint64_t seed, const MmdOptions& opts = {});

/// Standardizes points by the per-dimension mean/std of a gaussian target.
std::vector<std::vector<double>> standardize_by_target(const FactorizedDistribution& target,
                                                       std::span<const std::vector<double>> pts);

/// Empirical total variation between 1D samples and the exact target law,
/// over 100 equal-width histogram bins spanning the prior's central 99.9%
/// mass (overflow folded into the end bins).
double empirical_tv_1d(std::span<const double> samples, const RecTask& task);

/// One-sample Kolmogorov-Smirnov distance of samples against the exact CDF
/// of `law`.
double ks_distance_1d(std::vector<double> samples, const Dim1Law& law);

/// Diagnostics record in the JSON shape shared by the CLI and the C API:
/// {"name":..., "value":..., "stderr":..., "n_mc":..., "seed":...}.
std::string diagnostic_record_json(const std::string& name, double value, double stderr_,
                                   uint64_t n_mc, uint64_t seed);

}  // namespace recsp
