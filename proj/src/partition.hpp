#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "distributions.hpp"

namespace recsp {

/// Value of a 1D density ratio supremum; may be unbounded.
struct RatioBound {
  double value = 0.0;
  bool unbounded = false;

  static RatioBound finite(double v) { return {v, false}; }
  static RatioBound infinite() { return {0.0, true}; }
};

/// Axis-aligned grid over the prior's support with equal prior mass per bin.
/// boundaries[d] holds counts[d]+1 points at the prior quantiles i/counts[d]
/// (outer entries are +-inf for gaussian dimensions, lo/hi for uniform).
struct GridPartition {
  std::vector<uint32_t> counts;
  std::vector<std::vector<double>> boundaries;

  size_t dim() const { return counts.size(); }
  uint64_t total_bins() const;
  double log2_total_bins() const;

  // Mixed-radix bin addressing: dimension 0 is most significant,
  //   index = ((k_0 * counts[1] + k_1) * counts[2] + k_2) ...
  uint64_t compose(std::span<const uint32_t> coords) const;
  void decompose(uint64_t index, std::span<uint32_t> coords_out) const;

  // Per-dimension interval bounds of bin coordinate k on dimension d.
  double interval_lo(size_t d, uint32_t k) const { return boundaries[d][k]; }
  double interval_hi(size_t d, uint32_t k) const { return boundaries[d][k + 1]; }
};

/// Greedy doubling allocation of interval counts to axes. Starting from one
/// interval everywhere, repeatedly doubles the axis with the highest working
/// mutual information (lowest index wins ties), decrementing that entry and
/// the budget by one bit, until the budget or all positive entries run out.
/// Negative MI entries are clamped to zero up front.
std::vector<uint32_t> allocate_intervals(std::span<const double> dim_mi_bits,
                                         uint32_t kl_budget_bits);

GridPartition build_partition(const FactorizedDistribution& prior,
                              std::span<const uint32_t> per_dim_counts);

/// Trivial single-bin partition (J = 1) over the prior's support.
GridPartition trivial_partition(const FactorizedDistribution& prior);

/// Bin containing z. Points on an interior boundary belong to the interval
/// to its right; the last interval is closed. Throws if z lies outside the
/// prior support covered by the partition.
uint64_t locate_bin(const GridPartition& part, std::span<const double> z);

/// Q-mass of bin j, as a product of per-dimension CDF differences.
double bin_target_mass(const RecTask& task, const GridPartition& part, uint64_t j);

/// Exact supremum of q(z)/p(z) over [a, b] (either end may be infinite).
RatioBound sup_ratio_on_interval(const Dim1Law& q, const Dim1Law& p, double a, double b);

// JSON round-trip: {"counts":[...], "boundaries":[[...],...]} storing only
// finite interior boundary points; outer endpoints come from the prior.
std::string partition_to_json(const GridPartition& part);
GridPartition partition_from_json(const FactorizedDistribution& prior, const std::string& json);

}  // namespace recsp
