#include "partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

namespace recsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_at(const Dim1Law& q, const Dim1Law& p, double z) {
  return std::exp2(log2_pdf(q, z) - log2_pdf(p, z));
}
}  // namespace

uint64_t GridPartition::total_bins() const {
  uint64_t j = 1;
  for (uint32_t c : counts) j *= c;
  return j;
}

double GridPartition::log2_total_bins() const {
  double b = 0.0;
  for (uint32_t c : counts) b += std::log2(static_cast<double>(c));
  return b;
}

uint64_t GridPartition::compose(std::span<const uint32_t> coords) const {
  if (coords.size() != dim())
    throw Error(ErrorCode::dimension_mismatch, "coordinate count does not match partition");
  uint64_t index = 0;
  for (size_t d = 0; d < dim(); ++d) {
    if (coords[d] >= counts[d])
      throw Error(ErrorCode::out_of_range, "bin coordinate out of range");
    index = index * counts[d] + coords[d];
  }
  return index;
}

void GridPartition::decompose(uint64_t index, std::span<uint32_t> coords_out) const {
  if (coords_out.size() != dim())
    throw Error(ErrorCode::dimension_mismatch, "coordinate count does not match partition");
  if (index >= total_bins()) throw Error(ErrorCode::out_of_range, "bin index out of range");
  for (size_t d = dim(); d-- > 0;) {
    coords_out[d] = static_cast<uint32_t>(index % counts[d]);
    index /= counts[d];
  }
}

std::vector<uint32_t> allocate_intervals(std::span<const double> dim_mi_bits,
                                         uint32_t kl_budget_bits) {
  if (dim_mi_bits.empty())
    throw Error(ErrorCode::invalid_argument, "allocate_intervals needs at least one dimension");
  std::vector<double> mi(dim_mi_bits.begin(), dim_mi_bits.end());
  for (double& v : mi) v = std::max(v, 0.0);
  std::vector<uint32_t> counts(mi.size(), 1);
  uint32_t budget = kl_budget_bits;
  while (budget > 0) {
    size_t best = 0;
    for (size_t d = 1; d < mi.size(); ++d)
      if (mi[d] > mi[best]) best = d;
    if (mi[best] <= 0.0) break;
    counts[best] *= 2;
    mi[best] -= 1.0;
    budget -= 1;
  }
  return counts;
}

GridPartition build_partition(const FactorizedDistribution& prior,
                              std::span<const uint32_t> per_dim_counts) {
  if (per_dim_counts.size() != prior.dim())
    throw Error(ErrorCode::dimension_mismatch, "per-dim counts do not match prior dimension");
  double total_bits = 0.0;
  for (uint32_t c : per_dim_counts) {
    if (c == 0) throw Error(ErrorCode::invalid_argument, "interval counts must be positive");
    total_bits += std::log2(static_cast<double>(c));
  }
  if (total_bits > 62.0)
    throw Error(ErrorCode::invalid_argument, "total bin count exceeds 2^62");

  GridPartition part;
  part.counts.assign(per_dim_counts.begin(), per_dim_counts.end());
  part.boundaries.resize(prior.dim());
  for (size_t d = 0; d < prior.dim(); ++d) {
    const Dim1Law& law = prior.dims[d];
    uint32_t n = per_dim_counts[d];
    auto& bd = part.boundaries[d];
    bd.resize(n + 1);
    bd[0] = law.support_lo();
    bd[n] = law.support_hi();
    for (uint32_t i = 1; i < n; ++i)
      bd[i] = quantile(law, static_cast<double>(i) / static_cast<double>(n));
  }
  return part;
}

GridPartition trivial_partition(const FactorizedDistribution& prior) {
  std::vector<uint32_t> ones(prior.dim(), 1);
  return build_partition(prior, ones);
}

uint64_t locate_bin(const GridPartition& part, std::span<const double> z) {
  if (z.size() != part.dim())
    throw Error(ErrorCode::dimension_mismatch, "point dimension does not match partition");
  uint64_t index = 0;
  for (size_t d = 0; d < part.dim(); ++d) {
    const auto& bd = part.boundaries[d];
    if (z[d] < bd.front() || z[d] > bd.back())
      throw Error(ErrorCode::outside_support, "point outside prior support");
    // First boundary strictly greater than z; intervals are [b_i, b_{i+1})
    // with the last one closed.
    auto it = std::upper_bound(bd.begin(), bd.end(), z[d]);
    size_t k = static_cast<size_t>(it - bd.begin());
    k = (k == 0) ? 0 : k - 1;
    if (k >= part.counts[d]) k = part.counts[d] - 1;
    index = index * part.counts[d] + static_cast<uint64_t>(k);
  }
  return index;
}

double bin_target_mass(const RecTask& task, const GridPartition& part, uint64_t j) {
  std::vector<uint32_t> coords(part.dim());
  part.decompose(j, coords);
  double mass = 1.0;
  for (size_t d = 0; d < part.dim(); ++d) {
    const Dim1Law& q = task.target.dims[d];
    mass *= cdf(q, part.interval_hi(d, coords[d])) - cdf(q, part.interval_lo(d, coords[d]));
  }
  return mass;
}

RatioBound sup_ratio_on_interval(const Dim1Law& q, const Dim1Law& p, double a, double b) {
  if (!(a <= b)) throw Error(ErrorCode::invalid_argument, "interval endpoints out of order");

  if (q.kind == LawKind::uniform) {
    // Restrict to the overlap with q's support; outside it the ratio is 0.
    double lo = std::max(a, q.lo), hi = std::min(b, q.hi);
    if (!(lo < hi)) return RatioBound::finite(0.0);
    if (p.kind == LawKind::uniform)
      return RatioBound::finite((p.hi - p.lo) / (q.hi - q.lo));
    // Gaussian prior: minimised at the overlap endpoint farther from its mean.
    double z = std::abs(lo - p.mean) > std::abs(hi - p.mean) ? lo : hi;
    return RatioBound::finite(ratio_at(q, p, z));
  }

  if (p.kind == LawKind::uniform) {
    // Gaussian target over a bounded prior piece: maximum where q peaks.
    double z = std::clamp(q.mean, a, b);
    if (!std::isfinite(z)) return RatioBound::infinite();
    return RatioBound::finite(ratio_at(q, p, z));
  }

  // Gaussian/gaussian: the log ratio is quadratic in z.
  double vq = q.stddev * q.stddev, vp = p.stddev * p.stddev;
  if (q.stddev == p.stddev) {
    if (q.mean == p.mean) return RatioBound::finite(1.0);
    // Linear log ratio; sup at the endpoint in the increasing direction.
    double z = (q.mean > p.mean) ? b : a;
    if (!std::isfinite(z)) return RatioBound::infinite();
    return RatioBound::finite(ratio_at(q, p, z));
  }
  if (q.stddev < p.stddev) {
    // Concave: max at the stationary point, clamped to the interval.
    double star = (q.mean * vp - p.mean * vq) / (vp - vq);
    double z = std::clamp(star, a, b);
    return RatioBound::finite(ratio_at(q, p, z));
  }
  // Convex: max at an endpoint, unbounded if the interval is unbounded.
  if (!std::isfinite(a) || !std::isfinite(b)) return RatioBound::infinite();
  return RatioBound::finite(std::max(ratio_at(q, p, a), ratio_at(q, p, b)));
}

std::string partition_to_json(const GridPartition& part) {
  nlohmann::ordered_json root;
  root["counts"] = part.counts;
  nlohmann::ordered_json bds = nlohmann::ordered_json::array();
  for (const auto& bd : part.boundaries) {
    nlohmann::ordered_json inner = nlohmann::ordered_json::array();
    for (size_t i = 1; i + 1 < bd.size(); ++i) inner.push_back(bd[i]);
    bds.push_back(std::move(inner));
  }
  root["boundaries"] = std::move(bds);
  return root.dump();
}

GridPartition partition_from_json(const FactorizedDistribution& prior, const std::string& json) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad partition JSON: ") + e.what());
  }
  if (!root.contains("counts") || !root["counts"].is_array())
    throw Error(ErrorCode::parse_error, "partition JSON needs a counts array");
  std::vector<uint32_t> counts = root["counts"].get<std::vector<uint32_t>>();
  GridPartition part = build_partition(prior, counts);
  // Interior boundaries are rederivable from the prior; accept stored ones
  // verbatim when present so serialized partitions stay bit-stable.
  if (root.contains("boundaries")) {
    const auto& bds = root["boundaries"];
    if (bds.size() != counts.size())
      throw Error(ErrorCode::parse_error, "boundaries/counts dimension mismatch");
    for (size_t d = 0; d < counts.size(); ++d) {
      auto inner = bds[d].get<std::vector<double>>();
      if (inner.size() + 1 != counts[d])
        throw Error(ErrorCode::parse_error, "boundary count mismatch at dim " + std::to_string(d));
      for (size_t i = 0; i < inner.size(); ++i) part.boundaries[d][i + 1] = inner[i];
    }
  }
  return part;
}

}  // namespace recsp
