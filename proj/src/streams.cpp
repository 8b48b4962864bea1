#include "streams.hpp"

#include <cmath>

namespace recsp {

uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double keyed_uniform(const StreamKey& key) {
  uint64_t h = mix64(key.base_seed);
  h = mix64(h ^ key.bin);
  h = mix64(h ^ key.local_index);
  h = mix64(h ^ key.dim);
  // 53 bits, centered on half-ulps so the result is never exactly 0 or 1.
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_in_bin(const FactorizedDistribution& prior, const GridPartition& part,
                                  uint64_t bin, uint64_t local_index, uint64_t base_seed) {
  if (part.dim() != prior.dim())
    throw Error(ErrorCode::dimension_mismatch, "partition does not match prior");
  if (bin >= part.total_bins()) throw Error(ErrorCode::out_of_range, "bin index out of range");
  if (local_index == 0) throw Error(ErrorCode::out_of_range, "local index starts at 1");

  std::vector<uint32_t> coords(part.dim());
  part.decompose(bin, coords);
  std::vector<double> z(part.dim());
  for (size_t d = 0; d < part.dim(); ++d) {
    double u01 = keyed_uniform({base_seed, bin, local_index, static_cast<uint32_t>(d)});
    // The interval boundaries sit at exact prior quantiles k/J_d, so the
    // truncated-CDF range is (k/J_d, (k+1)/J_d) by construction.
    double u = (static_cast<double>(coords[d]) + u01) / static_cast<double>(part.counts[d]);
    z[d] = quantile(prior.dims[d], u);
  }
  return z;
}

uint64_t Splitmix64::next() {
  state_ += 0x9e3779b97f4a7c15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double Splitmix64::uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Splitmix64::uniform_open() {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double Splitmix64::exponential() { return -std::log1p(-uniform01()); }

ArrivalProcess ArrivalProcess::pfr(uint64_t private_seed) {
  return ArrivalProcess(ArrivalMode::pfr, 0, private_seed);
}

ArrivalProcess ArrivalProcess::orc(uint64_t n_candidates, uint64_t private_seed) {
  if (n_candidates == 0)
    throw Error(ErrorCode::invalid_argument, "orc needs at least one candidate");
  return ArrivalProcess(ArrivalMode::orc, n_candidates, private_seed);
}

double ArrivalProcess::next_arrival() {
  double gap = rng_.exponential();
  if (mode_ == ArrivalMode::pfr) {
    n_ += 1;
    t_ += gap;
    return t_;
  }
  if (n_ >= n_candidates_) throw Error(ErrorCode::exhausted, "orc arrivals exhausted");
  n_ += 1;
  // Incremental order statistics of n_candidates i.i.d. Exp(1) variates:
  // the gap above the (n-1)-th smallest is Exp(remaining).
  t_ += gap / static_cast<double>(n_candidates_ - n_ + 1);
  return t_;
}

}  // namespace recsp
