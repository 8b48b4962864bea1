#pragma once

#include <cstdint>
#include <span>

#include "bitstream.hpp"

namespace recsp {

/// Largest codable local sample index. Indices beyond this indicate a
/// misconfigured run and are rejected rather than escaped.
constexpr uint64_t kIndexCap = 1ull << 32;

/// Power-law model of the local sample index, P(n) proportional to
/// n^-(1 + 1/zeta) over n >= 1. The infinite-support normalizer is the
/// Riemann zeta value at s = 1 + 1/zeta, evaluated by truncated series
/// summation with an integral-plus-correction remainder (absolute tail
/// error <= 1e-12 across the supported zeta range).
class ZipfModel {
public:
  static ZipfModel from_zeta(double zeta);

  double zeta() const { return zeta_; }
  double exponent() const { return s_; }           // s = 1 + 1/zeta
  double normalizer() const { return norm_; }      // zeta(s)

  double nll_bits(uint64_t index) const;           // s*log2(n) + log2(normalizer)
  double cdf(uint64_t index) const;                // P(N <= index), infinite support
  uint64_t quantile(double u) const;               // smallest n with cdf(n) >= u, capped
  double entropy_bits(uint64_t cap = kIndexCap) const;  // under truncation to [1, cap]

  /// Probability mass of indices in [lo, hi) under the unnormalized series.
  double range_mass(uint64_t lo, uint64_t hi) const;

private:
  ZipfModel(double zeta, double s, double norm) : zeta_(zeta), s_(s), norm_(norm) {}

  double zeta_ = 1.0;
  double s_ = 2.0;
  double norm_ = 1.0;
};

/// Maximum-likelihood fit of zeta on observed indices, by golden-section
/// search on log(zeta) over [1e-3, 1e3]. Deterministic for identical input.
ZipfModel fit_zeta(std::span<const uint64_t> indices);

/// Range-codes `index` against the model truncated to [1, kIndexCap], as a
/// sequence of binary mass splits of the remaining index interval.
void encode_index(const ZipfModel& model, uint64_t index, RangeEncoder& rc);
uint64_t decode_index(const ZipfModel& model, RangeDecoder& rc);

}  // namespace recsp
