#include "index_codec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace recsp {

namespace {

constexpr uint64_t kDirectCutoff = 64;  // below this, sum the series directly

// Sum_{n >= m} n^-s via Euler-Maclaurin once m is large enough for the
// correction terms to push the remainder below 1e-12.
double tail_power_sum(double s, uint64_t m) {
  double direct = 0.0;
  uint64_t start = m;
  if (start < kDirectCutoff) {
    for (uint64_t n = start; n < kDirectCutoff; ++n) direct += std::pow(static_cast<double>(n), -s);
    start = kDirectCutoff;
  }
  double x = static_cast<double>(start);
  double xs = std::pow(x, -s);
  double em = xs * x / (s - 1.0)        // integral of x^-s from start
              + 0.5 * xs                 // half of the first term
              + s * xs / (12.0 * x)      // -f'(start)/12
              - s * (s + 1.0) * (s + 2.0) * xs / (720.0 * x * x * x);
  return direct + em;
}

// Sum_{n >= m} n^-s * ln n, same scheme.
double tail_power_log_sum(double s, uint64_t m) {
  double direct = 0.0;
  uint64_t start = std::max<uint64_t>(m, 1);
  if (start < kDirectCutoff) {
    for (uint64_t n = start; n < kDirectCutoff; ++n) {
      double xn = static_cast<double>(n);
      direct += std::pow(xn, -s) * std::log(xn);
    }
    start = kDirectCutoff;
  }
  double x = static_cast<double>(start);
  double lx = std::log(x);
  double xs = std::pow(x, -s);
  double integral = xs * x * (lx / (s - 1.0) + 1.0 / ((s - 1.0) * (s - 1.0)));
  double em = integral + 0.5 * xs * lx + (s * lx - 1.0) * xs / (12.0 * x);
  return direct + em;
}

uint32_t quantize_p0(double p0) {
  if (!(p0 > 0.0) || !(p0 < 1.0)) p0 = std::clamp(p0, 0.0, 1.0);
  if (!std::isfinite(p0)) p0 = 0.5;
  auto q = static_cast<int64_t>(std::lround(p0 * 65536.0));
  return static_cast<uint32_t>(std::clamp<int64_t>(q, 1, 65535));
}

}  // namespace

ZipfModel ZipfModel::from_zeta(double zeta) {
  if (!(zeta > 0.0) || !std::isfinite(zeta))
    throw Error(ErrorCode::invalid_argument, "zeta must be positive and finite");
  double s = 1.0 + 1.0 / zeta;
  return ZipfModel(zeta, s, tail_power_sum(s, 1));
}

double ZipfModel::nll_bits(uint64_t index) const {
  if (index == 0) throw Error(ErrorCode::out_of_range, "indices start at 1");
  return s_ * std::log2(static_cast<double>(index)) + std::log2(norm_);
}

double ZipfModel::cdf(uint64_t index) const {
  if (index == 0) return 0.0;
  return 1.0 - tail_power_sum(s_, index + 1) / norm_;
}

uint64_t ZipfModel::quantile(double u) const {
  if (!(u >= 0.0 && u <= 1.0)) throw Error(ErrorCode::out_of_range, "u must lie in [0, 1]");
  uint64_t lo = 1, hi = kIndexCap;
  if (cdf(1) >= u) return 1;
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    (cdf(mid) >= u ? hi : lo) = mid;
  }
  return hi;
}

double ZipfModel::range_mass(uint64_t lo, uint64_t hi) const {
  if (hi <= lo) return 0.0;
  if (hi - lo <= kDirectCutoff) {
    double sum = 0.0;
    for (uint64_t n = lo; n < hi; ++n) sum += std::pow(static_cast<double>(n), -s_);
    return sum;
  }
  return tail_power_sum(s_, lo) - tail_power_sum(s_, hi);
}

double ZipfModel::entropy_bits(uint64_t cap) const {
  if (cap == 0) throw Error(ErrorCode::invalid_argument, "cap must be positive");
  double w = norm_ - tail_power_sum(s_, cap + 1);
  double log_sum = tail_power_log_sum(s_, 1) - tail_power_log_sum(s_, cap + 1);
  return s_ * std::numbers::log2e * log_sum / w + std::log2(w);
}

ZipfModel fit_zeta(std::span<const uint64_t> indices) {
  if (indices.empty()) throw Error(ErrorCode::invalid_argument, "cannot fit zeta on empty data");
  double sum_log = 0.0;
  for (uint64_t n : indices) {
    if (n == 0) throw Error(ErrorCode::out_of_range, "indices start at 1");
    sum_log += std::log(static_cast<double>(n));
  }
  const double count = static_cast<double>(indices.size());
  auto nll_nats = [&](double log_zeta) {
    double zeta = std::exp(log_zeta);
    double s = 1.0 + 1.0 / zeta;
    return s * sum_log + count * std::log(tail_power_sum(s, 1));
  };

  // Golden-section search over log zeta in [ln 1e-3, ln 1e3].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(1e-3), b = std::log(1e3);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = nll_nats(c), fd = nll_nats(d);
  for (int it = 0; it < 200; ++it) {
    // <= so plateaus (NLL exactly 0 in doubles for very small zeta) resolve
    // toward the lower search bound.
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = nll_nats(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = nll_nats(d);
    }
  }
  return ZipfModel::from_zeta(std::exp(0.5 * (a + b)));
}

void encode_index(const ZipfModel& model, uint64_t index, RangeEncoder& rc) {
  if (index == 0 || index > kIndexCap)
    throw Error(ErrorCode::out_of_range, "index outside [1, 2^32]");
  uint64_t lo = 1, hi = kIndexCap + 1;
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    double ml = model.range_mass(lo, mid);
    double mr = model.range_mass(mid, hi);
    double total = ml + mr;
    uint32_t p0 = (total > 0.0) ? quantize_p0(ml / total) : 32768u;
    int bit = index >= mid;
    rc.encode_bit(bit, p0);
    (bit ? lo : hi) = mid;
  }
}

uint64_t decode_index(const ZipfModel& model, RangeDecoder& rc) {
  uint64_t lo = 1, hi = kIndexCap + 1;
  while (hi - lo > 1) {
    uint64_t mid = lo + (hi - lo) / 2;
    double ml = model.range_mass(lo, mid);
    double mr = model.range_mass(mid, hi);
    double total = ml + mr;
    uint32_t p0 = (total > 0.0) ? quantize_p0(ml / total) : 32768u;
    (rc.decode_bit(p0) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace recsp
