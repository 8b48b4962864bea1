#pragma once

// Independent reference implementations used to pin expected values in the
// tests. Everything here evaluates densities with its own arithmetic and
// approximates integrals/optima by brute force, so it shares no code path
// with the library it checks.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double gauss_pdf(double z, double mean, double sd) {
  double t = (z - mean) / sd;
  return std::exp(-0.5 * t * t) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

inline double gauss_cdf(double z, double mean, double sd) {
  return 0.5 * std::erfc(-(z - mean) / (sd * std::numbers::sqrt2));
}

// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb, double whole, double eps, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, eps * 0.5, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double eps = 1e-12) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, eps, 28);
}

// KL[q||p] in bits for 1D gaussians by quadrature over +-12 sd of q. The
// log ratio is expanded analytically so the integrand stays finite where
// the prior pdf underflows.
inline double kl_bits_gauss_quadrature(double mq, double sq, double mp, double sp) {
  auto f = [=](double z) {
    double q = gauss_pdf(z, mq, sq);
    double tq = (z - mq) / sq, tp = (z - mp) / sp;
    double log2_ratio = std::log2(sp / sq) + 0.5 * (tp * tp - tq * tq) * std::numbers::log2e;
    return q * log2_ratio;
  };
  return integrate(f, mq - 12.0 * sq, mq + 12.0 * sq, 1e-12);
}

// Standard normal quantile by bisection on the CDF.
inline double normal_quantile_bisect(double u, double mean = 0.0, double sd = 1.0) {
  double lo = mean - 40.0 * sd, hi = mean + 40.0 * sd;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (gauss_cdf(mid, mean, sd) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Sup of a ratio over [a,b] by dense grid search.
inline double grid_sup(const std::function<double(double)>& ratio, double a, double b,
                       int points = 10000) {
  double best = 0.0;
  for (int i = 0; i <= points; ++i) {
    double z = a + (b - a) * static_cast<double>(i) / points;
    best = std::max(best, ratio(z));
  }
  return best;
}

// One-sample Kolmogorov-Smirnov distance against an exact CDF.
inline double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Small deterministic RNG for test inputs (xorshift-style, not shared with
// the library's generators).
struct TestRng {
  uint64_t state;
  explicit TestRng(uint64_t seed) : state(seed * 2654435769u + 1) {}
  uint64_t next() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal() {
    // Box-Muller; fine for test data.
    double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  double exponential() { return -std::log1p(-uniform()); }
};

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  double m = mean(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace oracle
