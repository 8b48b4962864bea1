#include "diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "json.hpp"
#include "streams.hpp"

namespace recsp {

namespace {

std::vector<double> draw_target_point(const RecTask& task, Splitmix64& rng) {
  std::vector<double> z(task.dim());
  for (size_t d = 0; d < task.dim(); ++d) z[d] = quantile(task.target.dims[d], rng.uniform_open());
  return z;
}

double squared_distance(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (size_t d = 0; d < x.size(); ++d) {
    double diff = x[d] - y[d];
    s += diff * diff;
  }
  return s;
}

// Median pairwise Euclidean distance of the pooled sample.
double median_heuristic(std::span<const std::vector<double>> a,
                        std::span<const std::vector<double>> b) {
  std::vector<const std::vector<double>*> pool;
  pool.reserve(a.size() + b.size());
  for (const auto& x : a) pool.push_back(&x);
  for (const auto& x : b) pool.push_back(&x);
  std::vector<double> d2;
  d2.reserve(pool.size() * (pool.size() - 1) / 2);
  for (size_t i = 0; i < pool.size(); ++i)
    for (size_t j = i + 1; j < pool.size(); ++j) d2.push_back(squared_distance(*pool[i], *pool[j]));
  if (d2.empty()) return 1.0;
  auto mid = d2.begin() + static_cast<ptrdiff_t>(d2.size() / 2);
  std::nth_element(d2.begin(), mid, d2.end());
  double h = std::sqrt(*mid);
  return h > 0.0 ? h : 1.0;
}

double mmd2_from_kernel(const std::vector<std::vector<double>>& k, size_t m, size_t n,
                        const std::vector<size_t>& perm) {
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j)
      if (i != j) kxx += k[perm[i]][perm[j]];
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j) kyy += k[perm[m + i]][perm[m + j]];
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) kxy += k[perm[i]][perm[m + j]];
  double dm = static_cast<double>(m), dn = static_cast<double>(n);
  return kxx / (dm * (dm - 1.0)) + kyy / (dn * (dn - 1.0)) - 2.0 * kxy / (dm * dn);
}

void check_mmd_inputs(std::span<const std::vector<double>> a,
                      std::span<const std::vector<double>> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorCode::invalid_argument, "mmd needs at least two points per sample");
  size_t dim = a.front().size();
  for (const auto& x : a)
    if (x.size() != dim) throw Error(ErrorCode::dimension_mismatch, "ragged sample");
  for (const auto& x : b)
    if (x.size() != dim) throw Error(ErrorCode::dimension_mismatch, "sample dimensions differ");
}

}  // namespace

McEstimate epsilon_cost(const RecTask& task, uint64_t total_bins, uint64_t n_mc, uint64_t seed) {
  if (total_bins == 0) throw Error(ErrorCode::invalid_argument, "bin count must be positive");
  if (n_mc == 0) throw Error(ErrorCode::invalid_argument, "n_mc must be positive");
  double log2_j = std::log2(static_cast<double>(total_bins));
  Splitmix64 rng(mix64(seed ^ 0xE95C057ull));
  double sum = 0.0, sum_sq = 0.0;
  for (uint64_t i = 0; i < n_mc; ++i) {
    std::vector<double> z = draw_target_point(task, rng);
    double v = std::max(0.0, log2_j - log2_ratio(task, z));
    sum += v;
    sum_sq += v * v;
  }
  double n = static_cast<double>(n_mc);
  McEstimate est;
  est.value = sum / n;
  est.n_mc = n_mc;
  if (n_mc > 1) est.stderr_ = std::sqrt(std::max(0.0, sum_sq / n - est.value * est.value) / (n - 1));
  return est;
}

BoundReport codelength_bound(const RecTask& task, uint64_t total_bins, double epsilon_hat) {
  if (total_bins == 0) throw Error(ErrorCode::invalid_argument, "bin count must be positive");
  BoundReport rep;
  rep.kl_bits = kl_bits(task);
  rep.log2_j = std::log2(static_cast<double>(total_bins));
  rep.epsilon_hat = epsilon_hat;
  double log_arg = rep.kl_bits - rep.log2_j + epsilon_hat + 1.0;
  if (!(log_arg > 0.0))
    throw Error(ErrorCode::invalid_argument, "bound undefined: kl - log2 J + eps + 1 <= 0");
  rep.codelength_bound_bits = rep.kl_bits + epsilon_hat + std::log2(log_arg) + 4.0;

  bool all_gaussian_narrower = true;
  for (size_t d = 0; d < task.dim(); ++d) {
    const Dim1Law& q = task.target.dims[d];
    const Dim1Law& p = task.prior.dims[d];
    if (q.kind != LawKind::gaussian || p.kind != LawKind::gaussian || !(q.stddev < p.stddev))
      all_gaussian_narrower = false;
  }
  if (all_gaussian_narrower)
    rep.epsilon_gaussian_cap = std::sqrt(0.5 * std::numbers::log2e) * std::sqrt(rep.kl_bits);
  return rep;
}

TvBounds tv_bounds(const RecTask& task, double t, uint64_t n_mc, uint64_t seed) {
  if (t < 0.0) throw Error(ErrorCode::invalid_argument, "t must be non-negative");
  if (n_mc == 0) throw Error(ErrorCode::invalid_argument, "n_mc must be positive");
  double kl = kl_bits(task);
  Splitmix64 rng(mix64(seed ^ 0x7BB0117D5ull));
  uint64_t hi = 0, lo = 0;
  for (uint64_t i = 0; i < n_mc; ++i) {
    std::vector<double> z = draw_target_point(task, rng);
    double r = log2_ratio(task, z);
    // The threshold events are base-invariant once t is converted together
    // with the KL, so the bits-domain comparison matches the nats-domain
    // statement of the bound.
    if (r > kl + 0.5 * t) hi += 1;
    if (r <= kl - 0.5 * t) lo += 1;
  }
  TvBounds out;
  out.tail_upper = static_cast<double>(hi) / static_cast<double>(n_mc);
  out.tail_lower = static_cast<double>(lo) / static_cast<double>(n_mc);
  out.upper = 4.0 * std::sqrt(std::exp2(-t / 4.0) + 2.0 * std::sqrt(out.tail_upper));
  out.lower = 1.0 - std::exp2(-t / 2.0) - out.tail_lower;
  return out;
}

MmdResult mmd_rbf(std::span<const std::vector<double>> a, std::span<const std::vector<double>> b,
                  const MmdOptions& opts) {
  check_mmd_inputs(a, b);
  MmdResult res;
  res.bandwidth = opts.bandwidth.value_or(median_heuristic(a, b));
  double gamma = 1.0 / (2.0 * res.bandwidth * res.bandwidth);
  size_t m = a.size(), n = b.size();
  double kxx = 0.0, kyy = 0.0, kxy = 0.0;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = i + 1; j < m; ++j) kxx += std::exp(-gamma * squared_distance(a[i], a[j]));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) kyy += std::exp(-gamma * squared_distance(b[i], b[j]));
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) kxy += std::exp(-gamma * squared_distance(a[i], b[j]));
  double dm = static_cast<double>(m), dn = static_cast<double>(n);
  res.mmd2 = 2.0 * kxx / (dm * (dm - 1.0)) + 2.0 * kyy / (dn * (dn - 1.0)) - 2.0 * kxy / (dm * dn);
  return res;
}

double mmd_permutation_pvalue(std::span<const std::vector<double>> a,
                              std::span<const std::vector<double>> b, uint32_t n_permutations,
                              uint64_t seed, const MmdOptions& opts) {
  check_mmd_inputs(a, b);
  if (n_permutations == 0) throw Error(ErrorCode::invalid_argument, "need at least 1 permutation");
  size_t m = a.size(), n = b.size(), total = m + n;
  double bandwidth = opts.bandwidth.value_or(median_heuristic(a, b));
  double gamma = 1.0 / (2.0 * bandwidth * bandwidth);

  std::vector<const std::vector<double>*> pool;
  pool.reserve(total);
  for (const auto& x : a) pool.push_back(&x);
  for (const auto& x : b) pool.push_back(&x);
  std::vector<std::vector<double>> kernel(total, std::vector<double>(total, 1.0));
  for (size_t i = 0; i < total; ++i)
    for (size_t j = i + 1; j < total; ++j) {
      double k = std::exp(-gamma * squared_distance(*pool[i], *pool[j]));
      kernel[i][j] = kernel[j][i] = k;
    }

  std::vector<size_t> perm(total);
  for (size_t i = 0; i < total; ++i) perm[i] = i;
  double observed = mmd2_from_kernel(kernel, m, n, perm);

  Splitmix64 rng(mix64(seed ^ 0x9E24A1ull));
  uint32_t at_least = 0;
  for (uint32_t p = 0; p < n_permutations; ++p) {
    for (size_t i = total - 1; i > 0; --i) {
      size_t j = static_cast<size_t>(rng.next() % (i + 1));
      std::swap(perm[i], perm[j]);
    }
    if (mmd2_from_kernel(kernel, m, n, perm) >= observed) at_least += 1;
  }
  return (static_cast<double>(at_least) + 1.0) / (static_cast<double>(n_permutations) + 1.0);
}

std::vector<std::vector<double>> standardize_by_target(const FactorizedDistribution& target,
                                                       std::span<const std::vector<double>> pts) {
  for (const Dim1Law& law : target.dims)
    if (law.kind != LawKind::gaussian)
      throw Error(ErrorCode::invalid_argument, "standardization expects a gaussian target");
  std::vector<std::vector<double>> out;
  out.reserve(pts.size());
  for (const auto& z : pts) {
    if (z.size() != target.dim())
      throw Error(ErrorCode::dimension_mismatch, "point dimension does not match target");
    std::vector<double> s(z.size());
    for (size_t d = 0; d < z.size(); ++d)
      s[d] = (z[d] - target.dims[d].mean) / target.dims[d].stddev;
    out.push_back(std::move(s));
  }
  return out;
}

double empirical_tv_1d(std::span<const double> samples, const RecTask& task) {
  if (task.dim() != 1) throw Error(ErrorCode::invalid_argument, "histogram TV is 1D only");
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "no samples");
  const int bins = 100;
  double lo = quantile(task.prior.dims[0], 0.0005);
  double hi = quantile(task.prior.dims[0], 0.9995);
  double width = (hi - lo) / bins;
  std::vector<double> counts(bins, 0.0);
  for (double z : samples) {
    int k = static_cast<int>(std::floor((z - lo) / width));
    k = std::clamp(k, 0, bins - 1);  // overflow folds into the end bins
    counts[static_cast<size_t>(k)] += 1.0;
  }
  const Dim1Law& q = task.target.dims[0];
  double tv = 0.0;
  for (int k = 0; k < bins; ++k) {
    double a = (k == 0) ? -std::numeric_limits<double>::infinity() : lo + k * width;
    double b = (k == bins - 1) ? std::numeric_limits<double>::infinity() : lo + (k + 1) * width;
    double mass = cdf(q, b) - cdf(q, a);
    tv += std::abs(counts[static_cast<size_t>(k)] / static_cast<double>(samples.size()) - mass);
  }
  return 0.5 * tv;
}

double ks_distance_1d(std::vector<double> samples, const Dim1Law& law) {
  if (samples.empty()) throw Error(ErrorCode::invalid_argument, "no samples");
  std::sort(samples.begin(), samples.end());
  double n = static_cast<double>(samples.size());
  double dist = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(law, samples[i]);
    dist = std::max(dist, std::abs(f - static_cast<double>(i) / n));
    dist = std::max(dist, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return dist;
}

std::string diagnostic_record_json(const std::string& name, double value, double stderr_,
                                   uint64_t n_mc, uint64_t seed) {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["value"] = value;
  j["stderr"] = stderr_;
  j["n_mc"] = n_mc;
  j["seed"] = seed;
  return j.dump();
}

}  // namespace recsp
