#include "rec.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace recsp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Domain-separation tags so arrival times, bin proposals and the shared
// candidate streams never reuse randomness.
constexpr uint64_t kArrivalTag = 0x41525249564a4c31ull;
constexpr uint64_t kProposalTag = 0x50524f504f53414cull;

uint64_t arrival_seed(uint64_t seed) { return mix64(seed ^ kArrivalTag); }
uint64_t proposal_seed(uint64_t seed) { return mix64(seed ^ kProposalTag); }

// Per-dimension categorical over interval indices, kept in log2 with a
// cumulative table (normalized by the max weight) for O(log J_d) draws.
struct DimTable {
  std::vector<double> log2_w;   // log2 of the per-interval weight, -inf allowed
  std::vector<double> cum;      // cumulative of 2^(log2_w - max), for sampling
  double log2_sum = 0.0;        // log2 of the weight sum
  double max_log2_w = -kInf;

  uint32_t sample(double u) const {
    double target = u * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    size_t k = static_cast<size_t>(it - cum.begin());
    if (k >= cum.size()) k = cum.size() - 1;
    return static_cast<uint32_t>(k);
  }
};

DimTable make_table(std::vector<double> log2_w) {
  DimTable t;
  t.log2_w = std::move(log2_w);
  for (double lw : t.log2_w) t.max_log2_w = std::max(t.max_log2_w, lw);
  if (t.max_log2_w == -kInf)
    throw Error(ErrorCode::invalid_argument, "all interval weights vanish");
  double acc = 0.0;
  t.cum.reserve(t.log2_w.size());
  for (double lw : t.log2_w) {
    acc += (lw == -kInf) ? 0.0 : std::exp2(lw - t.max_log2_w);
    t.cum.push_back(acc);
  }
  t.log2_sum = t.max_log2_w + std::log2(acc);
  return t;
}

// log2 of sup q/p per interval of dimension d; throws on unbounded ratios.
std::vector<double> interval_log2_sups(const Dim1Law& q, const Dim1Law& p,
                                       const GridPartition& part, size_t d) {
  std::vector<double> out(part.counts[d]);
  for (uint32_t k = 0; k < part.counts[d]; ++k) {
    RatioBound rb = sup_ratio_on_interval(q, p, part.interval_lo(d, k), part.interval_hi(d, k));
    if (rb.unbounded)
      throw Error(ErrorCode::infinite_ratio,
                  "density ratio unbounded on an interval; use the non-exact sampler");
    out[k] = rb.value > 0.0 ? std::log2(rb.value) : -kInf;
  }
  return out;
}

// log2 of the target mass per interval of dimension d.
std::vector<double> interval_log2_masses(const Dim1Law& q, const GridPartition& part, size_t d) {
  std::vector<double> out(part.counts[d]);
  for (uint32_t k = 0; k < part.counts[d]; ++k) {
    double m = cdf(q, part.interval_hi(d, k)) - cdf(q, part.interval_lo(d, k));
    out[k] = m > 0.0 ? std::log2(m) : -kInf;
  }
  return out;
}

double exact_bin_entropy_bits(const RecTask& task, const GridPartition& part) {
  double h = 0.0;
  for (size_t d = 0; d < task.dim(); ++d) {
    for (uint32_t k = 0; k < part.counts[d]; ++k) {
      double m = cdf(task.target.dims[d], part.interval_hi(d, k)) -
                 cdf(task.target.dims[d], part.interval_lo(d, k));
      if (m > 0.0) h -= m * std::log2(m);
    }
  }
  return h;
}

std::vector<double> draw_target(const RecTask& task, Splitmix64& rng) {
  std::vector<double> z(task.dim());
  for (size_t d = 0; d < task.dim(); ++d) z[d] = quantile(task.target.dims[d], rng.uniform_open());
  return z;
}

struct Best {
  double log2_tau = kInf;
  uint64_t bin = 0;
  uint64_t local_index = 1;
  std::vector<double> z;

  // Strictly smaller scores replace the incumbent; the first candidate of a
  // tie wins.
  bool offer(double log2_tau_n, uint64_t bin_n, uint64_t local_n, const std::vector<double>& zn) {
    if (!(log2_tau_n < log2_tau)) return false;
    log2_tau = log2_tau_n;
    bin = bin_n;
    local_index = local_n;
    z = zn;
    return true;
  }
};

void record_candidate(EncodeTrace* trace, uint64_t n, uint64_t bin, uint64_t local, double t,
                      double log2_pi, double log2_ratio, double log2_score,
                      const std::vector<double>& z) {
  if (!trace) return;
  trace->candidates.push_back({n, bin, local, t, log2_pi, log2_ratio, log2_score, z});
}

EncodeReport finish_report(const RecTask& task, const GridPartition& part, Best&& best,
                           uint64_t steps, bool censored) {
  EncodeReport rep;
  rep.code = {best.bin, best.local_index};
  rep.sample = std::move(best.z);
  rep.steps = steps;
  rep.tau_star = std::exp2(best.log2_tau);
  rep.kl_bits_used = kl_bits(task);
  rep.heuristic_kl_bits =
      rep.kl_bits_used + exact_bin_entropy_bits(task, part) - part.log2_total_bins();
  rep.censored = censored;
  return rep;
}

}  // namespace

EncodeReport encode_pfr(const RecTask& task, uint64_t seed, uint64_t max_steps,
                        EncodeTrace* trace) {
  GridPartition part = trivial_partition(task.prior);
  // Same sup computation as the partitioned encoder on its trivial grid, so
  // the two agree bit-for-bit when J = 1.
  double log2_rmax = 0.0;
  for (size_t d = 0; d < task.dim(); ++d)
    log2_rmax += interval_log2_sups(task.target.dims[d], task.prior.dims[d], part, d)[0];
  if (trace) trace->log2_rmax_full = log2_rmax;

  auto arrivals = ArrivalProcess::pfr(arrival_seed(seed));
  Best best;
  uint64_t n = 0;
  bool censored = false;
  for (;;) {
    n += 1;
    double t = arrivals.next_arrival();
    double log2_t = std::log2(t);
    std::vector<double> z = sample_in_bin(task.prior, part, 0, n, seed);
    double log2_ratio = log2_density(task.target, z) - log2_density(task.prior, z);
    // Time-independent part first: when the ratio is constant the score is
    // exactly log2_t + const and the stopping comparison stays exact.
    double log2_tau = (log2_ratio == -kInf) ? kInf : log2_t + (0.0 - log2_ratio);
    best.offer(log2_tau, 0, n, z);
    record_candidate(trace, n, 0, n, t, 0.0, log2_ratio, log2_tau, z);
    if (log2_t - log2_rmax > best.log2_tau) break;
    if (max_steps != 0 && n >= max_steps) {
      censored = true;
      break;
    }
  }
  return finish_report(task, part, std::move(best), n, censored);
}

EncodeReport encode_sp_pfr(const RecTask& task, const GridPartition& part, uint64_t seed,
                           PiChoice pi, uint64_t max_steps, EncodeTrace* trace) {
  if (part.dim() != task.dim())
    throw Error(ErrorCode::dimension_mismatch, "partition does not match task");
  const size_t dim = task.dim();
  const double log2_j = part.log2_total_bins();

  // Weight tables: sups drive the stopping constant in both modes and the
  // proposal in exact-sup mode; masses drive the target-mass proposal.
  std::vector<DimTable> sups(dim);
  std::vector<std::vector<double>> masses(dim);
  double log2_bin_norm = 0.0;  // log2 Z for exact-sup
  double log2_rmax = 0.0;      // full-score convention
  for (size_t d = 0; d < dim; ++d) {
    sups[d] = make_table(interval_log2_sups(task.target.dims[d], task.prior.dims[d], part, d));
    masses[d] = interval_log2_masses(task.target.dims[d], part, d);
    log2_bin_norm += sups[d].log2_sum;
  }
  if (pi == PiChoice::exact_sup) {
    log2_rmax = log2_bin_norm - log2_j;
  } else {
    for (size_t d = 0; d < dim; ++d) {
      double worst = -kInf;
      for (size_t k = 0; k < sups[d].log2_w.size(); ++k) {
        if (masses[d][k] == -kInf) continue;  // pi never proposes this interval
        worst = std::max(worst, sups[d].log2_w[k] - masses[d][k]);
      }
      log2_rmax += worst;
    }
    log2_rmax -= log2_j;
  }
  if (trace) {
    trace->log2_rmax_full = log2_rmax;
    trace->log2_bin_norm = log2_bin_norm;
  }

  auto arrivals = ArrivalProcess::pfr(arrival_seed(seed));
  Splitmix64 proposals(proposal_seed(seed));
  std::unordered_map<uint64_t, uint64_t> local_counters;
  std::vector<uint32_t> coords(dim);
  Best best;
  uint64_t n = 0;
  bool censored = false;
  for (;;) {
    n += 1;
    double t = arrivals.next_arrival();
    double log2_t = std::log2(t);

    // Sample a bin and accumulate log2 pi(j_n).
    double log2_pi = 0.0;
    if (pi == PiChoice::exact_sup) {
      for (size_t d = 0; d < dim; ++d) {
        uint32_t k = part.counts[d] > 1 ? sups[d].sample(proposals.uniform01()) : 0;
        coords[d] = k;
        log2_pi += sups[d].log2_w[k] - sups[d].log2_sum;
      }
    } else {
      std::vector<double> proposal = draw_target(task, proposals);
      uint64_t j = locate_bin(part, proposal);
      part.decompose(j, coords);
      for (size_t d = 0; d < dim; ++d) log2_pi += masses[d][coords[d]];
    }
    uint64_t bin = part.compose(coords);
    uint64_t local = ++local_counters[bin];

    std::vector<double> z = sample_in_bin(task.prior, part, bin, local, seed);
    double log2_ratio = log2_density(task.target, z) - log2_density(task.prior, z);
    double log2_tau =
        (log2_ratio == -kInf) ? kInf : log2_t + ((log2_j + log2_pi) - log2_ratio);
    best.offer(log2_tau, bin, local, z);
    record_candidate(trace, n, bin, local, t, log2_pi, log2_ratio, log2_tau, z);
    if (log2_t - log2_rmax > best.log2_tau) break;
    if (max_steps != 0 && n >= max_steps) {
      censored = true;
      break;
    }
  }
  return finish_report(task, part, std::move(best), n, censored);
}

EncodeReport encode_orc(const RecTask& task, uint64_t n_candidates, uint64_t seed,
                        EncodeTrace* trace) {
  if (n_candidates == 0)
    throw Error(ErrorCode::invalid_argument, "orc needs at least one candidate");
  GridPartition part = trivial_partition(task.prior);
  auto arrivals = ArrivalProcess::orc(n_candidates, arrival_seed(seed));
  Best best;
  for (uint64_t n = 1; n <= n_candidates; ++n) {
    double t = arrivals.next_arrival();
    double log2_t = std::log2(t);
    std::vector<double> z = sample_in_bin(task.prior, part, 0, n, seed);
    double log2_ratio = log2_density(task.target, z) - log2_density(task.prior, z);
    double log2_tau = (log2_ratio == -kInf) ? kInf : log2_t + (0.0 - log2_ratio);
    best.offer(log2_tau, 0, n, z);
    record_candidate(trace, n, 0, n, t, 0.0, log2_ratio, log2_tau, z);
  }
  return finish_report(task, part, std::move(best), n_candidates, false);
}

EncodeReport encode_sp_orc(const RecTask& task, const GridPartition& part, uint64_t n_candidates,
                           uint64_t seed, EncodeTrace* trace) {
  if (part.dim() != task.dim())
    throw Error(ErrorCode::dimension_mismatch, "partition does not match task");
  if (n_candidates == 0)
    throw Error(ErrorCode::invalid_argument, "orc needs at least one candidate");
  const size_t dim = task.dim();
  const double log2_j = part.log2_total_bins();
  std::vector<std::vector<double>> masses(dim);
  for (size_t d = 0; d < dim; ++d)
    masses[d] = interval_log2_masses(task.target.dims[d], part, d);

  auto arrivals = ArrivalProcess::orc(n_candidates, arrival_seed(seed));
  Splitmix64 proposals(proposal_seed(seed));
  std::unordered_map<uint64_t, uint64_t> local_counters;
  std::vector<uint32_t> coords(dim);
  Best best;
  for (uint64_t n = 1; n <= n_candidates; ++n) {
    double t = arrivals.next_arrival();
    double log2_t = std::log2(t);

    std::vector<double> proposal = draw_target(task, proposals);
    uint64_t bin = locate_bin(part, proposal);
    part.decompose(bin, coords);
    double log2_mass = 0.0;
    for (size_t d = 0; d < dim; ++d) log2_mass += masses[d][coords[d]];
    uint64_t local = ++local_counters[bin];

    std::vector<double> z = sample_in_bin(task.prior, part, bin, local, seed);
    double log2_ratio = log2_density(task.target, z) - log2_density(task.prior, z);
    double log2_tau =
        (log2_ratio == -kInf) ? kInf : log2_t + ((log2_j + log2_mass) - log2_ratio);
    best.offer(log2_tau, bin, local, z);
    record_candidate(trace, n, bin, local, t, log2_mass, log2_ratio, log2_tau, z);
  }
  return finish_report(task, part, std::move(best), n_candidates, false);
}

std::vector<double> decode(const FactorizedDistribution& prior, const GridPartition& part,
                           const CodePoint& code, uint64_t base_seed) {
  return sample_in_bin(prior, part, code.bin, code.local_index, base_seed);
}

double heuristic_kl_bits(const RecTask& task, const GridPartition& part, uint64_t n_mc,
                         uint64_t seed) {
  if (part.dim() != task.dim())
    throw Error(ErrorCode::dimension_mismatch, "partition does not match task");
  double entropy;
  if (part.total_bins() <= (1ull << 16)) {
    entropy = exact_bin_entropy_bits(task, part);
  } else {
    if (n_mc == 0) throw Error(ErrorCode::invalid_argument, "n_mc must be positive");
    std::vector<std::vector<double>> masses(task.dim());
    for (size_t d = 0; d < task.dim(); ++d)
      masses[d] = interval_log2_masses(task.target.dims[d], part, d);
    Splitmix64 rng(seed);
    std::vector<uint32_t> coords(task.dim());
    double acc = 0.0;
    for (uint64_t i = 0; i < n_mc; ++i) {
      std::vector<double> z = draw_target(task, rng);
      part.decompose(locate_bin(part, z), coords);
      for (size_t d = 0; d < task.dim(); ++d) acc -= masses[d][coords[d]];
    }
    entropy = acc / static_cast<double>(n_mc);
  }
  return kl_bits(task) + entropy - part.log2_total_bins();
}

}  // namespace recsp
