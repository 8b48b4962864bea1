#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "distributions.hpp"
#include "partition.hpp"
#include "streams.hpp"

namespace recsp {

/// The two-part code: bin index j* and local sample index n* within that
/// bin's candidate stream.
struct CodePoint {
  uint64_t bin = 0;
  uint64_t local_index = 1;
};

struct EncodeReport {
  CodePoint code;
  std::vector<double> sample;
  uint64_t steps = 0;          // candidates examined
  double tau_star = 0.0;       // winning score, full-score convention
  double kl_bits_used = 0.0;   // KL[Q||P] of the task
  double heuristic_kl_bits = 0.0;  // KL[Q||P'] of the partitioned proposal
  bool censored = false;       // step ceiling hit before the stopping rule
};

/// Bin reweighting strategy for the partitioned exact sampler.
enum class PiChoice {
  exact_sup,    // pi proportional to per-dimension interval ratio suprema
  target_mass,  // pi(j) = Q(B_j), proposed by locating target draws
};

struct CandidateRecord {
  uint64_t n = 0;
  uint64_t bin = 0;
  uint64_t local_index = 0;
  double t = 0.0;
  double log2_pi = 0.0;        // log2 of the normalized bin probability
  double log2_ratio = 0.0;     // log2 q(z)/p(z)
  double log2_score_full = 0.0;
  std::vector<double> z;
};

/// Optional per-candidate trace for tests and diagnostics.
struct EncodeTrace {
  std::vector<CandidateRecord> candidates;
  double log2_rmax_full = 0.0;
  double log2_bin_norm = 0.0;  // log2 of the pi normalizer (exact-sup mode)
};

/// Standard exact sampler over the unrestricted prior stream. Refuses to
/// run when the density ratio is unbounded.
EncodeReport encode_pfr(const RecTask& task, uint64_t seed, uint64_t max_steps = 0,
                        EncodeTrace* trace = nullptr);

/// Exact sampler with axis-aligned space partitioning.
EncodeReport encode_sp_pfr(const RecTask& task, const GridPartition& part, uint64_t seed,
                           PiChoice pi = PiChoice::exact_sup, uint64_t max_steps = 0,
                           EncodeTrace* trace = nullptr);

/// Fixed-budget approximate sampler (no partitioning).
EncodeReport encode_orc(const RecTask& task, uint64_t n_candidates, uint64_t seed,
                        EncodeTrace* trace = nullptr);

/// Fixed-budget approximate sampler with space partitioning; bins proposed
/// by locating sender-private target draws, pi(j) = Q(B_j).
EncodeReport encode_sp_orc(const RecTask& task, const GridPartition& part, uint64_t n_candidates,
                           uint64_t seed, EncodeTrace* trace = nullptr);

/// Receiver side: reconstructs the encoded sample from the code alone.
std::vector<double> decode(const FactorizedDistribution& prior, const GridPartition& part,
                           const CodePoint& code, uint64_t base_seed);

/// KL[Q||P'] for the target-mass reweighting: KL[Q||P] + sum_j Q(B_j)
/// log2 Q(B_j) + log2 J, with the bin-entropy term computed exactly from
/// per-dimension interval masses when J <= 2^16 and by n_mc Monte Carlo
/// draws from Q otherwise.
double heuristic_kl_bits(const RecTask& task, const GridPartition& part, uint64_t n_mc,
                         uint64_t seed = 0x9c0ffee1);

}  // namespace recsp
