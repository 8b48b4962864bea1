#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "partition.hpp"
#include "rec.hpp"

namespace recsp {

/// One synthetic coding problem: x ~ N(0, diag(sigma^2)) realized once,
/// target Q = N(x, diag(rho^2)), prior P = N(0, diag(sigma^2 + rho^2)).
struct ToyTaskSpec {
  uint64_t id = 0;
  std::vector<double> sigma;
  std::vector<double> rho;
  std::vector<double> x;
  std::vector<double> mi_bits;  // 0.5 log2((sigma^2 + rho^2) / rho^2) per dim
  RecTask task;
  double kl_bits_total = 0.0;
  double dinf_bits = 0.0;
};

/// Deterministic toy-task generation: sigma, rho ~ U(0,1) per dimension.
std::vector<ToyTaskSpec> gen_tasks(uint64_t count, uint32_t dim, uint64_t seed);

std::string tasks_to_json(const std::vector<ToyTaskSpec>& tasks, uint32_t dim, uint64_t seed);
std::vector<ToyTaskSpec> tasks_from_json(const std::string& json);

/// Receiver-constructible partition of a toy task: interval counts from the
/// shared per-dimension mutual information with a floor(KL) bit budget.
GridPartition default_partition(const ToyTaskSpec& spec);

struct RunRecord {
  uint64_t task_id = 0;
  std::string algorithm;  // pfr | sp-pfr | orc | sp-orc
  std::vector<uint32_t> j_layout;
  uint64_t n_candidates = 0;  // 0 for the exact samplers
  uint64_t repeat_index = 0;
  uint64_t seed = 0;
  uint64_t steps = 0;
  bool censored = false;
  uint64_t bin = 0;
  uint64_t local_index = 0;
  double tau_star = 0.0;
  double bin_bits = 0.0;
  double index_nll_bits = 0.0;  // fitted-Zipf NLL of the local index
  double code_bits = 0.0;       // bin_bits + index_nll_bits
  double zeta = 0.0;
  double kl_bits = 0.0;
  double dinf_bits = 0.0;
  double heuristic_kl_bits = 0.0;
  std::optional<double> mmd2;   // aggregated rows of the orc sweep only
  uint64_t repeats = 0;         // aggregated rows only
  double mean_steps = 0.0;      // aggregated rows only
  std::vector<double> sample;   // winning sample of per-encode rows
  double wall_time_s = 0.0;
};

struct PfrSweepConfig {
  uint32_t repeats = 50;
  uint64_t step_ceiling = 1ull << 24;
  uint32_t threads = 1;
  uint64_t master_seed = 1;
};

/// Runs standard PFR and SP-PFR on every task, `repeats` times each under
/// shared per-(task, repeat) seeds; one record per encode. The local-index
/// codelength is the fitted-Zipf NLL, with zeta fitted per (task, algorithm)
/// across its repeats.
std::vector<RunRecord> run_pfr_sweep(const std::vector<ToyTaskSpec>& tasks,
                                     const PfrSweepConfig& cfg);

struct OrcSweepConfig {
  std::vector<uint64_t> sample_sizes;  // defaults to 2^1 .. 2^10
  uint32_t repeats = 500;
  uint32_t threads = 1;
  uint64_t master_seed = 1;
};

/// Runs standard ORC and SP-ORC at each sample size; one aggregated record
/// per (task, algorithm, N) carrying the MMD^2 of the encoded cloud against
/// direct target samples (both standardized by the target's moments).
std::vector<RunRecord> run_orc_sweep(const std::vector<ToyTaskSpec>& tasks,
                                     const OrcSweepConfig& cfg);

std::string pfr_records_to_csv(const std::vector<RunRecord>& records);
std::string orc_records_to_csv(const std::vector<RunRecord>& records);
std::string pfr_summary_json(const std::vector<RunRecord>& records);
std::string orc_summary_json(const std::vector<RunRecord>& records);

}  // namespace recsp
