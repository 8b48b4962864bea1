/* recsp -- relative entropy coding with space partitioning.
 *
 * C interface of the shared library. All functions return a recsp_status;
 * outputs are written through pointer arguments. Handles are opaque and
 * must be released with their destroy function; strings and byte buffers
 * returned by the library are released with recsp_string_free /
 * recsp_buffer_free. recsp_last_error() returns a thread-local message
 * describing the most recent failure on the calling thread.
 */
#ifndef RECSP_H
#define RECSP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef RECSP_API
#if defined(_WIN32)
#define RECSP_API __declspec(dllexport)
#else
#define RECSP_API __attribute__((visibility("default")))
#endif
#endif

typedef enum recsp_status {
  RECSP_OK = 0,
  RECSP_ERR_INVALID_ARGUMENT = 1,
  RECSP_ERR_DIMENSION_MISMATCH = 2,
  RECSP_ERR_OUTSIDE_SUPPORT = 3,
  RECSP_ERR_INFINITE_RATIO = 4,
  RECSP_ERR_OUT_OF_RANGE = 5,
  RECSP_ERR_EXHAUSTED = 6,
  RECSP_ERR_PARSE = 7,
  RECSP_ERR_IO = 8,
  RECSP_ERR_INTERNAL = 9
} recsp_status;

RECSP_API const char* recsp_status_name(recsp_status status);
RECSP_API const char* recsp_last_error(void);
RECSP_API const char* recsp_version(void);
RECSP_API void recsp_string_free(char* s);
RECSP_API void recsp_buffer_free(uint8_t* p);

/* ---- tasks -------------------------------------------------------- */

/* Distribution JSON:
 *   {"dims":[{"kind":"gaussian","mean":M,"std":S}
 *            |{"kind":"uniform","lo":A,"hi":B}, ...]}
 */
typedef struct recsp_task recsp_task;

RECSP_API recsp_status recsp_task_create(const char* target_json, const char* prior_json,
                                         recsp_task** out);
RECSP_API void recsp_task_destroy(recsp_task* task);
RECSP_API recsp_status recsp_task_dim(const recsp_task* task, uint32_t* out);
RECSP_API recsp_status recsp_task_kl_bits(const recsp_task* task, double* out);
RECSP_API recsp_status recsp_task_dimwise_kl_bits(const recsp_task* task, double* out,
                                                  uint32_t capacity);
/* *unbounded is set to 1 and *bits to 0 when the divergence is infinite. */
RECSP_API recsp_status recsp_task_renyi_inf_bits(const recsp_task* task, double* bits,
                                                 int* unbounded);
RECSP_API recsp_status recsp_task_log2_ratio(const recsp_task* task, const double* z,
                                             uint32_t dim, double* out);

/* ---- partitions ---------------------------------------------------- */

typedef struct recsp_partition recsp_partition;

RECSP_API recsp_status recsp_partition_build(const recsp_task* task, const uint32_t* counts,
                                             uint32_t dim, recsp_partition** out);
/* Greedy doubling allocation driven by per-dimension mutual information
 * under a total bit budget, then quantile boundaries. */
RECSP_API recsp_status recsp_partition_allocate(const recsp_task* task, const double* mi_bits,
                                                uint32_t dim, uint32_t budget_bits,
                                                recsp_partition** out);
RECSP_API void recsp_partition_destroy(recsp_partition* part);
RECSP_API recsp_status recsp_partition_dim(const recsp_partition* part, uint32_t* out);
RECSP_API recsp_status recsp_partition_counts(const recsp_partition* part, uint32_t* out,
                                              uint32_t capacity);
RECSP_API recsp_status recsp_partition_total_bins(const recsp_partition* part, uint64_t* out);
RECSP_API recsp_status recsp_partition_to_json(const recsp_partition* part, char** out);
RECSP_API recsp_status recsp_partition_from_json(const recsp_task* task, const char* json,
                                                 recsp_partition** out);

/* ---- coding -------------------------------------------------------- */

typedef struct recsp_report {
  uint64_t bin;
  uint64_t local_index;
  uint64_t steps;
  double tau_star;
  double kl_bits;
  double heuristic_kl_bits;
  int censored;
} recsp_report;

enum { RECSP_PI_EXACT_SUP = 0, RECSP_PI_TARGET_MASS = 1 };

/* `sample` must hold at least the task dimension. max_steps = 0 runs the
 * exact samplers to their stopping rule. */
RECSP_API recsp_status recsp_encode_pfr(const recsp_task* task, uint64_t seed,
                                        uint64_t max_steps, recsp_report* report,
                                        double* sample);
RECSP_API recsp_status recsp_encode_sp_pfr(const recsp_task* task, const recsp_partition* part,
                                           int pi_mode, uint64_t seed, uint64_t max_steps,
                                           recsp_report* report, double* sample);
RECSP_API recsp_status recsp_encode_orc(const recsp_task* task, uint64_t n_candidates,
                                        uint64_t seed, recsp_report* report, double* sample);
RECSP_API recsp_status recsp_encode_sp_orc(const recsp_task* task, const recsp_partition* part,
                                           uint64_t n_candidates, uint64_t seed,
                                           recsp_report* report, double* sample);
RECSP_API recsp_status recsp_decode(const recsp_partition* part, uint64_t bin,
                                    uint64_t local_index, uint64_t base_seed, double* sample);
RECSP_API recsp_status recsp_heuristic_kl_bits(const recsp_task* task,
                                               const recsp_partition* part, uint64_t n_mc,
                                               uint64_t seed, double* out);

/* ---- serialized blocks --------------------------------------------- */

RECSP_API recsp_status recsp_block_write(const recsp_partition* part, uint64_t bin,
                                         uint64_t local_index, uint64_t base_seed, double zeta,
                                         uint8_t** bytes_out, size_t* len_out);
/* Header fields only; counts_capacity gates the counts output. */
RECSP_API recsp_status recsp_block_read(const uint8_t* bytes, size_t len, uint64_t* bin,
                                        uint64_t* local_index, uint64_t* base_seed, double* zeta,
                                        uint32_t* counts, uint32_t counts_capacity,
                                        uint32_t* dim_out);
/* Full receiver path: parse the block and regenerate the sample under the
 * given prior. */
RECSP_API recsp_status recsp_block_decode(const char* prior_json, const uint8_t* bytes,
                                          size_t len, double* sample, uint32_t sample_capacity,
                                          uint32_t* dim_out);

/* ---- local-index model ---------------------------------------------- */

RECSP_API recsp_status recsp_zipf_fit(const uint64_t* indices, size_t count, double* zeta_out);
RECSP_API recsp_status recsp_zipf_nll_bits(double zeta, uint64_t index, double* out);
RECSP_API recsp_status recsp_zipf_entropy_bits(double zeta, double* out);

/* ---- diagnostics ----------------------------------------------------- */

RECSP_API recsp_status recsp_epsilon_cost(const recsp_task* task, uint64_t total_bins,
                                          uint64_t n_mc, uint64_t seed, double* value,
                                          double* standard_error);
/* gaussian_cap receives 0.849 sqrt(KL) for all-gaussian narrower-target
 * tasks and NaN otherwise; pass NULL to skip. */
RECSP_API recsp_status recsp_codelength_bound(const recsp_task* task, uint64_t total_bins,
                                              double epsilon_hat, double* bound_bits,
                                              double* gaussian_cap);
/* Raw (unclamped) bounds plus the Monte Carlo tail probabilities. */
RECSP_API recsp_status recsp_tv_bounds(const recsp_task* task, double t, uint64_t n_mc,
                                       uint64_t seed, double* upper, double* lower,
                                       double* tail_upper, double* tail_lower);
/* Points are row-major [count x dim]. bandwidth <= 0 selects the median
 * heuristic; the width used is reported through bandwidth_used. */
RECSP_API recsp_status recsp_mmd_rbf(const double* a, size_t a_count, const double* b,
                                     size_t b_count, uint32_t dim, double bandwidth,
                                     double* mmd2, double* bandwidth_used);

/* ---- synthetic benchmark -------------------------------------------- */

RECSP_API recsp_status recsp_gen_tasks_json(uint64_t count, uint32_t dim, uint64_t seed,
                                            char** json_out);
/* config JSON: {"repeats":50,"step_ceiling":16777216,"threads":1,"master_seed":1} */
RECSP_API recsp_status recsp_sweep_pfr(const char* tasks_json, const char* config_json,
                                       char** csv_out, char** summary_json_out);
/* config JSON: {"sample_sizes":[2,...,1024],"repeats":500,"threads":1,"master_seed":1} */
RECSP_API recsp_status recsp_sweep_orc(const char* tasks_json, const char* config_json,
                                       char** csv_out, char** summary_json_out);

#ifdef __cplusplus
}
#endif

#endif /* RECSP_H */
