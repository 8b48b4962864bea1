#include "recsp.h"

#include <cmath>
#include <cstring>
#include <string>

#include "bench.hpp"
#include "block_format.hpp"
#include "diagnostics.hpp"
#include "index_codec.hpp"
#include "json.hpp"
#include "rec.hpp"

namespace {

thread_local std::string g_last_error;

recsp_status status_of(const recsp::Error& e) {
  using recsp::ErrorCode;
  switch (e.code()) {
    case ErrorCode::invalid_argument: return RECSP_ERR_INVALID_ARGUMENT;
    case ErrorCode::dimension_mismatch: return RECSP_ERR_DIMENSION_MISMATCH;
    case ErrorCode::outside_support: return RECSP_ERR_OUTSIDE_SUPPORT;
    case ErrorCode::infinite_ratio: return RECSP_ERR_INFINITE_RATIO;
    case ErrorCode::out_of_range: return RECSP_ERR_OUT_OF_RANGE;
    case ErrorCode::exhausted: return RECSP_ERR_EXHAUSTED;
    case ErrorCode::parse_error: return RECSP_ERR_PARSE;
    case ErrorCode::io_error: return RECSP_ERR_IO;
  }
  return RECSP_ERR_INTERNAL;
}

template <typename Fn>
recsp_status guarded(Fn&& fn) {
  try {
    fn();
    return RECSP_OK;
  } catch (const recsp::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RECSP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RECSP_ERR_INTERNAL;
  }
}

recsp_status fail_null(const char* what) {
  g_last_error = std::string("null pointer argument: ") + what;
  return RECSP_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void fill_report(recsp_report* report, const recsp::EncodeReport& rep) {
  report->bin = rep.code.bin;
  report->local_index = rep.code.local_index;
  report->steps = rep.steps;
  report->tau_star = rep.tau_star;
  report->kl_bits = rep.kl_bits_used;
  report->heuristic_kl_bits = rep.heuristic_kl_bits;
  report->censored = rep.censored ? 1 : 0;
}

std::vector<std::vector<double>> rows_from_flat(const double* p, size_t count, uint32_t dim) {
  std::vector<std::vector<double>> out(count, std::vector<double>(dim));
  for (size_t i = 0; i < count; ++i)
    for (uint32_t d = 0; d < dim; ++d) out[i][d] = p[i * dim + d];
  return out;
}

}  // namespace

struct recsp_task {
  recsp::RecTask task;
};

struct recsp_partition {
  recsp::GridPartition part;
  recsp::FactorizedDistribution prior;  // kept so decode needs only the handle
};

extern "C" {

const char* recsp_status_name(recsp_status status) {
  switch (status) {
    case RECSP_OK: return "ok";
    case RECSP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case RECSP_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case RECSP_ERR_OUTSIDE_SUPPORT: return "outside_support";
    case RECSP_ERR_INFINITE_RATIO: return "infinite_ratio";
    case RECSP_ERR_OUT_OF_RANGE: return "out_of_range";
    case RECSP_ERR_EXHAUSTED: return "exhausted";
    case RECSP_ERR_PARSE: return "parse_error";
    case RECSP_ERR_IO: return "io_error";
    case RECSP_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* recsp_last_error(void) { return g_last_error.c_str(); }

const char* recsp_version(void) { return "1.0.0"; }

void recsp_string_free(char* s) { delete[] s; }

void recsp_buffer_free(uint8_t* p) { delete[] p; }

recsp_status recsp_task_create(const char* target_json, const char* prior_json,
                               recsp_task** out) {
  if (!target_json || !prior_json || !out) return fail_null("recsp_task_create");
  return guarded([&] {
    auto task = recsp::RecTask(recsp::distribution_from_json(target_json),
                               recsp::distribution_from_json(prior_json));
    *out = new recsp_task{std::move(task)};
  });
}

void recsp_task_destroy(recsp_task* task) { delete task; }

recsp_status recsp_task_dim(const recsp_task* task, uint32_t* out) {
  if (!task || !out) return fail_null("recsp_task_dim");
  *out = static_cast<uint32_t>(task->task.dim());
  return RECSP_OK;
}

recsp_status recsp_task_kl_bits(const recsp_task* task, double* out) {
  if (!task || !out) return fail_null("recsp_task_kl_bits");
  return guarded([&] { *out = recsp::kl_bits(task->task); });
}

recsp_status recsp_task_dimwise_kl_bits(const recsp_task* task, double* out, uint32_t capacity) {
  if (!task || !out) return fail_null("recsp_task_dimwise_kl_bits");
  return guarded([&] {
    auto v = recsp::dimwise_kl_bits(task->task);
    if (capacity < v.size())
      throw recsp::Error(recsp::ErrorCode::invalid_argument, "output buffer too small");
    std::copy(v.begin(), v.end(), out);
  });
}

recsp_status recsp_task_renyi_inf_bits(const recsp_task* task, double* bits, int* unbounded) {
  if (!task || !bits || !unbounded) return fail_null("recsp_task_renyi_inf_bits");
  return guarded([&] {
    recsp::Divergence dv = recsp::renyi_inf_bits(task->task);
    *bits = dv.unbounded ? 0.0 : dv.bits;
    *unbounded = dv.unbounded ? 1 : 0;
  });
}

recsp_status recsp_task_log2_ratio(const recsp_task* task, const double* z, uint32_t dim,
                                   double* out) {
  if (!task || !z || !out) return fail_null("recsp_task_log2_ratio");
  return guarded([&] { *out = recsp::log2_ratio(task->task, std::span(z, dim)); });
}

recsp_status recsp_partition_build(const recsp_task* task, const uint32_t* counts, uint32_t dim,
                                   recsp_partition** out) {
  if (!task || !counts || !out) return fail_null("recsp_partition_build");
  return guarded([&] {
    auto part = recsp::build_partition(task->task.prior, std::span(counts, dim));
    *out = new recsp_partition{std::move(part), task->task.prior};
  });
}

recsp_status recsp_partition_allocate(const recsp_task* task, const double* mi_bits, uint32_t dim,
                                      uint32_t budget_bits, recsp_partition** out) {
  if (!task || !mi_bits || !out) return fail_null("recsp_partition_allocate");
  return guarded([&] {
    auto counts = recsp::allocate_intervals(std::span(mi_bits, dim), budget_bits);
    auto part = recsp::build_partition(task->task.prior, counts);
    *out = new recsp_partition{std::move(part), task->task.prior};
  });
}

void recsp_partition_destroy(recsp_partition* part) { delete part; }

recsp_status recsp_partition_dim(const recsp_partition* part, uint32_t* out) {
  if (!part || !out) return fail_null("recsp_partition_dim");
  *out = static_cast<uint32_t>(part->part.dim());
  return RECSP_OK;
}

recsp_status recsp_partition_counts(const recsp_partition* part, uint32_t* out,
                                    uint32_t capacity) {
  if (!part || !out) return fail_null("recsp_partition_counts");
  return guarded([&] {
    if (capacity < part->part.dim())
      throw recsp::Error(recsp::ErrorCode::invalid_argument, "output buffer too small");
    std::copy(part->part.counts.begin(), part->part.counts.end(), out);
  });
}

recsp_status recsp_partition_total_bins(const recsp_partition* part, uint64_t* out) {
  if (!part || !out) return fail_null("recsp_partition_total_bins");
  *out = part->part.total_bins();
  return RECSP_OK;
}

recsp_status recsp_partition_to_json(const recsp_partition* part, char** out) {
  if (!part || !out) return fail_null("recsp_partition_to_json");
  return guarded([&] { *out = dup_string(recsp::partition_to_json(part->part)); });
}

recsp_status recsp_partition_from_json(const recsp_task* task, const char* json,
                                       recsp_partition** out) {
  if (!task || !json || !out) return fail_null("recsp_partition_from_json");
  return guarded([&] {
    auto part = recsp::partition_from_json(task->task.prior, json);
    *out = new recsp_partition{std::move(part), task->task.prior};
  });
}

recsp_status recsp_encode_pfr(const recsp_task* task, uint64_t seed, uint64_t max_steps,
                              recsp_report* report, double* sample) {
  if (!task || !report || !sample) return fail_null("recsp_encode_pfr");
  return guarded([&] {
    recsp::EncodeReport rep = recsp::encode_pfr(task->task, seed, max_steps);
    fill_report(report, rep);
    std::copy(rep.sample.begin(), rep.sample.end(), sample);
  });
}

recsp_status recsp_encode_sp_pfr(const recsp_task* task, const recsp_partition* part, int pi_mode,
                                 uint64_t seed, uint64_t max_steps, recsp_report* report,
                                 double* sample) {
  if (!task || !part || !report || !sample) return fail_null("recsp_encode_sp_pfr");
  return guarded([&] {
    recsp::PiChoice pi =
        pi_mode == RECSP_PI_TARGET_MASS ? recsp::PiChoice::target_mass : recsp::PiChoice::exact_sup;
    recsp::EncodeReport rep = recsp::encode_sp_pfr(task->task, part->part, seed, pi, max_steps);
    fill_report(report, rep);
    std::copy(rep.sample.begin(), rep.sample.end(), sample);
  });
}

recsp_status recsp_encode_orc(const recsp_task* task, uint64_t n_candidates, uint64_t seed,
                              recsp_report* report, double* sample) {
  if (!task || !report || !sample) return fail_null("recsp_encode_orc");
  return guarded([&] {
    recsp::EncodeReport rep = recsp::encode_orc(task->task, n_candidates, seed);
    fill_report(report, rep);
    std::copy(rep.sample.begin(), rep.sample.end(), sample);
  });
}

recsp_status recsp_encode_sp_orc(const recsp_task* task, const recsp_partition* part,
                                 uint64_t n_candidates, uint64_t seed, recsp_report* report,
                                 double* sample) {
  if (!task || !part || !report || !sample) return fail_null("recsp_encode_sp_orc");
  return guarded([&] {
    recsp::EncodeReport rep = recsp::encode_sp_orc(task->task, part->part, n_candidates, seed);
    fill_report(report, rep);
    std::copy(rep.sample.begin(), rep.sample.end(), sample);
  });
}

recsp_status recsp_decode(const recsp_partition* part, uint64_t bin, uint64_t local_index,
                          uint64_t base_seed, double* sample) {
  if (!part || !sample) return fail_null("recsp_decode");
  return guarded([&] {
    auto z = recsp::decode(part->prior, part->part, recsp::CodePoint{bin, local_index}, base_seed);
    std::copy(z.begin(), z.end(), sample);
  });
}

recsp_status recsp_heuristic_kl_bits(const recsp_task* task, const recsp_partition* part,
                                     uint64_t n_mc, uint64_t seed, double* out) {
  if (!task || !part || !out) return fail_null("recsp_heuristic_kl_bits");
  return guarded([&] { *out = recsp::heuristic_kl_bits(task->task, part->part, n_mc, seed); });
}

recsp_status recsp_block_write(const recsp_partition* part, uint64_t bin, uint64_t local_index,
                               uint64_t base_seed, double zeta, uint8_t** bytes_out,
                               size_t* len_out) {
  if (!part || !bytes_out || !len_out) return fail_null("recsp_block_write");
  return guarded([&] {
    auto bytes =
        recsp::write_block(part->part, recsp::CodePoint{bin, local_index}, base_seed, zeta);
    auto* buf = new uint8_t[bytes.size()];
    std::memcpy(buf, bytes.data(), bytes.size());
    *bytes_out = buf;
    *len_out = bytes.size();
  });
}

recsp_status recsp_block_read(const uint8_t* bytes, size_t len, uint64_t* bin,
                              uint64_t* local_index, uint64_t* base_seed, double* zeta,
                              uint32_t* counts, uint32_t counts_capacity, uint32_t* dim_out) {
  if (!bytes) return fail_null("recsp_block_read");
  return guarded([&] {
    recsp::DecodedBlock block = recsp::read_block(std::span(bytes, len));
    if (bin) *bin = block.code.bin;
    if (local_index) *local_index = block.code.local_index;
    if (base_seed) *base_seed = block.header.base_seed;
    if (zeta) *zeta = block.header.zeta;
    if (dim_out) *dim_out = static_cast<uint32_t>(block.header.counts.size());
    if (counts) {
      if (counts_capacity < block.header.counts.size())
        throw recsp::Error(recsp::ErrorCode::invalid_argument, "counts buffer too small");
      std::copy(block.header.counts.begin(), block.header.counts.end(), counts);
    }
  });
}

recsp_status recsp_block_decode(const char* prior_json, const uint8_t* bytes, size_t len,
                                double* sample, uint32_t sample_capacity, uint32_t* dim_out) {
  if (!prior_json || !bytes || !sample) return fail_null("recsp_block_decode");
  return guarded([&] {
    recsp::FactorizedDistribution prior = recsp::distribution_from_json(prior_json);
    recsp::DecodedBlock block = recsp::read_block(std::span(bytes, len));
    if (block.header.counts.size() != prior.dim())
      throw recsp::Error(recsp::ErrorCode::dimension_mismatch,
                         "block dimension does not match the prior");
    if (sample_capacity < prior.dim())
      throw recsp::Error(recsp::ErrorCode::invalid_argument, "sample buffer too small");
    auto part = recsp::build_partition(prior, block.header.counts);
    auto z = recsp::decode(prior, part, block.code, block.header.base_seed);
    std::copy(z.begin(), z.end(), sample);
    if (dim_out) *dim_out = static_cast<uint32_t>(prior.dim());
  });
}

recsp_status recsp_zipf_fit(const uint64_t* indices, size_t count, double* zeta_out) {
  if (!indices || !zeta_out) return fail_null("recsp_zipf_fit");
  return guarded([&] { *zeta_out = recsp::fit_zeta(std::span(indices, count)).zeta(); });
}

recsp_status recsp_zipf_nll_bits(double zeta, uint64_t index, double* out) {
  if (!out) return fail_null("recsp_zipf_nll_bits");
  return guarded([&] { *out = recsp::ZipfModel::from_zeta(zeta).nll_bits(index); });
}

recsp_status recsp_zipf_entropy_bits(double zeta, double* out) {
  if (!out) return fail_null("recsp_zipf_entropy_bits");
  return guarded([&] { *out = recsp::ZipfModel::from_zeta(zeta).entropy_bits(); });
}

recsp_status recsp_epsilon_cost(const recsp_task* task, uint64_t total_bins, uint64_t n_mc,
                                uint64_t seed, double* value, double* standard_error) {
  if (!task || !value) return fail_null("recsp_epsilon_cost");
  return guarded([&] {
    recsp::McEstimate est = recsp::epsilon_cost(task->task, total_bins, n_mc, seed);
    *value = est.value;
    if (standard_error) *standard_error = est.stderr_;
  });
}

recsp_status recsp_codelength_bound(const recsp_task* task, uint64_t total_bins,
                                    double epsilon_hat, double* bound_bits, double* gaussian_cap) {
  if (!task || !bound_bits) return fail_null("recsp_codelength_bound");
  return guarded([&] {
    recsp::BoundReport rep = recsp::codelength_bound(task->task, total_bins, epsilon_hat);
    *bound_bits = rep.codelength_bound_bits;
    if (gaussian_cap)
      *gaussian_cap = rep.epsilon_gaussian_cap.value_or(std::nan(""));
  });
}

recsp_status recsp_tv_bounds(const recsp_task* task, double t, uint64_t n_mc, uint64_t seed,
                             double* upper, double* lower, double* tail_upper,
                             double* tail_lower) {
  if (!task || !upper || !lower) return fail_null("recsp_tv_bounds");
  return guarded([&] {
    recsp::TvBounds b = recsp::tv_bounds(task->task, t, n_mc, seed);
    *upper = b.upper;
    *lower = b.lower;
    if (tail_upper) *tail_upper = b.tail_upper;
    if (tail_lower) *tail_lower = b.tail_lower;
  });
}

recsp_status recsp_mmd_rbf(const double* a, size_t a_count, const double* b, size_t b_count,
                           uint32_t dim, double bandwidth, double* mmd2, double* bandwidth_used) {
  if (!a || !b || !mmd2) return fail_null("recsp_mmd_rbf");
  return guarded([&] {
    if (dim == 0)
      throw recsp::Error(recsp::ErrorCode::invalid_argument, "dimension must be positive");
    auto rows_a = rows_from_flat(a, a_count, dim);
    auto rows_b = rows_from_flat(b, b_count, dim);
    recsp::MmdOptions opts;
    if (bandwidth > 0.0) opts.bandwidth = bandwidth;
    recsp::MmdResult res = recsp::mmd_rbf(rows_a, rows_b, opts);
    *mmd2 = res.mmd2;
    if (bandwidth_used) *bandwidth_used = res.bandwidth;
  });
}

recsp_status recsp_gen_tasks_json(uint64_t count, uint32_t dim, uint64_t seed, char** json_out) {
  if (!json_out) return fail_null("recsp_gen_tasks_json");
  return guarded([&] {
    auto tasks = recsp::gen_tasks(count, dim, seed);
    *json_out = dup_string(recsp::tasks_to_json(tasks, dim, seed));
  });
}

recsp_status recsp_sweep_pfr(const char* tasks_json, const char* config_json, char** csv_out,
                             char** summary_json_out) {
  if (!tasks_json) return fail_null("recsp_sweep_pfr");
  return guarded([&] {
    auto tasks = recsp::tasks_from_json(tasks_json);
    recsp::PfrSweepConfig cfg;
    if (config_json && *config_json) {
      auto j = nlohmann::json::parse(config_json, nullptr, false);
      if (j.is_discarded())
        throw recsp::Error(recsp::ErrorCode::parse_error, "bad sweep config JSON");
      cfg.repeats = j.value("repeats", cfg.repeats);
      cfg.step_ceiling = j.value("step_ceiling", cfg.step_ceiling);
      cfg.threads = j.value("threads", cfg.threads);
      cfg.master_seed = j.value("master_seed", cfg.master_seed);
    }
    auto records = recsp::run_pfr_sweep(tasks, cfg);
    if (csv_out) *csv_out = dup_string(recsp::pfr_records_to_csv(records));
    if (summary_json_out) *summary_json_out = dup_string(recsp::pfr_summary_json(records));
  });
}

recsp_status recsp_sweep_orc(const char* tasks_json, const char* config_json, char** csv_out,
                             char** summary_json_out) {
  if (!tasks_json) return fail_null("recsp_sweep_orc");
  return guarded([&] {
    auto tasks = recsp::tasks_from_json(tasks_json);
    recsp::OrcSweepConfig cfg;
    if (config_json && *config_json) {
      auto j = nlohmann::json::parse(config_json, nullptr, false);
      if (j.is_discarded())
        throw recsp::Error(recsp::ErrorCode::parse_error, "bad sweep config JSON");
      if (j.contains("sample_sizes"))
        cfg.sample_sizes = j["sample_sizes"].get<std::vector<uint64_t>>();
      cfg.repeats = j.value("repeats", cfg.repeats);
      cfg.threads = j.value("threads", cfg.threads);
      cfg.master_seed = j.value("master_seed", cfg.master_seed);
    }
    auto records = recsp::run_orc_sweep(tasks, cfg);
    if (csv_out) *csv_out = dup_string(recsp::orc_records_to_csv(records));
    if (summary_json_out) *summary_json_out = dup_string(recsp::orc_summary_json(records));
  });
}

}  // extern "C"
