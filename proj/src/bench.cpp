#include "bench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>
#include <functional>
#include <thread>

#include "diagnostics.hpp"
#include "index_codec.hpp"
#include "json.hpp"
#include "streams.hpp"

namespace recsp {

namespace {

constexpr uint64_t kTaskGenTag = 0x544f59474e5351ull;

uint64_t cell_seed(uint64_t master, uint64_t task_id, uint64_t repeat) {
  return mix64(mix64(master ^ (task_id * 0x9E3779B97F4A7C15ull)) ^ repeat);
}

void parallel_for(size_t n, uint32_t threads, const std::function<void(size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
  };
  std::vector<std::thread> pool;
  uint32_t spawn = std::min<uint32_t>(threads, static_cast<uint32_t>(n));
  pool.reserve(spawn);
  for (uint32_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::string layout_string(const std::vector<uint32_t>& counts) {
  std::string s;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(counts[i]);
  }
  return s;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

struct Quartiles {
  double mean = 0.0, q1 = 0.0, q3 = 0.0;
  size_t n = 0;
};

Quartiles quartiles(std::vector<double> v) {
  Quartiles q;
  q.n = v.size();
  if (v.empty()) return q;
  double s = 0.0;
  for (double x : v) s += x;
  q.mean = s / static_cast<double>(v.size());
  std::sort(v.begin(), v.end());
  q.q1 = v[v.size() / 4];
  q.q3 = v[(3 * v.size()) / 4];
  return q;
}

// Fits zeta across the local indices of one (task, algorithm) group and
// fills the codelength fields of its records.
void fill_codelengths(std::vector<RunRecord*>& group) {
  if (group.empty()) return;
  std::vector<uint64_t> indices;
  indices.reserve(group.size());
  for (const RunRecord* r : group) indices.push_back(r->local_index);
  ZipfModel model = fit_zeta(indices);
  for (RunRecord* r : group) {
    double bin_bits = 0.0;
    for (uint32_t c : r->j_layout) bin_bits += std::log2(static_cast<double>(c));
    r->bin_bits = bin_bits;
    r->index_nll_bits = model.nll_bits(r->local_index);
    r->code_bits = r->bin_bits + r->index_nll_bits;
    r->zeta = model.zeta();
  }
}

std::vector<std::vector<double>> standardized_reference(const ToyTaskSpec& spec, uint32_t count,
                                                        uint64_t seed) {
  // Direct target samples standardized by the target's own moments are
  // exactly standard normal draws.
  Splitmix64 rng(mix64(seed ^ 0x5245464d4d44ull));
  std::vector<std::vector<double>> out(count, std::vector<double>(spec.task.dim()));
  for (auto& p : out)
    for (auto& v : p) v = standard_normal_quantile(rng.uniform_open());
  return out;
}

}  // namespace

std::vector<ToyTaskSpec> gen_tasks(uint64_t count, uint32_t dim, uint64_t seed) {
  if (count == 0 || dim == 0)
    throw Error(ErrorCode::invalid_argument, "need at least one task and one dimension");
  Splitmix64 rng(mix64(seed ^ kTaskGenTag));
  std::vector<ToyTaskSpec> tasks;
  tasks.reserve(count);
  for (uint64_t id = 0; id < count; ++id) {
    ToyTaskSpec spec;
    spec.id = id;
    spec.sigma.resize(dim);
    spec.rho.resize(dim);
    spec.x.resize(dim);
    spec.mi_bits.resize(dim);
    std::vector<Dim1Law> q_dims, p_dims;
    for (uint32_t d = 0; d < dim; ++d) {
      spec.sigma[d] = rng.uniform_open();
      spec.rho[d] = rng.uniform_open();
      double prior_var = spec.sigma[d] * spec.sigma[d] + spec.rho[d] * spec.rho[d];
      spec.x[d] = spec.sigma[d] * standard_normal_quantile(rng.uniform_open());
      spec.mi_bits[d] = 0.5 * std::log2(prior_var / (spec.rho[d] * spec.rho[d]));
      q_dims.push_back(Dim1Law::gaussian(spec.x[d], spec.rho[d]));
      p_dims.push_back(Dim1Law::gaussian(0.0, std::sqrt(prior_var)));
    }
    spec.task = RecTask(FactorizedDistribution(std::move(q_dims)),
                        FactorizedDistribution(std::move(p_dims)));
    spec.kl_bits_total = kl_bits(spec.task);
    Divergence dv = renyi_inf_bits(spec.task);
    spec.dinf_bits = dv.bits;  // always finite: rho < sqrt(sigma^2 + rho^2)
    tasks.push_back(std::move(spec));
  }
  return tasks;
}

std::string tasks_to_json(const std::vector<ToyTaskSpec>& tasks, uint32_t dim, uint64_t seed) {
  nlohmann::ordered_json root;
  root["version"] = 1;
  root["dim"] = dim;
  root["seed"] = seed;
  root["count"] = tasks.size();
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ToyTaskSpec& t : tasks) {
    nlohmann::ordered_json j;
    j["id"] = t.id;
    j["sigma"] = t.sigma;
    j["rho"] = t.rho;
    j["x"] = t.x;
    j["mi_bits"] = t.mi_bits;
    j["kl_bits"] = t.kl_bits_total;
    j["dinf_bits"] = t.dinf_bits;
    j["target"] = nlohmann::ordered_json::parse(distribution_to_json(t.task.target));
    j["prior"] = nlohmann::ordered_json::parse(distribution_to_json(t.task.prior));
    arr.push_back(std::move(j));
  }
  root["tasks"] = std::move(arr);
  return root.dump(2);
}

std::vector<ToyTaskSpec> tasks_from_json(const std::string& json) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("bad tasks JSON: ") + e.what());
  }
  if (!root.contains("tasks") || !root["tasks"].is_array())
    throw Error(ErrorCode::parse_error, "tasks JSON needs a tasks array");
  std::vector<ToyTaskSpec> tasks;
  for (const auto& j : root["tasks"]) {
    ToyTaskSpec spec;
    spec.id = j.at("id").get<uint64_t>();
    spec.sigma = j.at("sigma").get<std::vector<double>>();
    spec.rho = j.at("rho").get<std::vector<double>>();
    spec.x = j.at("x").get<std::vector<double>>();
    spec.mi_bits = j.at("mi_bits").get<std::vector<double>>();
    spec.task = RecTask(distribution_from_json(j.at("target").dump()),
                        distribution_from_json(j.at("prior").dump()));
    spec.kl_bits_total = kl_bits(spec.task);
    spec.dinf_bits = renyi_inf_bits(spec.task).bits;
    tasks.push_back(std::move(spec));
  }
  return tasks;
}

GridPartition default_partition(const ToyTaskSpec& spec) {
  auto budget = static_cast<uint32_t>(std::max(0.0, std::floor(spec.kl_bits_total)));
  auto counts = allocate_intervals(spec.mi_bits, budget);
  return build_partition(spec.task.prior, counts);
}

std::vector<RunRecord> run_pfr_sweep(const std::vector<ToyTaskSpec>& tasks,
                                     const PfrSweepConfig& cfg) {
  if (tasks.empty()) throw Error(ErrorCode::invalid_argument, "no tasks");
  if (cfg.repeats == 0) throw Error(ErrorCode::invalid_argument, "repeats must be positive");

  const size_t cells = tasks.size() * cfg.repeats;
  std::vector<RunRecord> records(2 * cells);
  std::vector<GridPartition> parts(tasks.size());
  std::vector<double> heuristic(tasks.size());
  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    parts[ti] = default_partition(tasks[ti]);
    heuristic[ti] = heuristic_kl_bits(tasks[ti].task, parts[ti], 4096);
  }

  parallel_for(cells, cfg.threads, [&](size_t cell) {
    size_t ti = cell / cfg.repeats;
    uint64_t repeat = cell % cfg.repeats;
    const ToyTaskSpec& spec = tasks[ti];
    uint64_t seed = cell_seed(cfg.master_seed, spec.id, repeat);

    auto fill_common = [&](RunRecord& r, const EncodeReport& rep, const char* alg,
                           const std::vector<uint32_t>& layout, double dt) {
      r.task_id = spec.id;
      r.algorithm = alg;
      r.j_layout = layout;
      r.repeat_index = repeat;
      r.seed = seed;
      r.steps = rep.steps;
      r.censored = rep.censored;
      r.bin = rep.code.bin;
      r.local_index = rep.code.local_index;
      r.tau_star = rep.tau_star;
      r.kl_bits = spec.kl_bits_total;
      r.dinf_bits = spec.dinf_bits;
      r.heuristic_kl_bits = heuristic[ti];
      r.sample = rep.sample;
      r.wall_time_s = dt;
    };

    double t0 = now_seconds();
    EncodeReport pfr = encode_pfr(spec.task, seed, cfg.step_ceiling);
    double t1 = now_seconds();
    EncodeReport sp = encode_sp_pfr(spec.task, parts[ti], seed, PiChoice::exact_sup,
                                    cfg.step_ceiling);
    double t2 = now_seconds();

    std::vector<uint32_t> trivial(spec.task.dim(), 1);
    fill_common(records[cell], pfr, "pfr", trivial, t1 - t0);
    fill_common(records[cells + cell], sp, "sp-pfr", parts[ti].counts, t2 - t1);
  });

  // Zipf codelengths per (task, algorithm) across repeats.
  for (size_t half = 0; half < 2; ++half) {
    for (size_t ti = 0; ti < tasks.size(); ++ti) {
      std::vector<RunRecord*> group;
      for (uint64_t rep = 0; rep < cfg.repeats; ++rep)
        group.push_back(&records[half * cells + ti * cfg.repeats + rep]);
      fill_codelengths(group);
    }
  }
  return records;
}

std::vector<RunRecord> run_orc_sweep(const std::vector<ToyTaskSpec>& tasks,
                                     const OrcSweepConfig& cfg) {
  if (tasks.empty()) throw Error(ErrorCode::invalid_argument, "no tasks");
  if (cfg.repeats < 2) throw Error(ErrorCode::invalid_argument, "need at least two repeats");
  std::vector<uint64_t> sizes = cfg.sample_sizes;
  if (sizes.empty())
    for (unsigned p = 1; p <= 10; ++p) sizes.push_back(1ull << p);

  const size_t cells = tasks.size() * sizes.size();
  std::vector<RunRecord> records(2 * cells);
  std::vector<GridPartition> parts(tasks.size());
  std::vector<double> heuristic(tasks.size());
  for (size_t ti = 0; ti < tasks.size(); ++ti) {
    parts[ti] = default_partition(tasks[ti]);
    heuristic[ti] = heuristic_kl_bits(tasks[ti].task, parts[ti], 4096);
  }

  parallel_for(cells, cfg.threads, [&](size_t cell) {
    size_t ti = cell / sizes.size();
    uint64_t n_candidates = sizes[cell % sizes.size()];
    const ToyTaskSpec& spec = tasks[ti];
    // Per-(task, N) streams, shared between the two algorithms so each cell
    // is a paired comparison while cells stay independent.
    uint64_t stream_base = mix64(cell_seed(cfg.master_seed, spec.id, 0) ^ n_candidates);
    auto reference = standardized_reference(spec, cfg.repeats, stream_base);

    auto run_side = [&](bool partitioned) -> RunRecord {
      RunRecord r;
      r.task_id = spec.id;
      r.algorithm = partitioned ? "sp-orc" : "orc";
      r.j_layout = partitioned ? parts[ti].counts : std::vector<uint32_t>(spec.task.dim(), 1);
      r.n_candidates = n_candidates;
      r.repeats = cfg.repeats;
      r.kl_bits = spec.kl_bits_total;
      r.dinf_bits = spec.dinf_bits;
      r.heuristic_kl_bits = heuristic[ti];

      double t0 = now_seconds();
      std::vector<std::vector<double>> encoded;
      std::vector<uint64_t> indices;
      encoded.reserve(cfg.repeats);
      double steps_total = 0.0;
      for (uint32_t rep = 0; rep < cfg.repeats; ++rep) {
        uint64_t seed = cell_seed(stream_base, spec.id, 1 + rep);
        EncodeReport er = partitioned ? encode_sp_orc(spec.task, parts[ti], n_candidates, seed)
                                      : encode_orc(spec.task, n_candidates, seed);
        encoded.push_back(er.sample);
        indices.push_back(er.code.local_index);
        steps_total += static_cast<double>(er.steps);
      }
      r.mean_steps = steps_total / cfg.repeats;
      r.steps = n_candidates;

      auto standardized = standardize_by_target(spec.task.target, encoded);
      r.mmd2 = mmd_rbf(standardized, reference).mmd2;

      ZipfModel model = fit_zeta(indices);
      r.zeta = model.zeta();
      double bin_bits = 0.0;
      for (uint32_t c : r.j_layout) bin_bits += std::log2(static_cast<double>(c));
      double nll = 0.0;
      for (uint64_t idx : indices) nll += model.nll_bits(idx);
      r.bin_bits = bin_bits;
      r.index_nll_bits = nll / static_cast<double>(indices.size());
      r.code_bits = r.bin_bits + r.index_nll_bits;
      r.wall_time_s = now_seconds() - t0;
      return r;
    };

    records[cell] = run_side(false);
    records[cells + cell] = run_side(true);
  });
  return records;
}

std::string pfr_records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "task_id,algorithm,j_layout,repeat,seed,steps,censored,bin,local_index,tau_star,"
         "bin_bits,index_nll_bits,code_bits,zeta,kl_bits,dinf_bits,heuristic_kl_bits,"
         "wall_time_s\n";
  out.precision(17);
  for (const RunRecord& r : records) {
    out << r.task_id << ',' << r.algorithm << ',' << layout_string(r.j_layout) << ','
        << r.repeat_index << ',' << r.seed << ',' << r.steps << ',' << (r.censored ? 1 : 0) << ','
        << r.bin << ',' << r.local_index << ',' << r.tau_star << ',' << r.bin_bits << ','
        << r.index_nll_bits << ',' << r.code_bits << ',' << r.zeta << ',' << r.kl_bits << ','
        << r.dinf_bits << ',' << r.heuristic_kl_bits << ',' << r.wall_time_s << '\n';
  }
  return out.str();
}

std::string orc_records_to_csv(const std::vector<RunRecord>& records) {
  std::ostringstream out;
  out << "task_id,algorithm,j_layout,n_candidates,repeats,mean_steps,mmd2,bin_bits,"
         "index_nll_bits,code_bits,zeta,kl_bits,heuristic_kl_bits,wall_time_s\n";
  out.precision(17);
  for (const RunRecord& r : records) {
    out << r.task_id << ',' << r.algorithm << ',' << layout_string(r.j_layout) << ','
        << r.n_candidates << ',' << r.repeats << ',' << r.mean_steps << ','
        << (r.mmd2 ? *r.mmd2 : 0.0) << ',' << r.bin_bits << ',' << r.index_nll_bits << ','
        << r.code_bits << ',' << r.zeta << ',' << r.kl_bits << ',' << r.heuristic_kl_bits << ','
        << r.wall_time_s << '\n';
  }
  return out.str();
}

std::string pfr_summary_json(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, int>, std::vector<double>> steps_by_dinf, code_by_kl;
  for (const RunRecord& r : records) {
    steps_by_dinf[{r.algorithm, static_cast<int>(std::floor(r.dinf_bits))}].push_back(
        static_cast<double>(r.steps));
    code_by_kl[{r.algorithm, static_cast<int>(std::floor(r.kl_bits))}].push_back(r.code_bits);
  }
  nlohmann::ordered_json root;
  root["sweep"] = "pfr";
  auto emit = [](auto& buckets) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (auto& [key, values] : buckets) {
      Quartiles q = quartiles(values);
      nlohmann::ordered_json j;
      j["algorithm"] = key.first;
      j["bucket"] = key.second;
      j["n"] = q.n;
      j["mean"] = q.mean;
      j["q1"] = q.q1;
      j["q3"] = q.q3;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  root["steps_by_dinf_bucket"] = emit(steps_by_dinf);
  root["code_bits_by_kl_bucket"] = emit(code_by_kl);
  return root.dump(2);
}

std::string orc_summary_json(const std::vector<RunRecord>& records) {
  std::map<std::pair<std::string, uint64_t>, std::vector<double>> mmd_by_n;
  for (const RunRecord& r : records)
    if (r.mmd2) mmd_by_n[{r.algorithm, r.n_candidates}].push_back(*r.mmd2);
  nlohmann::ordered_json root;
  root["sweep"] = "orc";
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (auto& [key, values] : mmd_by_n) {
    Quartiles q = quartiles(values);
    nlohmann::ordered_json j;
    j["algorithm"] = key.first;
    j["n_candidates"] = key.second;
    j["n_cells"] = q.n;
    j["mean_mmd2"] = q.mean;
    j["q1"] = q.q1;
    j["q3"] = q.q3;
    arr.push_back(std::move(j));
  }
  root["mmd_by_n"] = arr;
  return root.dump(2);
}

}  // namespace recsp
