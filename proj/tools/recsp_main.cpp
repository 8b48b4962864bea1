// Command-line front end. Links the C API only; JSON/CSV shuffling happens
// here, all algorithm work happens behind recsp.h.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "recsp.h"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& msg) {
  std::cerr << "recsp: " << msg << "\n";
  std::exit(1);
}

void require_ok(recsp_status status, const std::string& context) {
  if (status != RECSP_OK)
    fail(context + ": " + recsp_status_name(status) + " (" + recsp_last_error() + ")");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  out << content;
}

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { recsp_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

// Accepts either {"target":...,"prior":...} or a generated tasks file plus
// an index into its tasks array.
std::pair<std::string, std::string> load_task_json(const std::string& path, uint64_t task_id) {
  json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded()) fail("bad JSON in " + path);
  if (root.contains("tasks")) {
    const auto& arr = root["tasks"];
    if (!arr.is_array() || task_id >= arr.size()) fail("task id out of range in " + path);
    return {arr[task_id]["target"].dump(), arr[task_id]["prior"].dump()};
  }
  if (root.contains("target") && root.contains("prior"))
    return {root["target"].dump(), root["prior"].dump()};
  fail(path + " holds neither a task object nor a tasks array");
}

std::string load_prior_json(const std::string& path, uint64_t task_id) {
  json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded()) fail("bad JSON in " + path);
  if (root.contains("tasks")) {
    const auto& arr = root["tasks"];
    if (!arr.is_array() || task_id >= arr.size()) fail("task id out of range in " + path);
    return arr[task_id]["prior"].dump();
  }
  if (root.contains("prior")) return root["prior"].dump();
  if (root.contains("dims")) return root.dump();
  fail(path + " holds no prior distribution");
}

struct TaskGuard {
  recsp_task* t = nullptr;
  ~TaskGuard() { recsp_task_destroy(t); }
};

struct PartitionGuard {
  recsp_partition* p = nullptr;
  ~PartitionGuard() { recsp_partition_destroy(p); }
};

void make_partition(const recsp_task* task, const std::vector<uint32_t>& counts,
                    std::optional<uint32_t> budget_bits, const std::vector<double>& mi_bits,
                    bool trivial, recsp_partition** out) {
  uint32_t dim = 0;
  require_ok(recsp_task_dim(task, &dim), "task dim");
  if (trivial) {
    std::vector<uint32_t> ones(dim, 1);
    require_ok(recsp_partition_build(task, ones.data(), dim, out), "partition build");
    return;
  }
  if (!counts.empty()) {
    if (counts.size() != dim) fail("--counts must list one value per dimension");
    require_ok(recsp_partition_build(task, counts.data(), dim, out), "partition build");
    return;
  }
  std::vector<double> mi = mi_bits;
  if (mi.empty()) {
    mi.resize(dim);
    require_ok(recsp_task_dimwise_kl_bits(task, mi.data(), dim), "dimwise kl");
  }
  if (mi.size() != dim) fail("mutual-information vector does not match the task dimension");
  uint32_t budget = 0;
  if (budget_bits) {
    budget = *budget_bits;
  } else {
    double kl = 0.0;
    require_ok(recsp_task_kl_bits(task, &kl), "kl");
    budget = kl > 0.0 ? static_cast<uint32_t>(kl) : 0;
  }
  require_ok(recsp_partition_allocate(task, mi.data(), dim, budget, out), "partition allocate");
}

std::string sweep_config(const std::string& config_path, uint64_t seed, uint32_t threads,
                         const std::vector<std::pair<std::string, uint64_t>>& overrides) {
  ordered_json cfg = ordered_json::object();
  if (!config_path.empty()) {
    cfg = ordered_json::parse(read_file(config_path), nullptr, false);
    if (cfg.is_discarded()) fail("bad config JSON in " + config_path);
  }
  cfg["master_seed"] = seed;
  cfg["threads"] = threads;
  for (const auto& [key, value] : overrides) cfg[key] = value;
  return cfg.dump();
}

int cmd_gen_tasks(uint64_t count, uint32_t dim, uint64_t seed, const std::string& out) {
  OwnedString js;
  require_ok(recsp_gen_tasks_json(count, dim, seed, &js.p), "gen-tasks");
  write_file(out, js.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relative entropy coding with space partitioning"};
  app.require_subcommand(1);

  // gen-tasks
  uint64_t gen_count = 200, seed = 1;
  uint32_t gen_dim = 5, threads = 1;
  std::string out_path = "-", config_path;
  auto* gen = app.add_subcommand("gen-tasks", "generate synthetic coding tasks");
  gen->add_option("--count", gen_count, "number of tasks");
  gen->add_option("--dim", gen_dim, "dimensions per task");
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--out", out_path, "output JSON path ('-' for stdout)");

  // encode
  std::string task_path, alg = "sp-pfr", report_path, pi_mode_str = "exact-sup";
  uint64_t task_id = 0, n_candidates = 0, max_steps = 0;
  std::vector<uint32_t> counts;
  std::optional<uint32_t> budget_bits;
  double zeta = 1.0;
  auto* enc = app.add_subcommand("encode", "encode one sample of a task");
  enc->add_option("--task", task_path, "task JSON (task object or tasks file)")->required();
  enc->add_option("--task-id", task_id, "index into a tasks file");
  enc->add_option("--alg", alg, "pfr | sp-pfr | orc | sp-orc");
  enc->add_option("--pi", pi_mode_str, "sp-pfr reweighting: exact-sup | target-mass");
  enc->add_option("--counts", counts, "explicit per-dimension interval counts");
  enc->add_option("--budget-bits", budget_bits, "partition bit budget (default floor(KL))");
  enc->add_option("--n-candidates", n_candidates, "candidate budget for orc/sp-orc");
  enc->add_option("--max-steps", max_steps, "step ceiling for the exact samplers (0 = none)");
  enc->add_option("--zeta", zeta, "zipf parameter stored in the block header");
  enc->add_option("--seed", seed, "shared base seed");
  enc->add_option("--out", out_path, "block output path")->required();
  enc->add_option("--report", report_path, "encode report JSON path");

  // decode
  std::string block_path, prior_path;
  auto* dec = app.add_subcommand("decode", "decode a serialized block");
  dec->add_option("--prior", prior_path, "prior JSON (distribution, task or tasks file)")
      ->required();
  dec->add_option("--task-id", task_id, "index into a tasks file");
  dec->add_option("--block", block_path, "block path")->required();
  dec->add_option("--out", out_path, "sample JSON path ('-' for stdout)");

  // sweep-pfr / sweep-orc
  std::string tasks_path, summary_path;
  uint64_t repeats = 0, step_ceiling = 0;
  std::vector<uint64_t> sample_sizes;
  auto* spfr = app.add_subcommand("sweep-pfr", "run PFR vs SP-PFR over a task set");
  spfr->add_option("--tasks", tasks_path, "tasks JSON from gen-tasks")->required();
  spfr->add_option("--config", config_path, "sweep config JSON");
  spfr->add_option("--repeats", repeats, "encodes per task (overrides config)");
  spfr->add_option("--step-ceiling", step_ceiling, "censoring step ceiling (overrides config)");
  spfr->add_option("--seed", seed, "master seed");
  spfr->add_option("--threads", threads, "worker threads");
  spfr->add_option("--out", out_path, "CSV output path")->required();
  spfr->add_option("--summary", summary_path, "summary JSON path");

  auto* sorc = app.add_subcommand("sweep-orc", "run ORC vs SP-ORC over a task set");
  sorc->add_option("--tasks", tasks_path, "tasks JSON from gen-tasks")->required();
  sorc->add_option("--config", config_path, "sweep config JSON");
  sorc->add_option("--repeats", repeats, "encodes per cell (overrides config)");
  sorc->add_option("--sample-sizes", sample_sizes, "candidate budgets (overrides config)");
  sorc->add_option("--seed", seed, "master seed");
  sorc->add_option("--threads", threads, "worker threads");
  sorc->add_option("--out", out_path, "CSV output path")->required();
  sorc->add_option("--summary", summary_path, "summary JSON path");

  // fit-zipf
  std::string indices_path;
  auto* fit = app.add_subcommand("fit-zipf", "fit the local-index model");
  fit->add_option("--indices", indices_path, "text file of positive integers")->required();
  fit->add_option("--out", out_path, "model JSON path ('-' for stdout)");

  // bounds
  std::optional<double> log2_j;
  uint64_t n_mc = 4096;
  std::vector<double> tv_t;
  auto* bounds = app.add_subcommand("bounds", "epsilon cost, codelength and TV bounds");
  bounds->add_option("--task", task_path, "task JSON")->required();
  bounds->add_option("--task-id", task_id, "index into a tasks file");
  bounds->add_option("--log2-j", log2_j, "log2 of the bin count (default floor(KL))");
  bounds->add_option("--n-mc", n_mc, "Monte Carlo draws");
  bounds->add_option("--tv-t", tv_t, "evaluate TV bounds at these t values");
  bounds->add_option("--seed", seed, "Monte Carlo seed");
  bounds->add_option("--out", out_path, "records JSON path ('-' for stdout)");

  // mmd
  std::string a_path, b_path;
  double bandwidth = 0.0;
  auto* mmd = app.add_subcommand("mmd", "two-sample MMD^2 between CSV point sets");
  mmd->add_option("--a", a_path, "first sample CSV (one point per row)")->required();
  mmd->add_option("--b", b_path, "second sample CSV")->required();
  mmd->add_option("--bandwidth", bandwidth, "RBF width (default: median heuristic)");
  mmd->add_option("--out", out_path, "result JSON path ('-' for stdout)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) return cmd_gen_tasks(gen_count, gen_dim, seed, out_path);

  if (enc->parsed()) {
    auto [target_js, prior_js] = load_task_json(task_path, task_id);
    TaskGuard task;
    require_ok(recsp_task_create(target_js.c_str(), prior_js.c_str(), &task.t), "task");
    uint32_t dim = 0;
    require_ok(recsp_task_dim(task.t, &dim), "task dim");

    bool trivial = (alg == "pfr" || alg == "orc");
    PartitionGuard part;
    make_partition(task.t, counts, budget_bits, {}, trivial, &part.p);

    recsp_report rep{};
    std::vector<double> sample(dim);
    if (alg == "pfr") {
      require_ok(recsp_encode_pfr(task.t, seed, max_steps, &rep, sample.data()), "encode");
    } else if (alg == "sp-pfr") {
      int pi = pi_mode_str == "target-mass" ? RECSP_PI_TARGET_MASS : RECSP_PI_EXACT_SUP;
      require_ok(recsp_encode_sp_pfr(task.t, part.p, pi, seed, max_steps, &rep, sample.data()),
                 "encode");
    } else if (alg == "orc" || alg == "sp-orc") {
      if (n_candidates == 0) fail("--n-candidates is required for orc/sp-orc");
      require_ok(alg == "orc"
                     ? recsp_encode_orc(task.t, n_candidates, seed, &rep, sample.data())
                     : recsp_encode_sp_orc(task.t, part.p, n_candidates, seed, &rep,
                                           sample.data()),
                 "encode");
    } else {
      fail("unknown algorithm '" + alg + "'");
    }

    uint8_t* bytes = nullptr;
    size_t len = 0;
    require_ok(recsp_block_write(part.p, rep.bin, rep.local_index, seed, zeta, &bytes, &len),
               "block write");
    std::ofstream blk(out_path, std::ios::binary);
    if (!blk) fail("cannot write " + out_path);
    blk.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(len));
    blk.close();
    recsp_buffer_free(bytes);

    std::vector<uint32_t> used_counts(dim);
    require_ok(recsp_partition_counts(part.p, used_counts.data(), dim), "partition counts");
    ordered_json report;
    report["algorithm"] = alg;
    report["seed"] = seed;
    report["counts"] = used_counts;
    report["bin"] = rep.bin;
    report["local_index"] = rep.local_index;
    report["steps"] = rep.steps;
    report["censored"] = rep.censored != 0;
    report["tau_star"] = rep.tau_star;
    report["kl_bits"] = rep.kl_bits;
    report["heuristic_kl_bits"] = rep.heuristic_kl_bits;
    report["zeta"] = zeta;
    report["block_bytes"] = len;
    report["sample"] = sample;
    if (!report_path.empty()) write_file(report_path, report.dump(2) + "\n");
    if (out_path != "-") std::cerr << "wrote " << len << "-byte block to " << out_path << "\n";
    return 0;
  }

  if (dec->parsed()) {
    std::string prior_js = load_prior_json(prior_path, task_id);
    std::string block = read_file(block_path);
    uint32_t dim = 0;
    std::vector<double> sample(1 << 16);
    require_ok(recsp_block_decode(prior_js.c_str(), reinterpret_cast<const uint8_t*>(block.data()),
                                  block.size(), sample.data(),
                                  static_cast<uint32_t>(sample.size()), &dim),
               "decode");
    sample.resize(dim);
    ordered_json out;
    out["sample"] = sample;
    write_file(out_path, out.dump() + "\n");
    return 0;
  }

  if (spfr->parsed() || sorc->parsed()) {
    std::string tasks_json = read_file(tasks_path);
    std::vector<std::pair<std::string, uint64_t>> overrides;
    if (repeats) overrides.emplace_back("repeats", repeats);
    if (spfr->parsed() && step_ceiling) overrides.emplace_back("step_ceiling", step_ceiling);
    std::string cfg = sweep_config(config_path, seed, threads, overrides);
    if (sorc->parsed() && !sample_sizes.empty()) {
      ordered_json j = ordered_json::parse(cfg);
      j["sample_sizes"] = sample_sizes;
      cfg = j.dump();
    }
    OwnedString csv, summary;
    require_ok(spfr->parsed() ? recsp_sweep_pfr(tasks_json.c_str(), cfg.c_str(), &csv.p, &summary.p)
                              : recsp_sweep_orc(tasks_json.c_str(), cfg.c_str(), &csv.p,
                                                &summary.p),
               "sweep");
    write_file(out_path, csv.str());
    if (!summary_path.empty()) write_file(summary_path, summary.str() + "\n");
    return 0;
  }

  if (fit->parsed()) {
    std::istringstream in(read_file(indices_path));
    std::vector<uint64_t> indices;
    uint64_t v;
    while (in >> v) indices.push_back(v);
    if (indices.empty()) fail("no indices in " + indices_path);
    double fitted = 0.0;
    require_ok(recsp_zipf_fit(indices.data(), indices.size(), &fitted), "fit");
    double entropy = 0.0, total_nll = 0.0;
    require_ok(recsp_zipf_entropy_bits(fitted, &entropy), "entropy");
    for (uint64_t idx : indices) {
      double nll = 0.0;
      require_ok(recsp_zipf_nll_bits(fitted, idx, &nll), "nll");
      total_nll += nll;
    }
    ordered_json out;
    out["zeta"] = fitted;
    out["count"] = indices.size();
    out["entropy_bits"] = entropy;
    out["mean_nll_bits"] = total_nll / static_cast<double>(indices.size());
    write_file(out_path, out.dump(2) + "\n");
    return 0;
  }

  if (bounds->parsed()) {
    auto [target_js, prior_js] = load_task_json(task_path, task_id);
    TaskGuard task;
    require_ok(recsp_task_create(target_js.c_str(), prior_js.c_str(), &task.t), "task");
    double kl = 0.0;
    require_ok(recsp_task_kl_bits(task.t, &kl), "kl");
    double lj = log2_j.value_or(std::floor(std::max(kl, 0.0)));
    auto total_bins = static_cast<uint64_t>(std::llround(std::exp2(lj)));
    if (total_bins == 0) total_bins = 1;

    double eps = 0.0, se = 0.0;
    require_ok(recsp_epsilon_cost(task.t, total_bins, n_mc, seed, &eps, &se), "epsilon");
    double bound = 0.0, cap = 0.0;
    require_ok(recsp_codelength_bound(task.t, total_bins, eps, &bound, &cap), "bound");

    ordered_json records = ordered_json::array();
    auto record = [&](const std::string& name, double value, double stderr_) {
      records.push_back(ordered_json{{"name", name},
                                     {"value", value},
                                     {"stderr", stderr_},
                                     {"n_mc", n_mc},
                                     {"seed", seed}});
    };
    record("kl_bits", kl, 0.0);
    record("log2_j", std::log2(static_cast<double>(total_bins)), 0.0);
    record("epsilon_cost_bits", eps, se);
    record("codelength_bound_bits", bound, se);
    if (!std::isnan(cap)) record("epsilon_gaussian_cap_bits", cap, 0.0);
    for (double t : tv_t) {
      double up = 0.0, lo = 0.0, tu = 0.0, tl = 0.0;
      require_ok(recsp_tv_bounds(task.t, t, n_mc, seed, &up, &lo, &tu, &tl), "tv");
      record("tv_upper_raw_t" + std::to_string(t), up, 0.0);
      record("tv_lower_raw_t" + std::to_string(t), lo, 0.0);
    }
    write_file(out_path, records.dump(2) + "\n");
    return 0;
  }

  if (mmd->parsed()) {
    auto load_points = [](const std::string& path, uint32_t& dim) {
      std::vector<double> flat;
      std::istringstream in(read_file(path));
      std::string line;
      dim = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        uint32_t d = 0;
        while (std::getline(row, cell, ',')) {
          flat.push_back(std::stod(cell));
          ++d;
        }
        if (dim == 0) dim = d;
        if (d != dim) fail("ragged CSV row in " + path);
      }
      return flat;
    };
    uint32_t dim_a = 0, dim_b = 0;
    std::vector<double> a = load_points(a_path, dim_a);
    std::vector<double> b = load_points(b_path, dim_b);
    if (dim_a != dim_b || dim_a == 0) fail("sample dimensions differ or are empty");
    double mmd2 = 0.0, used = 0.0;
    require_ok(recsp_mmd_rbf(a.data(), a.size() / dim_a, b.data(), b.size() / dim_b, dim_a,
                             bandwidth, &mmd2, &used),
               "mmd");
    ordered_json out;
    out["mmd2"] = mmd2;
    out["bandwidth"] = used;
    out["n_a"] = a.size() / dim_a;
    out["n_b"] = b.size() / dim_b;
    write_file(out_path, out.dump() + "\n");
    return 0;
  }

  return 0;
}
