#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "dhymon/metrics.hpp"
#include "dhymon/netsim.hpp"
#include "dhymon/sweep.hpp"
#include "dhymon/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;

dhymon::SimConfig load_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j = json::parse(in);
  return j.get<dhymon::SimConfig>();
}

void print_record(const dhymon::RunRecord& rec) {
  std::cout << "n_nodes=" << rec.config.n_nodes
            << " area=" << rec.config.area_side
            << " speed=" << rec.config.speed
            << " timeout=" << rec.config.timeout_ms
            << " roots=" << rec.config.roots << " seed=" << rec.config.seed
            << "\n";
  for (const auto& pr : rec.per_root) {
    std::cout << "  root " << pr.root.value
              << ": converged=" << (pr.converged ? "yes" : "no")
              << " accuracy=" << pr.accuracy;
    if (pr.convergence_ms) std::cout << " convergence_ms=" << *pr.convergence_ms;
    if (pr.tree_depth) std::cout << " tree_depth=" << *pr.tree_depth;
    std::cout << "\n";
  }
  std::cout << "  joint_accuracy=" << rec.joint_accuracy
            << " route_sent=" << rec.route_msgs_sent
            << " route_received=" << rec.route_msgs_received << "\n";
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed) {
  dhymon::SimConfig cfg;
  if (!config_path.empty()) cfg = load_sim_config(config_path);
  if (seed) cfg.seed = *seed;
  dhymon::validate(cfg);
  dhymon::Trace trace = dhymon::run(cfg);
  dhymon::RunRecord rec = dhymon::analyze(trace);
  print_record(rec);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    dhymon::emit_trace(trace, (fs::path(out_dir) / "trace.jsonl").string());
    dhymon::SweepResult one;
    one.rows.push_back(rec);
    dhymon::write_file((fs::path(out_dir) / "run.csv").string(),
                       dhymon::results_csv(one));
    std::cout << "trace and metrics written to " << out_dir << "\n";
  }
  return kExitOk;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed,
              std::optional<std::uint64_t> cycles, unsigned jobs) {
  dhymon::SweepSpec spec = dhymon::load_sweep_spec(spec_path);
  if (seed) spec.base_seed = *seed;
  if (cycles) spec.cycles = *cycles;
  if (spec.cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  for (std::uint32_t n : spec.n_nodes) {
    dhymon::SimConfig probe = spec.defaults;
    probe.n_nodes = n;
    probe.area_side = 0.0;
    dhymon::validate(probe);
  }
  dhymon::SweepResult result = dhymon::run_sweep(spec, jobs);
  const std::uint64_t expected =
      dhymon::combinations(spec).size() * spec.cycles;
  if (result.rows.size() != expected) {
    std::cerr << "internal error: row count " << result.rows.size()
              << " != expected " << expected << "\n";
    return kExitIo;
  }
  fs::create_directories(out_dir);
  dhymon::write_file((fs::path(out_dir) / "results.csv").string(),
                     dhymon::results_csv(result));
  dhymon::write_file((fs::path(out_dir) / "summary.csv").string(),
                     dhymon::summary_csv(spec, result));
  std::cout << result.rows.size() << " rows written to " << out_dir << "\n";
  return kExitOk;
}

int cmd_analyze(const std::string& trace_path) {
  dhymon::Trace trace = dhymon::load_trace(trace_path);
  dhymon::RunRecord rec = dhymon::analyze(trace);
  print_record(rec);
  for (const dhymon::ProcessId& pid : trace.processes) {
    auto classes = dhymon::classify(trace, pid);
    std::uint32_t full = 0, partial = 0, non = 0;
    for (const auto& [node, c] : classes) {
      switch (c) {
        case dhymon::CoverageClass::FullyCovered: ++full; break;
        case dhymon::CoverageClass::PartiallyCovered: ++partial; break;
        case dhymon::CoverageClass::NonCovered: ++non; break;
      }
    }
    std::cout << "  root " << pid.root.value << " coverage classes: full="
              << full << " partial=" << partial << " non=" << non << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DHYMON hybrid gossip/tree monitoring simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, spec_path, trace_path;
  std::optional<std::uint64_t> seed, cycles;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

  auto* run_cmd = app.add_subcommand("run", "run a single configuration");
  run_cmd->add_option("--config", config_path, "JSON SimConfig file");
  run_cmd->add_option("--out", out_dir, "output directory (trace + metrics)");
  run_cmd->add_option("--seed", seed, "seed override");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep");
  sweep_cmd->add_option("--config", spec_path, "JSON SweepSpec file")
      ->required();
  sweep_cmd->add_option("--out", out_dir, "output directory")->required();
  sweep_cmd->add_option("--seed", seed, "base seed override");
  sweep_cmd->add_option("--cycles", cycles, "cycles per combination override");
  sweep_cmd->add_option("--jobs", jobs, "worker threads");

  auto* analyze_cmd =
      app.add_subcommand("analyze", "recompute metrics from a saved trace");
  analyze_cmd->add_option("--trace", trace_path, "trace.jsonl path")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, out_dir, seed);
    if (sweep_cmd->parsed()) {
      return cmd_sweep(spec_path, out_dir, seed, cycles, std::max(1u, jobs));
    }
    if (analyze_cmd->parsed()) return cmd_analyze(trace_path);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
