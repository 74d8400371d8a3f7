#include "dhymon/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

#include "dhymon/trace_io.hpp"

namespace dhymon {

using nlohmann::json;

SweepSpec load_sweep_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep spec: " + path);
  json j = json::parse(in);
  SweepSpec spec;
  if (j.contains("n_nodes")) j.at("n_nodes").get_to(spec.n_nodes);
  if (j.contains("speed")) j.at("speed").get_to(spec.speed);
  if (j.contains("timeout_ms")) j.at("timeout_ms").get_to(spec.timeout_ms);
  if (j.contains("roots")) j.at("roots").get_to(spec.roots);
  if (j.contains("cycles")) j.at("cycles").get_to(spec.cycles);
  if (j.contains("base_seed")) j.at("base_seed").get_to(spec.base_seed);
  if (j.contains("defaults")) j.at("defaults").get_to(spec.defaults);
  if (spec.cycles < 1) throw std::invalid_argument("cycles must be >= 1");
  if (spec.n_nodes.empty() || spec.speed.empty() || spec.timeout_ms.empty() ||
      spec.roots.empty()) {
    throw std::invalid_argument("sweep lists must be non-empty");
  }
  return spec;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t combo_index,
                       std::uint64_t cycle_index) {
  return splitmix64(splitmix64(base_seed ^ (combo_index * 0x632be59bd9b4e019ull)) ^
                    (cycle_index * 0xd6e8feb86659fd93ull));
}

std::vector<SweepCombo> combinations(const SweepSpec& spec) {
  std::vector<SweepCombo> out;
  // roots varies fastest so paired single/multi-root combos share seeds.
  for (std::uint32_t n : spec.n_nodes) {
    for (double s : spec.speed) {
      for (double t : spec.timeout_ms) {
        for (std::uint32_t r : spec.roots) {
          out.push_back(SweepCombo{n, s, t, r});
        }
      }
    }
  }
  return out;
}

SimConfig config_for(const SweepSpec& spec, const SweepCombo& combo,
                     std::uint64_t combo_index, std::uint64_t cycle_index) {
  SimConfig cfg = spec.defaults;
  cfg.n_nodes = combo.n_nodes;
  cfg.area_side = 0.0;  // derived from n_nodes via the density rule
  cfg.speed = combo.speed;
  cfg.timeout_ms = combo.timeout_ms;
  cfg.roots = combo.roots;
  const std::uint64_t pair_index = combo_index / spec.roots.size();
  cfg.seed = run_seed(spec.base_seed, pair_index, cycle_index);
  return cfg;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned jobs) {
  const auto combos = combinations(spec);
  const std::uint64_t total = combos.size() * spec.cycles;
  SweepResult result;
  result.rows.resize(total);

  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::uint64_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::uint64_t combo_index = idx / spec.cycles;
      const std::uint64_t cycle = idx % spec.cycles;
      SimConfig cfg = config_for(spec, combos[combo_index], combo_index, cycle);
      Trace trace = run(cfg);
      result.rows[idx] = analyze(trace, cycle);
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return result;
}

std::string results_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "cycle,n_nodes,area_side,speed,timeout_ms,roots,seed,"
         "accuracy,joint_accuracy,convergence_ms,tree_depth,converged,"
         "route_sent,route_received\n";
  for (const RunRecord& r : result.rows) {
    std::string acc, conv, depth, convd;
    for (std::size_t i = 0; i < r.per_root.size(); ++i) {
      const PerRootRecord& pr = r.per_root[i];
      const char* sep = i == 0 ? "" : ";";
      acc += sep + fmt(pr.accuracy);
      conv += sep + (pr.convergence_ms ? fmt(*pr.convergence_ms) : std::string("-"));
      depth += sep + (pr.tree_depth ? std::to_string(*pr.tree_depth) : std::string("-"));
      convd += sep + std::string(pr.converged ? "1" : "0");
    }
    out << r.cycle << ',' << r.config.n_nodes << ',' << fmt(r.config.area_side)
        << ',' << fmt(r.config.speed) << ',' << fmt(r.config.timeout_ms) << ','
        << r.config.roots << ',' << r.config.seed << ',' << acc << ','
        << fmt(r.joint_accuracy) << ',' << conv << ',' << depth << ','
        << convd << ',' << r.route_msgs_sent << ',' << r.route_msgs_received
        << '\n';
  }
  return out.str();
}

std::string summary_csv(const SweepSpec& spec, const SweepResult& result) {
  const auto combos = combinations(spec);
  std::ostringstream out;
  out << "n_nodes,area_side,speed,timeout_ms,roots,cycles,converged_ratio,"
         "accuracy_mean,joint_accuracy_mean,"
         "convergence_mean,convergence_min,convergence_max,"
         "depth_mean,depth_min,depth_max,"
         "route_sent_mean,route_received_mean\n";
  for (std::size_t c = 0; c < combos.size(); ++c) {
    double acc_sum = 0.0, joint_sum = 0.0;
    std::uint64_t acc_n = 0;
    double conv_sum = 0.0, conv_min = std::numeric_limits<double>::infinity(),
           conv_max = 0.0;
    std::uint64_t conv_n = 0;
    double depth_sum = 0.0;
    std::uint64_t depth_n = 0;
    std::uint32_t depth_min = std::numeric_limits<std::uint32_t>::max(),
                  depth_max = 0;
    double sent_sum = 0.0, recv_sum = 0.0;
    std::uint64_t converged = 0, rounds = 0;
    double area = 0.0;
    for (std::uint64_t cy = 0; cy < spec.cycles; ++cy) {
      const RunRecord& r = result.rows[c * spec.cycles + cy];
      area = r.config.area_side;
      joint_sum += r.joint_accuracy;
      sent_sum += static_cast<double>(r.route_msgs_sent);
      recv_sum += static_cast<double>(r.route_msgs_received);
      for (const PerRootRecord& pr : r.per_root) {
        ++rounds;
        acc_sum += pr.accuracy;
        ++acc_n;
        if (pr.converged) ++converged;
        if (pr.convergence_ms) {
          conv_sum += *pr.convergence_ms;
          conv_min = std::min(conv_min, *pr.convergence_ms);
          conv_max = std::max(conv_max, *pr.convergence_ms);
          ++conv_n;
        }
        if (pr.tree_depth) {
          depth_sum += static_cast<double>(*pr.tree_depth);
          depth_min = std::min(depth_min, *pr.tree_depth);
          depth_max = std::max(depth_max, *pr.tree_depth);
          ++depth_n;
        }
      }
    }
    const double cycles = static_cast<double>(spec.cycles);
    out << combos[c].n_nodes << ',' << fmt(area) << ',' << fmt(combos[c].speed)
        << ',' << fmt(combos[c].timeout_ms) << ',' << combos[c].roots << ','
        << spec.cycles << ','
        << fmt(rounds ? static_cast<double>(converged) / rounds : 0.0) << ','
        << fmt(acc_n ? acc_sum / acc_n : 0.0) << ',' << fmt(joint_sum / cycles)
        << ',' << (conv_n ? fmt(conv_sum / conv_n) : "-") << ','
        << (conv_n ? fmt(conv_min) : "-") << ','
        << (conv_n ? fmt(conv_max) : "-") << ','
        << (depth_n ? fmt(depth_sum / depth_n) : "-") << ','
        << (depth_n ? std::to_string(depth_min) : "-") << ','
        << (depth_n ? std::to_string(depth_max) : "-") << ','
        << fmt(sent_sum / cycles) << ',' << fmt(recv_sum / cycles) << '\n';
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << contents;
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

}  // namespace dhymon
