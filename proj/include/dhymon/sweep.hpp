#ifndef DHYMON_SWEEP_HPP
#define DHYMON_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dhymon/metrics.hpp"

namespace dhymon {

// Cross-product experiment description. Each (combination, cycle) pair runs
// with seed = mix(base_seed, combination index, cycle index), so sweeps with
// shared base seeds give paired comparisons (e.g. 1 root vs 2 roots).
struct SweepSpec {
  std::vector<std::uint32_t> n_nodes = {20};
  std::vector<double> speed = {2.0};
  std::vector<double> timeout_ms = {200.0};
  std::vector<std::uint32_t> roots = {1};
  std::uint64_t cycles = 100;
  std::uint64_t base_seed = 1;
  SimConfig defaults;  // everything not swept (range, delays, loss, ...)
};

SweepSpec load_sweep_spec(const std::string& path);

std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t combo_index,
                       std::uint64_t cycle_index);

struct SweepCombo {
  std::uint32_t n_nodes;
  double speed;
  double timeout_ms;
  std::uint32_t roots;
};

std::vector<SweepCombo> combinations(const SweepSpec& spec);
SimConfig config_for(const SweepSpec& spec, const SweepCombo& combo,
                     std::uint64_t combo_index, std::uint64_t cycle_index);

struct SweepResult {
  std::vector<RunRecord> rows;  // ordered by (combination index, cycle index)
};

// Runs every (combination, cycle); `jobs` worker threads, result order is
// independent of scheduling.
SweepResult run_sweep(const SweepSpec& spec, unsigned jobs = 1);

std::string results_csv(const SweepResult& result);
std::string summary_csv(const SweepSpec& spec, const SweepResult& result);

void write_file(const std::string& path, const std::string& contents);

}  // namespace dhymon

#endif  // DHYMON_SWEEP_HPP
