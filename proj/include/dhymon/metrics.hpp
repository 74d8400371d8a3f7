#ifndef DHYMON_METRICS_HPP
#define DHYMON_METRICS_HPP

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dhymon/netsim.hpp"

namespace dhymon {

enum class CoverageClass { NonCovered, PartiallyCovered, FullyCovered };

const char* to_string(CoverageClass c);

// Trace-derived three-way coverage classification. A node is fully covered
// when it accepted the query, sent its aggregate and saw it acknowledged.
// The root counts as fully covered iff it produced a verdict.
std::map<NodeId, CoverageClass> classify(const Trace& trace,
                                         const ProcessId& process);

// The root's verdict, if the round converged.
std::optional<Aggregate> verdict_of(const Trace& trace,
                                    const ProcessId& process);

// |covered set inside the root's verdict| / n; 0 when non-convergent.
double root_accuracy(const Trace& trace, const ProcessId& process,
                     std::uint32_t n);

// |union of the per-root covered sets| / n.
double joint_accuracy(const std::vector<std::set<NodeId>>& covered_sets,
                      std::uint32_t n);

// Verdict time minus monitoring start; absent when non-convergent.
std::optional<double> convergence_time(const Trace& trace,
                                       const ProcessId& process);

// Deepest VHT level folded into the root's verdict; absent when non-convergent.
std::optional<std::uint32_t> tree_depth(const Trace& trace,
                                        const ProcessId& process);

// ROUTE payloads dispatched / delivered across the whole run.
struct RoutingUsage {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
};
RoutingUsage routing_usage(const Trace& trace);

// One result row per cycle, mirroring the experiment tables.
struct PerRootRecord {
  NodeId root;
  bool converged = false;
  std::optional<double> convergence_ms;
  double accuracy = 0.0;
  std::optional<std::uint32_t> tree_depth;
  std::set<NodeId> covered;
};

struct RunRecord {
  std::uint64_t cycle = 0;
  SimConfig config;
  std::vector<PerRootRecord> per_root;
  double joint_accuracy = 0.0;
  std::uint64_t route_msgs_sent = 0;
  std::uint64_t route_msgs_received = 0;
};

RunRecord analyze(const Trace& trace, std::uint64_t cycle = 0);

}  // namespace dhymon

#endif  // DHYMON_METRICS_HPP
