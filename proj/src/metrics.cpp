#include "dhymon/metrics.hpp"

#include <algorithm>

namespace dhymon {

const char* to_string(CoverageClass c) {
  switch (c) {
    case CoverageClass::NonCovered: return "non_covered";
    case CoverageClass::PartiallyCovered: return "partially_covered";
    case CoverageClass::FullyCovered: return "fully_covered";
  }
  return "?";
}

std::optional<Aggregate> verdict_of(const Trace& trace,
                                    const ProcessId& process) {
  for (const TraceRecord& r : trace.records) {
    if (r.kind == TraceKind::Verdict && r.process && *r.process == process) {
      return r.verdict;
    }
  }
  return std::nullopt;
}

std::map<NodeId, CoverageClass> classify(const Trace& trace,
                                         const ProcessId& process) {
  std::set<NodeId> accepted;
  std::set<NodeId> sent_aggregate;
  std::set<NodeId> acked;
  bool has_verdict = false;
  for (const TraceRecord& r : trace.records) {
    switch (r.kind) {
      case TraceKind::Transition:
        if (r.process && *r.process == process &&
            r.phase_before == Phase::Initial && r.phase_after == Phase::Q1) {
          accepted.insert(NodeId{r.node});
        }
        break;
      case TraceKind::Send:
        if (r.payload && r.payload->type == PayloadType::AggregateMsg &&
            r.payload->process == process) {
          sent_aggregate.insert(NodeId{r.node});
        }
        break;
      case TraceKind::Deliver:
        if (r.payload && r.payload->type == PayloadType::AggregateAck &&
            r.payload->process == process) {
          acked.insert(NodeId{r.node});
        }
        break;
      case TraceKind::Verdict:
        if (r.process && *r.process == process) has_verdict = true;
        break;
      default:
        break;
    }
  }

  std::map<NodeId, CoverageClass> out;
  for (std::uint32_t i = 0; i < trace.config.n_nodes; ++i) {
    NodeId id{i};
    CoverageClass c = CoverageClass::NonCovered;
    if (id == process.root) {
      // The root observes itself; it is fully covered once it has a verdict.
      if (has_verdict) c = CoverageClass::FullyCovered;
      else if (accepted.count(id)) c = CoverageClass::PartiallyCovered;
    } else if (accepted.count(id)) {
      c = (sent_aggregate.count(id) && acked.count(id))
              ? CoverageClass::FullyCovered
              : CoverageClass::PartiallyCovered;
    }
    out[id] = c;
  }
  return out;
}

double root_accuracy(const Trace& trace, const ProcessId& process,
                     std::uint32_t n) {
  auto v = verdict_of(trace, process);
  if (!v) return 0.0;
  return static_cast<double>(v->covered.size()) / static_cast<double>(n);
}

double joint_accuracy(const std::vector<std::set<NodeId>>& covered_sets,
                      std::uint32_t n) {
  std::set<NodeId> all;
  for (const auto& s : covered_sets) all.insert(s.begin(), s.end());
  return static_cast<double>(all.size()) / static_cast<double>(n);
}

std::optional<double> convergence_time(const Trace& trace,
                                       const ProcessId& process) {
  std::optional<double> start;
  for (const TraceRecord& r : trace.records) {
    if (r.kind == TraceKind::Start && r.process && *r.process == process) {
      start = r.time_ms;
    }
    if (r.kind == TraceKind::Verdict && r.process && *r.process == process) {
      if (!start) return std::nullopt;
      return r.time_ms - *start;
    }
  }
  return std::nullopt;
}

std::optional<std::uint32_t> tree_depth(const Trace& trace,
                                        const ProcessId& process) {
  auto v = verdict_of(trace, process);
  if (!v) return std::nullopt;
  return v->max_depth;
}

RoutingUsage routing_usage(const Trace& trace) {
  RoutingUsage usage;
  for (const TraceRecord& r : trace.records) {
    if (!r.payload || r.payload->type != PayloadType::Route) continue;
    if (r.kind == TraceKind::Send) ++usage.sent;
    if (r.kind == TraceKind::Deliver) ++usage.received;
  }
  return usage;
}

RunRecord analyze(const Trace& trace, std::uint64_t cycle) {
  RunRecord rec;
  rec.cycle = cycle;
  rec.config = trace.config;
  std::vector<std::set<NodeId>> covered_sets;
  for (const ProcessId& pid : trace.processes) {
    PerRootRecord pr;
    pr.root = pid.root;
    auto v = verdict_of(trace, pid);
    pr.converged = v.has_value();
    pr.convergence_ms = convergence_time(trace, pid);
    pr.accuracy = root_accuracy(trace, pid, trace.config.n_nodes);
    pr.tree_depth = tree_depth(trace, pid);
    if (v) pr.covered = v->covered;
    covered_sets.push_back(pr.covered);
    rec.per_root.push_back(std::move(pr));
  }
  rec.joint_accuracy = joint_accuracy(covered_sets, trace.config.n_nodes);
  RoutingUsage usage = routing_usage(trace);
  rec.route_msgs_sent = usage.sent;
  rec.route_msgs_received = usage.received;
  return rec;
}

}  // namespace dhymon
