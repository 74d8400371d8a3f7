#ifndef DHYMON_PROTOCOL_HPP
#define DHYMON_PROTOCOL_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace dhymon {

// Opaque node identifier, totally ordered for deterministic tie-breaking.
struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

// Identifies one monitoring round: the root that started it plus the start time.
struct ProcessId {
  NodeId root;
  double start_time_ms = 0.0;
  auto operator<=>(const ProcessId&) const = default;
};

// Unique packet identifier: generating node + creation time, with a per-node
// sequence number to break same-millisecond ties.
struct PacketId {
  NodeId origin;
  double created_at_ms = 0.0;
  std::uint32_t seq = 0;
  auto operator<=>(const PacketId&) const = default;
};

PacketId make_packet_id(NodeId origin, double now_ms, std::uint32_t seq);

// Partial monitoring result carried in AGGREGATE payloads. The monitored
// function is the average, carried as sum/count. covered lists every node
// whose observation is folded in; max_depth is the deepest tree level that
// contributed.
struct Aggregate {
  double sum = 0.0;
  std::uint32_t count = 0;
  std::set<NodeId> covered;
  std::uint32_t max_depth = 0;
  bool operator==(const Aggregate&) const = default;
};

bool covered_disjoint(const Aggregate& a, const Aggregate& b);

// Commutative, associative fold of two partial results.
// Throws std::invalid_argument when the covered sets overlap (a node has one
// parent per round, so overlap signals duplicate delivery or a bug).
Aggregate merge_aggregate(const Aggregate& a, const Aggregate& b);

enum class PayloadType {
  Start,
  Query,
  QueryAck,
  AggregateMsg,
  AggregateAck,
  Timeout,  // local timer input, never on the wire
  Hello,
  HelloReply,
  Route,
  RouteAck,
};

const char* to_string(PayloadType t);

// Every wire message of both layers, plus the internal TIMEOUT input.
// ROUTE payloads wrap the stranded AGGREGATE unmodified in `wrapped`.
struct Payload {
  PayloadType type = PayloadType::Start;
  PacketId pid;
  ProcessId process;
  NodeId source;
  std::optional<NodeId> dest;  // absent => local broadcast
  std::uint32_t hop_depth = 0; // VHT level of the sender, root = 1
  std::optional<Aggregate> aggregate;
  std::string query_attr = "load";
  std::uint64_t timer_token = 0;            // TIMEOUT only
  std::shared_ptr<const Payload> wrapped;   // ROUTE only

  bool operator==(const Payload& other) const;
};

enum class Phase { Initial, Q1, Q2, A1, A2, A3 };

const char* to_string(Phase p);

// Per-round Algorithm-1 state of one node. One MonitorState per
// (node, ProcessId); rounds are isolated at the application layer.
struct MonitorState {
  Phase phase = Phase::Initial;
  std::optional<ProcessId> process;
  std::optional<NodeId> parent;  // absent <=> this node is the round's root
  std::uint32_t my_depth = 0;
  std::set<NodeId> query_ack_list;
  std::vector<NodeId> relay_list;
  Aggregate partial;  // children folded so far
  std::set<PacketId> seen_queries;
  std::optional<Payload> pending_aggregate;  // awaiting AGGREGATEACK in A1/A2/A3
  double observation = 0.0;
  std::uint32_t packet_seq = 0;
  std::uint64_t timer_seq = 0;
  std::optional<std::uint64_t> armed_timer;

  bool operator==(const MonitorState&) const = default;
};

// Abstract effects. The step functions only describe what should happen;
// the event loop realizes delivery, timers and tracing.
namespace act {
struct Broadcast { Payload payload; };
struct Unicast { NodeId to; Payload payload; };
struct StartTimer { double duration_ms; std::uint64_t token; };
struct CancelTimer { std::uint64_t token; };
struct Verdict { Aggregate aggregate; };
struct RequestRoute { Payload payload; };
struct Fail { std::string reason; };
}  // namespace act

using Action = std::variant<act::Broadcast, act::Unicast, act::StartTimer,
                            act::CancelTimer, act::Verdict, act::RequestRoute,
                            act::Fail>;

struct ProtocolConfig {
  double timeout_ms = 200.0;
};

struct MonitorStep {
  MonitorState state;
  std::vector<Action> actions;
};

// Algorithm-1 step: one incoming payload (or timer expiry) against one
// round's state. Pure; all sequencing is owned by the caller.
MonitorStep handle_payload(const MonitorState& state, const Payload& payload,
                           NodeId self, double now_ms,
                           const ProtocolConfig& cfg);

}  // namespace dhymon

#endif  // DHYMON_PROTOCOL_HPP
