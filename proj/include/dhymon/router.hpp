#ifndef DHYMON_ROUTER_HPP
#define DHYMON_ROUTER_HPP

#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "dhymon/protocol.hpp"

namespace dhymon {

enum class RouterPhase { Initial, WaitReply, Done };

const char* to_string(RouterPhase p);

// Fallback gossip-routing FSM state, one per node. Routes a stranded
// AGGREGATE one hop at a time: HELLO the neighborhood, the first replier
// (closest under the distance-proportional delay model) gets the ROUTE.
struct RouterState {
  RouterPhase phase = RouterPhase::Initial;
  std::optional<Payload> pending;  // the ROUTE payload being routed
  std::optional<NodeId> chosen_relay;
  std::vector<NodeId> relay_candidates;  // late repliers, arrival order
  int hello_retries = 0;
  std::set<PacketId> relayed;  // packets this node already routed (loop guard)
  std::uint64_t timer_seq = 0;
  std::optional<std::uint64_t> armed_timer;

  bool operator==(const RouterState&) const = default;
};

struct RouteInput {
  enum class Kind {
    AggregateRequest,  // from the local monitoring layer
    RoutePacket,
    Hello,
    HelloReply,
    RouteAck,
    Timeout,
  };
  Kind kind = Kind::Timeout;
  std::optional<Payload> payload;  // AggregateRequest/RoutePacket/Hello
  std::optional<NodeId> from;      // Hello/HelloReply/RouteAck sender
  std::uint64_t timer_token = 0;   // Timeout only
};

const char* to_string(RouteInput::Kind k);

struct RouteStep {
  RouterState state;
  std::vector<Action> actions;
  // Set when a ROUTE reached its destination: the wrapped AGGREGATE to
  // re-inject into the monitoring layer, bit-identical to what was submitted.
  std::optional<Payload> deliver_up;
};

// Bounded HELLO re-broadcasts before giving up on a route.
inline constexpr int kHelloRetryCap = 3;

RouteStep route_step(const RouterState& state, const RouteInput& input,
                     NodeId self, double now_ms, const ProtocolConfig& cfg);

// Earliest-arriving replier wins; ties go to the lower NodeId.
NodeId select_relay(const std::vector<std::pair<NodeId, double>>& replies);

}  // namespace dhymon

#endif  // DHYMON_ROUTER_HPP
