#include "dhymon/router.hpp"

#include <algorithm>
#include <stdexcept>

namespace dhymon {

const char* to_string(RouterPhase p) {
  switch (p) {
    case RouterPhase::Initial: return "INITIAL";
    case RouterPhase::WaitReply: return "WR";
    case RouterPhase::Done: return "DN";
  }
  return "?";
}

const char* to_string(RouteInput::Kind k) {
  switch (k) {
    case RouteInput::Kind::AggregateRequest: return "AGGREGATE_REQUEST";
    case RouteInput::Kind::RoutePacket: return "ROUTE";
    case RouteInput::Kind::Hello: return "HELLO";
    case RouteInput::Kind::HelloReply: return "HELLO_REPLY";
    case RouteInput::Kind::RouteAck: return "ROUTE_ACK";
    case RouteInput::Kind::Timeout: return "TIMEOUT";
  }
  return "?";
}

namespace {

void arm_timer(RouterState& s, std::vector<Action>& acts,
               const ProtocolConfig& cfg) {
  ++s.timer_seq;
  s.armed_timer = s.timer_seq;
  acts.push_back(act::StartTimer{cfg.timeout_ms, s.timer_seq});
}

Payload make_hello(const RouterState& s, NodeId self) {
  Payload h;
  h.type = PayloadType::Hello;
  h.pid = s.pending->pid;  // identifies the packet being routed, for dedup
  h.process = s.pending->process;
  h.source = self;
  return h;
}

Payload make_reply(PayloadType type, const Payload& to, NodeId self) {
  Payload r;
  r.type = type;
  r.pid = to.pid;
  r.process = to.process;
  r.source = self;
  r.dest = to.source;
  return r;
}

// Start waiting for relays: broadcast HELLO for the packet and arm the timer.
void begin_wait(RouterState& s, Payload route, NodeId self,
                std::vector<Action>& acts, const ProtocolConfig& cfg) {
  s.phase = RouterPhase::WaitReply;
  s.pending = std::move(route);
  s.chosen_relay.reset();
  s.relay_candidates.clear();
  s.hello_retries = 0;
  acts.push_back(act::Broadcast{make_hello(s, self)});
  arm_timer(s, acts, cfg);
}

}  // namespace

RouteStep route_step(const RouterState& state, const RouteInput& input,
                     NodeId self, double now_ms, const ProtocolConfig& cfg) {
  RouteStep out{state, {}, std::nullopt};
  RouterState& s = out.state;
  const RouteStep noop{state, {}, std::nullopt};
  using K = RouteInput::Kind;

  switch (input.kind) {
    case K::AggregateRequest: {
      if (s.phase == RouterPhase::WaitReply) return noop;  // busy routing
      const Payload& agg = *input.payload;
      Payload route;
      route.type = PayloadType::Route;
      route.pid = agg.pid;
      route.process = agg.process;
      route.source = self;
      route.dest = agg.dest;
      route.hop_depth = agg.hop_depth;
      route.query_attr = agg.query_attr;
      route.wrapped = std::make_shared<const Payload>(agg);
      begin_wait(s, std::move(route), self, out.actions, cfg);
      return out;
    }

    case K::RoutePacket: {
      const Payload& p = *input.payload;
      if (!p.wrapped) return noop;
      if (p.dest && *p.dest == self) {
        // Addressed to us: hand the aggregate up, acknowledge the last hop.
        out.actions.push_back(
            act::Unicast{p.source, make_reply(PayloadType::RouteAck, p, self)});
        out.deliver_up = *p.wrapped;
        return out;
      }
      if (s.phase == RouterPhase::WaitReply) return noop;  // busy
      out.actions.push_back(
          act::Unicast{p.source, make_reply(PayloadType::RouteAck, p, self)});
      Payload route = p;
      route.source = self;
      begin_wait(s, std::move(route), self, out.actions, cfg);
      return out;
    }

    case K::Hello: {
      const Payload& h = *input.payload;
      if (s.relayed.count(h.pid)) return noop;  // already relayed this packet
      if (s.pending && s.pending->pid == h.pid) return noop;  // routing it now
      if (s.phase == RouterPhase::WaitReply) return noop;
      if (s.phase == RouterPhase::Done) s.phase = RouterPhase::Initial;
      out.actions.push_back(
          act::Unicast{h.source, make_reply(PayloadType::HelloReply, h, self)});
      return out;
    }

    case K::HelloReply: {
      if (s.phase == RouterPhase::WaitReply) {
        NodeId relay = *input.from;
        s.phase = RouterPhase::Done;
        s.chosen_relay = relay;
        if (s.armed_timer) {
          out.actions.push_back(act::CancelTimer{*s.armed_timer});
          s.armed_timer.reset();
        }
        s.relayed.insert(s.pending->pid);
        out.actions.push_back(act::Unicast{relay, *s.pending});
        return out;
      }
      if (s.phase == RouterPhase::Done && input.from &&
          input.from != s.chosen_relay) {
        // Late repliers become fallback relays, in arrival order.
        if (std::find(s.relay_candidates.begin(), s.relay_candidates.end(),
                      *input.from) == s.relay_candidates.end()) {
          s.relay_candidates.push_back(*input.from);
        }
        return out;
      }
      return noop;
    }

    case K::RouteAck:
      return noop;  // delivery confirmed; nothing further to do

    case K::Timeout: {
      if (!s.armed_timer || *s.armed_timer != input.timer_token) return noop;
      if (s.phase != RouterPhase::WaitReply) return noop;
      s.armed_timer.reset();
      if (s.hello_retries >= kHelloRetryCap) {
        s.phase = RouterPhase::Initial;
        s.pending.reset();
        out.actions.push_back(act::Fail{"no hello reply"});
        return out;
      }
      ++s.hello_retries;
      out.actions.push_back(act::Broadcast{make_hello(s, self)});
      arm_timer(s, out.actions, cfg);
      return out;
    }
  }
  return noop;
}

NodeId select_relay(const std::vector<std::pair<NodeId, double>>& replies) {
  if (replies.empty()) {
    throw std::invalid_argument("select_relay: no replies");
  }
  auto best = std::min_element(
      replies.begin(), replies.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return a.first < b.first;
      });
  return best->first;
}

}  // namespace dhymon
