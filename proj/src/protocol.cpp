#include "dhymon/protocol.hpp"

#include <algorithm>
#include <stdexcept>

namespace dhymon {

PacketId make_packet_id(NodeId origin, double now_ms, std::uint32_t seq) {
  return PacketId{origin, now_ms, seq};
}

bool covered_disjoint(const Aggregate& a, const Aggregate& b) {
  const auto& small = a.covered.size() <= b.covered.size() ? a : b;
  const auto& big = a.covered.size() <= b.covered.size() ? b : a;
  return std::none_of(small.covered.begin(), small.covered.end(),
                      [&](const NodeId& n) { return big.covered.count(n) > 0; });
}

Aggregate merge_aggregate(const Aggregate& a, const Aggregate& b) {
  if (!covered_disjoint(a, b)) {
    throw std::invalid_argument("merge_aggregate: overlapping covered sets");
  }
  Aggregate out;
  out.sum = a.sum + b.sum;
  out.count = a.count + b.count;
  out.covered = a.covered;
  out.covered.insert(b.covered.begin(), b.covered.end());
  out.max_depth = std::max(a.max_depth, b.max_depth);
  return out;
}

const char* to_string(PayloadType t) {
  switch (t) {
    case PayloadType::Start: return "START";
    case PayloadType::Query: return "QUERY";
    case PayloadType::QueryAck: return "QUERYACK";
    case PayloadType::AggregateMsg: return "AGGREGATE";
    case PayloadType::AggregateAck: return "AGGREGATEACK";
    case PayloadType::Timeout: return "TIMEOUT";
    case PayloadType::Hello: return "HELLO";
    case PayloadType::HelloReply: return "HELLO_REPLY";
    case PayloadType::Route: return "ROUTE";
    case PayloadType::RouteAck: return "ROUTE_ACK";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Initial: return "INITIAL";
    case Phase::Q1: return "Q1";
    case Phase::Q2: return "Q2";
    case Phase::A1: return "A1";
    case Phase::A2: return "A2";
    case Phase::A3: return "A3";
  }
  return "?";
}

bool Payload::operator==(const Payload& other) const {
  if (type != other.type || pid != other.pid || process != other.process ||
      source != other.source || dest != other.dest ||
      hop_depth != other.hop_depth || aggregate != other.aggregate ||
      query_attr != other.query_attr || timer_token != other.timer_token) {
    return false;
  }
  if (!wrapped != !other.wrapped) return false;
  return !wrapped || *wrapped == *other.wrapped;
}

namespace {

void arm_timer(MonitorState& s, std::vector<Action>& acts,
               const ProtocolConfig& cfg) {
  ++s.timer_seq;
  s.armed_timer = s.timer_seq;
  acts.push_back(act::StartTimer{cfg.timeout_ms, s.timer_seq});
}

Payload make_msg(MonitorState& s, PayloadType type, NodeId self, double now,
                 std::optional<NodeId> dest) {
  Payload p;
  p.type = type;
  p.pid = make_packet_id(self, now, s.packet_seq++);
  p.process = *s.process;
  p.source = self;
  p.dest = dest;
  p.hop_depth = s.my_depth;
  return p;
}

// Wrap the pending AGGREGATE for a one-hop forward to a relay. The wrapped
// payload is carried untouched; `dest` stays the original destination.
Payload make_route(const MonitorState& s, NodeId self) {
  const Payload& pending = *s.pending_aggregate;
  Payload r;
  r.type = PayloadType::Route;
  r.pid = pending.pid;
  r.process = pending.process;
  r.source = self;
  r.dest = pending.dest;
  r.hop_depth = s.my_depth;
  r.query_attr = pending.query_attr;
  r.wrapped = std::make_shared<const Payload>(pending);
  return r;
}

void finish_round(MonitorState& s, std::vector<Action>& acts) {
  s.phase = Phase::Initial;
  if (s.armed_timer) {
    acts.push_back(act::CancelTimer{*s.armed_timer});
    s.armed_timer.reset();
  }
}

Aggregate own_contribution(const MonitorState& s, NodeId self) {
  return Aggregate{s.observation, 1, {self}, s.my_depth};
}

// Shared Q2/A1 handling of a child's AGGREGATE: always re-acknowledge (lost
// acks make children retry), merge unless it is a duplicate or we already
// handed our result upstream, and send up once the ack list drains.
void on_child_aggregate(MonitorState& s, const Payload& payload, NodeId self,
                        double now, const ProtocolConfig& cfg,
                        std::vector<Action>& acts) {
  Payload ack = make_msg(s, PayloadType::AggregateAck, self, now, payload.source);
  acts.push_back(act::Unicast{payload.source, ack});
  s.phase = Phase::A1;
  s.query_ack_list.erase(payload.source);

  const bool already_sent = s.pending_aggregate.has_value();
  const Aggregate& child = *payload.aggregate;
  const bool duplicate =
      !covered_disjoint(s.partial, child) || child.covered.count(self) > 0;
  if (!already_sent && !duplicate) {
    s.partial = merge_aggregate(s.partial, child);
  }
  if (!already_sent && s.query_ack_list.empty()) {
    Aggregate total = merge_aggregate(s.partial, own_contribution(s, self));
    if (!s.parent) {
      finish_round(s, acts);
      acts.push_back(act::Verdict{total});
    } else {
      Payload agg = make_msg(s, PayloadType::AggregateMsg, self, now, *s.parent);
      agg.aggregate = total;
      s.pending_aggregate = agg;
      acts.push_back(act::Unicast{*s.parent, agg});
      arm_timer(s, acts, cfg);
    }
  }
}

}  // namespace

MonitorStep handle_payload(const MonitorState& state, const Payload& payload,
                           NodeId self, double now_ms,
                           const ProtocolConfig& cfg) {
  MonitorStep out{state, {}};
  MonitorState& s = out.state;
  const MonitorStep noop{state, {}};

  switch (payload.type) {
    case PayloadType::Hello:
    case PayloadType::HelloReply:
    case PayloadType::Route:
    case PayloadType::RouteAck:
      return noop;  // routing layer traffic never reaches this machine
    case PayloadType::Timeout:
      if (!s.armed_timer || *s.armed_timer != payload.timer_token) return noop;
      break;
    default:
      break;
  }

  // Rounds are isolated: anything for another process is ignored.
  if (s.process && payload.type != PayloadType::Timeout &&
      payload.process != *s.process) {
    return noop;
  }

  switch (s.phase) {
    case Phase::Initial: {
      // A state that already served its round stays quiet; first QUERY wins
      // parent selection and duplicates are ignored.
      if (s.process) return noop;
      if (payload.type == PayloadType::Start && payload.process.root == self) {
        s.process = payload.process;
        s.parent.reset();
        s.my_depth = 1;
        s.phase = Phase::Q1;
        Payload q = make_msg(s, PayloadType::Query, self, now_ms, std::nullopt);
        q.query_attr = payload.query_attr;
        s.seen_queries.insert(q.pid);
        out.actions.push_back(act::Broadcast{q});
        arm_timer(s, out.actions, cfg);
        return out;
      }
      if (payload.type == PayloadType::Query) {
        if (s.seen_queries.count(payload.pid)) return noop;
        s.process = payload.process;
        s.parent = payload.source;
        s.my_depth = payload.hop_depth + 1;
        s.phase = Phase::Q1;
        s.seen_queries.insert(payload.pid);
        Payload ack =
            make_msg(s, PayloadType::QueryAck, self, now_ms, payload.source);
        ack.query_attr = payload.query_attr;
        out.actions.push_back(act::Unicast{payload.source, ack});
        Payload q = make_msg(s, PayloadType::Query, self, now_ms, std::nullopt);
        q.query_attr = payload.query_attr;
        s.seen_queries.insert(q.pid);
        out.actions.push_back(act::Broadcast{q});
        arm_timer(s, out.actions, cfg);
        return out;
      }
      return noop;
    }

    case Phase::Q1: {
      if (payload.type == PayloadType::QueryAck) {
        s.phase = Phase::Q2;
        s.query_ack_list.insert(payload.source);
        return out;
      }
      if (payload.type == PayloadType::Timeout) {
        s.armed_timer.reset();
        Aggregate own = own_contribution(s, self);
        if (!s.parent) {
          // Root with no acknowledged children: the round is just itself.
          finish_round(s, out.actions);
          out.actions.push_back(act::Verdict{own});
          return out;
        }
        s.phase = Phase::A1;
        Payload agg =
            make_msg(s, PayloadType::AggregateMsg, self, now_ms, *s.parent);
        agg.aggregate = own;
        s.pending_aggregate = agg;
        out.actions.push_back(act::Unicast{*s.parent, agg});
        arm_timer(s, out.actions, cfg);
        return out;
      }
      return noop;
    }

    case Phase::Q2: {
      if (payload.type == PayloadType::QueryAck) {
        s.query_ack_list.insert(payload.source);
        return out;
      }
      if (payload.type == PayloadType::AggregateMsg && payload.aggregate) {
        on_child_aggregate(s, payload, self, now_ms, cfg, out.actions);
        return out;
      }
      return noop;
    }

    case Phase::A1: {
      if (payload.type == PayloadType::AggregateMsg && payload.aggregate) {
        on_child_aggregate(s, payload, self, now_ms, cfg, out.actions);
        return out;
      }
      if (payload.type == PayloadType::AggregateAck) {
        finish_round(s, out.actions);
        return out;
      }
      if (payload.type == PayloadType::Timeout) {
        // Only a sent-but-unacknowledged aggregate can be re-routed.
        if (!s.pending_aggregate) return noop;
        s.armed_timer.reset();
        s.phase = Phase::A2;
        out.actions.push_back(act::RequestRoute{*s.pending_aggregate});
        arm_timer(s, out.actions, cfg);
        return out;
      }
      return noop;
    }

    case Phase::A2: {
      if (payload.type == PayloadType::AggregateAck) {
        finish_round(s, out.actions);
        return out;
      }
      if (payload.type == PayloadType::Timeout) {
        s.armed_timer.reset();
        s.phase = Phase::A3;
        if (!s.relay_list.empty()) {
          NodeId relay = s.relay_list.front();
          s.relay_list.erase(s.relay_list.begin());
          out.actions.push_back(act::Unicast{relay, make_route(s, self)});
        }
        arm_timer(s, out.actions, cfg);
        return out;
      }
      return noop;
    }

    case Phase::A3: {
      if (payload.type == PayloadType::AggregateAck) {
        finish_round(s, out.actions);
        return out;
      }
      if (payload.type == PayloadType::Timeout) {
        s.armed_timer.reset();
        if (s.relay_list.empty()) {
          s.phase = Phase::Initial;
          out.actions.push_back(act::Fail{"relay list exhausted"});
          return out;
        }
        NodeId relay = s.relay_list.front();
        s.relay_list.erase(s.relay_list.begin());
        s.phase = Phase::A2;
        out.actions.push_back(act::Unicast{relay, make_route(s, self)});
        arm_timer(s, out.actions, cfg);
        return out;
      }
      return noop;
    }
  }
  return noop;
}

}  // namespace dhymon
