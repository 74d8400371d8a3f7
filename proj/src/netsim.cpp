#include "dhymon/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dhymon {

double area_side_for(std::uint32_t n_nodes) {
  return 100.0 * std::sqrt(static_cast<double>(n_nodes) / 2.0);
}

void validate(const SimConfig& cfg) {
  if (cfg.n_nodes < 1) throw std::invalid_argument("n_nodes must be >= 1");
  if (cfg.roots < 1 || cfg.roots > cfg.n_nodes) {
    throw std::invalid_argument("roots must be in [1, n_nodes]");
  }
  if (cfg.delay_min_ms > cfg.delay_max_ms) {
    throw std::invalid_argument("delay_min must be <= delay_max");
  }
  if (cfg.delay_min_ms < 0.0) throw std::invalid_argument("negative delay");
  if (cfg.loss_prob < 0.0 || cfg.loss_prob >= 1.0) {
    throw std::invalid_argument("loss_prob must be in [0, 1)");
  }
  if (cfg.range <= 0.0) throw std::invalid_argument("range must be positive");
  if (cfg.timeout_ms <= 0.0) throw std::invalid_argument("timeout must be positive");
  if (!cfg.fixed_positions.empty() &&
      cfg.fixed_positions.size() != cfg.n_nodes) {
    throw std::invalid_argument("fixed_positions size must match n_nodes");
  }
  if (cfg.area_side < 0.0) throw std::invalid_argument("negative area_side");
}

Vec2 position_at(const WaypointLeg& leg, double t_ms) {
  const double dx = leg.target.x - leg.origin.x;
  const double dy = leg.target.y - leg.origin.y;
  const double dist = std::hypot(dx, dy);
  if (dist <= 0.0 || leg.speed <= 0.0) return leg.origin;
  const double traveled = leg.speed * (t_ms - leg.depart_ms) / 1000.0;
  if (traveled >= dist) return leg.target;
  const double f = traveled / dist;
  return Vec2{leg.origin.x + f * dx, leg.origin.y + f * dy};
}

bool in_range(const Vec2& a, const Vec2& b, double range) {
  return std::hypot(a.x - b.x, a.y - b.y) <= range;
}

const char* to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Leg: return "leg";
    case TraceKind::Start: return "start";
    case TraceKind::Send: return "send";
    case TraceKind::Deliver: return "deliver";
    case TraceKind::Drop: return "drop";
    case TraceKind::TimerSet: return "timer_set";
    case TraceKind::TimerFire: return "timer_fire";
    case TraceKind::Transition: return "transition";
    case TraceKind::RouteTransition: return "route_transition";
    case TraceKind::Verdict: return "verdict";
    case TraceKind::MonitorFail: return "monitor_fail";
    case TraceKind::RouterFail: return "router_fail";
  }
  return "?";
}

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  if (cfg_.area_side == 0.0) cfg_.area_side = area_side_for(cfg_.n_nodes);
  rng_.seed(cfg_.seed);

  legs_.resize(cfg_.n_nodes);
  observations_.resize(cfg_.n_nodes);
  routers_.resize(cfg_.n_nodes);

  std::uniform_real_distribution<double> pos(0.0, cfg_.area_side);
  std::uniform_int_distribution<int> obs(0, 100);
  for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) {
    Vec2 p = cfg_.fixed_positions.empty()
                 ? Vec2{pos(rng_), pos(rng_)}
                 : cfg_.fixed_positions[i];
    legs_[i] = WaypointLeg{p, p, 0.0, std::max(cfg_.speed, 1.0)};
    observations_[i] = static_cast<double>(obs(rng_));
  }
}

Vec2 Simulator::position_of(std::uint32_t node, double t_ms) const {
  return position_at(legs_[node], t_ms);
}

void Simulator::schedule(SimEvent ev) {
  ev.seq = next_seq_++;
  if (ev.kind != SimEvent::Kind::LegChange) ++pending_non_leg_;
  queue_.push(std::move(ev));
}

double Simulator::draw_delay(double distance) {
  std::uniform_real_distribution<double> u(0.0,
                                           cfg_.delay_max_ms - cfg_.delay_min_ms);
  return cfg_.delay_min_ms + (distance / cfg_.range) * u(rng_);
}

void Simulator::start_leg(std::uint32_t node, Vec2 from, double now) {
  std::uniform_real_distribution<double> pos(0.0, cfg_.area_side);
  WaypointLeg leg{from, Vec2{pos(rng_), pos(rng_)}, now, cfg_.speed};
  legs_[node] = leg;
  TraceRecord rec;
  rec.time_ms = now;
  rec.kind = TraceKind::Leg;
  rec.node = node;
  rec.leg = leg;
  records_.push_back(std::move(rec));
  const double dist = std::hypot(leg.target.x - leg.origin.x,
                                 leg.target.y - leg.origin.y);
  SimEvent ev;
  ev.kind = SimEvent::Kind::LegChange;
  ev.node = node;
  ev.time_ms = now + dist / cfg_.speed * 1000.0;
  schedule(std::move(ev));
}

MonitorState& Simulator::monitor_for(std::uint32_t node, const ProcessId& pid) {
  auto key = std::make_pair(node, pid);
  auto it = monitors_.find(key);
  if (it == monitors_.end()) {
    MonitorState st;
    st.observation = observations_[node];
    it = monitors_.emplace(key, std::move(st)).first;
  }
  return it->second;
}

Trace Simulator::run_to_completion() {
  // Record the initial (possibly static) legs so positions are replayable.
  for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) {
    TraceRecord rec;
    rec.kind = TraceKind::Leg;
    rec.node = i;
    rec.leg = legs_[i];
    records_.push_back(std::move(rec));
  }
  if (cfg_.speed > 0.0 && cfg_.fixed_positions.empty()) {
    for (std::uint32_t i = 0; i < cfg_.n_nodes; ++i) {
      start_leg(i, legs_[i].origin, 0.0);
    }
  }

  // Roots are drawn uniformly without replacement.
  std::vector<std::uint32_t> roots;
  std::uniform_int_distribution<std::uint32_t> pick(0, cfg_.n_nodes - 1);
  while (roots.size() < cfg_.roots) {
    std::uint32_t r = pick(rng_);
    if (std::find(roots.begin(), roots.end(), r) == roots.end()) {
      roots.push_back(r);
    }
  }
  for (std::uint32_t r : roots) {
    ProcessId pid{NodeId{r}, cfg_.warmup_ms};
    processes_.push_back(pid);
    SimEvent ev;
    ev.kind = SimEvent::Kind::StartMonitoring;
    ev.node = r;
    ev.time_ms = cfg_.warmup_ms;
    ev.process = pid;
    schedule(std::move(ev));
  }

  while (pending_non_leg_ > 0) {
    SimEvent ev = queue_.top();
    queue_.pop();
    if (ev.kind != SimEvent::Kind::LegChange) --pending_non_leg_;
    if (ev.time_ms > cfg_.max_sim_time_ms) break;
    process(ev);
  }

  Trace trace;
  trace.config = cfg_;
  trace.observations = observations_;
  trace.processes = processes_;
  trace.records = std::move(records_);
  return trace;
}

void Simulator::process(const SimEvent& ev) {
  switch (ev.kind) {
    case SimEvent::Kind::LegChange:
      start_leg(ev.node, legs_[ev.node].target, ev.time_ms);
      break;

    case SimEvent::Kind::StartMonitoring: {
      TraceRecord rec;
      rec.time_ms = ev.time_ms;
      rec.kind = TraceKind::Start;
      rec.node = ev.node;
      rec.process = ev.process;
      records_.push_back(std::move(rec));
      Payload start;
      start.type = PayloadType::Start;
      start.pid = make_packet_id(NodeId{ev.node}, ev.time_ms, 0);
      start.process = *ev.process;
      start.source = NodeId{ev.node};
      step_monitor(ev.node, start, ev.time_ms);
      break;
    }

    case SimEvent::Kind::Delivery: {
      const Payload& p = *ev.payload;
      TraceRecord rec;
      rec.time_ms = ev.time_ms;
      rec.kind = TraceKind::Deliver;
      rec.node = ev.node;
      rec.payload = p;
      rec.process = p.process;
      records_.push_back(std::move(rec));
      switch (p.type) {
        case PayloadType::Hello: {
          RouteInput in;
          in.kind = RouteInput::Kind::Hello;
          in.payload = p;
          in.from = p.source;
          step_router(ev.node, in, ev.time_ms);
          break;
        }
        case PayloadType::HelloReply: {
          RouteInput in;
          in.kind = RouteInput::Kind::HelloReply;
          in.payload = p;
          in.from = p.source;
          step_router(ev.node, in, ev.time_ms);
          break;
        }
        case PayloadType::Route: {
          RouteInput in;
          in.kind = RouteInput::Kind::RoutePacket;
          in.payload = p;
          in.from = p.source;
          step_router(ev.node, in, ev.time_ms);
          break;
        }
        case PayloadType::RouteAck: {
          RouteInput in;
          in.kind = RouteInput::Kind::RouteAck;
          in.payload = p;
          in.from = p.source;
          step_router(ev.node, in, ev.time_ms);
          break;
        }
        default:
          step_monitor(ev.node, p, ev.time_ms);
          break;
      }
      break;
    }

    case SimEvent::Kind::MonitorTimer: {
      auto it = monitors_.find(std::make_pair(ev.node, *ev.process));
      const bool stale = it == monitors_.end() ||
                         !it->second.armed_timer ||
                         *it->second.armed_timer != ev.timer_token;
      TraceRecord rec;
      rec.time_ms = ev.time_ms;
      rec.kind = TraceKind::TimerFire;
      rec.node = ev.node;
      rec.process = ev.process;
      if (stale) rec.note = "stale";
      records_.push_back(std::move(rec));
      if (stale) break;
      Payload timeout;
      timeout.type = PayloadType::Timeout;
      timeout.process = *ev.process;
      timeout.source = NodeId{ev.node};
      timeout.timer_token = ev.timer_token;
      step_monitor(ev.node, timeout, ev.time_ms);
      break;
    }

    case SimEvent::Kind::RouterTimer: {
      const RouterState& rs = routers_[ev.node];
      const bool stale = !rs.armed_timer || *rs.armed_timer != ev.timer_token;
      TraceRecord rec;
      rec.time_ms = ev.time_ms;
      rec.kind = TraceKind::TimerFire;
      rec.node = ev.node;
      rec.note = stale ? "router stale" : "router";
      records_.push_back(std::move(rec));
      if (stale) break;
      RouteInput in;
      in.kind = RouteInput::Kind::Timeout;
      in.timer_token = ev.timer_token;
      step_router(ev.node, in, ev.time_ms);
      break;
    }

    case SimEvent::Kind::RouteRequest: {
      RouteInput in;
      in.kind = RouteInput::Kind::AggregateRequest;
      in.payload = ev.payload;
      step_router(ev.node, in, ev.time_ms);
      break;
    }
  }
}

void Simulator::step_monitor(std::uint32_t node, const Payload& payload,
                             double now) {
  MonitorState& st = monitor_for(node, payload.process);
  ProtocolConfig pcfg{cfg_.timeout_ms};
  MonitorStep step = handle_payload(st, payload, NodeId{node}, now, pcfg);
  if (step.state.phase != st.phase) {
    TraceRecord rec;
    rec.time_ms = now;
    rec.kind = TraceKind::Transition;
    rec.node = node;
    rec.process = payload.process;
    rec.phase_before = st.phase;
    rec.phase_after = step.state.phase;
    if (step.state.parent) rec.link_dest = *step.state.parent;
    rec.depth = step.state.my_depth;
    records_.push_back(std::move(rec));
  }
  st = std::move(step.state);
  apply_actions(node, step.actions, now, payload.process, false);
}

void Simulator::step_router(std::uint32_t node, const RouteInput& input,
                            double now) {
  RouterState& rs = routers_[node];
  ProtocolConfig pcfg{cfg_.timeout_ms};
  const std::size_t candidates_before = rs.relay_candidates.size();
  RouteStep step = route_step(rs, input, NodeId{node}, now, pcfg);
  if (step.state.phase != rs.phase) {
    TraceRecord rec;
    rec.time_ms = now;
    rec.kind = TraceKind::RouteTransition;
    rec.node = node;
    rec.rphase_before = rs.phase;
    rec.rphase_after = step.state.phase;
    records_.push_back(std::move(rec));
  }
  rs = std::move(step.state);

  // New HELLO repliers become fallback relays for the stranded aggregate's
  // own monitoring state, in arrival order.
  if (rs.pending && rs.pending->wrapped &&
      rs.pending->wrapped->source == NodeId{node} &&
      rs.relay_candidates.size() > candidates_before) {
    auto it = monitors_.find(std::make_pair(node, rs.pending->process));
    if (it != monitors_.end()) {
      for (std::size_t i = candidates_before; i < rs.relay_candidates.size();
           ++i) {
        it->second.relay_list.push_back(rs.relay_candidates[i]);
      }
    }
  }

  apply_actions(node, step.actions, now, std::nullopt, true);

  if (step.deliver_up) {
    SimEvent ev;
    ev.kind = SimEvent::Kind::Delivery;
    ev.node = node;
    ev.time_ms = now;
    ev.payload = *step.deliver_up;
    schedule(std::move(ev));
  }
}

std::vector<SimEvent> Simulator::dispatch(
    NodeId node, const std::vector<Action>& actions, double now_ms,
    const std::optional<ProcessId>& process) {
  const std::uint64_t first = next_seq_;
  apply_actions(node.value, actions, now_ms, process, false);
  // Return the events just scheduled, for direct inspection in tests.
  std::vector<SimEvent> out;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> rest;
  while (!queue_.empty()) {
    SimEvent ev = queue_.top();
    queue_.pop();
    if (ev.seq >= first) out.push_back(ev);
    rest.push(std::move(ev));
  }
  queue_ = std::move(rest);
  std::sort(out.begin(), out.end(),
            [](const SimEvent& a, const SimEvent& b) { return a.seq < b.seq; });
  return out;
}

void Simulator::apply_actions(std::uint32_t node,
                              const std::vector<Action>& actions, double now,
                              const std::optional<ProcessId>& process,
                              bool from_router) {
  const Vec2 sender_pos = position_of(node, now);
  for (const Action& action : actions) {
    if (const auto* b = std::get_if<act::Broadcast>(&action)) {
      TraceRecord rec;
      rec.time_ms = now;
      rec.kind = TraceKind::Send;
      rec.node = node;
      rec.payload = b->payload;
      rec.process = b->payload.process;
      records_.push_back(std::move(rec));
      for (std::uint32_t j = 0; j < cfg_.n_nodes; ++j) {
        if (j == node) continue;
        const Vec2 pj = position_of(j, now);
        const double dist = std::hypot(pj.x - sender_pos.x, pj.y - sender_pos.y);
        if (dist > cfg_.range) continue;
        const double delay = draw_delay(dist);
        std::bernoulli_distribution lost(cfg_.loss_prob);
        if (lost(rng_)) {
          TraceRecord drop;
          drop.time_ms = now;
          drop.kind = TraceKind::Drop;
          drop.node = node;
          drop.payload = b->payload;
          drop.link_dest = NodeId{j};
          drop.note = "loss";
          records_.push_back(std::move(drop));
          continue;
        }
        SimEvent ev;
        ev.kind = SimEvent::Kind::Delivery;
        ev.node = j;
        ev.time_ms = now + delay;
        ev.payload = b->payload;
        schedule(std::move(ev));
      }
    } else if (const auto* u = std::get_if<act::Unicast>(&action)) {
      TraceRecord rec;
      rec.time_ms = now;
      rec.kind = TraceKind::Send;
      rec.node = node;
      rec.payload = u->payload;
      rec.process = u->payload.process;
      rec.link_dest = u->to;
      records_.push_back(std::move(rec));
      const Vec2 pj = position_of(u->to.value, now);
      const double dist = std::hypot(pj.x - sender_pos.x, pj.y - sender_pos.y);
      if (dist > cfg_.range) {
        TraceRecord drop;
        drop.time_ms = now;
        drop.kind = TraceKind::Drop;
        drop.node = node;
        drop.payload = u->payload;
        drop.link_dest = u->to;
        drop.note = "out of range";
        records_.push_back(std::move(drop));
        continue;
      }
      const double delay = draw_delay(dist);
      std::bernoulli_distribution lost(cfg_.loss_prob);
      if (lost(rng_)) {
        TraceRecord drop;
        drop.time_ms = now;
        drop.kind = TraceKind::Drop;
        drop.node = node;
        drop.payload = u->payload;
        drop.link_dest = u->to;
        drop.note = "loss";
        records_.push_back(std::move(drop));
        continue;
      }
      SimEvent ev;
      ev.kind = SimEvent::Kind::Delivery;
      ev.node = u->to.value;
      ev.time_ms = now + delay;
      ev.payload = u->payload;
      schedule(std::move(ev));
    } else if (const auto* t = std::get_if<act::StartTimer>(&action)) {
      TraceRecord rec;
      rec.time_ms = now;
      rec.kind = TraceKind::TimerSet;
      rec.node = node;
      rec.process = process;
      rec.note = from_router ? "router" : "";
      records_.push_back(std::move(rec));
      SimEvent ev;
      ev.kind = from_router ? SimEvent::Kind::RouterTimer
                            : SimEvent::Kind::MonitorTimer;
      ev.node = node;
      ev.time_ms = now + t->duration_ms;
      ev.process = process;
      ev.timer_token = t->token;
      schedule(std::move(ev));
    } else if (std::get_if<act::CancelTimer>(&action)) {
      // Nothing to do: a cancelled token never matches when it fires.
    } else if (const auto* v = std::get_if<act::Verdict>(&action)) {
      TraceRecord rec;
      rec.time_ms = now;
      rec.kind = TraceKind::Verdict;
      rec.node = node;
      rec.process = process;
      rec.verdict = v->aggregate;
      records_.push_back(std::move(rec));
    } else if (const auto* r = std::get_if<act::RequestRoute>(&action)) {
      SimEvent ev;
      ev.kind = SimEvent::Kind::RouteRequest;
      ev.node = node;
      ev.time_ms = now;
      ev.payload = r->payload;
      schedule(std::move(ev));
    } else if (const auto* f = std::get_if<act::Fail>(&action)) {
      TraceRecord rec;
      rec.time_ms = now;
      rec.kind = from_router ? TraceKind::RouterFail : TraceKind::MonitorFail;
      rec.node = node;
      rec.process = process;
      rec.note = f->reason;
      records_.push_back(std::move(rec));
    }
  }
}

Trace run(const SimConfig& cfg) {
  Simulator sim(cfg);
  return sim.run_to_completion();
}

}  // namespace dhymon
