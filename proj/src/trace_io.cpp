#include "dhymon/trace_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dhymon {

using nlohmann::json;

namespace {

PayloadType payload_type_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(PayloadType::RouteAck); ++i) {
    auto t = static_cast<PayloadType>(i);
    if (s == to_string(t)) return t;
  }
  throw std::invalid_argument("unknown payload type: " + s);
}

Phase phase_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(Phase::A3); ++i) {
    auto p = static_cast<Phase>(i);
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown phase: " + s);
}

RouterPhase router_phase_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(RouterPhase::Done); ++i) {
    auto p = static_cast<RouterPhase>(i);
    if (s == to_string(p)) return p;
  }
  throw std::invalid_argument("unknown router phase: " + s);
}

TraceKind trace_kind_from(const std::string& s) {
  for (int i = 0; i <= static_cast<int>(TraceKind::RouterFail); ++i) {
    auto k = static_cast<TraceKind>(i);
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown trace kind: " + s);
}

}  // namespace

void to_json(json& j, const NodeId& n) { j = n.value; }
void from_json(const json& j, NodeId& n) { n.value = j.get<std::uint32_t>(); }

void to_json(json& j, const ProcessId& p) {
  j = json{{"root", p.root}, {"start", p.start_time_ms}};
}
void from_json(const json& j, ProcessId& p) {
  j.at("root").get_to(p.root);
  j.at("start").get_to(p.start_time_ms);
}

void to_json(json& j, const PacketId& p) {
  j = json{{"origin", p.origin}, {"at", p.created_at_ms}, {"seq", p.seq}};
}
void from_json(const json& j, PacketId& p) {
  j.at("origin").get_to(p.origin);
  j.at("at").get_to(p.created_at_ms);
  j.at("seq").get_to(p.seq);
}

void to_json(json& j, const Aggregate& a) {
  j = json{{"sum", a.sum},
           {"count", a.count},
           {"covered", a.covered},
           {"max_depth", a.max_depth}};
}
void from_json(const json& j, Aggregate& a) {
  j.at("sum").get_to(a.sum);
  j.at("count").get_to(a.count);
  j.at("covered").get_to(a.covered);
  j.at("max_depth").get_to(a.max_depth);
}

void to_json(json& j, const Payload& p) {
  j = json{{"type", to_string(p.type)},
           {"pid", p.pid},
           {"process", p.process},
           {"source", p.source},
           {"hop", p.hop_depth},
           {"attr", p.query_attr}};
  if (p.dest) j["dest"] = *p.dest;
  if (p.aggregate) j["agg"] = *p.aggregate;
  if (p.timer_token != 0) j["token"] = p.timer_token;
  if (p.wrapped) j["wrapped"] = *p.wrapped;
}
void from_json(const json& j, Payload& p) {
  p.type = payload_type_from(j.at("type").get<std::string>());
  j.at("pid").get_to(p.pid);
  j.at("process").get_to(p.process);
  j.at("source").get_to(p.source);
  j.at("hop").get_to(p.hop_depth);
  j.at("attr").get_to(p.query_attr);
  if (j.contains("dest")) p.dest = j.at("dest").get<NodeId>();
  if (j.contains("agg")) p.aggregate = j.at("agg").get<Aggregate>();
  if (j.contains("token")) p.timer_token = j.at("token").get<std::uint64_t>();
  if (j.contains("wrapped")) {
    p.wrapped = std::make_shared<const Payload>(j.at("wrapped").get<Payload>());
  }
}

void to_json(json& j, const Vec2& v) { j = json{{"x", v.x}, {"y", v.y}}; }
void from_json(const json& j, Vec2& v) {
  j.at("x").get_to(v.x);
  j.at("y").get_to(v.y);
}

void to_json(json& j, const WaypointLeg& l) {
  j = json{{"origin", l.origin},
           {"target", l.target},
           {"depart", l.depart_ms},
           {"speed", l.speed}};
}
void from_json(const json& j, WaypointLeg& l) {
  j.at("origin").get_to(l.origin);
  j.at("target").get_to(l.target);
  j.at("depart").get_to(l.depart_ms);
  j.at("speed").get_to(l.speed);
}

void to_json(json& j, const SimConfig& c) {
  j = json{{"n_nodes", c.n_nodes},
           {"area_side", c.area_side},
           {"speed", c.speed},
           {"range", c.range},
           {"timeout_ms", c.timeout_ms},
           {"roots", c.roots},
           {"warmup_ms", c.warmup_ms},
           {"delay_min_ms", c.delay_min_ms},
           {"delay_max_ms", c.delay_max_ms},
           {"loss_prob", c.loss_prob},
           {"max_sim_time_ms", c.max_sim_time_ms},
           {"seed", c.seed}};
  if (!c.fixed_positions.empty()) j["fixed_positions"] = c.fixed_positions;
}
void from_json(const json& j, SimConfig& c) {
  SimConfig defaults;
  c.n_nodes = j.value("n_nodes", defaults.n_nodes);
  c.area_side = j.value("area_side", defaults.area_side);
  c.speed = j.value("speed", defaults.speed);
  c.range = j.value("range", defaults.range);
  c.timeout_ms = j.value("timeout_ms", defaults.timeout_ms);
  c.roots = j.value("roots", defaults.roots);
  c.warmup_ms = j.value("warmup_ms", defaults.warmup_ms);
  c.delay_min_ms = j.value("delay_min_ms", defaults.delay_min_ms);
  c.delay_max_ms = j.value("delay_max_ms", defaults.delay_max_ms);
  c.loss_prob = j.value("loss_prob", defaults.loss_prob);
  c.max_sim_time_ms = j.value("max_sim_time_ms", defaults.max_sim_time_ms);
  c.seed = j.value("seed", defaults.seed);
  if (j.contains("fixed_positions")) {
    j.at("fixed_positions").get_to(c.fixed_positions);
  }
}

void to_json(json& j, const TraceRecord& r) {
  j = json{{"t", r.time_ms}, {"kind", to_string(r.kind)}};
  if (r.node != kNoNode) j["node"] = r.node;
  if (r.payload) j["payload"] = *r.payload;
  if (r.process) j["process"] = *r.process;
  if (r.link_dest) j["link_dest"] = *r.link_dest;
  if (r.phase_before) j["phase_before"] = to_string(*r.phase_before);
  if (r.phase_after) j["phase_after"] = to_string(*r.phase_after);
  if (r.rphase_before) j["rphase_before"] = to_string(*r.rphase_before);
  if (r.rphase_after) j["rphase_after"] = to_string(*r.rphase_after);
  if (r.verdict) j["verdict"] = *r.verdict;
  if (r.leg) j["leg"] = *r.leg;
  if (r.depth) j["depth"] = *r.depth;
  if (!r.note.empty()) j["note"] = r.note;
}
void from_json(const json& j, TraceRecord& r) {
  j.at("t").get_to(r.time_ms);
  r.kind = trace_kind_from(j.at("kind").get<std::string>());
  r.node = j.value("node", kNoNode);
  if (j.contains("payload")) r.payload = j.at("payload").get<Payload>();
  if (j.contains("process")) r.process = j.at("process").get<ProcessId>();
  if (j.contains("link_dest")) r.link_dest = j.at("link_dest").get<NodeId>();
  if (j.contains("phase_before")) {
    r.phase_before = phase_from(j.at("phase_before").get<std::string>());
  }
  if (j.contains("phase_after")) {
    r.phase_after = phase_from(j.at("phase_after").get<std::string>());
  }
  if (j.contains("rphase_before")) {
    r.rphase_before =
        router_phase_from(j.at("rphase_before").get<std::string>());
  }
  if (j.contains("rphase_after")) {
    r.rphase_after = router_phase_from(j.at("rphase_after").get<std::string>());
  }
  if (j.contains("verdict")) r.verdict = j.at("verdict").get<Aggregate>();
  if (j.contains("leg")) r.leg = j.at("leg").get<WaypointLeg>();
  if (j.contains("depth")) r.depth = j.at("depth").get<std::uint32_t>();
  r.note = j.value("note", std::string{});
}

void emit_trace(const Trace& trace, std::ostream& out) {
  json header{{"format", "dhymon-trace-1"},
              {"config", trace.config},
              {"observations", trace.observations},
              {"processes", trace.processes}};
  out << header.dump() << '\n';
  for (const TraceRecord& rec : trace.records) {
    out << json(rec).dump() << '\n';
  }
}

void emit_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  emit_trace(trace, out);
  if (!out.good()) throw std::runtime_error("write failed: " + path);
}

Trace load_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("empty trace stream");
  }
  json header = json::parse(line);
  Trace trace;
  header.at("config").get_to(trace.config);
  header.at("observations").get_to(trace.observations);
  header.at("processes").get_to(trace.processes);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    trace.records.push_back(json::parse(line).get<TraceRecord>());
  }
  return trace;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trace: " + path);
  return load_trace(in);
}

std::string trace_to_string(const Trace& trace) {
  std::ostringstream ss;
  emit_trace(trace, ss);
  return ss.str();
}

std::uint64_t trace_hash(const Trace& trace) {
  const std::string s = trace_to_string(trace);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace dhymon
