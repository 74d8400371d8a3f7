#ifndef DHYMON_NETSIM_HPP
#define DHYMON_NETSIM_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <vector>

#include "dhymon/protocol.hpp"
#include "dhymon/router.hpp"

namespace dhymon {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

struct SimConfig {
  std::uint32_t n_nodes = 20;
  double area_side = 0.0;  // meters; 0 => derived from n_nodes (density rule)
  double speed = 2.0;      // m/s; 0 => static nodes
  double range = 125.0;    // meters
  double timeout_ms = 200.0;
  std::uint32_t roots = 1;
  double warmup_ms = 10000.0;  // initial position shuffle before monitoring
  double delay_min_ms = 2.0;
  double delay_max_ms = 15.0;
  double loss_prob = 0.05;  // per reception
  double max_sim_time_ms = 60000.0;
  std::uint64_t seed = 1;
  // Optional preset positions (size n_nodes) for scripted scenarios.
  std::vector<Vec2> fixed_positions;

  bool operator==(const SimConfig&) const = default;
};

// Every 100m x 100m should hold at least 2 nodes: side = 100*sqrt(n/2).
double area_side_for(std::uint32_t n_nodes);

void validate(const SimConfig& cfg);  // throws std::invalid_argument

// One random-waypoint segment. Pause time is zero: on arrival a new target
// is drawn immediately.
struct WaypointLeg {
  Vec2 origin;
  Vec2 target;
  double depart_ms = 0.0;
  double speed = 1.0;  // m/s
  bool operator==(const WaypointLeg&) const = default;
};

Vec2 position_at(const WaypointLeg& leg, double t_ms);
bool in_range(const Vec2& a, const Vec2& b, double range);

enum class TraceKind {
  Leg,        // node started a new waypoint leg
  Start,      // StartMonitoring injected at a root
  Send,       // payload handed to the radio (one record per action)
  Deliver,    // payload received by a node
  Drop,       // unicast lost (out of range or loss draw)
  TimerSet,
  TimerFire,  // includes stale fires; `note` marks them
  Transition, // monitor phase change
  RouteTransition,
  Verdict,
  MonitorFail,
  RouterFail,
};

const char* to_string(TraceKind k);

inline constexpr std::uint32_t kNoNode = 0xffffffff;

struct TraceRecord {
  double time_ms = 0.0;
  TraceKind kind = TraceKind::Leg;
  std::uint32_t node = kNoNode;
  std::optional<Payload> payload;
  std::optional<ProcessId> process;
  std::optional<NodeId> link_dest;  // unicast radio target; absent => broadcast
  std::optional<Phase> phase_before;
  std::optional<Phase> phase_after;
  std::optional<RouterPhase> rphase_before;
  std::optional<RouterPhase> rphase_after;
  std::optional<Aggregate> verdict;
  std::optional<WaypointLeg> leg;
  std::optional<std::uint32_t> depth;  // accepted VHT depth on Transition
  std::string note;

  bool operator==(const TraceRecord&) const = default;
};

// Complete recorded history of one run. Deterministic: identical config
// (seed included) gives an identical trace.
struct Trace {
  SimConfig config;
  std::vector<double> observations;   // per node, integer-valued
  std::vector<ProcessId> processes;   // launch order
  std::vector<TraceRecord> records;

  bool operator==(const Trace&) const = default;
};

Trace run(const SimConfig& cfg);

// Exposed for direct testing: realize one step's actions into future events.
// Connectivity is evaluated at send time; delay is delay_min plus a uniform
// component scaled by distance/range; loss is an independent Bernoulli draw
// per reception.
struct SimEvent {
  double time_ms = 0.0;
  std::uint64_t seq = 0;  // tie-break: insertion order
  enum class Kind { Delivery, MonitorTimer, RouterTimer, StartMonitoring, LegChange, RouteRequest } kind;
  std::uint32_t node = kNoNode;
  std::optional<Payload> payload;
  std::optional<ProcessId> process;
  std::uint64_t timer_token = 0;
};

class Simulator {
 public:
  explicit Simulator(const SimConfig& cfg);
  Trace run_to_completion();

  // Test hook: deliveries generated for a list of actions from `node` at `now`.
  std::vector<SimEvent> dispatch(NodeId node, const std::vector<Action>& actions,
                                 double now_ms,
                                 const std::optional<ProcessId>& process);

  Vec2 position_of(std::uint32_t node, double t_ms) const;

 private:
  struct EventOrder {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time_ms != b.time_ms) return a.time_ms > b.time_ms;
      return a.seq > b.seq;
    }
  };

  void schedule(SimEvent ev);
  void process(const SimEvent& ev);
  void step_monitor(std::uint32_t node, const Payload& payload, double now);
  void step_router(std::uint32_t node, const RouteInput& input, double now);
  void apply_actions(std::uint32_t node, const std::vector<Action>& actions,
                     double now, const std::optional<ProcessId>& process,
                     bool from_router);
  MonitorState& monitor_for(std::uint32_t node, const ProcessId& pid);
  void start_leg(std::uint32_t node, Vec2 from, double now);
  double draw_delay(double distance);

  SimConfig cfg_;
  std::mt19937_64 rng_;
  std::vector<WaypointLeg> legs_;
  std::vector<double> observations_;
  std::vector<RouterState> routers_;
  std::map<std::pair<std::uint32_t, ProcessId>, MonitorState> monitors_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
  std::uint64_t next_seq_ = 0;
  std::size_t pending_non_leg_ = 0;
  std::vector<ProcessId> processes_;
  std::vector<TraceRecord> records_;
};

}  // namespace dhymon

#endif  // DHYMON_NETSIM_HPP
