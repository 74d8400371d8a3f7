#ifndef DHYMON_TRACE_IO_HPP
#define DHYMON_TRACE_IO_HPP

#include <iosfwd>
#include <string>

#include "json.hpp"

#include "dhymon/netsim.hpp"

namespace dhymon {

// JSON conversions (ADL hooks for nlohmann::json).
void to_json(nlohmann::json& j, const NodeId& n);
void from_json(const nlohmann::json& j, NodeId& n);
void to_json(nlohmann::json& j, const ProcessId& p);
void from_json(const nlohmann::json& j, ProcessId& p);
void to_json(nlohmann::json& j, const PacketId& p);
void from_json(const nlohmann::json& j, PacketId& p);
void to_json(nlohmann::json& j, const Aggregate& a);
void from_json(const nlohmann::json& j, Aggregate& a);
void to_json(nlohmann::json& j, const Payload& p);
void from_json(const nlohmann::json& j, Payload& p);
void to_json(nlohmann::json& j, const Vec2& v);
void from_json(const nlohmann::json& j, Vec2& v);
void to_json(nlohmann::json& j, const WaypointLeg& l);
void from_json(const nlohmann::json& j, WaypointLeg& l);
void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);
void to_json(nlohmann::json& j, const TraceRecord& r);
void from_json(const nlohmann::json& j, TraceRecord& r);

// Line-delimited trace format: one JSON header line (config, observations,
// processes), then one JSON object per record. Stable field order, so equal
// traces serialize to identical bytes.
void emit_trace(const Trace& trace, std::ostream& out);
void emit_trace(const Trace& trace, const std::string& path);

Trace load_trace(std::istream& in);
Trace load_trace(const std::string& path);

std::string trace_to_string(const Trace& trace);

// FNV-1a over the serialized trace.
std::uint64_t trace_hash(const Trace& trace);

}  // namespace dhymon

#endif  // DHYMON_TRACE_IO_HPP
