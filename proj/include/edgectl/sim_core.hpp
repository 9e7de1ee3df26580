#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "edgectl/rng.hpp"

namespace edgectl::sim {

// Integer milliseconds since simulation start.
using SimTime = std::int64_t;
using NodeId = int;

inline constexpr SimTime kControlPeriodMs = 5000;

enum class NodeKind { sensor, edge_server, cloud_center };

const char* to_string(NodeKind kind);

struct SensorReading {
  std::int64_t loop_id = 0;
  SimTime emitted_at = 0;
  std::vector<double> values;
  double reward = 0.0;
  bool done = false;  // terminal (failure)
  bool last = false;  // final reading of the episode
};

struct ControlCommand {
  std::int64_t loop_id = 0;
  SimTime reading_emitted_at = 0;
  int action = 0;
};

struct StateReport {
  NodeId from = -1;
  double busy_ms = 0.0;
  double background_load = 0.0;
};

struct AllocationUpdate {
  // Hosting edge server per module id; -1 means the module runs at the cloud.
  std::vector<NodeId> host_of_module;
};

// Internal wake-up used for compute delays and periodic ticks.
struct Timer {
  int tag = 0;
  std::int64_t cookie = 0;
};

using Payload = std::variant<SensorReading, ControlCommand, StateReport, AllocationUpdate, Timer>;

const char* payload_name(const Payload& payload);

struct Event {
  SimTime time = 0;
  std::uint64_t seq = 0;
  NodeId source = -1;
  NodeId target = -1;
  Payload payload;
};

struct Node {
  NodeId id = -1;
  NodeKind kind = NodeKind::sensor;
  std::string name;
  // Only meaningful for sensors.
  NodeId attached_edge = -1;
};

struct LinkLatency {
  SimTime base_ms = 1;
  double jitter = 0.0;
};

class StaleEventError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TopologyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DrainedError : public std::runtime_error {
 public:
  DrainedError() : std::runtime_error("simulation drained: event queue is empty") {}
};

class Topology {
 public:
  NodeId add_node(NodeKind kind, std::string name, NodeId attached_edge = -1);
  void set_link(NodeId from, NodeId to, LinkLatency latency);

  const Node& node(NodeId id) const;
  bool contains(NodeId id) const { return id >= 0 && id < static_cast<NodeId>(nodes_.size()); }
  const LinkLatency& link(NodeId from, NodeId to) const;
  bool has_link(NodeId from, NodeId to) const { return links_.count({from, to}) != 0; }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::vector<NodeId> nodes_of(NodeKind kind) const;
  NodeId cloud() const;

  // Throws TopologyError unless there is exactly one cloud and every sensor
  // is attached to exactly one existing edge server.
  void validate() const;

 private:
  std::vector<Node> nodes_;
  std::map<std::pair<NodeId, NodeId>, LinkLatency> links_;
};

struct Outgoing {
  NodeId to = -1;
  Payload payload;
  // Local (non-link) delay, e.g. a compute wake-up addressed to self.
  SimTime local_delay = 0;
};

using Handler = std::function<std::vector<Outgoing>(const Event&, SimTime now)>;

struct TraceEntry {
  SimTime time;
  std::uint64_t seq;
  NodeId source;
  NodeId target;
  std::string kind;
};

class Kernel {
 public:
  Kernel(Topology topology, std::uint64_t seed);

  void schedule(Event event);
  // Schedules `payload` for `to` at now + sampled link delay; self-sends are
  // not allowed here, use schedule_local.
  Event send(NodeId from, NodeId to, Payload payload);
  void schedule_local(NodeId node, Payload payload, SimTime delay);

  Event step();
  std::size_t run_until(SimTime t);
  std::size_t run();

  void set_handler(NodeId node, Handler handler);

  SimTime now() const { return clock_; }
  std::size_t pending() const { return queue_.size(); }
  bool empty() const { return queue_.empty(); }
  const Topology& topology() const { return topology_; }

  void enable_trace(bool on) { tracing_ = on; }
  const std::vector<TraceEntry>& trace() const { return trace_; }

  std::uint64_t sent_count() const { return sent_; }
  std::uint64_t delivered_count() const { return delivered_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  SimTime sample_delay(const LinkLatency& link);
  void dispatch(const Event& event);

  Topology topology_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<Handler> handlers_;
  Rng rng_;
  SimTime clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  bool tracing_ = false;
  std::vector<TraceEntry> trace_;
};

struct LoopLatency {
  SimTime uplink_ms = 100;
  SimTime compute_ms = 100;
  SimTime downlink_ms = 100;

  SimTime round_trip() const { return uplink_ms + compute_ms + downlink_ms; }
  bool operator==(const LoopLatency&) const = default;
};

struct LatencyPreset {
  LoopLatency edge{100, 100, 100};
  LoopLatency cloud{700, 100, 700};
  // Edge <-> cloud backhaul used for state reports.
  SimTime backhaul_ms = 600;
  double jitter = 0.0;

  bool operator==(const LatencyPreset&) const = default;
};

// 1.5 s cloud loop and 0.3 s edge loop.
LatencyPreset default_latency_preset();
// Cloud loop of one minute.
LatencyPreset cloud_minute_latency_preset();
std::optional<LatencyPreset> latency_preset_by_name(const std::string& name);

}  // namespace edgectl::sim
