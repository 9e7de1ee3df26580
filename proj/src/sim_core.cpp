#include "edgectl/sim_core.hpp"

#include <cmath>
#include <utility>

namespace edgectl::sim {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::sensor: return "sensor";
    case NodeKind::edge_server: return "edge-server";
    case NodeKind::cloud_center: return "cloud-center";
  }
  return "unknown";
}

const char* payload_name(const Payload& payload) {
  struct Namer {
    const char* operator()(const SensorReading&) const { return "sensor-reading"; }
    const char* operator()(const ControlCommand&) const { return "control-command"; }
    const char* operator()(const StateReport&) const { return "state-report"; }
    const char* operator()(const AllocationUpdate&) const { return "allocation-update"; }
    const char* operator()(const Timer&) const { return "timer"; }
  };
  return std::visit(Namer{}, payload);
}

NodeId Topology::add_node(NodeKind kind, std::string name, NodeId attached_edge) {
  const NodeId id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back(Node{id, kind, std::move(name), attached_edge});
  return id;
}

void Topology::set_link(NodeId from, NodeId to, LinkLatency latency) {
  if (!contains(from) || !contains(to)) {
    throw TopologyError("link endpoint is not a node: " + std::to_string(from) + " -> " +
                        std::to_string(to));
  }
  if (from != to && latency.base_ms <= 0) {
    throw TopologyError("link delay must be positive between distinct nodes");
  }
  if (latency.jitter < 0.0 || latency.jitter >= 1.0) {
    throw TopologyError("link jitter must lie in [0, 1)");
  }
  links_[{from, to}] = latency;
}

const Node& Topology::node(NodeId id) const {
  if (!contains(id)) throw TopologyError("unknown node " + std::to_string(id));
  return nodes_[static_cast<std::size_t>(id)];
}

const LinkLatency& Topology::link(NodeId from, NodeId to) const {
  auto it = links_.find({from, to});
  if (it == links_.end()) {
    throw TopologyError("no link " + std::to_string(from) + " -> " + std::to_string(to));
  }
  return it->second;
}

std::vector<NodeId> Topology::nodes_of(NodeKind kind) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_) {
    if (n.kind == kind) out.push_back(n.id);
  }
  return out;
}

NodeId Topology::cloud() const {
  const auto clouds = nodes_of(NodeKind::cloud_center);
  if (clouds.size() != 1) throw TopologyError("topology must contain exactly one cloud-center");
  return clouds.front();
}

void Topology::validate() const {
  (void)cloud();
  for (const auto& n : nodes_) {
    if (n.kind != NodeKind::sensor) continue;
    if (!contains(n.attached_edge) || node(n.attached_edge).kind != NodeKind::edge_server) {
      throw TopologyError("sensor " + n.name + " is not attached to an edge server");
    }
  }
}

Kernel::Kernel(Topology topology, std::uint64_t seed)
    : topology_(std::move(topology)), handlers_(topology_.nodes().size()), rng_(seed) {}

void Kernel::schedule(Event event) {
  if (event.time < clock_) {
    throw StaleEventError("cannot schedule at t=" + std::to_string(event.time) +
                          " before clock t=" + std::to_string(clock_));
  }
  if (!topology_.contains(event.target)) {
    throw TopologyError("event target is not a node: " + std::to_string(event.target));
  }
  event.seq = next_seq_++;
  queue_.push(std::move(event));
}

SimTime Kernel::sample_delay(const LinkLatency& link) {
  if (link.jitter == 0.0) return link.base_ms;
  const double lo = static_cast<double>(link.base_ms) * (1.0 - link.jitter);
  const double hi = static_cast<double>(link.base_ms) * (1.0 + link.jitter);
  // Rounding inward keeps the integer delay inside the jitter band.
  const auto lo_ms = static_cast<SimTime>(std::ceil(lo));
  const auto hi_ms = static_cast<SimTime>(std::floor(hi));
  if (hi_ms <= lo_ms) return std::max<SimTime>(lo_ms, 1);
  return lo_ms + static_cast<SimTime>(rng_.below(static_cast<std::uint64_t>(hi_ms - lo_ms + 1)));
}

Event Kernel::send(NodeId from, NodeId to, Payload payload) {
  if (!topology_.contains(from) || !topology_.contains(to)) {
    throw TopologyError("send between unknown nodes " + std::to_string(from) + " -> " +
                        std::to_string(to));
  }
  const SimTime delay = sample_delay(topology_.link(from, to));
  Event e{clock_ + delay, 0, from, to, std::move(payload)};
  e.seq = next_seq_;
  schedule(e);
  ++sent_;
  return e;
}

void Kernel::schedule_local(NodeId node, Payload payload, SimTime delay) {
  schedule(Event{clock_ + delay, 0, node, node, std::move(payload)});
}

void Kernel::set_handler(NodeId node, Handler handler) {
  if (!topology_.contains(node)) throw TopologyError("handler for unknown node");
  handlers_[static_cast<std::size_t>(node)] = std::move(handler);
}

void Kernel::dispatch(const Event& event) {
  if (event.source != event.target) ++delivered_;
  if (tracing_) {
    trace_.push_back({event.time, event.seq, event.source, event.target,
                      payload_name(event.payload)});
  }
  auto& handler = handlers_[static_cast<std::size_t>(event.target)];
  if (!handler) return;
  for (auto& out : handler(event, clock_)) {
    if (out.to == event.target) {
      schedule_local(out.to, std::move(out.payload), out.local_delay);
    } else {
      send(event.target, out.to, std::move(out.payload));
    }
  }
}

Event Kernel::step() {
  if (queue_.empty()) throw DrainedError();
  Event event = queue_.top();
  queue_.pop();
  clock_ = event.time;
  dispatch(event);
  return event;
}

std::size_t Kernel::run_until(SimTime t) {
  std::size_t processed = 0;
  while (!queue_.empty() && queue_.top().time <= t) {
    step();
    ++processed;
  }
  return processed;
}

std::size_t Kernel::run() {
  std::size_t processed = 0;
  while (!queue_.empty()) {
    step();
    ++processed;
  }
  return processed;
}

LatencyPreset default_latency_preset() { return LatencyPreset{}; }

LatencyPreset cloud_minute_latency_preset() {
  LatencyPreset p;
  p.cloud = LoopLatency{29950, 100, 29950};
  return p;
}

std::optional<LatencyPreset> latency_preset_by_name(const std::string& name) {
  if (name == "default") return default_latency_preset();
  if (name == "cloud-minute") return cloud_minute_latency_preset();
  return std::nullopt;
}

}  // namespace edgectl::sim
