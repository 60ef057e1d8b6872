#include "tcps/netsim/network_sim.hpp"

#include <algorithm>
#include <cmath>

#include "tcps/error.hpp"

namespace tcps {

SimTime serialization_time(std::size_t bytes, double bandwidth_bps) {
  return SimTime{std::llround(static_cast<double>(bytes) * 8.0 * 1e9 / bandwidth_bps)};
}

SimTime unloaded_path_time(const Topology& topology, const Path& path, std::size_t bytes) {
  SimTime total{0};
  for (const Hop& hop : path) {
    const Link& l = topology.links[hop.link];
    total += serialization_time(bytes, l.bandwidth_bps) + from_ms(l.delay_ms);
  }
  return total;
}

NetworkSim::NetworkSim(Topology topology, std::vector<TrafficFlow> flows, std::uint64_t seed, NetSimOptions options)
    : topology_(std::move(topology)), flows_(std::move(flows)), options_(options) {
  topology_.validate();
  if (options_.queue_capacity && *options_.queue_capacity == 0) {
    throw Error(Errc::InvalidArgument, "queue capacity must be >= 1");
  }
  ports_.resize(topology_.links.size() * 2);

  const SimTime start = -from_ms(options_.warmup_ms);
  for (std::size_t f = 0; f < flows_.size(); ++f) {
    const TrafficFlow& flow = flows_[f];
    flow.validate();
    const auto src = topology_.hosts.find(flow.src);
    const auto dst = topology_.hosts.find(flow.dst);
    if (src == topology_.hosts.end() || dst == topology_.hosts.end()) {
      throw Error(Errc::InvalidArgument, "flow " + flow.src + "->" + flow.dst + " names an unknown host");
    }
    flow_path_.push_back(path_index(src->second, dst->second));
    flow_period_.push_back(flow.rate_bps > 0.0 ? serialization_time(flow.pkt_bytes, flow.rate_bps) : SimTime{0});
    if (flow.rate_bps <= 0.0) continue;

    // Each flow draws its phase from its own stream so that adding a flow
    // leaves the others untouched.
    Rng rng(mix_seed(seed, f));
    const auto phase = SimTime{static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(flow_period_[f].count()))};
    push({start + phase, 0, Event::Kind::Emit, flow_path_[f], 0, flow.pkt_bytes, static_cast<std::int64_t>(f)});
  }
}

std::size_t NetworkSim::path_index(NodeId from, NodeId to) {
  const auto key = std::make_pair(from, to);
  if (auto it = path_ids_.find(key); it != path_ids_.end()) return it->second;
  paths_.push_back(route(topology_, from, to));
  path_ids_.emplace(key, paths_.size() - 1);
  return paths_.size() - 1;
}

void NetworkSim::push(Event e) {
  e.order = order_++;
  events_.push(e);
}

std::uint64_t NetworkSim::inject(NodeId from, NodeId to, std::size_t bytes, SimTime now) {
  const std::uint64_t id = next_tactile_++;
  push({now, 0, Event::Kind::Arrive, path_index(from, to), 0, bytes, static_cast<std::int64_t>(id)});
  return id;
}

std::optional<NetworkSim::Arrival> NetworkSim::arrive(const Event& e) {
  const Path& path = paths_[e.path];
  if (e.hop == path.size()) {
    if (e.owner >= 0) return Arrival{static_cast<std::uint64_t>(e.owner), e.at};
    return std::nullopt;
  }
  const Hop& hop = path[e.hop];
  const Link& link = topology_.links[hop.link];
  Port& port = ports_[hop.link * 2 + (hop.from == link.a ? 0 : 1)];

  while (!port.in_system.empty() && port.in_system.front() <= e.at) port.in_system.pop_front();
  if (options_.queue_capacity && port.in_system.size() >= *options_.queue_capacity) {
    ++tail_drops_;
    if (e.owner >= 0) ++tactile_drops_;
    return std::nullopt;
  }
  const SimTime start = std::max(e.at, port.busy_until);
  port.busy_until = start + serialization_time(e.bytes, link.bandwidth_bps);
  port.in_system.push_back(port.busy_until);

  Event next = e;
  next.kind = Event::Kind::Arrive;
  next.at = port.busy_until + from_ms(link.delay_ms);
  next.hop = e.hop + 1;
  push(next);
  return std::nullopt;
}

std::optional<NetworkSim::Arrival> NetworkSim::advance(SimTime horizon) {
  while (!events_.empty() && events_.top().at <= horizon) {
    const Event e = events_.top();
    events_.pop();
    if (e.kind == Event::Kind::Emit) {
      const auto f = static_cast<std::size_t>(e.owner);
      Event next = e;
      next.at = e.at + flow_period_[f];
      push(next);
      Event packet = e;
      packet.kind = Event::Kind::Arrive;
      packet.owner = -1;
      arrive(packet);
      continue;
    }
    if (auto a = arrive(e)) return a;
  }
  return std::nullopt;
}

SimTime simulate_delivery(const Topology& topology, const std::vector<TrafficFlow>& flows, std::size_t bytes,
                          SimTime t_send, std::uint64_t seed, NetSimOptions options) {
  NetworkSim sim(topology, flows, seed, options);
  const auto id = sim.inject(topology.te_master, topology.te_slave, bytes, t_send);
  // An unbounded queue always drains; the horizon only guards tail drops.
  const SimTime horizon = t_send + from_ms(1e7);
  while (auto a = sim.advance(horizon)) {
    if (a->id == id) return a->at;
  }
  throw Error(Errc::Unreachable, "packet was dropped before reaching the slave endpoint");
}

NetworkChannel::NetworkChannel(Topology topology, std::vector<TrafficFlow> flows, std::uint64_t seed,
                               NetSimOptions options)
    : sim_(std::move(topology), std::move(flows), seed, options) {}

bool NetworkChannel::do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) {
  const Topology& t = sim_.topology();
  const bool fwd = dir == Direction::Forward;
  const auto id = sim_.inject(fwd ? t.te_master : t.te_slave, fwd ? t.te_slave : t.te_master, wire_bytes, now);
  in_flight_.emplace(id, Delivery{dir, now, packet});
  return true;
}

std::optional<Delivery> NetworkChannel::do_poll(SimTime horizon) {
  const auto a = sim_.advance(horizon);
  if (!a) return std::nullopt;
  auto node = in_flight_.extract(a->id);
  node.mapped().at = a->at;
  return node.mapped();
}

}  // namespace tcps
