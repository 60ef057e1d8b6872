#include "tcps/netsim/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "tcps/error.hpp"

namespace tcps {

bool Topology::has_switch(NodeId id) const {
  return std::find(switches.begin(), switches.end(), id) != switches.end();
}

std::vector<std::pair<NodeId, std::size_t>> Topology::neighbours(NodeId id) const {
  std::vector<std::pair<NodeId, std::size_t>> out;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].a == id) out.emplace_back(links[i].b, i);
    if (links[i].b == id) out.emplace_back(links[i].a, i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void Topology::validate() const {
  if (switches.empty()) throw Error(Errc::InvalidArgument, "topology has no switches");
  if (std::set<NodeId>(switches.begin(), switches.end()).size() != switches.size()) {
    throw Error(Errc::InvalidArgument, "duplicate switch id");
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  for (const auto& l : links) {
    if (!has_switch(l.a) || !has_switch(l.b) || l.a == l.b) {
      throw Error(Errc::InvalidArgument, "link " + std::to_string(l.a) + "-" + std::to_string(l.b) + " is invalid");
    }
    if (!seen.insert(std::minmax(l.a, l.b)).second) {
      throw Error(Errc::InvalidArgument, "duplicate link " + std::to_string(l.a) + "-" + std::to_string(l.b));
    }
    if (!(l.bandwidth_bps > 0.0) || !(l.delay_ms >= 0.0)) {
      throw Error(Errc::InvalidArgument, "link needs bandwidth > 0 and delay >= 0");
    }
  }
  for (const auto& [host, sw] : hosts) {
    if (!has_switch(sw)) throw Error(Errc::InvalidArgument, "host " + host + " attached to unknown switch");
  }
  if (!has_switch(te_master) || !has_switch(te_slave)) {
    throw Error(Errc::InvalidArgument, "tactile endpoints must attach to switches");
  }
  for (NodeId s : switches) {
    try {
      route(*this, switches.front(), s);
    } catch (const Error&) {
      throw Error(Errc::InvalidArgument, "topology is not connected");
    }
  }
}

Path route(const Topology& topology, NodeId a, NodeId b) {
  if (!topology.has_switch(a) || !topology.has_switch(b)) {
    throw Error(Errc::Unreachable, "unknown switch in route " + std::to_string(a) + "->" + std::to_string(b));
  }
  // Hop distances to b, then walk from a always taking the smallest
  // neighbour that gets one hop closer.
  std::map<NodeId, int> dist{{b, 0}};
  std::deque<NodeId> queue{b};
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    for (const auto& [v, link] : topology.neighbours(u)) {
      if (dist.emplace(v, dist[u] + 1).second) queue.push_back(v);
    }
  }
  if (!dist.contains(a)) {
    throw Error(Errc::Unreachable, "no path " + std::to_string(a) + "->" + std::to_string(b));
  }
  Path path;
  for (NodeId u = a; u != b;) {
    for (const auto& [v, link] : topology.neighbours(u)) {
      auto it = dist.find(v);
      if (it != dist.end() && it->second == dist[u] - 1) {
        path.push_back({u, v, link});
        u = v;
        break;
      }
    }
  }
  return path;
}

void TrafficFlow::validate() const {
  if (src == dst) throw Error(Errc::InvalidArgument, "flow source equals destination (" + src + ")");
  if (!(rate_bps >= 0.0)) throw Error(Errc::InvalidArgument, "flow rate must be >= 0");
  if (pkt_bytes == 0) throw Error(Errc::InvalidArgument, "flow packet size must be > 0");
}

std::vector<TrafficFlow> all_pairs_flows(const Topology& topology, double rate_bps, std::size_t pkt_bytes) {
  std::vector<TrafficFlow> flows;
  for (const auto& [src, s_sw] : topology.hosts) {
    for (const auto& [dst, d_sw] : topology.hosts) {
      if (src != dst) flows.push_back({src, dst, rate_bps, pkt_bytes});
    }
  }
  return flows;
}

Topology usnet_nw(double delay_ms, double bandwidth_bps, NodeId te_master, NodeId te_slave) {
  static constexpr std::pair<NodeId, NodeId> kEdges[] = {{0, 4}, {0, 5}, {0, 6}, {0, 7}, {1, 5}, {1, 6}, {1, 8},
                                                         {2, 8}, {3, 5}, {4, 5}, {5, 6}, {5, 8}, {6, 8}};
  Topology t;
  for (NodeId i = 0; i < 9; ++i) {
    t.switches.push_back(i);
    t.hosts["h" + std::to_string(i)] = i;
  }
  for (const auto& [a, b] : kEdges) t.links.push_back({a, b, delay_ms, bandwidth_bps});
  t.te_master = te_master;
  t.te_slave = te_slave;
  t.validate();
  return t;
}

}  // namespace tcps
