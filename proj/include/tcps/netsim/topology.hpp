#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace tcps {

using NodeId = int;

/// Undirected switch-to-switch link.
struct Link {
  NodeId a = 0;
  NodeId b = 0;
  double delay_ms = 0.1;
  double bandwidth_bps = 10e6;
};

/// Switches, links and host attachments. Host-to-switch links are ideal.
struct Topology {
  std::vector<NodeId> switches;
  std::vector<Link> links;
  std::map<std::string, NodeId> hosts;  // host id -> attached switch
  NodeId te_master = 0;
  NodeId te_slave = 0;

  /// Throws Error{InvalidArgument} on duplicate ids, dangling links or hosts,
  /// non-positive bandwidth or a disconnected graph.
  void validate() const;
  bool has_switch(NodeId id) const;
  /// Neighbours of `id` with the index of the connecting link, sorted by node id.
  std::vector<std::pair<NodeId, std::size_t>> neighbours(NodeId id) const;
};

/// One traversal of a link in a given direction.
struct Hop {
  NodeId from = 0;
  NodeId to = 0;
  std::size_t link = 0;

  friend bool operator==(const Hop&, const Hop&) = default;
};

using Path = std::vector<Hop>;

/// Minimum-hop path from a to b; among equal-length paths the one whose node
/// sequence is lexicographically smallest. Throws Error{Unreachable}.
Path route(const Topology& topology, NodeId a, NodeId b);

/// Constant-bit-rate host-to-host traffic.
struct TrafficFlow {
  std::string src;
  std::string dst;
  double rate_bps = 0.0;
  std::size_t pkt_bytes = 1250;

  void validate() const;
};

/// Every host sends to every other host at `rate_bps`, in (src, dst) order.
std::vector<TrafficFlow> all_pairs_flows(const Topology& topology, double rate_bps, std::size_t pkt_bytes = 1250);

/// Nine-switch S0..S8 approximation of the north-west USNET subset, one host
/// "h<i>" per switch. The S0-S5-S8 route carries the most host traffic.
Topology usnet_nw(double delay_ms = 0.1, double bandwidth_bps = 10e6, NodeId te_master = 1, NodeId te_slave = 6);

}  // namespace tcps
