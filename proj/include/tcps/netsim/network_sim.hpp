#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <vector>

#include "tcps/core/rng.hpp"
#include "tcps/core/sim_time.hpp"
#include "tcps/netsim/topology.hpp"
#include "tcps/transport/channel.hpp"

namespace tcps {

struct NetSimOptions {
  /// Cross traffic runs this long before time zero so queues start loaded.
  double warmup_ms = 100.0;
  /// Packets an output port may hold, including the one being sent. Unset
  /// means unbounded; when full, arrivals are tail-dropped.
  std::optional<std::size_t> queue_capacity;
};

/// Serialization time of `bytes` on a link, rounded to the nanosecond.
SimTime serialization_time(std::size_t bytes, double bandwidth_bps);

/// Propagation plus serialization summed over a path, with empty queues.
SimTime unloaded_path_time(const Topology& topology, const Path& path, std::size_t bytes);

/// Event-driven store-and-forward network. Every directed link is a FIFO,
/// work-conserving output port. Cross traffic is CBR per flow with a random
/// phase drawn from the seed; tactile packets are injected by the caller.
class NetworkSim {
 public:
  NetworkSim(Topology topology, std::vector<TrafficFlow> flows, std::uint64_t seed, NetSimOptions options = {});

  /// Enters a tactile packet at switch `from` at time `now`, bound for `to`.
  /// Returns its id.
  std::uint64_t inject(NodeId from, NodeId to, std::size_t bytes, SimTime now);

  struct Arrival {
    std::uint64_t id;
    SimTime at;
  };

  /// Processes events up to `horizon` and stops at the first tactile arrival.
  std::optional<Arrival> advance(SimTime horizon);

  const Topology& topology() const { return topology_; }
  std::uint64_t tail_drops() const { return tail_drops_; }
  std::uint64_t tactile_drops() const { return tactile_drops_; }

 private:
  struct Event {
    SimTime at;
    std::uint64_t order;
    enum class Kind : std::uint8_t { Emit, Arrive } kind;
    std::size_t path;    // index into paths_
    std::size_t hop;     // next hop to take
    std::size_t bytes;
    std::int64_t owner;  // flow index for Emit, tactile id (>= 0) or -1 for cross traffic

    bool operator>(const Event& o) const { return at != o.at ? at > o.at : order > o.order; }
  };

  struct Port {
    SimTime busy_until{std::numeric_limits<std::int64_t>::min()};
    std::deque<SimTime> in_system;  // completion times of queued packets
  };

  std::size_t path_index(NodeId from, NodeId to);
  void push(Event e);
  std::optional<Arrival> arrive(const Event& e);

  Topology topology_;
  std::vector<TrafficFlow> flows_;
  NetSimOptions options_;
  std::vector<std::size_t> flow_path_;
  std::vector<SimTime> flow_period_;
  std::vector<Path> paths_;
  std::map<std::pair<NodeId, NodeId>, std::size_t> path_ids_;
  std::vector<Port> ports_;  // 2 per link: a->b, b->a
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t order_ = 0;
  std::uint64_t next_tactile_ = 0;
  std::uint64_t tail_drops_ = 0;
  std::uint64_t tactile_drops_ = 0;
};

/// Standalone delivery time of one packet from te_master to te_slave sent at
/// `t_send` through the loaded network.
SimTime simulate_delivery(const Topology& topology, const std::vector<TrafficFlow>& flows, std::size_t bytes,
                          SimTime t_send, std::uint64_t seed, NetSimOptions options = {});

/// Channel between the tactile endpoints: forward runs te_master -> te_slave,
/// backward the reverse route. It owns its network and shares the caller's
/// virtual clock.
class NetworkChannel final : public SimChannel {
 public:
  NetworkChannel(Topology topology, std::vector<TrafficFlow> flows, std::uint64_t seed, NetSimOptions options = {});

  const NetworkSim& network() const { return sim_; }

 protected:
  bool do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) override;
  std::optional<Delivery> do_poll(SimTime horizon) override;

 private:
  NetworkSim sim_;
  std::map<std::uint64_t, Delivery> in_flight_;
};

}  // namespace tcps
