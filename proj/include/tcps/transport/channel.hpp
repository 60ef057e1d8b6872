#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>

#include "tcps/core/sim_time.hpp"
#include "tcps/transport/packet.hpp"

namespace tcps {

/// Forward: operator -> teleoperator (kinematic). Backward: feedback.
enum class Direction : std::uint8_t { Forward = 0, Backward = 1 };

inline constexpr std::size_t index(Direction d) { return static_cast<std::size_t>(d); }

struct Delivery {
  Direction dir = Direction::Forward;
  SimTime at{0};
  Packet packet;
};

struct DirectionCounters {
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t delivered = 0;
};

/// Bidirectional channel living on a virtual clock.
///
/// Contract: callers advance time monotonically. `send` may only be called
/// with `now` >= the time of the last delivery returned by `poll`, and
/// `poll(horizon)` returns deliveries in time order, never one later than
/// `horizon`. A single owner drives a channel; it is not thread-safe.
class SimChannel {
 public:
  virtual ~SimChannel() = default;

  void send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now);
  std::optional<Delivery> poll(SimTime horizon);

  void close() { closed_ = true; }
  bool closed() const { return closed_; }

  const DirectionCounters& counters(Direction dir) const { return counters_[index(dir)]; }

 protected:
  /// Returns false when the packet was dropped.
  virtual bool do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) = 0;
  virtual std::optional<Delivery> do_poll(SimTime horizon) = 0;

 private:
  bool closed_ = false;
  std::array<DirectionCounters, 2> counters_{};
};

}  // namespace tcps
