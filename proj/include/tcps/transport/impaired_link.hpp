#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <queue>
#include <vector>

#include "tcps/core/rng.hpp"
#include "tcps/transport/channel.hpp"

namespace tcps {

struct JitterModel {
  enum class Kind { None, Uniform, TruncatedNormal };
  Kind kind = Kind::None;
  double max_ms = 0.0;     // Uniform: draws from [0, max_ms]
  double mean_ms = 0.0;    // TruncatedNormal
  double stddev_ms = 0.0;  // TruncatedNormal, resampled until >= 0

  static JitterModel none() { return {}; }
  static JitterModel uniform(double a_ms) { return {Kind::Uniform, a_ms, 0.0, 0.0}; }
  static JitterModel truncated_normal(double mean, double sd) { return {Kind::TruncatedNormal, 0.0, mean, sd}; }

  double draw_ms(Rng& rng) const;
};

struct LinkDirection {
  double latency_ms = 0.0;
  JitterModel jitter;
  double drop_prob = 0.0;
  double bandwidth_bps = 0.0;  // 0 = infinite
  bool fifo = true;

  void validate() const;
};

struct ChannelModel {
  LinkDirection forward;
  LinkDirection backward;

  static ChannelModel symmetric(const LinkDirection& d) { return {d, d}; }
  /// Zero loss, zero jitter, infinite bandwidth.
  static ChannelModel ideal(double one_way_latency_ms);
};

struct DirectionState {
  SimTime last_delivery{0};
  bool any_delivered = false;
};

/// Delivery time for one packet, or nullopt when dropped. Draw order per
/// call is fixed (drop uniform, then jitter) so that, for a given seed,
/// raising drop_prob only ever adds drops.
std::optional<SimTime> impaired_send(const LinkDirection& link, DirectionState& state, std::size_t wire_bytes,
                                     SimTime now, Rng& rng);

/// Parametric impaired link (also the ideal channel with default knobs).
class ImpairedChannel final : public SimChannel {
 public:
  ImpairedChannel(ChannelModel model, std::uint64_t seed);

  const ChannelModel& model() const { return model_; }

 protected:
  bool do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) override;
  std::optional<Delivery> do_poll(SimTime horizon) override;

 private:
  struct Pending {
    SimTime at;
    std::uint64_t order;
    Delivery delivery;
    bool operator>(const Pending& o) const { return at != o.at ? at > o.at : order > o.order; }
  };

  ChannelModel model_;
  std::array<Rng, 2> rng_;
  std::array<DirectionState, 2> state_{};
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> pending_;
  std::uint64_t order_ = 0;
};

/// Fault-injection wrapper: packets for which `drop` returns true are
/// discarded before reaching the inner channel.
class FilteredChannel final : public SimChannel {
 public:
  using Predicate = std::function<bool(Direction, const Packet&)>;

  FilteredChannel(std::unique_ptr<SimChannel> inner, Predicate drop)
      : inner_(std::move(inner)), drop_(std::move(drop)) {}

 protected:
  bool do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) override;
  std::optional<Delivery> do_poll(SimTime horizon) override { return inner_->poll(horizon); }

 private:
  std::unique_ptr<SimChannel> inner_;
  Predicate drop_;
};

}  // namespace tcps
