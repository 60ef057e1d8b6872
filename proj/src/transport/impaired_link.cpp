#include "tcps/transport/impaired_link.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tcps/error.hpp"

namespace tcps {

double JitterModel::draw_ms(Rng& rng) const {
  switch (kind) {
    case Kind::None:
      return 0.0;
    case Kind::Uniform:
      return uniform01(rng) * max_ms;
    case Kind::TruncatedNormal: {
      for (int attempt = 0; attempt < 1000; ++attempt) {
        // Box-Muller on the engine's own bits, for cross-library determinism.
        const double u1 = 1.0 - uniform01(rng);
        const double u2 = uniform01(rng);
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        const double v = mean_ms + stddev_ms * z;
        if (v >= 0.0) return v;
      }
      return 0.0;
    }
  }
  return 0.0;
}

void LinkDirection::validate() const {
  if (!(latency_ms >= 0.0) || !(drop_prob >= 0.0 && drop_prob <= 1.0) || !(bandwidth_bps >= 0.0)) {
    throw Error(Errc::InvalidArgument, "link needs latency >= 0, drop_prob in [0,1], bandwidth >= 0");
  }
  if (jitter.max_ms < 0.0 || jitter.stddev_ms < 0.0) {
    throw Error(Errc::InvalidArgument, "jitter parameters must be non-negative");
  }
}

ChannelModel ChannelModel::ideal(double one_way_latency_ms) {
  LinkDirection d;
  d.latency_ms = one_way_latency_ms;
  return symmetric(d);
}

std::optional<SimTime> impaired_send(const LinkDirection& link, DirectionState& state, std::size_t wire_bytes,
                                     SimTime now, Rng& rng) {
  const double u = uniform01(rng);
  const double jitter = link.jitter.draw_ms(rng);
  if (u < link.drop_prob) return std::nullopt;

  double ms = link.latency_ms + jitter;
  if (link.bandwidth_bps > 0.0) ms += static_cast<double>(wire_bytes) * 8.0 / link.bandwidth_bps * 1e3;
  SimTime at = now + from_ms(ms);
  if (link.fifo && state.any_delivered) at = std::max(at, state.last_delivery);
  state.last_delivery = at;
  state.any_delivered = true;
  return at;
}

ImpairedChannel::ImpairedChannel(ChannelModel model, std::uint64_t seed)
    : model_(model), rng_{Rng(mix_seed(seed, 0)), Rng(mix_seed(seed, 1))} {
  model_.forward.validate();
  model_.backward.validate();
}

bool ImpairedChannel::do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) {
  const auto& link = dir == Direction::Forward ? model_.forward : model_.backward;
  auto at = impaired_send(link, state_[index(dir)], wire_bytes, now, rng_[index(dir)]);
  if (!at) return false;
  pending_.push({*at, order_++, Delivery{dir, *at, packet}});
  return true;
}

std::optional<Delivery> ImpairedChannel::do_poll(SimTime horizon) {
  if (pending_.empty() || pending_.top().at > horizon) return std::nullopt;
  Delivery d = pending_.top().delivery;
  pending_.pop();
  return d;
}

bool FilteredChannel::do_send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) {
  if (drop_(dir, packet)) return false;
  const auto before = inner_->counters(dir).dropped;
  inner_->send(dir, packet, wire_bytes, now);
  return inner_->counters(dir).dropped == before;
}

}  // namespace tcps
