#include "tcps/transport/channel.hpp"

#include "tcps/error.hpp"

namespace tcps {

void SimChannel::send(Direction dir, const Packet& packet, std::size_t wire_bytes, SimTime now) {
  if (closed_) throw Error(Errc::ChannelClosed, "send on closed channel");
  auto& c = counters_[index(dir)];
  ++c.sent;
  if (!do_send(dir, packet, wire_bytes, now)) ++c.dropped;
}

std::optional<Delivery> SimChannel::poll(SimTime horizon) {
  if (closed_) throw Error(Errc::ChannelClosed, "poll on closed channel");
  auto d = do_poll(horizon);
  if (d) ++counters_[index(d->dir)].delivered;
  return d;
}

}  // namespace tcps
