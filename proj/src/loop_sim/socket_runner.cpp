#include "tcps/loop_sim/socket_runner.hpp"

#include <future>
#include <optional>
#include <thread>

#include "tcps/core/rng.hpp"
#include "tcps/error.hpp"
#include "tcps/loop_sim/controller.hpp"

namespace tcps {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point origin, Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(t - origin).count();
}

Clock::duration loop_period(const LoopConfig& cfg) {
  return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(cfg.delta_ms));
}

void log_sample(std::vector<Sample>& samples, const Sample& s) {
  if (!samples.empty() && s.t_ms <= samples.back().t_ms) {
    samples.back() = s;
  } else {
    samples.push_back(s);
  }
}

StepResponseCurve serve(const LoopConfig& cfg, const DatagramSocket& socket, const SocketOptions& options,
                        std::optional<Clock::time_point> origin) {
  cfg.validate();
  StepResponseCurve curve;
  curve.band = cfg.band();
  curve.setting = cfg.setting;

  Rng rng(mix_seed(cfg.seed, 1));
  double robot_y = cfg.initial_y();
  bool seen_any = false;
  std::uint32_t newest = 0;
  std::optional<Clock::time_point> last_rx;
  std::uint32_t next_seq = 0;

  for (;;) {
    auto d = socket.receive(options.timeout);
    if (!d) {
      if (!seen_any) throw Error(Errc::Timeout, "no command within " + std::to_string(options.timeout.count()) + " ms");
      break;  // operator went quiet and its stop packet was lost
    }
    const auto now = Clock::now();
    Packet cmd;
    try {
      cmd = decode(d->bytes);
    } catch (const Error&) {
      continue;
    }
    if (cmd.kind != PacketKind::Kinematic) continue;
    if (cmd.seq == kFinSeq) break;
    if (seen_any && cmd.seq <= newest) continue;
    seen_any = true;
    newest = cmd.seq;
    if (!origin) origin = now;

    const double dt_ms = last_rx ? ms_since(*last_rx, now) : 0.0;
    last_rx = now;
    robot_y = robot_lag(cmd.value, robot_y, dt_ms, cfg.robot_tau_ms);
    const double signal = plant_response(cmd.x, robot_y, cfg);
    log_sample(curve.samples, {ms_since(*origin, now), cmd.x, cmd.value, signal});

    const Packet reply{PacketKind::Haptic, next_seq++, cmd.epoch, cmd.x, signal};
    socket.send_to(encode(reply, cfg.packet_size_B, rng), d->from);
  }
  return curve;
}

StepExperimentRecord operate(const LoopConfig& cfg, const DatagramSocket& socket, const Endpoint& plant,
                             const SocketOptions& options, Clock::time_point origin) {
  cfg.validate();
  StepExperimentRecord record;
  record.curve.band = cfg.band();
  record.curve.setting = cfg.setting;
  auto& fwd = record.stats[index(Direction::Forward)];
  auto& bwd = record.stats[index(Direction::Backward)];

  Rng rng(mix_seed(cfg.seed, 0));
  const sockaddr_in to = DatagramSocket::resolve(plant);
  const Clock::duration delta = loop_period(cfg);
  ControllerState op = ControllerState::initial(cfg);
  auto last_heard = origin;

  std::this_thread::sleep_until(origin);
  for (std::size_t l = 0; l < cfg.loop_count(); ++l) {
    const Packet cmd{PacketKind::Kinematic, op.next_seq++, static_cast<std::uint32_t>(op.x), op.x, op.y};
    record.operator_trace.push_back({ms_since(origin, Clock::now()), op.x, op.y});
    socket.send_to(encode(cmd, cfg.packet_size_B, rng), to);
    ++fwd.sent;

    const auto wake = origin + delta * static_cast<std::int64_t>(l + 1);
    std::optional<double> fresh;
    for (auto now = Clock::now(); now < wake; now = Clock::now()) {
      auto d = socket.receive(std::chrono::duration_cast<std::chrono::microseconds>(wake - now));
      if (!d) continue;
      const auto at = Clock::now();
      Packet fb;
      try {
        fb = decode(d->bytes);
      } catch (const Error&) {
        ++bwd.dropped;
        continue;
      }
      if (fb.kind != PacketKind::Haptic) continue;
      last_heard = at;
      if (op.newest_feedback_seq && fb.seq <= *op.newest_feedback_seq) {
        ++bwd.late;
        continue;
      }
      ++bwd.delivered;
      op.newest_feedback_seq = fb.seq;
      fresh = fb.value;
      log_sample(record.curve.samples, {ms_since(origin, at), fb.x, op.y, fb.value});
    }
    if (Clock::now() - last_heard > options.timeout) {
      throw Error(Errc::Timeout, "no feedback within " + std::to_string(options.timeout.count()) + " ms");
    }
    op = pi_update(op, fresh.value_or(op.last_p), cfg);
  }

  const Packet fin{PacketKind::Kinematic, kFinSeq, 0, 0.0, 0.0};
  for (int i = 0; i < 3; ++i) socket.send_to(encode(fin, cfg.packet_size_B, rng), to);
  bwd.sent = bwd.delivered + bwd.late + bwd.dropped;
  return record;
}

}  // namespace

StepResponseCurve serve_plant(const LoopConfig& cfg, const DatagramSocket& socket, const SocketOptions& options) {
  return serve(cfg, socket, options, std::nullopt);
}

StepExperimentRecord run_socket_operator(const LoopConfig& cfg, const DatagramSocket& socket, const Endpoint& plant,
                                         const SocketOptions& options) {
  return operate(cfg, socket, plant, options, Clock::now());
}

StepExperimentRecord run_socket_experiment(const LoopConfig& cfg, const SocketOptions& options) {
  cfg.validate();
  DatagramSocket plant_socket(Endpoint{"127.0.0.1", 0});
  DatagramSocket operator_socket(Endpoint{"127.0.0.1", 0});
  const Endpoint plant_ep{"127.0.0.1", plant_socket.local_port()};
  const auto origin = Clock::now() + std::chrono::milliseconds(5);

  auto plant = std::async(std::launch::async, [&] { return serve(cfg, plant_socket, options, origin); });
  StepExperimentRecord record;
  try {
    record = operate(cfg, operator_socket, plant_ep, options, origin);
  } catch (...) {
    // Unblock the plant before propagating.
    Rng rng(0);
    plant_socket.send_to(encode({PacketKind::Kinematic, kFinSeq, 0, 0.0, 0.0}, kMinPacketBytes, rng), plant_ep);
    plant.wait();
    throw;
  }
  record.curve = plant.get();
  auto& fwd = record.stats[index(Direction::Forward)];
  fwd.delivered = record.curve.samples.size();
  fwd.dropped = fwd.sent - fwd.delivered;
  return record;
}

}  // namespace tcps
