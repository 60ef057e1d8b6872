#include "tcps/loop_sim/runner.hpp"

#include <optional>

#include "tcps/loop_sim/controller.hpp"

namespace tcps {

namespace {

class Teleoperator {
 public:
  Teleoperator(const LoopConfig& cfg, StepExperimentRecord& record)
      : cfg_(cfg), record_(record), robot_y_(cfg.initial_y()) {}

  void on_command(const Delivery& d, SimChannel& channel) {
    const Packet& cmd = d.packet;
    if (seen_any_ && cmd.seq <= newest_) {
      ++record_.stats[index(Direction::Forward)].late;
      return;
    }
    seen_any_ = true;
    newest_ = cmd.seq;

    const double dt_ms = last_rx_ ? to_ms(d.at - *last_rx_) : to_ms(d.at);
    last_rx_ = d.at;
    robot_y_ = robot_lag(cmd.value, robot_y_, dt_ms, cfg_.robot_tau_ms);
    const double signal = plant_response(cmd.x, robot_y_, cfg_);

    auto& samples = record_.curve.samples;
    const Sample s{to_ms(d.at), cmd.x, cmd.value, signal};
    if (!samples.empty() && samples.back().t_ms == s.t_ms) {
      samples.back() = s;  // same instant: the newer command wins
    } else {
      samples.push_back(s);
    }

    Packet reply{PacketKind::Haptic, next_seq_++, cmd.epoch, cmd.x, signal};
    channel.send(Direction::Backward, reply, cfg_.packet_size_B, d.at);
  }

 private:
  const LoopConfig& cfg_;
  StepExperimentRecord& record_;
  double robot_y_;
  bool seen_any_ = false;
  std::uint32_t newest_ = 0;
  std::optional<SimTime> last_rx_;
  std::uint32_t next_seq_ = 0;
};

}  // namespace

StepExperimentRecord run_step_experiment(const LoopConfig& cfg, SimChannel& channel) {
  cfg.validate();

  StepExperimentRecord record;
  record.curve.band = cfg.band();
  record.curve.setting = cfg.setting;

  Teleoperator plant(cfg, record);
  ControllerState op = ControllerState::initial(cfg);
  const SimTime delta = from_ms(cfg.delta_ms);
  const std::size_t loops = cfg.loop_count();

  for (std::size_t l = 0; l < loops; ++l) {
    const SimTime now = delta * static_cast<std::int64_t>(l);
    const Packet cmd{PacketKind::Kinematic, op.next_seq++, static_cast<std::uint32_t>(op.x), op.x, op.y};
    record.operator_trace.push_back({to_ms(now), op.x, op.y});
    channel.send(Direction::Forward, cmd, cfg.packet_size_B, now);

    const SimTime wake = delta * static_cast<std::int64_t>(l + 1);
    std::optional<double> fresh;
    while (auto d = channel.poll(wake)) {
      if (d->dir == Direction::Forward) {
        plant.on_command(*d, channel);
        continue;
      }
      if (op.newest_feedback_seq && d->packet.seq <= *op.newest_feedback_seq) {
        ++record.stats[index(Direction::Backward)].late;
        continue;
      }
      op.newest_feedback_seq = d->packet.seq;
      fresh = d->packet.value;
    }
    op = pi_update(op, fresh.value_or(op.last_p), cfg);
  }

  for (auto dir : {Direction::Forward, Direction::Backward}) {
    const auto& c = channel.counters(dir);
    auto& s = record.stats[index(dir)];
    s.sent = c.sent;
    s.dropped = c.dropped;
    s.delivered = c.delivered;
  }
  return record;
}

}  // namespace tcps
