#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tcps/core/types.hpp"
#include "tcps/loop_sim/config.hpp"
#include "tcps/transport/channel.hpp"

namespace tcps {

struct OperatorSample {
  double t_ms = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct ChannelStats {
  std::uint64_t sent = 0;
  std::uint64_t dropped = 0;
  std::uint64_t delivered = 0;
  // Delivered but discarded because a newer sequence number had been seen.
  std::uint64_t late = 0;
};

struct StepExperimentRecord {
  StepResponseCurve curve;  // plant log, one sample per accepted command
  std::vector<OperatorSample> operator_trace;  // one entry per send
  std::array<ChannelStats, 2> stats{};  // indexed by Direction
};

/// Runs one experiment on the virtual clock.
///
/// Operator: at t = l*delta it sends (x, y), waits delta, takes the freshest
/// feedback that arrived (or keeps the previous one) and applies pi_update.
/// Teleoperator: on every accepted command it updates the robot (optional
/// lag), computes the plant signal, logs it and replies immediately. Both
/// sides drop packets older than the newest sequence number seen. The run
/// ends when the sweep is exhausted, at t = loops*delta.
///
/// Deterministic for a deterministic channel.
StepExperimentRecord run_step_experiment(const LoopConfig& cfg, SimChannel& channel);

}  // namespace tcps
