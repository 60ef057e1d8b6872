#pragma once

#include <cstddef>
#include <vector>

#include "tcps/loop_sim/config.hpp"

namespace tcps {

struct OracleStep {
  std::size_t l = 0;
  double y = 0.0;  // command issued at loop l
  double p = 0.0;  // plant response to that command
};

/// Closed-form reference for a lossless channel with RTT < delta:
///   y_{l+1} = y_l (1 - kp*g/k2_eff(l)) + kp*ref,   P_l = g*y_l/k2_eff(l)
/// where g is the plant gain and k2_eff switches from 1 to k2 at the step.
/// Iterated directly; shares no code with the event-driven runner.
std::vector<OracleStep> oracle_trace(const LoopConfig& cfg, std::size_t n_steps);

}  // namespace tcps
