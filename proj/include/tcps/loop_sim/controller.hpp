#pragma once

#include <cstdint>
#include <optional>

#include "tcps/loop_sim/config.hpp"

namespace tcps {

/// Operator-side PI controller state.
struct ControllerState {
  double x = 0.0;       // sweep coordinate (cm) or epoch n
  double y = 0.0;       // commanded coordinate
  double last_p = 0.0;  // last received feedback (last-value hold)
  std::uint32_t next_seq = 0;
  std::optional<std::uint32_t> newest_feedback_seq;

  static ControllerState initial(const LoopConfig& cfg);
};

/// One controller iteration: error = ref - P, y += kp*error, advance x by one.
ControllerState pi_update(ControllerState state, double feedback, const LoopConfig& cfg);

/// Pressure at the end effector: k1*y before the material transition,
/// k1*y/k2 from x >= X/2 on.
double plant_haptic(double x, double y, const LoopConfig& cfg);

/// Camera-observed coordinate: y before epoch 50, y/k2 from then on.
double plant_nonhaptic(double n, double y, const LoopConfig& cfg);

/// Dispatches on cfg.setting.
double plant_response(double coordinate, double y, const LoopConfig& cfg);

/// First-order lag of the robot toward its commanded coordinate over `dt_ms`.
/// tau = 0 is a pass-through. Throws Error{NegativeTau}.
double robot_lag(double y_cmd, double y_state, double dt_ms, double tau_ms);

}  // namespace tcps
