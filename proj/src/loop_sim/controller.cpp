#include "tcps/loop_sim/controller.hpp"

#include <cmath>

#include "tcps/error.hpp"

namespace tcps {

ControllerState ControllerState::initial(const LoopConfig& cfg) {
  ControllerState s;
  s.x = cfg.first_coordinate();
  s.y = cfg.initial_y();
  // Before any feedback arrives, assume the plant sits at its response to
  // the initial command.
  s.last_p = plant_response(s.x, s.y, cfg);
  return s;
}

ControllerState pi_update(ControllerState state, double feedback, const LoopConfig& cfg) {
  const double error = cfg.reference - feedback;
  state.y += cfg.kp * error;
  state.x += 1.0;
  state.last_p = feedback;
  return state;
}

double plant_haptic(double x, double y, const LoopConfig& cfg) {
  return x < cfg.step_location() ? cfg.k1 * y : cfg.k1 * y / cfg.k2;
}

double plant_nonhaptic(double n, double y, const LoopConfig& cfg) {
  const double k2_eff = n < cfg.step_location() ? 1.0 : cfg.k2;
  return y / k2_eff;
}

double plant_response(double coordinate, double y, const LoopConfig& cfg) {
  return cfg.setting == Setting::Haptic ? plant_haptic(coordinate, y, cfg) : plant_nonhaptic(coordinate, y, cfg);
}

double robot_lag(double y_cmd, double y_state, double dt_ms, double tau_ms) {
  if (tau_ms < 0.0) throw Error(Errc::NegativeTau, "robot lag constant must be >= 0");
  if (tau_ms == 0.0) return y_cmd;
  if (std::isinf(dt_ms)) return y_cmd;
  return y_state + (y_cmd - y_state) * (1.0 - std::exp(-dt_ms / tau_ms));
}

}  // namespace tcps
