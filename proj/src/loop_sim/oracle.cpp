#include "tcps/loop_sim/oracle.hpp"

namespace tcps {

std::vector<OracleStep> oracle_trace(const LoopConfig& cfg, std::size_t n_steps) {
  std::vector<OracleStep> out;
  out.reserve(n_steps);
  const double gain = cfg.setting == Setting::Haptic ? cfg.k1 : 1.0;
  const double step = cfg.setting == Setting::Haptic ? cfg.sweep / 2.0 : 50.0;
  const double step_at = cfg.step_at.value_or(step);
  double y = cfg.setting == Setting::Haptic ? 0.0 : cfg.reference;
  for (std::size_t l = 0; l < n_steps; ++l) {
    const double coordinate = (cfg.setting == Setting::Haptic ? 0.0 : 1.0) + static_cast<double>(l);
    const double k2_eff = coordinate < step_at ? 1.0 : cfg.k2;
    out.push_back({l, y, gain * y / k2_eff});
    y = y * (1.0 - cfg.kp * gain / k2_eff) + cfg.kp * cfg.reference;
  }
  return out;
}

}  // namespace tcps
