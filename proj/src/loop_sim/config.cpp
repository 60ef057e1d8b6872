#include "tcps/loop_sim/config.hpp"

#include <cmath>

#include "tcps/error.hpp"

namespace tcps {

double LoopConfig::step_location() const {
  if (step_at) return *step_at;
  return setting == Setting::Haptic ? sweep / 2.0 : 50.0;
}

std::size_t LoopConfig::loop_count() const {
  // Haptic: x = 0, 1, ..., while x < X.  Non-haptic: n = 1, ..., X.
  return static_cast<std::size_t>(std::ceil(sweep));
}

void LoopConfig::validate() const {
  auto bad = [](const char* what) { throw Error(Errc::InvalidArgument, what); };
  if (!(delta_ms > 0.0) || !std::isfinite(delta_ms)) bad("loop wait time must be > 0");
  if (!(k2 > 1.0)) bad("k2 must be > 1");
  if (!(kp * k1 > 0.0)) bad("kp*k1 must be > 0");
  if (!(sweep >= 2.0) || !std::isfinite(sweep)) bad("sweep must be >= 2");
  const double s = step_location();
  if (!(s > first_coordinate()) || !(s < first_coordinate() + static_cast<double>(loop_count()))) {
    bad("step location must lie inside the sweep");
  }
  if (!(robot_tau_ms >= 0.0)) bad("robot lag constant must be >= 0");
  if (packet_size_B < kMinPacketBytes) bad("packet size below the 32-byte minimum");
  if (!std::isfinite(reference)) bad("reference must be finite");
}

}  // namespace tcps
