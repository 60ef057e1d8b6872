#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace tcps {

enum class Setting { Haptic, NonHaptic };

std::string_view to_string(Setting s);
Setting setting_from_string(std::string_view s);

/// One plant-side observation.
///  t_ms:   arrival time of the command that produced this value
///  x:      sweep coordinate in cm (haptic) or epoch index n (non-haptic)
///  y:      commanded coordinate carried by that command
///  signal: controlled quantity (pressure units, or robot y' in mm)
struct Sample {
  double t_ms = 0.0;
  double x = 0.0;
  double y = 0.0;
  double signal = 0.0;
};

/// Where the imposed step sits and what it does to the signal. The band
/// levels used by metric extraction derive from these three numbers.
struct StepBand {
  double reference = 100.0;  // P_ref or Y_ref
  double k2 = 1.25;
  // Sweep coordinate at which the step is applied. When present, the step
  // edge is searched for only among samples with x >= step_at.
  std::optional<double> step_at;

  double low() const { return reference / k2; }
  double span() const { return reference - low(); }
  double level(double fraction) const { return low() + fraction * span(); }
};

struct StepResponseCurve {
  std::vector<Sample> samples;
  StepBand band;
  Setting setting = Setting::Haptic;
};

struct GoodnessLimits {
  double overshoot_max_pct = 20.0;
  double sse_max_pct = 10.0;

  void validate() const;
};

struct CurveMetrics {
  double t0_ms = 0.0;
  std::optional<double> t1_ms;
  std::optional<double> t2_ms;
  std::optional<double> rise_time_ms;  // t2 - t0; absent when the curve never rises
  double overshoot_pct = 0.0;
  double steady_state_error_pct = 0.0;
  double undershoot_pct = 0.0;
  std::optional<double> settling_time_ms;
  double delta_y = 0.0;
  bool is_good = false;

  bool rose() const { return t2_ms.has_value(); }
};

}  // namespace tcps
