#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "tcps/qoc/qoc.hpp"
#include "tcps/transport/channel.hpp"

namespace tcps {

/// Speeds in m/s (equivalently mm/ms).
struct SpeedBand {
  double lo_mps = 0.0;
  double hi_mps = 0.0;
};

/// Two-band step speed distribution: exactly round(slow_fraction * N) of the
/// N steps draw from `slow`, the rest from `fast`.
struct SpeedDist {
  SpeedBand slow;
  SpeedBand fast;
  double slow_fraction = 1.0;
  bool random_sign = true;

  /// Slow steps below threshold/2, fast steps between 2x and 3x threshold.
  static SpeedDist bimodal(double threshold_mps, double below_fraction);
  /// Every step at speed `s`, always in the same direction.
  static SpeedDist constant(double s_mps);

  void validate() const;
};

struct FileSource {
  std::string path;
};

struct SyntheticSource {
  std::uint64_t seed = 0;
  SpeedDist dist;
};

/// 1-D hand position in mm sampled at fs_hz.
struct HandTrajectory {
  double fs_hz = 0.0;
  std::vector<double> positions;
  std::variant<FileSource, SyntheticSource> source;

  void validate() const;
  double period_ms() const { return 1000.0 / fs_hz; }
  double duration_ms() const;
  /// Linear interpolation at t (ms from the first sample), held at the ends.
  double position_at(double t_ms) const;
};

/// `t_s,pos_mm` rows, or `pos_mm` rows with a `# fs_hz=<value>` line.
/// A header row is optional. Throws Error{ConfigParse} with the line number.
HandTrajectory read_trajectory_csv(std::istream& in, const std::string& path = "");
HandTrajectory read_trajectory_csv(const std::string& path);
void write_trajectory_csv(std::ostream& out, const HandTrajectory& traj);

HandTrajectory synth_trajectory(double fs_hz, double duration_s, const SpeedDist& dist, std::uint64_t seed);

/// Fraction of steps with |v| < threshold.
double fraction_below(const HandTrajectory& traj, double threshold_mps);

/// Percentage of steps with |v| < v_max. Throws Error{TooShort}.
double predict_E(const HandTrajectory& traj, double v_max_mps);

struct HistogramBin {
  double lo_mm = 0.0;
  double hi_mm = 0.0;
  double pct = 0.0;
};

inline constexpr double kErrorBinMm = 0.1;
inline constexpr double kVisibleErrorMm = 1.0;

struct MeasuredE {
  double e_pct = 0.0;
  std::size_t samples = 0;
  std::vector<HistogramBin> histogram;  // contiguous 0.1 mm bins, sums to 100
};

/// Replays the trajectory as position commands at its fs. The robot follows
/// through a first-order lag and echoes its position on every command; each
/// echo is compared with the hand position at the arrival instant.
/// Throws Error{ChannelClosed}, or Error{Timeout} if no echo ever arrives.
MeasuredE measure_E(const HandTrajectory& traj, SimChannel& channel, double robot_tau_ms);

struct SicknessReport {
  double v_max_mps = 0.0;
  double predicted_E_pct = 0.0;
  double measured_E_pct = 0.0;
  std::vector<HistogramBin> error_histogram;
};

SicknessReport sickness_report(const HandTrajectory& traj, double v_max_mps, SimChannel& channel,
                               double robot_tau_ms);

void write_report(std::ostream& out, const SicknessReport& report);
void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& histogram);

struct SpeedError {
  double speed_mps = 0.0;
  double peak_error_mm = 0.0;
  bool exceeds = false;  // peak > 1 mm
};

/// Constant-speed tracking through a display refreshed once per loop period
/// (t_r / 1.5, the ideal rise time spanning 1.5 loops). Throws
/// Error{NonPositiveInput} for speeds <= 0.
std::vector<SpeedError> error_trace_vs_speed(const QoCResult& qoc, const std::vector<double>& speeds_mps);

/// Robot lag of the vrep-like setup, in ms.
inline constexpr double kVrepLikeRobotTauMs = 10.0;

/// 5 ms / 10 Mbps switch links, tactile endpoints two hops apart, no
/// background traffic.
std::unique_ptr<SimChannel> vrep_like_channel(std::uint64_t seed);

}  // namespace tcps
