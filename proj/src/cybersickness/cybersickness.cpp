#include "tcps/cybersickness/cybersickness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "tcps/core/csv.hpp"
#include "tcps/core/rng.hpp"
#include "tcps/error.hpp"
#include "tcps/loop_sim/controller.hpp"
#include "tcps/netsim/network_sim.hpp"

namespace tcps {

SpeedDist SpeedDist::bimodal(double threshold_mps, double below_fraction) {
  return {{0.0, 0.5 * threshold_mps}, {2.0 * threshold_mps, 3.0 * threshold_mps}, below_fraction, true};
}

SpeedDist SpeedDist::constant(double s_mps) { return {{s_mps, s_mps}, {s_mps, s_mps}, 1.0, false}; }

void SpeedDist::validate() const {
  for (const auto& b : {slow, fast}) {
    if (!(b.lo_mps >= 0.0 && b.hi_mps >= b.lo_mps && std::isfinite(b.hi_mps))) {
      throw Error(Errc::InvalidArgument, "speed band needs 0 <= lo <= hi");
    }
  }
  if (!(slow_fraction >= 0.0 && slow_fraction <= 1.0)) {
    throw Error(Errc::InvalidArgument, "slow_fraction must lie in [0, 1]");
  }
}

void HandTrajectory::validate() const {
  if (!(fs_hz > 0.0) || !std::isfinite(fs_hz)) throw Error(Errc::InvalidArgument, "fs must be > 0");
  if (positions.size() < 2) throw Error(Errc::TooShort, "trajectory needs at least 2 samples");
  for (double p : positions) {
    if (!std::isfinite(p)) throw Error(Errc::InvalidArgument, "trajectory has a non-finite sample");
  }
}

double HandTrajectory::duration_ms() const {
  return positions.empty() ? 0.0 : static_cast<double>(positions.size() - 1) * period_ms();
}

double HandTrajectory::position_at(double t_ms) const {
  const double u = t_ms / period_ms();
  if (u <= 0.0) return positions.front();
  const auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= positions.size()) return positions.back();
  const double frac = u - static_cast<double>(i);
  return positions[i] + frac * (positions[i + 1] - positions[i]);
}

namespace {

double parse_field(std::string_view field, std::size_t line_no) {
  try {
    return parse_number(field, line_no);
  } catch (const Error& e) {
    throw Error(Errc::ConfigParse, e.what());
  }
}

bool is_number(std::string_view field) {
  while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
  return !field.empty() && (std::isdigit(static_cast<unsigned char>(field.front())) || field.front() == '-' ||
                            field.front() == '+' || field.front() == '.');
}

}  // namespace

HandTrajectory read_trajectory_csv(std::istream& in, const std::string& path) {
  HandTrajectory traj;
  traj.source = FileSource{path};
  std::optional<double> header_fs;
  std::vector<double> times;
  std::size_t columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("fs_hz=");
      if (pos != std::string::npos) header_fs = parse_field(std::string_view(line).substr(pos + 6), line_no);
      continue;
    }
    const auto f = split_csv_line(line);
    if (!is_number(f.front())) {
      if (columns == 0 && traj.positions.empty()) continue;  // header row
      throw Error(Errc::ConfigParse, "line " + std::to_string(line_no) + ": expected a number");
    }
    if (columns == 0) columns = f.size();
    if (f.size() != columns || columns > 2) {
      throw Error(Errc::ConfigParse, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(columns == 0 ? 1 : std::min<std::size_t>(columns, 2)) +
                                         " fields");
    }
    if (columns == 2) times.push_back(parse_field(f[0], line_no));
    traj.positions.push_back(parse_field(f.back(), line_no));
  }
  if (traj.positions.size() < 2) throw Error(Errc::TooShort, "trajectory needs at least 2 samples");
  if (columns == 2) {
    const double span = times.back() - times.front();
    if (!(span > 0.0)) throw Error(Errc::ConfigParse, "time column must increase");
    traj.fs_hz = static_cast<double>(times.size() - 1) / span;
    const double period = 1.0 / traj.fs_hz;
    for (std::size_t i = 1; i < times.size(); ++i) {
      if (std::abs(times[i] - times[i - 1] - period) > 1e-3 * period) {
        throw Error(Errc::ConfigParse, "time column is not uniformly sampled near row " + std::to_string(i + 1));
      }
    }
  } else {
    if (!header_fs) throw Error(Errc::ConfigParse, "position-only file needs a '# fs_hz=<value>' line");
    traj.fs_hz = *header_fs;
  }
  try {
    traj.validate();
  } catch (const Error& e) {
    throw Error(Errc::ConfigParse, e.what());
  }
  return traj;
}

HandTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot read " + path);
  return read_trajectory_csv(in, path);
}

void write_trajectory_csv(std::ostream& out, const HandTrajectory& traj) {
  out << "# fs_hz=" << format_number(traj.fs_hz) << "\npos_mm\n";
  for (double p : traj.positions) out << format_number(p) << '\n';
}

HandTrajectory synth_trajectory(double fs_hz, double duration_s, const SpeedDist& dist, std::uint64_t seed) {
  dist.validate();
  if (!(fs_hz > 0.0) || !(duration_s > 0.0)) throw Error(Errc::InvalidArgument, "fs and duration must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(fs_hz * duration_s));
  if (n < 1) throw Error(Errc::TooShort, "duration shorter than one sample period");
  const auto n_slow = static_cast<std::size_t>(std::llround(dist.slow_fraction * static_cast<double>(n)));

  Rng rng(seed);
  std::vector<double> speeds(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SpeedBand& b = i < n_slow ? dist.slow : dist.fast;
    speeds[i] = b.lo_mps + (b.hi_mps - b.lo_mps) * uniform01(rng);
  }
  // Fisher-Yates on our own uniform draws keeps the order library-independent.
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
    std::swap(speeds[i], speeds[j]);
  }

  HandTrajectory traj;
  traj.fs_hz = fs_hz;
  traj.source = SyntheticSource{seed, dist};
  traj.positions.reserve(n + 1);
  traj.positions.push_back(0.0);
  const double period_ms = 1000.0 / fs_hz;
  for (double v : speeds) {
    const double sign = dist.random_sign && (rng() & 1u) ? -1.0 : 1.0;
    traj.positions.push_back(traj.positions.back() + sign * v * period_ms);
  }
  return traj;
}

double fraction_below(const HandTrajectory& traj, double threshold_mps) {
  traj.validate();
  std::size_t below = 0;
  const std::size_t steps = traj.positions.size() - 1;
  for (std::size_t i = 0; i < steps; ++i) {
    const double v_mps = (traj.positions[i + 1] - traj.positions[i]) * traj.fs_hz / 1000.0;
    if (std::abs(v_mps) < threshold_mps) ++below;
  }
  return static_cast<double>(below) / static_cast<double>(steps);
}

double predict_E(const HandTrajectory& traj, double v_max_mps) { return 100.0 * fraction_below(traj, v_max_mps); }

MeasuredE measure_E(const HandTrajectory& traj, SimChannel& channel, double robot_tau_ms) {
  traj.validate();
  if (robot_tau_ms < 0.0) throw Error(Errc::NegativeTau, "robot tau must be >= 0");

  std::vector<double> errors;
  double robot_y = traj.positions.front();
  std::optional<SimTime> last_rx;
  std::optional<std::uint32_t> newest;

  auto handle = [&](const Delivery& d) {
    if (d.dir == Direction::Forward) {
      if (newest && d.packet.seq <= *newest) return;
      newest = d.packet.seq;
      const double dt = last_rx ? to_ms(d.at - *last_rx) : 0.0;
      last_rx = d.at;
      robot_y = robot_lag(d.packet.value, robot_y, dt, robot_tau_ms);
      channel.send(Direction::Backward, {PacketKind::Haptic, d.packet.seq, 0, d.packet.x, robot_y}, kMinPacketBytes,
                   d.at);
    } else {
      errors.push_back(d.packet.value - traj.position_at(to_ms(d.at)));
    }
  };

  const double period = traj.period_ms();
  for (std::size_t k = 0; k < traj.positions.size(); ++k) {
    const SimTime now = from_ms(static_cast<double>(k) * period);
    while (auto d = channel.poll(now)) handle(*d);
    const auto seq = static_cast<std::uint32_t>(k);
    channel.send(Direction::Forward, {PacketKind::Kinematic, seq, seq, static_cast<double>(k), traj.positions[k]},
                 kMinPacketBytes, now);
  }
  // Late echoes still count; the hand is held at its last sample.
  const SimTime drain = from_ms(traj.duration_ms() + 10000.0);
  while (auto d = channel.poll(drain)) handle(*d);

  if (errors.empty()) throw Error(Errc::Timeout, "no position feedback arrived");

  MeasuredE out;
  out.samples = errors.size();
  std::size_t within = 0;
  std::map<long long, std::size_t> bins;
  for (double e : errors) {
    if (std::abs(e) <= kVisibleErrorMm) ++within;
    ++bins[static_cast<long long>(std::floor(e / kErrorBinMm))];
  }
  const double n = static_cast<double>(errors.size());
  out.e_pct = 100.0 * static_cast<double>(within) / n;
  for (long long b = bins.begin()->first; b <= bins.rbegin()->first; ++b) {
    const auto it = bins.find(b);
    const double count = it == bins.end() ? 0.0 : static_cast<double>(it->second);
    out.histogram.push_back({static_cast<double>(b) * kErrorBinMm, static_cast<double>(b + 1) * kErrorBinMm,
                             100.0 * count / n});
  }
  return out;
}

SicknessReport sickness_report(const HandTrajectory& traj, double v_max_mps, SimChannel& channel,
                               double robot_tau_ms) {
  SicknessReport r;
  r.v_max_mps = v_max_mps;
  r.predicted_E_pct = predict_E(traj, v_max_mps);
  auto m = measure_E(traj, channel, robot_tau_ms);
  r.measured_E_pct = m.e_pct;
  r.error_histogram = std::move(m.histogram);
  return r;
}

void write_report(std::ostream& out, const SicknessReport& report) {
  out << "v_max_mps: " << format_number(report.v_max_mps) << '\n'
      << "predicted_E_pct: " << format_number(report.predicted_E_pct) << '\n'
      << "measured_E_pct: " << format_number(report.measured_E_pct) << '\n'
      << "histogram_bins: " << report.error_histogram.size() << '\n';
}

void write_histogram_csv(std::ostream& out, const std::vector<HistogramBin>& histogram) {
  out << "lo_mm,hi_mm,pct\n";
  for (const auto& b : histogram) {
    out << format_number(b.lo_mm) << ',' << format_number(b.hi_mm) << ',' << format_number(b.pct) << '\n';
  }
}

std::vector<SpeedError> error_trace_vs_speed(const QoCResult& qoc, const std::vector<double>& speeds_mps) {
  const double loop_ms = qoc.rise_time_mean_ms / 1.5;
  if (!(loop_ms > 0.0)) throw Error(Errc::NonPositiveInput, "rise time must be > 0");
  constexpr int kPeriods = 10;
  constexpr int kSubsteps = 1000;
  std::vector<SpeedError> out;
  for (double v : speeds_mps) {
    if (!(v > 0.0)) throw Error(Errc::NonPositiveInput, "hand speed must be > 0");
    // Hand y = v t; the displayed robot position y' is the hand position at
    // the latest refresh.
    double peak = 0.0;
    for (int i = 0; i < kPeriods * kSubsteps; ++i) {
      const double t = loop_ms * static_cast<double>(i) / kSubsteps;
      const double shown = v * loop_ms * std::floor(static_cast<double>(i) / kSubsteps);
      peak = std::max(peak, std::abs(v * t - shown));
    }
    out.push_back({v, peak, peak > kVisibleErrorMm});
  }
  return out;
}

std::unique_ptr<SimChannel> vrep_like_channel(std::uint64_t seed) {
  return std::make_unique<NetworkChannel>(usnet_nw(5.0, 10e6, 0, 8), std::vector<TrafficFlow>{}, seed);
}

}  // namespace tcps
