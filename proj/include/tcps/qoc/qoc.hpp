#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "tcps/core/metrics.hpp"
#include "tcps/loop_sim/config.hpp"
#include "tcps/loop_sim/runner.hpp"
#include "tcps/transport/channel.hpp"

namespace tcps {

/// Rise time of the ideal system, in ms. A fixed reference, never re-measured.
inline constexpr double kIdealRiseTimeMs = 1.5;

/// log10(1.5 / t_r). Throws Error{NonPositiveRiseTime}.
double qoc_value(double rise_time_ms);

/// Maximum hand speed in m/s: min(1, 10^qoc).
double v_max(double qoc);

/// 95% confidence half-width of a goodness fraction g over m trials.
double goodness_ci_halfwidth(double g, std::size_t m);

struct SearchConfig {
  double delta_min_ms = 0.1;
  double delta_max_ms = 10.0;
  double delta_step_ms = 0.1;
  double ci_halfwidth = 0.05;
  std::size_t batch = 50;
  std::size_t m_max = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  void validate() const;
  /// Ascending Δ grid, each value rounded to the nanosecond.
  std::vector<double> grid() const;
  /// Seed of trial `i`; the same at every Δ so that runs are comparable.
  std::uint64_t trial_seed(std::size_t i) const;
};

struct TrialOutcome {
  bool good = false;
  std::optional<double> rise_time_ms;
};

/// One experiment at loop wait `delta_ms` driven by `seed`.
using TrialRunner = std::function<TrialOutcome(double delta_ms, std::uint64_t seed)>;

/// Builds a fresh channel for a trial seed.
using ChannelFactory = std::function<std::unique_ptr<SimChannel>(std::uint64_t seed)>;

/// Step experiments with `base` (Δ and seed replaced per trial). Curves with
/// no detectable step or no samples count as bad.
TrialRunner step_trial_runner(const LoopConfig& base, ChannelFactory channel, GoodnessLimits limits = {});

struct GoodnessEstimate {
  double delta_ms = 0.0;
  std::size_t m = 0;
  std::size_t good = 0;
  double g = 0.0;
  double ci_halfwidth = 0.0;
  bool cap_exceeded = false;  // m_max reached with the interval still too wide
  std::optional<double> rise_time_mean_ms;  // over good curves
};

/// Runs batches of trials at Δ until the 95% interval of g is within
/// search.ci_halfwidth or m reaches search.m_max.
GoodnessEstimate estimate_goodness(const TrialRunner& runner, double delta_ms, const SearchConfig& search);

/// Smallest grid Δ whose single run is good. Throws Error{NoGoodDelta}.
double find_delta_opt(const TrialRunner& runner, const SearchConfig& search);

struct QoCResult {
  double g_spec = 1.0;
  double delta_opt_bar_ms = 0.0;
  double g_achieved = 0.0;
  double g_ci_halfwidth = 0.0;
  std::size_t m = 0;
  bool cap_exceeded = false;
  double rise_time_mean_ms = 0.0;
  double qoc = 0.0;
  double v_max_mps = 0.0;
};

/// Goodness estimates per grid Δ, computed on first use and shared by every
/// g_spec target.
class GoodnessTable {
 public:
  GoodnessTable(TrialRunner runner, SearchConfig search);

  const GoodnessEstimate& at(std::size_t grid_index);
  const std::vector<double>& grid() const { return grid_; }

  /// Smallest grid Δ with g >= g_spec. Throws Error{NoGoodDelta}.
  QoCResult delta_opt_bar(double g_spec);

 private:
  TrialRunner runner_;
  SearchConfig search_;
  std::vector<double> grid_;
  std::map<std::size_t, GoodnessEstimate> cache_;
};

QoCResult find_delta_opt_bar(const TrialRunner& runner, double g_spec, const SearchConfig& search);

struct PerfPoint {
  double g_spec = 0.0;
  std::optional<QoCResult> result;  // unset when no grid Δ reaches g_spec
};

struct PerfCurve {
  std::vector<PerfPoint> points;
};

/// One QoC per g_spec (ascending, in (0, 1]).
PerfCurve perf_curve(const TrialRunner& runner, const std::vector<double>& g_specs, const SearchConfig& search);

enum class Winner { First, Second, Tie, Undetermined };

/// Per-g_spec winner of two curves over the same targets: the higher QoC
/// wins; a missing point loses to a present one.
std::vector<std::pair<double, Winner>> compare_curves(const PerfCurve& first, const PerfCurve& second);

/// CSV with header `g_spec,delta_opt_ms,t_r_ms,qoc,v_max`; absent points
/// leave the numeric fields empty.
void write_perf_curve_csv(std::ostream& out, const PerfCurve& curve);

/// Integral of |P_ref - signal| from t0 to the last sample, each sample held
/// until the next one (units·ms). Throws Error{NoStepDetected}.
double iae(const StepResponseCurve& curve);
double iae(const StepResponseCurve& curve, double t0_ms);

/// J = 1/2 * integral of (R*u^2 + Q*s^2) from t0, with u the operator's
/// command increment and s the signal error, both held between samples.
double quad_cost(const StepResponseCurve& curve, const std::vector<OperatorSample>& operator_trace, double r,
                 double q);
double quad_cost(const StepResponseCurve& curve, const std::vector<OperatorSample>& operator_trace, double r, double q,
                 double t0_ms);

}  // namespace tcps
