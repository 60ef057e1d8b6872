#include "tcps/core/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "tcps/error.hpp"

namespace tcps {

namespace {

// Settling band used for the diagnostic settling time, as a fraction of S.
constexpr double kSettlingBand = 0.05;

double interpolate_crossing(const Sample& a, const Sample& b, double level) {
  const double ds = b.signal - a.signal;
  if (ds == 0.0) return b.t_ms;
  return a.t_ms + (level - a.signal) / ds * (b.t_ms - a.t_ms);
}

// Index of the first sample at or after `from` whose signal is >= level,
// given that sample from-1 (if any) is below it.
std::optional<std::size_t> first_rise(const std::vector<Sample>& s, std::size_t from, double level) {
  for (std::size_t i = from; i < s.size(); ++i) {
    if (s[i].signal >= level) return i;
  }
  return std::nullopt;
}

}  // namespace

void GoodnessLimits::validate() const {
  auto in_range = [](double v) { return v > 0.0 && v < 100.0; };
  if (!in_range(overshoot_max_pct) || !in_range(sse_max_pct)) {
    throw Error(Errc::InvalidArgument, "goodness limits must lie in (0, 100)");
  }
}

void validate_curve(const StepResponseCurve& curve) {
  const auto& s = curve.samples;
  if (s.size() < 2) {
    throw Error(Errc::MalformedCurve, "curve has " + std::to_string(s.size()) + " samples, need >= 2");
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i].t_ms) || !std::isfinite(s[i].signal) || s[i].t_ms < 0.0) {
      throw Error(Errc::MalformedCurve, "sample " + std::to_string(i) + " is not finite/non-negative");
    }
    if (i > 0 && !(s[i].t_ms > s[i - 1].t_ms)) {
      throw Error(Errc::MalformedCurve, "time stamps not strictly increasing at sample " + std::to_string(i));
    }
  }
  if (!(curve.band.k2 > 1.0)) {
    throw Error(Errc::MalformedCurve, "step band needs k2 > 1");
  }
}

CurveMetrics extract_metrics(const StepResponseCurve& curve, const GoodnessLimits& limits) {
  validate_curve(curve);
  limits.validate();

  const auto& s = curve.samples;
  const StepBand& band = curve.band;
  const double span = band.span();
  const double l10 = band.level(0.1);
  const double l90 = band.level(0.9);

  // Step edge.
  std::optional<std::size_t> edge;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (band.step_at && s[i].x < *band.step_at) continue;
    if (s[i].signal <= l10 && s[i - 1].signal > l10) {
      edge = i;
      break;
    }
  }
  if (!edge) throw Error(Errc::NoStepDetected, "signal never drops through the 10% band");

  CurveMetrics m;
  m.t0_ms = s[*edge].t_ms;

  if (auto j = first_rise(s, *edge, l10)) m.t1_ms = interpolate_crossing(s[*j - 1], s[*j], l10);
  std::optional<std::size_t> rise_idx = first_rise(s, *edge, l90);
  if (rise_idx) {
    m.t2_ms = interpolate_crossing(s[*rise_idx - 1], s[*rise_idx], l90);
    m.rise_time_ms = *m.t2_ms - m.t0_ms;
    m.delta_y = s[*rise_idx].y - s[*edge].y;
  }

  double peak = s[*edge].signal;
  for (std::size_t i = *edge; i < s.size(); ++i) peak = std::max(peak, s[i].signal);
  m.overshoot_pct = std::max(0.0, peak - band.reference) / span * 100.0;

  // Steady-state window: final 10% of the post-t2 duration (post-t0 when the
  // curve never rose, for diagnostics only).
  const double t_end = s.back().t_ms;
  const double anchor = m.t2_ms.value_or(m.t0_ms);
  const double window_start = t_end - 0.1 * (t_end - anchor);
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = s.rbegin(); it != s.rend() && it->t_ms >= window_start; ++it) {
    sum += it->signal;
    ++n;
  }
  if (n == 0) {
    sum = s.back().signal;
    n = 1;
  }
  m.steady_state_error_pct = std::abs(sum / static_cast<double>(n) - band.reference) / span * 100.0;

  if (rise_idx) {
    double trough = s[*rise_idx].signal;
    for (std::size_t i = *rise_idx; i < s.size(); ++i) trough = std::min(trough, s[i].signal);
    m.undershoot_pct = std::max(0.0, band.reference - trough) / span * 100.0;

    // settling: first sample after which everything stays inside the band
    const double tol = kSettlingBand * span;
    std::optional<std::size_t> settled;
    for (std::size_t i = s.size(); i-- > *edge;) {
      if (std::abs(s[i].signal - band.reference) > tol) break;
      settled = i;
    }
    if (settled) m.settling_time_ms = s[*settled].t_ms - m.t0_ms;
  }

  m.is_good = classify_good(m, limits);
  return m;
}

bool classify_good(const CurveMetrics& metrics, const GoodnessLimits& limits) {
  return metrics.rose() && metrics.overshoot_pct <= limits.overshoot_max_pct &&
         metrics.steady_state_error_pct <= limits.sse_max_pct;
}

}  // namespace tcps
