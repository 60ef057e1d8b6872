#pragma once

#include "tcps/core/types.hpp"

namespace tcps {

/// Extracts step-response metrics from a plant log.
///
/// Band levels: L10 = low + 0.1*S and L90 = low + 0.9*S with S = ref - ref/k2.
///  - t0 is the timestamp of the first sample at or below L10 that follows a
///    sample above L10 (the imposed step is a discontinuity of the plant, so
///    the edge is not interpolated).
///  - t1 and t2 are the first upward crossings of L10 and L90 after t0,
///    located by linear interpolation between the bracketing samples.
///  - overshoot = max(0, peak after t0 - ref) / S * 100.
///  - steady-state error = |mean(signal over the final 10% of the post-t2
///    duration) - ref| / S * 100.
///
/// Throws Error{MalformedCurve} for fewer than two samples, non-increasing
/// time stamps or non-finite values, and Error{NoStepDetected} when the
/// signal never drops through L10. A curve that never reaches L90 is
/// returned with t2/rise_time absent and is_good = false.
CurveMetrics extract_metrics(const StepResponseCurve& curve, const GoodnessLimits& limits = {});

bool classify_good(const CurveMetrics& metrics, const GoodnessLimits& limits = {});

void validate_curve(const StepResponseCurve& curve);

}  // namespace tcps
