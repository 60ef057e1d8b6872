#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "tcps/core/budget.hpp"
#include "tcps/core/csv.hpp"
#include "tcps/core/metrics.hpp"
#include "tcps/error.hpp"
#include "test_util.hpp"

using namespace tcps;

namespace {

// Hand-built ideal haptic trace: sample l lands at l + 0.5 ms; the step hits
// at l = 50 and the error then shrinks by the root 0.2 every loop.
StepResponseCurve ideal_curve() {
  StepResponseCurve c;
  c.band = {100.0, 1.25, 50.0};
  c.samples.push_back({0.5, 0, 0, 0.0});
  for (int l = 1; l < 100; ++l) {
    const double signal = l < 50 ? 100.0 : 100.0 - 20.0 * std::pow(0.2, l - 50);
    c.samples.push_back({l + 0.5, double(l), 0, signal});
  }
  return c;
}

}  // namespace

TEST(ExtractMetrics, IdealCurve) {
  const auto m = extract_metrics(ideal_curve());
  // t0 at the first post-step sample; L10 = 82 crossed on 80 -> 96,
  // L90 = 98 crossed on 96 -> 99.2.
  EXPECT_DOUBLE_EQ(m.t0_ms, 50.5);
  ASSERT_TRUE(m.t1_ms && m.t2_ms && m.rise_time_ms);
  EXPECT_DOUBLE_EQ(*m.t1_ms, 50.5 + 2.0 / 16.0);
  EXPECT_DOUBLE_EQ(*m.t2_ms, 51.5 + 2.0 / 3.2);
  EXPECT_NEAR(*m.rise_time_ms, 1.625, 1e-12);
  EXPECT_DOUBLE_EQ(m.overshoot_pct, 0.0);
  EXPECT_NEAR(m.steady_state_error_pct, 0.0, 1e-9);
  EXPECT_TRUE(m.is_good);
}

TEST(ExtractMetrics, NoStepWhenFlat) {
  StepResponseCurve c;
  c.band = {100.0, 1.25, std::nullopt};
  for (int i = 0; i < 10; ++i) c.samples.push_back({double(i), double(i), 100, 100.0});
  EXPECT_ERRC(extract_metrics(c), Errc::NoStepDetected);
}

TEST(ExtractMetrics, OvershootOf105IsTwentyFivePercent) {
  auto c = ideal_curve();
  c.samples[53].signal = 105.0;
  const auto m = extract_metrics(c);
  EXPECT_NEAR(m.overshoot_pct, 25.0, 1e-12);  // (105 - 100) / 20 * 100
  EXPECT_FALSE(m.is_good);
}

TEST(ExtractMetrics, NoRiseLeavesRiseTimeUndefined) {
  auto c = ideal_curve();
  for (auto& s : c.samples)
    if (s.x >= 50) s.signal = 80.0;
  const auto m = extract_metrics(c);
  EXPECT_FALSE(m.rose());
  EXPECT_FALSE(m.rise_time_ms);
  EXPECT_FALSE(m.is_good);
  EXPECT_NEAR(m.steady_state_error_pct, 100.0, 1e-12);
}

TEST(ExtractMetrics, MalformedCurves) {
  StepResponseCurve c;
  c.samples.push_back({0, 0, 0, 100});
  EXPECT_ERRC(extract_metrics(c), Errc::MalformedCurve);
  c.samples.push_back({0, 1, 0, 80});
  EXPECT_ERRC(extract_metrics(c), Errc::MalformedCurve);
  c.samples.back().t_ms = 1.0;
  c.samples.back().signal = std::nan("");
  EXPECT_ERRC(extract_metrics(c), Errc::MalformedCurve);
}

TEST(ExtractMetrics, StartupTransientIsNotTheStep) {
  // Pre-step dip below L10 is ignored when the step location is known.
  auto c = ideal_curve();
  c.samples[10].signal = 50.0;
  EXPECT_DOUBLE_EQ(extract_metrics(c).t0_ms, 50.5);
  c.band.step_at.reset();
  EXPECT_DOUBLE_EQ(extract_metrics(c).t0_ms, 10.5);
}

TEST(ExtractMetrics, InvariantUnderTimeShift) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> shift(0.0, 500.0), noise(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto c = ideal_curve();
    for (auto& s : c.samples)
      if (s.x > 50) s.signal += noise(rng);
    const auto base = extract_metrics(c);
    const double dt = shift(rng);
    for (auto& s : c.samples) s.t_ms += dt;
    const auto moved = extract_metrics(c);
    EXPECT_NEAR(moved.t0_ms - base.t0_ms, dt, 1e-9);
    ASSERT_EQ(moved.rose(), base.rose());
    if (base.rose()) {
      EXPECT_NEAR(*moved.rise_time_ms, *base.rise_time_ms, 1e-9);
      EXPECT_LE(base.t0_ms, *base.t1_ms);
      EXPECT_LE(*base.t1_ms, *base.t2_ms);
    }
    EXPECT_NEAR(moved.overshoot_pct, base.overshoot_pct, 1e-9);
    EXPECT_NEAR(moved.steady_state_error_pct, base.steady_state_error_pct, 1e-9);
    EXPECT_EQ(moved.is_good, base.is_good);
  }
}

TEST(ClassifyGood, Boundaries) {
  CurveMetrics m;
  m.t2_ms = 1.0;
  m.overshoot_pct = 19.9;
  m.steady_state_error_pct = 9.9;
  EXPECT_TRUE(classify_good(m));
  m.overshoot_pct = 20.1;
  EXPECT_FALSE(classify_good(m));
  m.overshoot_pct = 0.0;
  m.t2_ms.reset();
  EXPECT_FALSE(classify_good(m));
}

TEST(ClassifyGood, TighteningLimitsNeverHelps) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pct(0.0, 40.0), lim(0.5, 99.0), shrink(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    CurveMetrics m;
    m.t2_ms = 1.0;
    m.overshoot_pct = pct(rng);
    m.steady_state_error_pct = pct(rng);
    GoodnessLimits loose{lim(rng), lim(rng)};
    GoodnessLimits tight{loose.overshoot_max_pct * shrink(rng) + 0.01, loose.sse_max_pct * shrink(rng) + 0.01};
    if (!classify_good(m, loose)) {
      EXPECT_FALSE(classify_good(m, tight));
    }
  }
}

TEST(GoodnessLimits, Validation) {
  EXPECT_ERRC((GoodnessLimits{0.0, 10.0}.validate()), Errc::InvalidArgument);
  EXPECT_ERRC((GoodnessLimits{20.0, 100.0}.validate()), Errc::InvalidArgument);
}

TEST(Budget, RttTable) {
  EXPECT_DOUBLE_EQ(rtt_budget(Modality::Video).max_rtt_ms, 1.0);
  EXPECT_DOUBLE_EQ(rtt_budget(Modality::Audio).max_rtt_ms, 46.0);
  EXPECT_DOUBLE_EQ(rtt_budget(Modality::Haptic).max_rtt_ms, 126.0);
  EXPECT_ERRC(modality_from_string("smell"), Errc::UnknownModality);
}

TEST(Budget, KinematicVideoRtt) {
  EXPECT_DOUBLE_EQ(max_rtt_kvl(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(max_rtt_kvl(0.5, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(max_rtt_kvl(1.0, 0.5), 2.0);
  EXPECT_ERRC(max_rtt_kvl(0.0, 1.0), Errc::NonPositiveInput);
  EXPECT_ERRC(max_rtt_kvl(1.0, 1.5), Errc::NonPositiveInput);
}

TEST(Budget, CriticalLoops) {
  using S = std::set<std::string>;
  EXPECT_EQ(critical_loops(Level::High, Level::High), (S{"kvl", "khl"}));
  EXPECT_EQ(critical_loops(Level::High, Level::Low), (S{"kvl"}));
  EXPECT_EQ(critical_loops(Level::Medium, Level::High), (S{"khl"}));
  EXPECT_EQ(critical_loops(Level::Low, Level::Low), (S{"kvl"}));
}

TEST(CurveCsv, RoundTrip) {
  const auto c = ideal_curve();
  std::stringstream ss;
  write_curve_csv(ss, c);
  EXPECT_EQ(ss.str().substr(0, 16), "t_ms,x,y,signal\n");
  const auto back = read_curve_csv(ss, c.band);
  ASSERT_EQ(back.samples.size(), c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    EXPECT_EQ(back.samples[i].t_ms, c.samples[i].t_ms);
    EXPECT_EQ(back.samples[i].signal, c.samples[i].signal);
  }
}

TEST(CurveCsv, BadHeaderAndField) {
  std::stringstream bad_header("time,signal\n1,2\n");
  EXPECT_ERRC(read_curve_csv(bad_header, {}), Errc::MalformedCurve);
  std::stringstream bad_field("t_ms,x,y,signal\n1,2,3,abc\n");
  EXPECT_ERRC(read_curve_csv(bad_field, {}), Errc::MalformedCurve);
}
