#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "tcps/core/metrics.hpp"
#include "tcps/loop_sim/controller.hpp"
#include "tcps/loop_sim/oracle.hpp"
#include "tcps/loop_sim/runner.hpp"
#include "tcps/transport/impaired_link.hpp"
#include "test_util.hpp"

using namespace tcps;

namespace {

LoopConfig ideal_config() {
  LoopConfig cfg;
  cfg.delta_ms = 1.0;
  return cfg;
}

StepExperimentRecord run(const LoopConfig& cfg, const ChannelModel& model, std::uint64_t seed = 1) {
  ImpairedChannel ch(model, seed);
  return run_step_experiment(cfg, ch);
}

}  // namespace

TEST(PiUpdate, Examples) {
  const auto cfg = ideal_config();
  ControllerState s;
  s.y = 100.0;
  s = pi_update(s, 80.0, cfg);
  EXPECT_DOUBLE_EQ(s.y, 120.0);
  EXPECT_DOUBLE_EQ(s.x, 1.0);
  s = pi_update(s, 96.0, cfg);
  EXPECT_DOUBLE_EQ(s.y, 124.0);
}

TEST(PiUpdate, FixedPointAfterStep) {
  // y* = ref*k2/k1 = 125 holds P at 100 once the step is in effect.
  const auto cfg = ideal_config();
  ControllerState s;
  s.x = 60.0;
  s.y = 125.0;
  const double p = plant_haptic(s.x, s.y, cfg);
  EXPECT_DOUBLE_EQ(p, 100.0);
  EXPECT_DOUBLE_EQ(pi_update(s, p, cfg).y, 125.0);
}

TEST(Plant, HapticStepAtHalfSweep) {
  const auto cfg = ideal_config();
  EXPECT_DOUBLE_EQ(plant_haptic(10.0, 100.0, cfg), 100.0);
  EXPECT_DOUBLE_EQ(plant_haptic(50.0, 100.0, cfg), 80.0);
  EXPECT_DOUBLE_EQ(plant_haptic(49.99, 100.0, cfg), 100.0);
}

TEST(Plant, NonHapticStepAtEpochFifty) {
  auto cfg = ideal_config();
  cfg.setting = Setting::NonHaptic;
  EXPECT_DOUBLE_EQ(plant_nonhaptic(1.0, 100.0, cfg), 100.0);
  EXPECT_DOUBLE_EQ(plant_nonhaptic(49.0, 100.0, cfg), 100.0);
  EXPECT_DOUBLE_EQ(plant_nonhaptic(50.0, 100.0, cfg), 80.0);
}

TEST(RobotLag, Examples) {
  EXPECT_DOUBLE_EQ(robot_lag(5.0, 1.0, 3.0, 0.0), 5.0);
  EXPECT_NEAR(robot_lag(1.0, 0.0, 2.0, 2.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(robot_lag(1.0, 0.0, 1e6, 2.0), 1.0, 1e-12);
  EXPECT_ERRC(robot_lag(1.0, 0.0, 1.0, -1.0), Errc::NegativeTau);
}

TEST(Oracle, PostStepSequence) {
  const auto trace = oracle_trace(ideal_config(), 100);
  // P_{50+k} = 100 - 20 * 0.2^k
  EXPECT_DOUBLE_EQ(trace[50].p, 80.0);
  EXPECT_NEAR(trace[51].p, 96.0, 1e-12);
  EXPECT_NEAR(trace[52].p, 99.2, 1e-12);
  EXPECT_NEAR(trace[53].p, 99.84, 1e-12);
  // Root 0 before the step: one update reaches the reference.
  EXPECT_DOUBLE_EQ(trace[0].p, 0.0);
  EXPECT_DOUBLE_EQ(trace[1].p, 100.0);
  EXPECT_DOUBLE_EQ(trace[49].p, 100.0);
}

TEST(Oracle, SlowerRootForLowGain) {
  auto cfg = ideal_config();
  cfg.kp = 0.6;
  const auto trace = oracle_trace(cfg, 100);
  // Post-step error contracts by 1 - 0.6/1.25 = 0.52 per loop.
  const double e0 = 100.0 - trace[51].p;
  const double e1 = 100.0 - trace[52].p;
  EXPECT_NEAR(e1 / e0, 0.52, 1e-9);
}

TEST(Oracle, RootStabilityBothWays) {
  auto cfg = ideal_config();
  cfg.kp = 2.0;  // post-step root 1 - 2/1.25 = -0.6
  auto trace = oracle_trace(cfg, 100);
  EXPECT_NEAR(trace.back().p, 100.0, 1e-6);
  cfg.kp = 3.0;  // pre-step root -2, post-step -1.4: diverges
  trace = oracle_trace(cfg, 100);
  EXPECT_GT(std::abs(trace.back().p - 100.0), 1e6);
}

TEST(Runner, IdealChannelMatchesOracle) {
  const auto cfg = ideal_config();
  const auto rec = run(cfg, ChannelModel::ideal(0.5));
  const auto oracle = oracle_trace(cfg, cfg.loop_count());
  ASSERT_EQ(rec.curve.samples.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    EXPECT_NEAR(rec.curve.samples[i].signal, oracle[i].p, 1e-9) << i;
    EXPECT_DOUBLE_EQ(rec.curve.samples[i].t_ms, i + 0.5);
  }
  const auto m = extract_metrics(rec.curve);
  ASSERT_TRUE(m.rise_time_ms);
  EXPECT_NEAR(*m.rise_time_ms, 1.625, 1e-9);
  EXPECT_TRUE(m.is_good);
  EXPECT_EQ(rec.operator_trace.size(), 100u);
  EXPECT_EQ(rec.stats[0].sent, 100u);
  EXPECT_EQ(rec.stats[0].dropped, 0u);
}

TEST(Runner, NonHapticMatchesOracle) {
  auto cfg = ideal_config();
  cfg.setting = Setting::NonHaptic;
  cfg.delta_ms = 2.0;
  const auto rec = run(cfg, ChannelModel::ideal(0.7));
  const auto oracle = oracle_trace(cfg, cfg.loop_count());
  ASSERT_EQ(rec.curve.samples.size(), oracle.size());
  for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_NEAR(rec.curve.samples[i].signal, oracle[i].p, 1e-9);
  EXPECT_DOUBLE_EQ(rec.curve.samples.front().x, 1.0);
  EXPECT_TRUE(extract_metrics(rec.curve).is_good);
}

TEST(Runner, TotalLossLeavesNoCorrection) {
  auto model = ChannelModel::ideal(0.5);
  model.forward.drop_prob = model.backward.drop_prob = 1.0;
  const auto rec = run(ideal_config(), model);
  EXPECT_TRUE(rec.curve.samples.empty());
  EXPECT_EQ(rec.stats[0].dropped, 100u);
  EXPECT_ERRC(extract_metrics(rec.curve), Errc::MalformedCurve);
}

TEST(Runner, LostFeedbackNeverRises) {
  // Commands get through but no feedback ever does: the step stays uncorrected.
  auto cfg = ideal_config();
  cfg.setting = Setting::NonHaptic;
  auto model = ChannelModel::ideal(0.5);
  model.backward.drop_prob = 1.0;
  const auto m = extract_metrics(run(cfg, model).curve);
  EXPECT_FALSE(m.rose());
  EXPECT_FALSE(m.is_good);
}

TEST(Runner, HighGainOvershootsAtStart) {
  auto cfg = ideal_config();
  cfg.kp = 1.25;
  auto rec = run(cfg, ChannelModel::ideal(0.5));
  bool above = false;
  for (const auto& s : rec.curve.samples)
    if (s.x < cfg.step_location() && s.signal > cfg.reference) above = true;
  EXPECT_TRUE(above);

  cfg.kp = 1.0;
  rec = run(cfg, ChannelModel::ideal(0.5));
  for (const auto& s : rec.curve.samples) {
    if (s.x < cfg.step_location()) {
      EXPECT_LE(s.signal, cfg.reference);
    }
  }
}

TEST(Runner, LastValueHold) {
  // Drop the feedback for x = 51; at that loop the controller reuses P(50).
  const auto cfg = ideal_config();
  auto ch = FilteredChannel(std::make_unique<ImpairedChannel>(ChannelModel::ideal(0.5), 1),
                            [](Direction d, const Packet& p) { return d == Direction::Backward && p.x == 51.0; });
  const auto rec = run_step_experiment(cfg, ch);
  const auto& op = rec.operator_trace;
  // y(52) - y(51) = kp * (ref - P_held) with P_held = 80.
  EXPECT_DOUBLE_EQ(op[51].y, 120.0);
  EXPECT_DOUBLE_EQ(op[52].y - op[51].y, 20.0);
  EXPECT_EQ(rec.stats[1].dropped, 1u);
}

TEST(Runner, DeterministicForSeed) {
  auto model = ChannelModel::symmetric({0.3, JitterModel::uniform(0.6), 0.1, 0.0, false});
  auto cfg = ideal_config();
  cfg.delta_ms = 1.2;
  const auto a = run(cfg, model, 99);
  const auto b = run(cfg, model, 99);
  ASSERT_EQ(a.curve.samples.size(), b.curve.samples.size());
  for (std::size_t i = 0; i < a.curve.samples.size(); ++i) {
    EXPECT_EQ(a.curve.samples[i].t_ms, b.curve.samples[i].t_ms);
    EXPECT_EQ(a.curve.samples[i].signal, b.curve.samples[i].signal);
  }
  EXPECT_EQ(a.stats[1].late, b.stats[1].late);
  const auto c = run(cfg, model, 100);
  EXPECT_NE(a.stats[0].dropped + 1000 * a.stats[1].dropped, c.stats[0].dropped + 1000 * c.stats[1].dropped);
}

TEST(Runner, ReorderedFeedbackIsDiscarded) {
  // Jitter far beyond the send gap reorders packets; stale ones are counted.
  auto model = ChannelModel::symmetric({0.1, JitterModel::uniform(5.0), 0.0, 0.0, false});
  auto cfg = ideal_config();
  cfg.delta_ms = 0.5;
  const auto rec = run(cfg, model, 5);
  EXPECT_GT(rec.stats[0].late + rec.stats[1].late, 0u);
  for (std::size_t i = 1; i < rec.curve.samples.size(); ++i) {
    EXPECT_GT(rec.curve.samples[i].x, rec.curve.samples[i - 1].x);
  }
}

TEST(Runner, RobotLagSlowsTheRise) {
  auto cfg = ideal_config();
  cfg.setting = Setting::NonHaptic;
  cfg.delta_ms = 2.0;
  const auto fast = extract_metrics(run(cfg, ChannelModel::ideal(0.5)).curve);
  cfg.robot_tau_ms = 1.0;
  const auto slow = extract_metrics(run(cfg, ChannelModel::ideal(0.5)).curve);
  ASSERT_TRUE(fast.rise_time_ms && slow.rise_time_ms);
  EXPECT_GT(*slow.rise_time_ms, *fast.rise_time_ms);
}

TEST(LoopConfig, Validation) {
  auto cfg = ideal_config();
  cfg.delta_ms = 0.0;
  EXPECT_ERRC(cfg.validate(), Errc::InvalidArgument);
  cfg = ideal_config();
  cfg.k2 = 1.0;
  EXPECT_ERRC(cfg.validate(), Errc::InvalidArgument);
  cfg = ideal_config();
  cfg.step_at = 150.0;
  EXPECT_ERRC(cfg.validate(), Errc::InvalidArgument);
  cfg = ideal_config();
  cfg.packet_size_B = 16;
  EXPECT_ERRC(cfg.validate(), Errc::InvalidArgument);
}
