#include "dlcode/sim.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "dlcode/analysis.hpp"

namespace dlcode {
namespace {

ExperimentConfig Config(int t, double d, double lambda, ArrivalDistribution arrivals, double mu_star,
                        LearnerKind kind, std::int64_t horizon, int reps) {
  ExperimentConfig c;
  c.params.frame_length = t;
  c.params.channel_cost = d;
  c.params.penalty = lambda;
  c.params.max_arrivals = arrivals.max_arrivals();
  c.arrivals = std::move(arrivals);
  c.mu_star = Belief(mu_star);
  c.learner.kind = kind;
  c.horizon = horizon;
  c.replications = reps;
  c.base_seed = 99;
  return c;
}

TEST(Seeds, Splitmix64ReferenceValues) {
  // First outputs of the reference splitmix64 generator seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(0x9E3779B97F4A7C15ULL), 0x6E789E6AA1B965F4ULL);
}

TEST(Seeds, ReplicationSeedsDiffer) {
  EXPECT_NE(replication_seed(1, 0), replication_seed(1, 1));
  EXPECT_NE(replication_seed(1, 0), replication_seed(2, 0));
  EXPECT_EQ(replication_seed(5, 3), splitmix64(5 ^ splitmix64(3)));
}

TEST(Config, Validate) {
  auto c = Config(1, 0.25, 1.0, uniform_arrivals(2), 0.5, LearnerKind::kUcb, 10, 1);
  EXPECT_NO_THROW(c.validate());
  c.horizon = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.horizon = 1;
  c.replications = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.replications = 1;
  c.params.max_arrivals = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Genie, ZeroRegretEveryFrame) {
  for (const auto& c : {Config(4, 0.25, 1.0, constant_arrivals(1), 0.7, LearnerKind::kGenie, 300, 4),
                        Config(1, 0.2, 0.0, uniform_arrivals(6), 0.81, LearnerKind::kGenie, 300, 4),
                        Config(2, 0.25, 1.0, uniform_arrivals(3), 0.33, LearnerKind::kGenie, 300, 4)}) {
    const auto curve = run_experiment(c, 2);
    for (double r : curve.mean_cum_regret) EXPECT_EQ(r, 0.0);
    for (const auto& f : run_replication(c, 1)) EXPECT_EQ(f.regret_increment, 0.0);
  }
}

TEST(RunFrame, IdleBelowCriticalPointGathersNothing) {
  auto c = Config(2, 0.25, 1.0, constant_arrivals(1), 0.05, LearnerKind::kUcb, 1, 1);
  const FrameEnvironment env(c);
  LearnerState learner = UcbState{1000, 10, 4.0};  // index well below 0.125 at small n
  ReplicationStreams streams(1);
  const auto out = run_frame(env, learner, 2, streams);
  EXPECT_LT(out.belief.value(), 0.125);
  EXPECT_EQ(out.regret_increment, 0.0);
  EXPECT_TRUE(out.feedback.observations.empty());
  EXPECT_EQ(std::get<UcbState>(learner), (UcbState{1000, 10, 4.0}));
}

TEST(RunFrame, LuckyFirstFrameGoldenTrace) {
  // mu* = 0.05, single slot, single packet: a successful free sample puts the
  // first-frame index at 1, which plays (1, 1). Expected revenue
  // -0.25 + 0.05 * 1 + 0.95 * (-1) = -1.15 against the idle optimum -1.
  auto c = Config(1, 0.25, 1.0, constant_arrivals(1), 0.05, LearnerKind::kUcb, 3, 200);
  bool found = false;
  for (int r = 0; r < 200 && !found; ++r) {
    const auto trace = run_replication(c, r);
    if (trace[0].belief.value() != 1.0) {
      EXPECT_EQ(trace[0].belief.value(), 0.0);
      EXPECT_EQ(trace[0].regret_increment, 0.0);
      continue;
    }
    found = true;
    ASSERT_EQ(trace[0].slots.size(), 1u);
    EXPECT_EQ(trace[0].slots[0].decision, (CodeDecision{1, 1}));
    EXPECT_NEAR(trace[0].regret_increment, 0.15, 1e-15);
  }
  EXPECT_TRUE(found);
}

TEST(RunFrame, RejectsFrameZero) {
  auto c = Config(1, 0.25, 1.0, constant_arrivals(1), 0.5, LearnerKind::kUcb, 3, 1);
  const FrameEnvironment env(c);
  LearnerState learner = UcbState{};
  ReplicationStreams streams(1);
  EXPECT_THROW(run_frame(env, learner, 0, streams), std::invalid_argument);
}

TEST(RunFrame, OutcomeInvariants) {
  auto c = Config(3, 0.2, 0.5, uniform_arrivals(4), 0.6, LearnerKind::kThompson, 400, 1);
  for (const auto& f : run_replication(c, 0)) {
    EXPECT_LE(f.delivered, f.arrivals);
    EXPECT_GE(f.regret_increment, -1e-9);
    std::size_t used = 0;
    int queue = f.arrivals;
    for (const auto& s : f.slots) {
      EXPECT_EQ(s.queue, queue);
      EXPECT_LE(s.decision.word_length, s.queue);
      EXPECT_EQ(s.realization.size(), static_cast<std::size_t>(s.decision.block_length));
      used += s.realization.size();
      queue -= s.delivered;
    }
    EXPECT_EQ(f.feedback.observations.size(), used);
  }
}

TEST(Admissibility, FrameBeliefIgnoresCurrentAndFutureDraws) {
  for (LearnerKind kind : {LearnerKind::kUcb, LearnerKind::kThompson}) {
    auto c = Config(2, 0.25, 1.0, uniform_arrivals(2), 0.6, kind, 40, 1);
    const FrameEnvironment env(c);
    ReplicationStreams streams(replication_seed(c.base_seed, 0));
    LearnerState learner = make_learner(c.learner, c.mu_star, streams.channels);
    for (std::int64_t n = 1; n <= 30; ++n) {
      auto other_learner = learner;
      auto other_streams = streams;
      other_streams.channels.seed(12345 + static_cast<std::uint64_t>(n));  // rewrite the draws
      const auto a = run_frame(env, learner, n, streams);
      const auto b = run_frame(env, other_learner, n, other_streams);
      EXPECT_EQ(a.belief, b.belief) << n;
      EXPECT_EQ(a.arrivals, b.arrivals);
    }
  }
}

TEST(Feedback, UcbCountsEveryChannelUse) {
  auto c = Config(4, 0.25, 1.0, constant_arrivals(1), 0.7, LearnerKind::kUcb, 1, 1);
  const FrameEnvironment env(c);
  ReplicationStreams streams(7);
  LearnerState learner = make_learner(c.learner, c.mu_star, streams.channels);
  const auto start = std::get<UcbState>(learner);
  std::int64_t bits = 0, ones = 0;
  for (std::int64_t n = 1; n <= 500; ++n) {
    const auto f = run_frame(env, learner, n, streams);
    bits += f.feedback.size();
    ones += f.feedback.successes();
    std::int64_t used = 0;
    for (const auto& s : f.slots) used += s.decision.block_length;
    EXPECT_EQ(f.feedback.size(), used);
  }
  const auto end = std::get<UcbState>(learner);
  EXPECT_EQ(end.uses - start.uses, bits);
  EXPECT_EQ(end.successes - start.successes, ones);
}

TEST(Transition, PseudocodeModeDropsQueueOnAttempt) {
  auto c = Config(3, 0.25, 1.0, constant_arrivals(2), 0.3, LearnerKind::kUcb, 50, 1);
  c.transition_mode = TransitionMode::kPseudocode;
  bool saw_failure = false;
  for (const auto& f : run_replication(c, 0)) {
    for (std::size_t i = 0; i + 1 < f.slots.size(); ++i) {
      const auto& s = f.slots[i];
      const int drop = s.decision.block_length >= s.decision.word_length ? s.decision.word_length : 0;
      EXPECT_EQ(f.slots[i + 1].queue, s.queue - drop);
      if (s.delivered == 0 && drop > 0) saw_failure = true;
    }
    // Regret stays the exact realized-transition quantity.
    EXPECT_GE(f.regret_increment, -1e-9);
  }
  EXPECT_TRUE(saw_failure);
}

TEST(Replication, Deterministic) {
  auto c = Config(2, 0.25, 1.0, uniform_arrivals(3), 0.55, LearnerKind::kThompson, 200, 3);
  const auto a = run_replication(c, 2);
  const auto b = run_replication(c, 2);
  const auto other = run_replication(c, 1);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].belief, b[i].belief);
    EXPECT_EQ(a[i].feedback.observations, b[i].feedback.observations);
    EXPECT_EQ(a[i].regret_increment, b[i].regret_increment);
    differs |= a[i].feedback.observations != other[i].feedback.observations;
  }
  EXPECT_TRUE(differs);
  EXPECT_THROW(run_replication(c, 3), std::invalid_argument);
}

TEST(Experiment, WorkerCountDoesNotChangeResult) {
  auto c = Config(2, 0.25, 1.0, uniform_arrivals(3), 0.4, LearnerKind::kThompson, 500, 9);
  const auto one = run_experiment(c, 1);
  for (int w : {2, 4, 16}) {
    const auto many = run_experiment(c, w);
    EXPECT_EQ(one.mean_cum_regret, many.mean_cum_regret);
    EXPECT_EQ(one.se_cum_regret, many.se_cum_regret);
    EXPECT_EQ(one.mean_throughput, many.mean_throughput);
    EXPECT_EQ(one.mean_revenue, many.mean_revenue);
  }
}

TEST(Experiment, CurveMatchesReplicationTraces) {
  auto c = Config(1, 0.2, 0.0, uniform_arrivals(3), 0.5, LearnerKind::kUcb, 100, 3);
  const auto curve = run_experiment(c, 1);
  std::vector<double> sum(100, 0.0);
  for (int r = 0; r < 3; ++r) {
    double cum = 0.0;
    const auto trace = run_replication(c, r);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      cum += trace[i].regret_increment;
      sum[i] += cum;
    }
  }
  for (std::size_t i = 0; i < 100; ++i) EXPECT_NEAR(curve.mean_cum_regret[i], sum[i] / 3.0, 1e-12);
}

TEST(Experiment, CurveShape) {
  auto c = Config(1, 0.2, 0.0, uniform_arrivals(6), 0.3, LearnerKind::kUcb, 400, 6);
  const auto curve = run_experiment(c, 1);
  for (std::size_t i = 1; i < curve.mean_cum_regret.size(); ++i) {
    EXPECT_GE(curve.mean_cum_regret[i], curve.mean_cum_regret[i - 1] - 1e-9);
    EXPECT_GE(curve.se_cum_regret[i], 0.0);
  }
}

TEST(Experiment, IndependentSeedsAgree) {
  auto c = Config(4, 0.25, 1.0, constant_arrivals(1), 0.7, LearnerKind::kUcb, 5000, 40);
  const auto a = run_experiment(c, 1);
  c.base_seed = 12345;
  const auto b = run_experiment(c, 1);
  const double diff = a.mean_cum_regret.back() - b.mean_cum_regret.back();
  const double se = std::hypot(a.se_cum_regret.back(), b.se_cum_regret.back());
  EXPECT_LE(std::abs(diff), 3 * se);
}

TEST(Experiment, ThroughputApproachesOne) {
  auto c = Config(4, 0.25, 1.0, constant_arrivals(1), 0.7, LearnerKind::kThompson, 2000, 20);
  const auto curve = run_experiment(c, 1);
  double tail = 0.0;
  for (std::size_t i = 1800; i < 2000; ++i) tail += curve.mean_throughput[i];
  EXPECT_GT(tail / 200.0, 0.97);
}

TEST(BoundOverlay, Shapes) {
  auto high = Config(4, 0.25, 1.0, constant_arrivals(1), 0.7, LearnerKind::kUcb, 50, 1);
  const auto flat = bound_overlay(high);
  ASSERT_TRUE(flat);
  for (double v : *flat) EXPECT_EQ(v, flat->front());

  auto low = high;
  low.mu_star = Belief(0.05);
  const auto rising = bound_overlay(low);
  ASSERT_TRUE(rising);
  // Affine in log n: equal increments per doubling.
  const double step1 = (*rising)[3] - (*rising)[1];
  const double step2 = (*rising)[7] - (*rising)[3];
  EXPECT_NEAR(step1, step2, 1e-9 * (*rising)[7]);

  auto ts = high;
  ts.learner.kind = LearnerKind::kThompson;
  EXPECT_THROW(bound_overlay(ts), std::invalid_argument);
}

}  // namespace
}  // namespace dlcode
