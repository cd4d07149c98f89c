#include <benchmark/benchmark.h>

#include "dlcode/dp.hpp"
#include "dlcode/model.hpp"
#include "dlcode/sim.hpp"

namespace {

using namespace dlcode;

SystemParams Params(int t, double d, double lambda, int a_max) {
  SystemParams p;
  p.frame_length = t;
  p.channel_cost = d;
  p.penalty = lambda;
  p.max_arrivals = a_max;
  return p;
}

void BM_BinomialTail(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(binomial_tail(m, m / 3, Belief(0.37)));
  }
}
BENCHMARK(BM_BinomialTail)->Arg(8)->Arg(64)->Arg(512);

void BM_SolvePolicy(benchmark::State& state) {
  const auto p = Params(static_cast<int>(state.range(0)), 0.25, 1.0, static_cast<int>(state.range(1)));
  double mu = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_policy(Belief(mu), p));
    mu = mu > 0.9 ? 0.3 : mu + 0.01;
  }
}
BENCHMARK(BM_SolvePolicy)->Args({1, 1})->Args({4, 1})->Args({1, 6})->Args({4, 6});

void BM_EvaluatePolicy(benchmark::State& state) {
  const auto p = Params(4, 0.25, 1.0, static_cast<int>(state.range(0)));
  const auto table = solve_policy(Belief(0.6), p);
  const TailTable truth(Belief(0.45), table.max_block_length(), p.max_arrivals);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy(table, truth));
}
BENCHMARK(BM_EvaluatePolicy)->Arg(1)->Arg(6);

void BM_RunFrame(benchmark::State& state) {
  ExperimentConfig c;
  c.params = Params(static_cast<int>(state.range(0)), 0.25, 1.0, 6);
  c.arrivals = uniform_arrivals(6);
  c.mu_star = Belief(0.6);
  c.learner.kind = state.range(1) == 0 ? LearnerKind::kUcb : LearnerKind::kThompson;
  const FrameEnvironment env(c);
  ReplicationStreams streams(1);
  LearnerState learner = make_learner(c.learner, c.mu_star, streams.channels);
  std::int64_t n = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_frame(env, learner, n++, streams));
}
BENCHMARK(BM_RunFrame)->Args({1, 0})->Args({1, 1})->Args({4, 0})->Args({4, 1});

}  // namespace
BENCHMARK_MAIN();
