#include "dlcode/sim.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "dlcode/analysis.hpp"

namespace dlcode {

void ExperimentConfig::validate() const {
  params.validate();
  if (arrivals.max_arrivals() != params.max_arrivals) {
    throw std::invalid_argument("arrival pmf length must be a_max + 1");
  }
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (learner.kind == LearnerKind::kUcb && !(learner.beta >= 3.0)) {
    throw std::invalid_argument("UCB needs beta >= 3");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication) {
  return splitmix64(base_seed ^ splitmix64(replication));
}

ReplicationStreams::ReplicationStreams(std::uint64_t seed)
    : arrivals(splitmix64(seed + 1)), channels(splitmix64(seed + 2)), learner(splitmix64(seed + 3)) {}

FrameEnvironment::FrameEnvironment(const ExperimentConfig& config)
    : params_(config.params),
      arrivals_(config.arrivals),
      mu_star_(config.mu_star),
      mode_(config.transition_mode) {
  config.validate();
  truth_ = TailTable(mu_star_, params_.block_length_cap(params_.max_arrivals),
                     params_.max_arrivals);
  genie_revenue_ = evaluate(solve_policy(mu_star_, params_)).expected_revenue;
}

PolicyEvaluation FrameEnvironment::evaluate(const PolicyTable& table) const {
  if (table.max_block_length() <= truth_.max_block()) return evaluate_policy(table, truth_);
  return evaluate_policy(table, mu_star_);
}

namespace {

struct FrameSummary {
  int arrivals = 0;
  int delivered = 0;
  double revenue = 0.0;
  double regret = 0.0;
};

// Frame loop shared by the traced and the aggregate paths. `record` may be
// null, in which case nothing per-slot is kept.
FrameSummary play_frame(const FrameEnvironment& env, LearnerState& learner, std::int64_t frame,
                        ReplicationStreams& streams, FeedbackBatch& feedback,
                        FrameOutcome* record) {
  const SystemParams& params = env.params();
  FrameSummary out;
  out.arrivals = sample_arrival(env.arrivals(), streams.arrivals);

  const Belief belief = learner_belief(learner, frame, env.mu_star(), streams.learner);
  const PolicyTable table = solve_policy(belief, params);

  feedback.observations.clear();
  int queue = out.arrivals;
  for (int stage = params.frame_length; stage >= 1; --stage) {
    const CodeDecision decision = table.decision(stage, queue);
    ChannelRealization channels =
        sample_channels(decision.block_length, env.mu_star(), streams.channels);
    const int delivered = throughput(decision, channels);
    out.delivered += delivered;
    out.revenue += delivered - params.channel_cost * decision.block_length;
    feedback.observations.insert(feedback.observations.end(), channels.states.begin(),
                                 channels.states.end());
    const int start_queue = queue;
    if (env.transition_mode() == TransitionMode::kRealized) {
      queue -= delivered;
    } else if (decision.block_length >= decision.word_length) {
      queue -= decision.word_length;
    }
    if (record) {
      record->slots.push_back(
          SlotRecord{stage, start_queue, decision, std::move(channels), delivered});
    }
  }
  out.revenue -= params.penalty * queue;

  if (out.arrivals > 0) {
    const PolicyEvaluation played = env.evaluate(table);
    out.regret = env.genie_revenue()[out.arrivals] - played.expected_revenue[out.arrivals];
  }

  // Feedback from this frame only reaches beliefs of later frames.
  learner_update(learner, feedback);

  if (record) {
    record->frame = frame;
    record->arrivals = out.arrivals;
    record->belief = belief;
    record->delivered = out.delivered;
    record->realized_revenue = out.revenue;
    record->regret_increment = out.regret;
    record->feedback = feedback;
  }
  return out;
}

struct ReplicationTrace {
  std::vector<double> cum_regret;
  std::vector<double> throughput;
  std::vector<double> revenue;
};

ReplicationTrace trace_replication(const ExperimentConfig& config, const FrameEnvironment& env,
                                   int replication) {
  ReplicationStreams streams(replication_seed(config.base_seed, static_cast<std::uint64_t>(replication)));
  LearnerState learner = make_learner(config.learner, config.mu_star, streams.channels);
  const auto n = static_cast<std::size_t>(config.horizon);
  ReplicationTrace trace;
  trace.cum_regret.resize(n);
  trace.throughput.resize(n);
  trace.revenue.resize(n);
  FeedbackBatch feedback;
  double cumulative = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const FrameSummary s = play_frame(env, learner, static_cast<std::int64_t>(i) + 1, streams,
                                      feedback, nullptr);
    cumulative += s.regret;
    trace.cum_regret[i] = cumulative;
    trace.throughput[i] = s.delivered;
    trace.revenue[i] = s.revenue;
  }
  return trace;
}

}  // namespace

FrameOutcome run_frame(const FrameEnvironment& env, LearnerState& learner, std::int64_t frame,
                       ReplicationStreams& streams) {
  if (frame < 1) throw std::invalid_argument("frame index must be >= 1");
  FrameOutcome outcome;
  FeedbackBatch feedback;
  play_frame(env, learner, frame, streams, feedback, &outcome);
  return outcome;
}

std::vector<FrameOutcome> run_replication(const ExperimentConfig& config, int replication) {
  const FrameEnvironment env(config);
  if (replication < 0 || replication >= config.replications) {
    throw std::invalid_argument("replication index out of range");
  }
  ReplicationStreams streams(replication_seed(config.base_seed, static_cast<std::uint64_t>(replication)));
  LearnerState learner = make_learner(config.learner, config.mu_star, streams.channels);
  std::vector<FrameOutcome> out;
  out.reserve(static_cast<std::size_t>(config.horizon));
  for (std::int64_t n = 1; n <= config.horizon; ++n) {
    out.push_back(run_frame(env, learner, n, streams));
  }
  return out;
}

RegretCurve run_experiment(const ExperimentConfig& config, int workers) {
  const FrameEnvironment env(config);
  const int reps = config.replications;
  std::vector<ReplicationTrace> traces(static_cast<std::size_t>(reps));

  std::atomic<int> next{0};
  auto work = [&] {
    for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) {
      traces[static_cast<std::size_t>(r)] = trace_replication(config, env, r);
    }
  };
  const int threads = std::max(1, std::min(workers, reps));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
  }

  const auto n = static_cast<std::size_t>(config.horizon);
  RegretCurve curve;
  curve.replications = reps;
  curve.mean_cum_regret.assign(n, 0.0);
  curve.se_cum_regret.assign(n, 0.0);
  curve.mean_throughput.assign(n, 0.0);
  curve.mean_revenue.assign(n, 0.0);
  const double count = reps;
  for (const auto& t : traces) {
    for (std::size_t i = 0; i < n; ++i) {
      curve.mean_cum_regret[i] += t.cum_regret[i];
      curve.mean_throughput[i] += t.throughput[i];
      curve.mean_revenue[i] += t.revenue[i];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    curve.mean_cum_regret[i] /= count;
    curve.mean_throughput[i] /= count;
    curve.mean_revenue[i] /= count;
  }
  if (reps > 1) {
    for (const auto& t : traces) {
      for (std::size_t i = 0; i < n; ++i) {
        const double dev = t.cum_regret[i] - curve.mean_cum_regret[i];
        curve.se_cum_regret[i] += dev * dev;
      }
    }
    for (double& se : curve.se_cum_regret) se = std::sqrt(se / (count - 1.0) / count);
  }
  return curve;
}

std::optional<std::vector<double>> bound_overlay(const ExperimentConfig& config) {
  config.validate();
  if (config.learner.kind != LearnerKind::kUcb) {
    throw std::invalid_argument("bound overlay applies to the UCB learner only");
  }
  const RegretBoundInputs inputs =
      regret_bound_inputs(config.mu_star, config.params, config.arrivals);
  std::vector<double> values(static_cast<std::size_t>(config.horizon));
  const bool constant = config.mu_star.value() >= inputs.critical_point;
  for (std::int64_t n = 1; n <= config.horizon; ++n) {
    if (constant && n > 1) {
      values[static_cast<std::size_t>(n - 1)] = values[0];
      continue;
    }
    const auto b = regret_upper_bound(config.mu_star, config.params, config.learner.beta, n, inputs);
    if (!b) return std::nullopt;
    values[static_cast<std::size_t>(n - 1)] = *b;
  }
  return values;
}

}  // namespace dlcode
