#pragma once

// Frame-by-frame simulation of a learner driving the optimal coding policy,
// with exact per-frame pseudo-regret and replication-level aggregation.

#include <cstdint>
#include <optional>
#include <vector>

#include "dlcode/dp.hpp"
#include "dlcode/learners.hpp"
#include "dlcode/model.hpp"

namespace dlcode {

/// How the queue moves after a slot.
enum class TransitionMode {
  kRealized,    // X <- X - throughput
  kPseudocode,  // X <- X - x whenever m >= x, regardless of the channels
};

struct ExperimentConfig {
  SystemParams params;
  ArrivalDistribution arrivals;
  Belief mu_star;
  LearnerSpec learner;
  std::int64_t horizon = 1;  // N frames
  int replications = 1;      // R
  std::uint64_t base_seed = 0;
  TransitionMode transition_mode = TransitionMode::kRealized;

  /// Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

/// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Seed of replication r: splitmix64(base_seed ^ splitmix64(r)).
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t replication);

/// Independent engines for arrivals, channels and learner randomization.
/// Engine k in {1, 2, 3} is seeded with splitmix64(seed + k).
struct ReplicationStreams {
  explicit ReplicationStreams(std::uint64_t seed);

  Rng arrivals;
  Rng channels;
  Rng learner;
};

struct SlotRecord {
  int stage = 0;
  int queue = 0;  // packets waiting at the start of the slot
  CodeDecision decision;
  ChannelRealization realization;
  int delivered = 0;
};

struct FrameOutcome {
  std::int64_t frame = 0;
  int arrivals = 0;
  Belief belief;
  std::vector<SlotRecord> slots;
  int delivered = 0;
  double realized_revenue = 0.0;  // includes the expiry penalty
  double regret_increment = 0.0;  // exact, conditional on the arrivals
  FeedbackBatch feedback;
};

/// Everything about a frame that does not depend on the learner: the true
/// mean, its success probabilities and the genie's expected revenue.
class FrameEnvironment {
 public:
  explicit FrameEnvironment(const ExperimentConfig& config);

  const SystemParams& params() const { return params_; }
  const ArrivalDistribution& arrivals() const { return arrivals_; }
  Belief mu_star() const { return mu_star_; }
  TransitionMode transition_mode() const { return mode_; }
  const std::vector<double>& genie_revenue() const { return genie_revenue_; }

  /// Expected revenue of `table` under the true mean.
  PolicyEvaluation evaluate(const PolicyTable& table) const;

 private:
  SystemParams params_;
  ArrivalDistribution arrivals_;
  Belief mu_star_;
  TransitionMode mode_;
  TailTable truth_;
  std::vector<double> genie_revenue_;
};

/// Plays frame n: draws the arrivals, asks the learner for a belief, solves
/// the policy for it, plays the T slots and only then feeds the frame's
/// observations back to the learner.
FrameOutcome run_frame(const FrameEnvironment& env, LearnerState& learner, std::int64_t frame,
                       ReplicationStreams& streams);

/// Full trace of replication r; deterministic in (config, r).
std::vector<FrameOutcome> run_replication(const ExperimentConfig& config, int replication);

struct RegretCurve {
  std::vector<double> mean_cum_regret;  // index n - 1
  std::vector<double> se_cum_regret;
  std::vector<double> mean_throughput;
  std::vector<double> mean_revenue;
  int replications = 0;
};

/// Runs all replications on up to `workers` threads and reduces them in
/// replication order, so the result does not depend on the schedule.
RegretCurve run_experiment(const ExperimentConfig& config, int workers = 1);

/// Regret bound of the optimistic learner at n = 1..N. nullopt when the bound
/// is infinite. Throws std::invalid_argument for non-UCB learners or beta < 4.
std::optional<std::vector<double>> bound_overlay(const ExperimentConfig& config);

}  // namespace dlcode
