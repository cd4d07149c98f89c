#pragma once

// Finite-horizon dynamic program for the optimal per-slot (m, x) code under a
// channel belief, and exact evaluation of a solved policy under the true mean.
//
// Stages count remaining slots: stage T is the first slot of a frame and
// stage 1 the last one before the deadline. Stage 0 holds the terminal
// penalty J_0(X) = -lambda * X.

#include <vector>

#include "dlcode/model.hpp"

namespace dlcode {

/// Gains within this distance of the best are ties; ties go to the smallest
/// m, then the smallest x.
inline constexpr double kTieTolerance = 1e-12;

struct PolicyTable {
  SystemParams params;
  Belief belief;
  std::vector<CodeDecision> decisions;  // (stage 1..T) x (queue 0..A_max)
  std::vector<double> values;           // (stage 0..T) x (queue 0..A_max)

  int stages() const { return params.frame_length; }
  int max_queue() const { return params.max_arrivals; }

  const CodeDecision& decision(int stage, int queue) const {
    return decisions[static_cast<std::size_t>(stage - 1) * row() +
                     static_cast<std::size_t>(queue)];
  }
  double value(int stage, int queue) const {
    return values[static_cast<std::size_t>(stage) * row() + static_cast<std::size_t>(queue)];
  }

  /// True when no stage activates a channel from any queue length.
  bool all_idle() const;
  /// True when the decisions reachable from queue lengths <= max_queue agree.
  bool same_decisions(const PolicyTable& other, int max_queue) const;
  /// Largest block length any decision in the table uses.
  int max_block_length() const;

 private:
  std::size_t row() const { return static_cast<std::size_t>(params.max_arrivals) + 1; }
};

struct PolicyEvaluation {
  /// E_{mu*}[J(a, pi_a(belief))] for a = 0..A_max.
  std::vector<double> expected_revenue;
};

/// Solves the Bellman recursion under `belief`. Throws std::invalid_argument
/// on invalid params.
PolicyTable solve_policy(Belief belief, const SystemParams& params);

/// Expected frame revenue of the table's decisions when channels have mean
/// `mu_star`, for each initial queue length.
PolicyEvaluation evaluate_policy(const PolicyTable& table, Belief mu_star);

/// Same as above with precomputed success probabilities at the true mean.
/// `truth` must cover every block length and word length the table uses.
PolicyEvaluation evaluate_policy(const PolicyTable& table, const TailTable& truth);

/// J*(a) = J_T(a) under the belief mu_star, for a = 0..A_max.
std::vector<double> genie_values(Belief mu_star, const SystemParams& params);

/// J*(a) - E_{mu*}[J(a, pi_a(belief))], the expected revenue lost in a frame
/// with a arrivals by acting on `belief` instead of `mu_star`.
double pseudo_regret_increment(int arrivals, Belief belief, Belief mu_star,
                               const SystemParams& params);

}  // namespace dlcode
