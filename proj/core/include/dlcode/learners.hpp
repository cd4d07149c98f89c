#pragma once

// Belief engines fed by pooled per-channel ACK/NACK feedback.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dlcode/model.hpp"

namespace dlcode {

/// Every channel observation gathered during one frame.
struct FeedbackBatch {
  std::vector<std::uint8_t> observations;

  std::int64_t successes() const;
  std::int64_t size() const { return static_cast<std::int64_t>(observations.size()); }
};

// -- UCB-Deadline --------------------------------------------------------------

struct UcbState {
  std::int64_t uses = 1;       // Z, activated channel-uses so far
  std::int64_t successes = 0;  // ACKs among them
  double beta = 4.0;

  double mean() const { return static_cast<double>(successes) / static_cast<double>(uses); }
  bool operator==(const UcbState&) const = default;
};

/// Z = 1 with one free Bernoulli(mu*) observation drawn from `rng`.
/// Throws std::invalid_argument for beta < 3.
UcbState ucb_init(double beta, Belief mu_star, Rng& rng);

/// Pooled mean plus sqrt(beta ln n / (2 Z)), unclamped. n >= 1.
double ucb_index(const UcbState& state, std::int64_t frame);

/// ucb_index clamped to [0, 1].
Belief ucb_belief(const UcbState& state, std::int64_t frame);

UcbState ucb_update(UcbState state, const FeedbackBatch& batch);

// -- TS-Deadline ---------------------------------------------------------------

/// Beta posterior with density proportional to (1-x)^(theta0-1) x^(theta1-1).
struct TsState {
  double failures = 1.0;   // theta0
  double successes = 1.0;  // theta1

  double mean() const { return successes / (successes + failures); }
  bool operator==(const TsState&) const = default;
};

TsState ts_init();
/// One posterior draw; consumes a variable number of engine values.
Belief ts_belief(const TsState& state, Rng& rng);
TsState ts_update(TsState state, const FeedbackBatch& batch);

// -- Genie ---------------------------------------------------------------------

struct GenieState {
  bool operator==(const GenieState&) const = default;
};

inline Belief genie_belief(Belief mu_star) { return mu_star; }

// -- Dispatch ------------------------------------------------------------------

enum class LearnerKind { kUcb, kThompson, kGenie };

struct LearnerSpec {
  LearnerKind kind = LearnerKind::kUcb;
  double beta = 4.0;  // UCB only

  std::string name() const;
  bool operator==(const LearnerSpec&) const = default;
};

using LearnerState = std::variant<UcbState, TsState, GenieState>;

/// Fresh learner state. For UCB this draws the free initial observation from
/// `rng`; the other learners consume nothing.
LearnerState make_learner(const LearnerSpec& spec, Belief mu_star, Rng& rng);

/// Belief for frame n. Only TS consumes from `rng`.
Belief learner_belief(const LearnerState& state, std::int64_t frame, Belief mu_star, Rng& rng);

void learner_update(LearnerState& state, const FeedbackBatch& batch);

}  // namespace dlcode
