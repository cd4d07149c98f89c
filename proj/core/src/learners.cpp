#include "dlcode/learners.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlcode {

std::int64_t FeedbackBatch::successes() const {
  return std::count(observations.begin(), observations.end(), std::uint8_t{1});
}

UcbState ucb_init(double beta, Belief mu_star, Rng& rng) {
  if (!(beta >= 3.0)) throw std::invalid_argument("UCB needs beta >= 3");
  UcbState s;
  s.beta = beta;
  s.uses = 1;
  s.successes = uniform01(rng) < mu_star.value() ? 1 : 0;
  return s;
}

double ucb_index(const UcbState& state, std::int64_t frame) {
  if (frame < 1) throw std::invalid_argument("frame index must be >= 1");
  const double bonus = std::sqrt(state.beta * std::log(static_cast<double>(frame)) /
                                 (2.0 * static_cast<double>(state.uses)));
  return state.mean() + bonus;
}

Belief ucb_belief(const UcbState& state, std::int64_t frame) {
  return Belief(ucb_index(state, frame));
}

UcbState ucb_update(UcbState state, const FeedbackBatch& batch) {
  state.uses += batch.size();
  state.successes += batch.successes();
  return state;
}

TsState ts_init() { return TsState{}; }

Belief ts_belief(const TsState& state, Rng& rng) {
  std::gamma_distribution<double> hit(state.successes, 1.0);
  std::gamma_distribution<double> miss(state.failures, 1.0);
  const double h = hit(rng);
  const double m = miss(rng);
  const double total = h + m;
  return Belief(total > 0.0 ? h / total : 0.5);
}

TsState ts_update(TsState state, const FeedbackBatch& batch) {
  const auto ones = batch.successes();
  state.successes += static_cast<double>(ones);
  state.failures += static_cast<double>(batch.size() - ones);
  return state;
}

std::string LearnerSpec::name() const {
  switch (kind) {
    case LearnerKind::kUcb:
      return "ucb";
    case LearnerKind::kThompson:
      return "ts";
    case LearnerKind::kGenie:
      return "genie";
  }
  return "unknown";
}

LearnerState make_learner(const LearnerSpec& spec, Belief mu_star, Rng& rng) {
  switch (spec.kind) {
    case LearnerKind::kUcb:
      return ucb_init(spec.beta, mu_star, rng);
    case LearnerKind::kThompson:
      return ts_init();
    case LearnerKind::kGenie:
      return GenieState{};
  }
  throw std::invalid_argument("unknown learner kind");
}

Belief learner_belief(const LearnerState& state, std::int64_t frame, Belief mu_star, Rng& rng) {
  struct Visitor {
    std::int64_t frame;
    Belief mu_star;
    Rng& rng;
    Belief operator()(const UcbState& s) const { return ucb_belief(s, frame); }
    Belief operator()(const TsState& s) const { return ts_belief(s, rng); }
    Belief operator()(const GenieState&) const { return genie_belief(mu_star); }
  };
  return std::visit(Visitor{frame, mu_star, rng}, state);
}

void learner_update(LearnerState& state, const FeedbackBatch& batch) {
  if (batch.observations.empty()) return;
  if (auto* ucb = std::get_if<UcbState>(&state)) {
    *ucb = ucb_update(*ucb, batch);
  } else if (auto* ts = std::get_if<TsState>(&state)) {
    *ts = ts_update(*ts, batch);
  }
}

}  // namespace dlcode
