#include "dlcode/dp.hpp"

#include <algorithm>
#include <stdexcept>

namespace dlcode {
namespace {

// One Bellman backup. The same expression is used by the solver and the
// evaluator so that evaluating a table under its own belief reproduces its
// values bit for bit.
inline double backup(double cost, const CodeDecision& c, double success, double after_success,
                     double after_failure) {
  if (c.idle()) return after_failure;
  return -cost * c.block_length + success * (c.word_length + after_success) +
         (1.0 - success) * after_failure;
}

PolicyTable solve_with_scale(Belief belief, const SystemParams& params, int scale,
                             bool& cap_bound) {
  const int stages = params.frame_length;
  const int queues = params.max_arrivals + 1;
  const double cost = params.channel_cost;
  const int max_block = params.block_length_cap(params.max_arrivals, scale);
  const TailTable tails(belief, max_block, params.max_arrivals);

  PolicyTable table;
  table.params = params;
  table.belief = belief;
  table.decisions.assign(static_cast<std::size_t>(stages) * queues, CodeDecision{});
  table.values.assign(static_cast<std::size_t>(stages + 1) * queues, 0.0);
  for (int q = 0; q < queues; ++q) table.values[q] = -params.penalty * q;

  std::vector<int> caps(static_cast<std::size_t>(queues));
  for (int x = 0; x < queues; ++x) caps[x] = params.block_length_cap(x, scale);

  cap_bound = false;
  for (int s = 1; s <= stages; ++s) {
    const double* next = &table.values[static_cast<std::size_t>(s - 1) * queues];
    double* current = &table.values[static_cast<std::size_t>(s) * queues];
    CodeDecision* chosen = &table.decisions[static_cast<std::size_t>(s - 1) * queues];
    for (int queue = 0; queue < queues; ++queue) {
      CodeDecision best{};
      double best_gain = 0.0;
      const int block_limit = queue == 0 ? 0 : caps[queue];
      for (int m = 1; m <= block_limit; ++m) {
        const int words = std::min(queue, m);
        for (int x = 1; x <= words; ++x) {
          if (m > caps[x]) continue;
          const double gain =
              -cost * m + tails(m, x) * (x + next[queue - x] - next[queue]);
          if (gain > best_gain + kTieTolerance) {
            best_gain = gain;
            best = CodeDecision{m, x};
          }
        }
      }
      if (!best.idle() && best.block_length == caps[best.word_length] &&
          !(params.channel_cap && best.block_length == *params.channel_cap)) {
        cap_bound = true;
      }
      chosen[queue] = best;
      current[queue] = backup(cost, best, tails(best.block_length, best.word_length),
                              next[queue - best.word_length], next[queue]);
    }
  }
  return table;
}

}  // namespace

bool PolicyTable::all_idle() const {
  return std::all_of(decisions.begin(), decisions.end(),
                     [](const CodeDecision& c) { return c.idle(); });
}

bool PolicyTable::same_decisions(const PolicyTable& other, int max_queue) const {
  if (other.params.frame_length != params.frame_length) return false;
  const int limit = std::min({max_queue, this->max_queue(), other.max_queue()});
  for (int s = 1; s <= stages(); ++s) {
    for (int q = 0; q <= limit; ++q) {
      if (!(decision(s, q) == other.decision(s, q))) return false;
    }
  }
  return true;
}

int PolicyTable::max_block_length() const {
  int out = 0;
  for (const auto& c : decisions) out = std::max(out, c.block_length);
  return out;
}

PolicyTable solve_policy(Belief belief, const SystemParams& params) {
  params.validate();
  // The block-length search cap is provably non-binding; if a decision ever
  // lands on it anyway, widen the search and solve again.
  for (int scale = 1;; scale *= 2) {
    bool cap_bound = false;
    PolicyTable table = solve_with_scale(belief, params, scale, cap_bound);
    if (!cap_bound || scale >= 1024) return table;
  }
}

PolicyEvaluation evaluate_policy(const PolicyTable& table, const TailTable& truth) {
  const int stages = table.stages();
  const int queues = table.max_queue() + 1;
  const double cost = table.params.channel_cost;
  if (truth.max_block() < table.max_block_length() || truth.max_word() < table.max_queue()) {
    throw std::invalid_argument("success-probability table does not cover the policy");
  }
  std::vector<double> next(static_cast<std::size_t>(queues));
  std::vector<double> current(static_cast<std::size_t>(queues));
  for (int q = 0; q < queues; ++q) next[q] = -table.params.penalty * q;
  for (int s = 1; s <= stages; ++s) {
    for (int q = 0; q < queues; ++q) {
      const CodeDecision& c = table.decision(s, q);
      current[q] = backup(cost, c, truth(c.block_length, c.word_length),
                          next[q - c.word_length], next[q]);
    }
    std::swap(next, current);
  }
  return PolicyEvaluation{std::move(next)};
}

PolicyEvaluation evaluate_policy(const PolicyTable& table, Belief mu_star) {
  const TailTable truth(mu_star, table.max_block_length(), table.max_queue());
  return evaluate_policy(table, truth);
}

std::vector<double> genie_values(Belief mu_star, const SystemParams& params) {
  const PolicyTable table = solve_policy(mu_star, params);
  std::vector<double> out(static_cast<std::size_t>(params.max_arrivals) + 1);
  for (int a = 0; a <= params.max_arrivals; ++a) out[a] = table.value(params.frame_length, a);
  return out;
}

double pseudo_regret_increment(int arrivals, Belief belief, Belief mu_star,
                               const SystemParams& params) {
  if (arrivals < 0 || arrivals > params.max_arrivals) {
    throw std::invalid_argument("arrival count outside 0..a_max");
  }
  const auto genie = genie_values(mu_star, params);
  const auto played = evaluate_policy(solve_policy(belief, params), mu_star);
  return genie[arrivals] - played.expected_revenue[arrivals];
}

}  // namespace dlcode
