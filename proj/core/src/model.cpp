#include "dlcode/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace dlcode {

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void SystemParams::validate() const {
  if (frame_length < 1) {
    throw std::invalid_argument("T must be >= 1, got " + std::to_string(frame_length));
  }
  if (!(channel_cost >= 0.0 && channel_cost <= 1.0)) {
    throw std::invalid_argument("d must lie in [0, 1], got " + std::to_string(channel_cost));
  }
  if (!(penalty >= 0.0) || !std::isfinite(penalty)) {
    throw std::invalid_argument("lambda must be a finite value >= 0, got " +
                                std::to_string(penalty));
  }
  if (max_arrivals < 0) {
    throw std::invalid_argument("a_max must be >= 0, got " + std::to_string(max_arrivals));
  }
  if (channel_cap && *channel_cap < 1) {
    throw std::invalid_argument("channel_cap must be >= 1, got " +
                                std::to_string(*channel_cap));
  }
  if (channel_cost == 0.0 && !channel_cap) {
    throw std::invalid_argument("d = 0 requires a channel_cap (channel use is unbounded)");
  }
}

std::int64_t SystemParams::max_channel_uses() const {
  std::int64_t cap = std::numeric_limits<std::int64_t>::max();
  if (channel_cost > 0.0) {
    // Guard against 6 / 0.2 = 30.000000000000004 style rounding.
    const double raw = static_cast<double>(frame_length) * max_arrivals / channel_cost;
    cap = static_cast<std::int64_t>(std::ceil(raw - 1e-9));
  }
  if (channel_cap) {
    cap = std::min<std::int64_t>(cap, static_cast<std::int64_t>(frame_length) * *channel_cap);
  }
  return cap;
}

int SystemParams::block_length_cap(int word, int scale) const {
  if (word <= 0) return 0;
  int cap = std::numeric_limits<int>::max();
  if (channel_cost > 0.0) {
    const double raw = word * (1.0 + penalty) / channel_cost;
    const double scaled = std::ceil(raw - 1e-9) * scale;
    cap = scaled >= static_cast<double>(cap) ? cap : static_cast<int>(scaled);
  }
  if (channel_cap) cap = std::min(cap, *channel_cap);
  return cap;
}

ArrivalDistribution::ArrivalDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw std::invalid_argument("arrival pmf must be non-empty");
  for (double p : pmf_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("arrival pmf entries must be finite and nonnegative");
    }
  }
  const double total = std::accumulate(pmf_.begin(), pmf_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("arrival pmf must sum to 1, got " + std::to_string(total));
  }
}

ArrivalDistribution uniform_arrivals(int max_arrivals) {
  if (max_arrivals < 0) throw std::invalid_argument("a_max must be >= 0");
  const auto n = static_cast<std::size_t>(max_arrivals) + 1;
  return ArrivalDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

ArrivalDistribution truncated_poisson_arrivals(double rate, int max_arrivals) {
  if (!(rate > 0.0)) throw std::invalid_argument("Poisson rate must be > 0");
  if (max_arrivals < 0) throw std::invalid_argument("a_max must be >= 0");
  std::vector<double> weights(static_cast<std::size_t>(max_arrivals) + 1);
  double w = 1.0;  // rate^k / k!, the e^-rate factor cancels
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (k > 0) w *= rate / static_cast<double>(k);
    weights[k] = w;
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& p : weights) p /= total;
  return ArrivalDistribution(std::move(weights));
}

ArrivalDistribution constant_arrivals(int count) {
  if (count < 0) throw std::invalid_argument("arrival count must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(count) + 1, 0.0);
  pmf.back() = 1.0;
  return ArrivalDistribution(std::move(pmf));
}

Belief::Belief(double mu) {
  if (std::isnan(mu)) throw std::invalid_argument("belief is NaN");
  mu_ = std::clamp(mu, 0.0, 1.0);
}

int ChannelRealization::connected() const {
  return static_cast<int>(std::count(states.begin(), states.end(), std::uint8_t{1}));
}

double binomial_tail(int block_length, int word_length, Belief belief) {
  const int m = block_length;
  const int x = word_length;
  const double mu = belief.value();
  if (x <= 0) return 1.0;
  if (x > m) return 0.0;
  if (mu == 0.0) return 0.0;
  if (mu == 1.0) return 1.0;

  const double log_mu = std::log(mu);
  const double log_nu = std::log1p(-mu);
  const double odds = mu / (1.0 - mu);
  auto log_pmf = [&](int k) {
    double log_choose = 0.0;
    for (int i = 0; i < k; ++i) {
      log_choose += std::log(static_cast<double>(m - i) / static_cast<double>(i + 1));
    }
    return log_choose + k * log_mu + (m - k) * log_nu;
  };

  if (x > m * mu) {
    // Upper tail P(S >= x), terms decrease away from the mode.
    double term = std::exp(log_pmf(x));
    double sum = term;
    for (int k = x; k < m; ++k) {
      term *= static_cast<double>(m - k) / static_cast<double>(k + 1) * odds;
      sum += term;
    }
    return std::min(sum, 1.0);
  }
  // Lower tail P(S <= x - 1).
  double term = std::exp(log_pmf(x - 1));
  double sum = term;
  for (int k = x - 1; k > 0; --k) {
    term *= static_cast<double>(k) / static_cast<double>(m - k + 1) / odds;
    sum += term;
  }
  return std::max(0.0, 1.0 - sum);
}

TailTable::TailTable(Belief mu, int max_block, int max_word)
    : mu_(mu),
      max_block_(std::max(max_block, 0)),
      stride_(static_cast<std::size_t>(std::max(max_word, 0)) + 1) {
  const double p = mu.value();
  const double q = 1.0 - p;
  const auto rows = static_cast<std::size_t>(max_block_) + 1;
  tails_.assign(rows * stride_, 0.0);
  tails_[0] = 1.0;
  for (std::size_t m = 1; m < rows; ++m) {
    double* row = &tails_[m * stride_];
    const double* prev = &tails_[(m - 1) * stride_];
    row[0] = 1.0;
    for (std::size_t x = 1; x < stride_ && x <= m; ++x) {
      row[x] = p * prev[x - 1] + q * prev[x];
    }
  }
}

int throughput(const CodeDecision& decision, const ChannelRealization& realization) {
  if (realization.size() != static_cast<std::size_t>(decision.block_length)) {
    throw std::invalid_argument("channel realization length " +
                                std::to_string(realization.size()) +
                                " does not match block length " +
                                std::to_string(decision.block_length));
  }
  return realization.connected() >= decision.word_length ? decision.word_length : 0;
}

double revenue(const CodeDecision& decision, const ChannelRealization& realization,
               double channel_cost) {
  return throughput(decision, realization) - channel_cost * decision.block_length;
}

ChannelRealization sample_channels(int block_length, Belief mu, Rng& rng) {
  ChannelRealization out;
  out.states.resize(static_cast<std::size_t>(std::max(block_length, 0)));
  for (auto& s : out.states) s = uniform01(rng) < mu.value() ? 1 : 0;
  return out;
}

int sample_arrival(const ArrivalDistribution& dist, Rng& rng) {
  const double u = uniform01(rng);
  const auto pmf = dist.pmf();
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t a = 0; a < pmf.size(); ++a) {
    if (pmf[a] <= 0.0) continue;
    last_positive = static_cast<int>(a);
    cumulative += pmf[a];
    if (u < cumulative) return static_cast<int>(a);
  }
  return last_positive;
}

}  // namespace dlcode
