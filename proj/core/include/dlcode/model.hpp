#pragma once

// System model for deadline-constrained transmission over symmetric
// Bernoulli channels: parameters, beliefs, (m, x) erasure codes, channel and
// arrival sampling, and the binomial success-probability kernel.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace dlcode {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

/// Frame-level system parameters.
struct SystemParams {
  int frame_length = 1;             // T, time-slots per frame
  double channel_cost = 0.0;        // d, cost per channel use, in [0, 1]
  double penalty = 0.0;             // lambda, cost per expired packet
  int max_arrivals = 0;             // A_max
  std::optional<int> channel_cap;   // K, per-slot limit on m

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  /// Horizon-wide cap on channel uses per frame: ceil(T * A_max / d), further
  /// limited by T * K when a per-slot cap is present.
  std::int64_t max_channel_uses() const;

  /// Largest block length worth searching for a word of length `word`:
  /// min(K, ceil(word * (1 + lambda) / d)), scaled by `scale`. Zero for word 0.
  int block_length_cap(int word, int scale = 1) const;

  bool operator==(const SystemParams&) const = default;
};

/// Probability mass over arrivals 0..A_max.
class ArrivalDistribution {
 public:
  ArrivalDistribution() : pmf_{1.0} {}
  /// Throws std::invalid_argument unless entries are nonnegative and sum to 1
  /// within 1e-12.
  explicit ArrivalDistribution(std::vector<double> pmf);

  int max_arrivals() const { return static_cast<int>(pmf_.size()) - 1; }
  double probability(int a) const { return pmf_.at(static_cast<std::size_t>(a)); }
  std::span<const double> pmf() const { return pmf_; }

  bool operator==(const ArrivalDistribution&) const = default;

 private:
  std::vector<double> pmf_;
};

ArrivalDistribution uniform_arrivals(int max_arrivals);
ArrivalDistribution truncated_poisson_arrivals(double rate, int max_arrivals);
ArrivalDistribution constant_arrivals(int count);

/// A channel-mean estimate, always held inside [0, 1].
class Belief {
 public:
  constexpr Belief() = default;
  /// Clamps to [0, 1]. NaN is rejected with std::invalid_argument.
  explicit Belief(double mu);

  constexpr double value() const { return mu_; }
  constexpr auto operator<=>(const Belief&) const = default;

 private:
  double mu_ = 0.0;
};

/// An (m, x) erasure code: x packets encoded over m channels.
struct CodeDecision {
  int block_length = 0;  // m
  int word_length = 0;   // x

  bool idle() const { return block_length == 0; }
  bool operator==(const CodeDecision&) const = default;
};

/// ACK/NACK states of the channels activated in one slot.
struct ChannelRealization {
  std::vector<std::uint8_t> states;

  int connected() const;
  std::size_t size() const { return states.size(); }
};

/// P(Binomial(m, mu) >= x), by direct summation of the smaller tail.
double binomial_tail(int block_length, int word_length, Belief mu);

/// Success probabilities P(Binomial(m, mu) >= x) for all m <= max_block and
/// x <= max_word, built by the recurrence
///   P_m(x) = mu * P_{m-1}(x-1) + (1 - mu) * P_{m-1}(x).
/// Entry (m, x) does not depend on the table extent.
class TailTable {
 public:
  TailTable() = default;
  TailTable(Belief mu, int max_block, int max_word);

  double operator()(int block_length, int word_length) const {
    if (word_length > block_length) return 0.0;
    return tails_[static_cast<std::size_t>(block_length) * stride_ +
                  static_cast<std::size_t>(word_length)];
  }
  int max_block() const { return max_block_; }
  int max_word() const { return static_cast<int>(stride_) - 1; }
  Belief belief() const { return mu_; }

 private:
  Belief mu_;
  int max_block_ = 0;
  std::size_t stride_ = 1;
  std::vector<double> tails_;
};

/// x if at least x of the m activated channels are connected, else 0.
/// Throws std::invalid_argument if the realization length differs from m.
int throughput(const CodeDecision& decision, const ChannelRealization& realization);

/// throughput - d * m.
double revenue(const CodeDecision& decision, const ChannelRealization& realization,
               double channel_cost);

/// m iid Bernoulli(mu) draws; consumes exactly m engine values.
ChannelRealization sample_channels(int block_length, Belief mu, Rng& rng);

/// One draw from the arrival distribution; consumes exactly one engine value.
int sample_arrival(const ArrivalDistribution& dist, Rng& rng);

}  // namespace dlcode
