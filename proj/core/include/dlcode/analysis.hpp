#pragma once

// Structural quantities of the optimal coding policy and the regret bounds for
// the optimistic learner.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dlcode/dp.hpp"
#include "dlcode/model.hpp"

namespace dlcode {

double normal_cdf(double z);
double normal_pdf(double z);

// -- Critical point ----------------------------------------------------------

/// The belief below which the optimal policy never activates a channel.
/// Bisection on [d/(1+lambda), 2d/(1+lambda)] to well below 1e-6.
/// Throws std::invalid_argument when d = 0.
double critical_point(const SystemParams& params);

// -- Single-packet closed form -----------------------------------------------

struct DelayTolerantPolicy {
  std::vector<int> block_lengths;  // indexed by stage - 1 (stage 1 = last slot)
  std::vector<double> values;      // J_s(1) for s = 0..T
};

/// Threshold rule for A_max = 1: at stage s the policy uses k channels, the
/// smallest k with (1-mu)^k * mu <= d / (1 - J_{s-1}(1)), or idles when
/// mu <= d / (1 - J_{s-1}(1)). Throws std::invalid_argument unless A_max = 1.
DelayTolerantPolicy delay_tolerant_policy(Belief mu, const SystemParams& params);

// -- Continuous approximation (single slot) ------------------------------------

enum class PhiConvention {
  /// Phi((m mu - x) / sqrt(m mu (1 - mu))): the normal approximation of the
  /// success probability P(S_m >= x).
  kSuccessProbability,
  /// Phi((x - m mu) / sqrt(m mu (1 - mu))), the failure-side argument.
  kFailureArgument,
};

/// nu(m, x) = -d m + (1 + lambda) x Phi(z). Throws std::invalid_argument for
/// m <= 0 or mu in {0, 1}.
double nu(double block_length, double word_length, Belief mu, double channel_cost,
          double penalty, PhiConvention convention = PhiConvention::kSuccessProbability);

/// d nu / d m under the success-probability convention.
double nu_slope(double block_length, double word_length, Belief mu, double channel_cost,
                double penalty);

/// First-order condition for the optimal block length:
///   (1 + lambda) x / sqrt(m mu (1 - mu)) phi(z) - 2 d / (x/m + mu).
double block_length_residual(double block_length, double word_length, Belief mu,
                             double channel_cost, double penalty);

/// Maximizer of nu(., x), or nullopt when nu <= 0 everywhere (idling wins).
std::optional<double> optimal_block_length(double word_length, Belief mu, double channel_cost,
                                           double penalty);

struct ContinuousOptimum {
  double block_length;  // m1
  double word_length;   // x1
  double rate;          // x1 / m1
  double value;         // nu(m1, x1)
};

/// Maximizes nu over x in [1, a] and m > 0; nullopt means idle.
std::optional<ContinuousOptimum> continuous_optimum(int arrivals, Belief mu,
                                                    double channel_cost, double penalty);

// -- Regret bounds -------------------------------------------------------------

/// n_eps = inf{n >= 1 : n - log(n + 1) / eps > 0}.
std::int64_t psi_threshold(double epsilon);

/// Psi(eps) = n_eps + T M_max (pi^2 / 2) sum_{n >= n_eps} (n - log(n+1)/eps)^-2,
/// an upper estimate accurate to 1e-9 relative. Throws for eps <= 0.
double psi(double epsilon, int frame_length, std::int64_t max_channel_uses);

/// Largest belief interval around mu_star on which the decisions reachable
/// from queue length `arrivals` stay the same. Boundaries are refined to 1e-6
/// and reported on the inside.
std::pair<double, double> zeta_interval(int arrivals, Belief mu_star,
                                        const SystemParams& params, double grid_step = 1e-3);

enum class GapConvention {
  kCriticalPoint,  // (zeta - mu*)^2 in the logarithmic case
  kChannelCost,    // (d - mu*)^2 in the logarithmic case
};

struct RegretBoundInputs {
  double critical_point = 0.0;
  std::vector<double> arrival_pmf;
  std::vector<std::pair<double, double>> zeta_intervals;  // per a
  std::vector<double> revenue_floor;                      // B_a per a
  std::vector<double> genie_values;                       // J*(a) per a
};

/// Collects the per-arrival ingredients of the bound.
RegretBoundInputs regret_bound_inputs(Belief mu_star, const SystemParams& params,
                                      const ArrivalDistribution& arrivals,
                                      double grid_step = 1e-3);

/// B_a = T a / d + lambda a.
double revenue_floor(int arrivals, const SystemParams& params);

/// Regret upper bound at horizon N for the optimistic learner with parameter
/// beta >= 4. Returns nullopt when the bound is infinite (mu* sits on an
/// interval boundary zeta_a^u). Throws std::invalid_argument for beta < 4.
std::optional<double> regret_upper_bound(Belief mu_star, const SystemParams& params,
                                         double beta, std::int64_t horizon,
                                         const RegretBoundInputs& inputs,
                                         GapConvention gap = GapConvention::kCriticalPoint);

}  // namespace dlcode
