#include "dlcode/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace dlcode {
namespace {

constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio

// Golden-section search for the maximum of a unimodal function on [lo, hi].
double golden_maximize(const std::function<double(double)>& f, double lo, double hi,
                       double tolerance) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && (b - a) > tolerance; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

void require_interior(Belief mu) {
  if (mu.value() <= 0.0 || mu.value() >= 1.0) {
    throw std::invalid_argument("continuous approximation needs 0 < mu < 1");
  }
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

// -- Critical point ----------------------------------------------------------

double critical_point(const SystemParams& params) {
  params.validate();
  if (params.channel_cost <= 0.0) {
    throw std::invalid_argument("critical point needs d > 0 (no idle region when d = 0)");
  }
  auto idle = [&](double mu) { return solve_policy(Belief(mu), params).all_idle(); };

  double lo = params.channel_cost / (1.0 + params.penalty);
  double hi = std::min(1.0, 2.0 * lo);
  if (!idle(lo)) return lo;
  if (idle(hi)) {
    // A per-slot channel cap can push the activation threshold past the
    // usual bracket.
    if (idle(1.0)) throw std::domain_error("no belief in [0, 1] activates a channel");
    lo = hi;
    hi = 1.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (idle(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// -- Single-packet closed form -----------------------------------------------

DelayTolerantPolicy delay_tolerant_policy(Belief belief, const SystemParams& params) {
  params.validate();
  if (params.max_arrivals != 1) {
    throw std::invalid_argument("single-packet closed form needs a_max = 1");
  }
  const double mu = belief.value();
  const double d = params.channel_cost;
  const int cap = params.channel_cap.value_or(std::numeric_limits<int>::max());

  DelayTolerantPolicy out;
  out.values.push_back(-params.penalty);
  for (int s = 1; s <= params.frame_length; ++s) {
    const double prev = out.values.back();
    const double stake = 1.0 - prev;  // 1 - J_{s-1}(1): delivery revenue plus avoided penalty
    int k = 0;
    if (mu * stake - d > kTieTolerance) {
      // Add channels while the next one still pays for itself.
      k = 1;
      double miss = 1.0 - mu;  // (1 - mu)^k
      while (k < cap && miss * mu * stake - d > kTieTolerance) {
        ++k;
        miss *= 1.0 - mu;
      }
    }
    out.block_lengths.push_back(k);
    if (k == 0) {
      out.values.push_back(prev);
    } else {
      const double success = 1.0 - std::pow(1.0 - mu, k);
      out.values.push_back(-d * k + success * 1.0 + (1.0 - success) * prev);
    }
  }
  return out;
}

// -- Continuous approximation --------------------------------------------------

double nu(double m, double x, Belief belief, double d, double lambda, PhiConvention convention) {
  if (!(m > 0.0)) throw std::invalid_argument("nu needs m > 0");
  require_interior(belief);
  const double mu = belief.value();
  const double sigma = std::sqrt(m * mu * (1.0 - mu));
  const double z = convention == PhiConvention::kSuccessProbability ? (m * mu - x) / sigma
                                                                    : (x - m * mu) / sigma;
  return -d * m + x * normal_cdf(z) * (1.0 + lambda);
}

double nu_slope(double m, double x, Belief belief, double d, double lambda) {
  const double mu = belief.value();
  const double sigma = std::sqrt(m * mu * (1.0 - mu));
  const double z = (m * mu - x) / sigma;
  return -d + (1.0 + lambda) * x * normal_pdf(z) * (m * mu + x) / (2.0 * sigma * m);
}

double block_length_residual(double m, double x, Belief belief, double d, double lambda) {
  const double mu = belief.value();
  const double sigma = std::sqrt(m * mu * (1.0 - mu));
  const double z = (x - m * mu) / sigma;
  return (1.0 + lambda) * x / sigma * normal_pdf(z) - 2.0 * d / (x / m + mu);
}

std::optional<double> optimal_block_length(double x, Belief belief, double d, double lambda) {
  require_interior(belief);
  if (!(x > 0.0)) throw std::invalid_argument("word length must be > 0");
  if (!(d > 0.0)) throw std::invalid_argument("optimal block length needs d > 0");
  const double mu = belief.value();
  auto value = [&](double m) { return nu(m, x, belief, d, lambda); };
  auto slope = [&](double m) { return nu_slope(m, x, belief, d, lambda); };

  // nu -> 0 as m -> 0 and falls with slope -d for large m.
  double hi = std::max(x / mu, 1e-6);
  for (int it = 0; it < 200 && slope(hi) > 0.0; ++it) hi *= 2.0;

  constexpr int kGrid = 512;
  int best = 1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 1; i <= kGrid; ++i) {
    const double v = value(hi * i / kGrid);
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  if (best_value <= 0.0) return std::nullopt;

  const double lo = best > 1 ? hi * (best - 1) / kGrid : hi * 1e-9;
  const double up = hi * std::min(best + 1, kGrid) / kGrid;
  const double m0 = golden_maximize(value, lo, up, 1e-10 * std::max(1.0, up));

  // Polish on the first-order condition.
  double left = m0;
  double right = m0;
  double step = 1e-7 * std::max(1.0, m0);
  for (int it = 0; it < 100 && slope(left) <= 0.0 && left - step > 0.0; ++it) {
    left -= step;
    step *= 2.0;
  }
  step = 1e-7 * std::max(1.0, m0);
  for (int it = 0; it < 100 && slope(right) >= 0.0; ++it) {
    right += step;
    step *= 2.0;
  }
  double m = m0;
  if (slope(left) > 0.0 && slope(right) < 0.0) {
    for (int it = 0; it < 200; ++it) {
      m = 0.5 * (left + right);
      if (m <= left || m >= right) break;
      (slope(m) > 0.0 ? left : right) = m;
    }
  }
  if (value(m) <= 0.0) return std::nullopt;
  return m;
}

std::optional<ContinuousOptimum> continuous_optimum(int arrivals, Belief belief, double d,
                                                    double lambda) {
  require_interior(belief);
  if (arrivals <= 0) return std::nullopt;
  const double a = arrivals;
  auto best_for_word = [&](double x) {
    const auto m = optimal_block_length(x, belief, d, lambda);
    return m ? nu(*m, x, belief, d, lambda) : 0.0;
  };

  // Words shorter than one packet are excluded: near the origin the normal
  // approximation gives nu ~ m (x/m (1+lambda)/2 - d) > 0 for any belief.
  constexpr int kGrid = 64;
  auto word_at = [&](int j) { return 1.0 + (a - 1.0) * j / kGrid; };
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int j = 0; j <= (arrivals > 1 ? kGrid : 0); ++j) {
    const double v = best_for_word(word_at(j));
    if (v > best_value) {
      best_value = v;
      best = j;
    }
  }
  if (best_value <= 0.0) return std::nullopt;

  double x = 1.0;
  if (arrivals > 1) {
    x = golden_maximize(best_for_word, word_at(std::max(best - 1, 0)),
                        word_at(std::min(best + 1, kGrid)), 1e-10 * a);
    if (best_for_word(a) >= best_for_word(x) - kTieTolerance) x = a;
    if (best_for_word(1.0) > best_for_word(x)) x = 1.0;
  }

  const auto m = optimal_block_length(x, belief, d, lambda);
  if (!m) return std::nullopt;
  const double v = nu(*m, x, belief, d, lambda);
  if (v <= 0.0) return std::nullopt;
  return ContinuousOptimum{*m, x, x / *m, v};
}

// -- Regret bounds -------------------------------------------------------------

std::int64_t psi_threshold(double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("psi needs epsilon > 0");
  auto f = [epsilon](double n) { return n - std::log(n + 1.0) / epsilon; };
  if (f(1.0) > 0.0) return 1;
  // f falls until n = 1/eps - 1 and rises afterwards.
  double lo = std::max(1.0, std::floor(1.0 / epsilon - 1.0));
  double hi = 2.0 * lo;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e17) return std::numeric_limits<std::int64_t>::max();
  }
  auto lo_n = static_cast<std::int64_t>(lo);  // f(lo_n) <= 0
  auto hi_n = static_cast<std::int64_t>(hi);  // f(hi_n) > 0
  while (hi_n - lo_n > 1) {
    const std::int64_t mid = lo_n + (hi_n - lo_n) / 2;
    (f(static_cast<double>(mid)) > 0.0 ? hi_n : lo_n) = mid;
  }
  return hi_n;
}

double psi(double epsilon, int frame_length, std::int64_t max_channel_uses) {
  const std::int64_t start = psi_threshold(epsilon);
  if (start > (std::int64_t{1} << 50)) return std::numeric_limits<double>::infinity();
  auto f = [epsilon](double n) { return n - std::log(n + 1.0) / epsilon; };

  constexpr std::int64_t kExplicitTerms = 1'000'000;
  const std::int64_t stop = start + kExplicitTerms;  // first term left to the tail
  double series = 0.0;
  for (std::int64_t n = stop - 1; n >= start; --n) {
    const double g = f(static_cast<double>(n));
    series += 1.0 / (g * g);
  }
  // The terms decrease past `start`, so sum_{n >= stop} g(n) <= int_{stop-1}^inf.
  // Bounding log(x+1) by its tangent at L = stop - 1 gives
  // f(x) >= c x + e and the integral 1 / (c (c L + e)) = 1 / (c f(L)).
  const double L = static_cast<double>(stop - 1);
  const double c = 1.0 - 1.0 / (epsilon * (L + 1.0));
  series += 1.0 / (c * f(L));

  const double scale = static_cast<double>(frame_length) *
                       static_cast<double>(max_channel_uses) * std::numbers::pi *
                       std::numbers::pi / 2.0;
  return static_cast<double>(start) + scale * series;
}

std::pair<double, double> zeta_interval(int arrivals, Belief mu_star, const SystemParams& params,
                                        double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  const PolicyTable reference = solve_policy(mu_star, params);
  auto same = [&](double mu) {
    return solve_policy(Belief(mu), params).same_decisions(reference, arrivals);
  };
  auto refine = [&](double inside, double outside) {
    while (std::abs(outside - inside) > 1e-9) {
      const double mid = 0.5 * (inside + outside);
      (same(mid) ? inside : outside) = mid;
    }
    return inside;
  };

  double upper = mu_star.value();
  while (upper < 1.0) {
    const double next = std::min(1.0, upper + grid_step);
    if (!same(next)) {
      upper = refine(upper, next);
      break;
    }
    upper = next;
  }
  double lower = mu_star.value();
  while (lower > 0.0) {
    const double next = std::max(0.0, lower - grid_step);
    if (!same(next)) {
      lower = refine(lower, next);
      break;
    }
    lower = next;
  }
  return {lower, upper};
}

double revenue_floor(int arrivals, const SystemParams& params) {
  if (params.channel_cost <= 0.0) throw std::invalid_argument("revenue floor needs d > 0");
  return params.frame_length * arrivals / params.channel_cost + params.penalty * arrivals;
}

RegretBoundInputs regret_bound_inputs(Belief mu_star, const SystemParams& params,
                                      const ArrivalDistribution& arrivals, double grid_step) {
  if (arrivals.max_arrivals() != params.max_arrivals) {
    throw std::invalid_argument("arrival distribution length does not match a_max");
  }
  RegretBoundInputs in;
  in.critical_point = critical_point(params);
  in.arrival_pmf.assign(arrivals.pmf().begin(), arrivals.pmf().end());
  in.genie_values = genie_values(mu_star, params);
  for (int a = 0; a <= params.max_arrivals; ++a) {
    in.revenue_floor.push_back(revenue_floor(a, params));
    if (arrivals.probability(a) > 0.0 && a > 0) {
      in.zeta_intervals.push_back(zeta_interval(a, mu_star, params, grid_step));
    } else {
      in.zeta_intervals.emplace_back(0.0, 1.0);
    }
  }
  return in;
}

std::optional<double> regret_upper_bound(Belief mu_star, const SystemParams& params, double beta,
                                         std::int64_t horizon, const RegretBoundInputs& in,
                                         GapConvention gap) {
  if (beta < 4.0) throw std::invalid_argument("regret bound needs beta >= 4");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  const double mu = mu_star.value();
  const double uses = static_cast<double>(params.frame_length) *
                      static_cast<double>(params.max_channel_uses());
  const double pi2 = std::numbers::pi * std::numbers::pi;

  double total = 0.0;
  if (mu < in.critical_point) {
    const double ref = gap == GapConvention::kCriticalPoint ? in.critical_point
                                                            : params.channel_cost;
    const double width = (ref - mu) * (ref - mu);
    if (width <= 0.0) return std::nullopt;
    const double per_frame_count =
        2.0 * beta * std::log(static_cast<double>(horizon)) / width + uses * pi2 / 6.0;
    for (std::size_t a = 0; a < in.arrival_pmf.size(); ++a) {
      total += in.arrival_pmf[a] * in.revenue_floor[a] * per_frame_count;
    }
    return total;
  }
  for (std::size_t a = 1; a < in.arrival_pmf.size(); ++a) {
    if (in.arrival_pmf[a] <= 0.0) continue;
    const double margin = in.zeta_intervals[a].second - mu;
    const double epsilon = margin * margin / (2.0 * beta);
    if (!(epsilon > 0.0)) return std::nullopt;
    const double tail = psi(epsilon, params.frame_length, params.max_channel_uses());
    if (!std::isfinite(tail)) return std::nullopt;
    total += in.arrival_pmf[a] * (in.genie_values[a] + in.revenue_floor[a]) *
             (uses * pi2 / 3.0 + tail);
  }
  return total;
}

}  // namespace dlcode
