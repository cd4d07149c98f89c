// Acceptance suite: each criterion prints one PASS/FAIL line with the
// measured quantities. The process exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "config.hpp"
#include "dlcode/analysis.hpp"
#include "dlcode/dp.hpp"
#include "dlcode/sim.hpp"
#include "oracles.hpp"

namespace {

using namespace dlcode;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

SystemParams Params(int t, double d, double lambda, int a_max) {
  SystemParams p;
  p.frame_length = t;
  p.channel_cost = d;
  p.penalty = lambda;
  p.max_arrivals = a_max;
  return p;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int workers() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

ExperimentConfig preset_config(const std::string& name, LearnerKind kind) {
  auto run = cli::parse_config(cli::find_preset(name).config);
  ExperimentConfig c = run.experiment;
  for (const auto& l : run.learners) {
    if (l.kind == kind) c.learner = l;
  }
  c.learner.kind = kind;
  return c;
}

// -- 1 -----------------------------------------------------------------------
Verdict dp_oracle() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int checked = 0;
  for (const auto& [d, lambda] : {std::pair{0.25, 1.0}, std::pair{0.3, 0.5}, std::pair{0.1, 0.0}}) {
    for (int t = 1; t <= 2; ++t) {
      for (int a_max = 1; a_max <= 3; ++a_max) {
        auto p = Params(t, d, lambda, a_max);
        p.channel_cap = 6;
        for (int i = 0; i <= 20; ++i) {
          const double mu = i / 20.0;
          const auto table = solve_policy(Belief(mu), p);
          for (int q = 0; q <= a_max; ++q) {
            worst = std::max(worst, std::abs(table.value(t, q) - oracle::tree_value(t, q, mu, p, 6)));
            ++checked;
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  v.require(worst <= 1e-9, "max |J - tree| = " + fmt("%.3g", worst));
  v.require(elapsed < 10.0, "runtime " + fmt("%.2f s", elapsed));
  v.note(std::to_string(checked) + " values, max error " + fmt("%.2g", worst) + ", " +
         fmt("%.2f s", elapsed));
  return v;
}

// -- 2 -----------------------------------------------------------------------
Verdict closed_form() {
  Verdict v;
  const auto p = Params(4, 0.25, 1.0, 1);
  int mismatches = 0, idle_errors = 0, monotone_errors = 0;
  for (int i = 0; i <= 100; ++i) {
    const Belief mu(i / 100.0);
    const auto closed = delay_tolerant_policy(mu, p);
    const auto table = solve_policy(mu, p);
    for (int s = 1; s <= 4; ++s) {
      const auto d = table.decision(s, 1);
      if (closed.block_lengths[static_cast<std::size_t>(s - 1)] != d.block_length ||
          d.word_length != (d.block_length > 0 ? 1 : 0)) {
        ++mismatches;
      }
      if (s >= 2 && table.decision(s - 1, 1).block_length < d.block_length) ++monotone_errors;
    }
    const bool idle = table.all_idle();
    if (idle != (mu.value() <= 0.125)) ++idle_errors;
  }
  v.require(mismatches == 0, std::to_string(mismatches) + " decision mismatches");
  v.require(idle_errors == 0, std::to_string(idle_errors) + " beliefs with wrong idle status");
  v.require(monotone_errors == 0, std::to_string(monotone_errors) + " stage monotonicity breaks");
  v.note("101 beliefs, idle exactly for mu <= 0.125");
  return v;
}

// -- 3 -----------------------------------------------------------------------
Verdict critical() {
  Verdict v;
  double worst = 0.0;
  for (double d : {0.05, 0.1, 0.2, 0.25, 0.5, 0.8}) {
    for (double lambda : {0.0, 0.25, 1.0, 2.0, 5.0}) {
      for (int t : {1, 2, 4}) {
        worst = std::max(worst, std::abs(critical_point(Params(t, d, lambda, 1)) - d / (1 + lambda)));
      }
    }
  }
  v.require(worst <= 1e-6, "single-packet max deviation " + fmt("%.3g", worst));
  std::mt19937_64 rng(2019);
  std::uniform_real_distribution<double> cost(0.05, 0.6), pen(0.0, 3.0);
  int outside = 0;
  for (int i = 0; i < 20; ++i) {
    const auto p = Params(1 + static_cast<int>(rng() % 4), cost(rng), pen(rng),
                          2 + static_cast<int>(rng() % 5));
    const double zeta = critical_point(p);
    const double lo = p.channel_cost / (1 + p.penalty);
    if (zeta < lo - 1e-9 || zeta > 2 * lo + 1e-9) ++outside;
  }
  v.require(outside == 0, std::to_string(outside) + " of 20 random configs outside the bracket");
  v.note("single-packet max |zeta - d/(1+lambda)| = " + fmt("%.2g", worst) + ", 20/20 in bracket");
  return v;
}

// -- 4 -----------------------------------------------------------------------
Verdict continuous() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  int rate_errors = 0, word_errors = 0, idle = 0, points = 0;
  double worst_residual = 0.0;
  for (int i = 25; i <= 99; ++i) {
    const double mu = i / 100.0;
    ++points;
    const auto opt = continuous_optimum(6, Belief(mu), 0.25, 1.0);
    if (!opt) {
      ++idle;
      continue;
    }
    if (!(opt->rate < mu + 1e-6)) ++rate_errors;
    if (mu >= 0.5 && std::abs(opt->word_length - 6.0) > 1e-6) ++word_errors;
    worst_residual = std::max(worst_residual, std::abs(block_length_residual(
                                                  opt->block_length, opt->word_length, Belief(mu), 0.25, 1.0)));
  }
  const double elapsed = seconds_since(start);
  v.require(idle == 0, std::to_string(idle) + " idle optima");
  v.require(rate_errors == 0, std::to_string(rate_errors) + " rates >= mu");
  v.require(word_errors == 0, std::to_string(word_errors) + " optima with x1 != 6 at mu >= 0.5");
  v.require(worst_residual <= 1e-8, "residual " + fmt("%.3g", worst_residual));
  v.require(elapsed < 5.0, "runtime " + fmt("%.2f s", elapsed));
  v.note(std::to_string(points) + " beliefs in [0.25, 0.99], max residual " +
         fmt("%.2g", worst_residual) + ", " + fmt("%.2f s", elapsed));
  return v;
}

// Shared simulation results.
struct Runs {
  RegretCurve fig7_ucb, fig7_ts, low_ucb, low_ts;
  std::optional<std::vector<double>> fig7_bound, low_bound;
};

// -- 5 -----------------------------------------------------------------------
Verdict bounded_regime(const Runs& r) {
  Verdict v;
  const auto& c = r.fig7_ucb;
  const double late = c.mean_cum_regret[9999];
  const double mid = c.mean_cum_regret[4999];
  const double se = std::hypot(c.se_cum_regret[9999], c.se_cum_regret[4999]);
  v.require(late - mid < 3 * se || late - mid == 0.0,
            "R(1e4) - R(5e3) = " + fmt("%.4g", late - mid) + " vs 3 SE = " + fmt("%.4g", 3 * se));
  int violations = 0;
  if (!r.fig7_bound) {
    v.require(false, "bound reported infinite");
  } else {
    for (std::size_t i = 0; i < c.mean_cum_regret.size(); ++i) {
      if ((*r.fig7_bound)[i] < c.mean_cum_regret[i]) ++violations;
    }
    v.require(violations == 0, std::to_string(violations) + " frames above the bound");
  }
  v.note("R(5e3) = " + fmt("%.4f", mid) + ", R(1e4) = " + fmt("%.4f", late) +
         ", bound = " + fmt("%.4g", r.fig7_bound ? r.fig7_bound->back() : INFINITY));
  return v;
}

// -- 6 -----------------------------------------------------------------------
Verdict log_regime(const Runs& r) {
  Verdict v;
  const auto& c = r.low_ucb;
  std::vector<double> x, y;
  for (std::size_t n = 100; n <= 10000; ++n) {
    x.push_back(std::log(static_cast<double>(n)));
    y.push_back(c.mean_cum_regret[n - 1]);
  }
  const double r2 = oracle::r_squared(x, y);
  v.require(r2 >= 0.95, "R^2 = " + fmt("%.4f", r2) + " < 0.95");
  int violations = 0;
  if (!r.low_bound) {
    v.require(false, "bound reported infinite");
  } else {
    for (std::size_t i = 0; i < c.mean_cum_regret.size(); ++i) {
      if ((*r.low_bound)[i] < c.mean_cum_regret[i]) ++violations;
    }
    v.require(violations == 0, std::to_string(violations) + " frames above the bound");
  }
  v.note("R^2 = " + fmt("%.4f", r2) + ", R(1e2) = " + fmt("%.2f", y.front()) +
         ", R(1e4) = " + fmt("%.2f", y.back()));
  return v;
}

// -- 7 -----------------------------------------------------------------------
Verdict throughput(const Runs& r) {
  Verdict v;
  for (const auto* c : {&r.fig7_ucb, &r.fig7_ts}) {
    const double last = c->mean_throughput.back();
    v.require(last >= 0.95, "mu*=0.7 throughput at 1e4 = " + fmt("%.4f", last));
  }
  for (const auto* c : {&r.low_ucb, &r.low_ts}) {
    double tail = 0.0;
    for (std::size_t i = 9000; i < 10000; ++i) tail += c->mean_throughput[i];
    tail /= 1000.0;
    v.require(tail <= 0.05, "mu*=0.05 late throughput = " + fmt("%.4f", tail));
  }
  v.note("mu*=0.7: ucb " + fmt("%.3f", r.fig7_ucb.mean_throughput.back()) + ", ts " +
         fmt("%.3f", r.fig7_ts.mean_throughput.back()));
  return v;
}

// -- 8 -----------------------------------------------------------------------
Verdict crossover() {
  Verdict v;
  bool ucb_wins_above = false, ts_wins_below = false;
  std::string table;
  for (double mu : {0.05, 0.1, 0.15, 0.22, 0.25, 0.3}) {
    auto ucb = preset_config("fig12", LearnerKind::kUcb);
    auto ts = preset_config("fig12", LearnerKind::kThompson);
    ucb.mu_star = ts.mu_star = Belief(mu);
    const auto a = run_experiment(ucb, workers());
    const auto b = run_experiment(ts, workers());
    const double diff = b.mean_cum_regret.back() - a.mean_cum_regret.back();  // > 0: UCB better
    const double se = std::hypot(a.se_cum_regret.back(), b.se_cum_regret.back());
    if (mu > 0.2 && diff >= 2 * se) ucb_wins_above = true;
    if (mu < 0.2 && -diff >= 2 * se) ts_wins_below = true;
    table += fmt(" mu*=%.2f", mu) + fmt(" ucb %.2f", a.mean_cum_regret.back()) +
             fmt("/ts %.2f", b.mean_cum_regret.back());
  }
  v.require(ucb_wins_above, "UCB never beats TS by 2 SE for mu* in {0.22, 0.25, 0.3}");
  v.require(ts_wins_below, "TS never beats UCB by 2 SE for mu* < 0.2");
  v.note("final regret" + table);
  return v;
}

// -- 9 -----------------------------------------------------------------------
Verdict determinism() {
  Verdict v;
  std::string reference;
  for (const char* name : {"fig12", "fig9"}) {
    for (LearnerKind kind : {LearnerKind::kUcb, LearnerKind::kThompson}) {
      auto c = preset_config(name, kind);
      c.horizon = 2000;
      c.replications = 24;
      std::string first;
      for (int w : {1, 2, 3, 8}) {
        const auto curve = run_experiment(c, w);
        std::ostringstream out;
        cli::write_curve_csv(out, curve, {});
        if (first.empty()) {
          first = out.str();
        } else if (out.str() != first) {
          v.require(false, std::string(name) + " differs at " + std::to_string(w) + " workers");
        }
      }
    }
  }
  v.note("fig12 and fig9 (ucb, ts) with 1, 2, 3 and 8 workers: identical CSV bytes");
  return v;
}

// -- 10 ----------------------------------------------------------------------
Verdict genie() {
  Verdict v;
  int frames = 0;
  for (const char* name : {"fig7", "dtlow", "fig9", "fig11", "fig12"}) {
    auto c = preset_config(name, LearnerKind::kGenie);
    c.replications = 8;
    const auto curve = run_experiment(c, workers());
    for (double x : curve.mean_cum_regret) {
      ++frames;
      if (x != 0.0) {
        v.require(false, std::string(name) + " nonzero regret " + fmt("%.3g", x));
        break;
      }
    }
  }
  v.note(std::to_string(frames) + " frames across 5 presets, all exactly 0");
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Verdict()>& check) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failures;
    std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "DP vs decision-tree enumeration", dp_oracle);
  report(2, "single-packet closed form", closed_form);
  report(3, "critical point", critical);
  report(4, "continuous approximation", continuous);

  Runs runs;
  auto fig7 = preset_config("fig7", LearnerKind::kUcb);
  auto fig7_ts = preset_config("fig7", LearnerKind::kThompson);
  auto low = preset_config("dtlow", LearnerKind::kUcb);
  auto low_ts = preset_config("dtlow", LearnerKind::kThompson);
  const auto sim_start = std::chrono::steady_clock::now();
  runs.fig7_ucb = run_experiment(fig7, workers());
  const double fig7_seconds = seconds_since(sim_start);
  runs.fig7_ts = run_experiment(fig7_ts, workers());
  runs.low_ucb = run_experiment(low, workers());
  runs.low_ts = run_experiment(low_ts, workers());
  runs.fig7_bound = bound_overlay(fig7);
  runs.low_bound = bound_overlay(low);

  report(5, "bounded regret at mu*=0.7", [&] {
    auto v = bounded_regime(runs);
    v.note(fmt("UCB run %.1f s", fig7_seconds));
    return v;
  });
  report(6, "logarithmic regret at mu*=0.05", [&] { return log_regime(runs); });
  report(7, "throughput limits", [&] { return throughput(runs); });
  report(8, "UCB/TS crossover", crossover);
  report(9, "determinism across worker counts", determinism);
  report(10, "genie baseline", genie);

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
