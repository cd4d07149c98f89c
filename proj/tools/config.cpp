#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

#include "dlcode/analysis.hpp"

namespace dlcode::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) {
      fail(path.empty() ? key : path + "." + key, "unknown key");
    }
  }
}

double get_number(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const std::string& key, const std::string& path) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

SystemParams parse_params(const json& doc) {
  check_keys(doc, "params", {"T", "d", "lambda", "a_max", "channel_cap"});
  for (const char* required : {"T", "d", "lambda", "a_max"}) {
    if (!doc.contains(required)) fail(std::string("params.") + required, "missing");
  }
  SystemParams p;
  p.frame_length = static_cast<int>(get_integer(doc, "T", "params.T"));
  p.channel_cost = get_number(doc, "d", "params.d");
  p.penalty = get_number(doc, "lambda", "params.lambda");
  p.max_arrivals = static_cast<int>(get_integer(doc, "a_max", "params.a_max"));
  if (doc.contains("channel_cap") && !doc.at("channel_cap").is_null()) {
    p.channel_cap = static_cast<int>(get_integer(doc, "channel_cap", "params.channel_cap"));
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    // Validation messages lead with the field name.
    const std::string what = e.what();
    fail("params." + what.substr(0, what.find(' ')), what);
  }
  return p;
}

ArrivalDistribution parse_arrivals(const json& doc, int max_arrivals) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    fail("arrivals.kind", "expected one of constant, uniform, truncated_poisson, pmf");
  }
  const auto kind = doc.at("kind").get<std::string>();
  try {
    if (kind == "uniform") {
      check_keys(doc, "arrivals", {"kind"});
      return uniform_arrivals(max_arrivals);
    }
    if (kind == "constant") {
      check_keys(doc, "arrivals", {"kind", "value"});
      if (!doc.contains("value")) fail("arrivals.value", "missing");
      const auto value = get_integer(doc, "value", "arrivals.value");
      if (value < 0 || value > max_arrivals) fail("arrivals.value", "must lie in 0..a_max");
      std::vector<double> pmf(static_cast<std::size_t>(max_arrivals) + 1, 0.0);
      pmf[static_cast<std::size_t>(value)] = 1.0;
      return ArrivalDistribution(std::move(pmf));
    }
    if (kind == "truncated_poisson") {
      check_keys(doc, "arrivals", {"kind", "rate"});
      if (!doc.contains("rate")) fail("arrivals.rate", "missing");
      return truncated_poisson_arrivals(get_number(doc, "rate", "arrivals.rate"), max_arrivals);
    }
    if (kind == "pmf") {
      check_keys(doc, "arrivals", {"kind", "pmf"});
      if (!doc.contains("pmf") || !doc.at("pmf").is_array()) fail("arrivals.pmf", "expected an array");
      std::vector<double> pmf;
      for (const auto& v : doc.at("pmf")) {
        if (!v.is_number()) fail("arrivals.pmf", "expected numbers");
        pmf.push_back(v.get<double>());
      }
      if (static_cast<int>(pmf.size()) != max_arrivals + 1) {
        fail("arrivals.pmf", "length must be a_max + 1");
      }
      return ArrivalDistribution(std::move(pmf));
    }
  } catch (const std::invalid_argument& e) {
    fail("arrivals", e.what());
  }
  fail("arrivals.kind", "unknown kind '" + kind + "'");
}

LearnerSpec parse_learner(const json& doc, const std::string& path) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    fail(path + ".kind", "expected one of ucb, ts, genie");
  }
  const auto kind = doc.at("kind").get<std::string>();
  LearnerSpec spec;
  if (kind == "ucb") {
    check_keys(doc, path, {"kind", "beta"});
    spec.kind = LearnerKind::kUcb;
    if (doc.contains("beta")) spec.beta = get_number(doc, "beta", path + ".beta");
    if (!(spec.beta >= 3.0)) fail(path + ".beta", "must be >= 3");
  } else if (kind == "ts") {
    check_keys(doc, path, {"kind"});
    spec.kind = LearnerKind::kThompson;
  } else if (kind == "genie") {
    check_keys(doc, path, {"kind"});
    spec.kind = LearnerKind::kGenie;
  } else {
    fail(path + ".kind", "unknown learner '" + kind + "'");
  }
  return spec;
}

json learner_to_json(const LearnerSpec& spec) {
  json out = {{"kind", spec.name()}};
  if (spec.kind == LearnerKind::kUcb) out["beta"] = spec.beta;
  return out;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  check_keys(doc, "", {"params", "arrivals", "mu_star", "learner", "horizon", "replications",
                       "base_seed", "transition_mode"});
  if (!doc.contains("params")) fail("params", "missing");
  RunConfig out;
  ExperimentConfig& e = out.experiment;
  e.params = parse_params(doc.at("params"));

  out.arrivals_spec = doc.contains("arrivals") ? doc.at("arrivals") : json{{"kind", "uniform"}};
  e.arrivals = parse_arrivals(out.arrivals_spec, e.params.max_arrivals);

  if (doc.contains("mu_star")) {
    const double mu = get_number(doc, "mu_star", "mu_star");
    if (!(mu >= 0.0 && mu <= 1.0)) fail("mu_star", "must lie in [0, 1]");
    e.mu_star = Belief(mu);
  } else {
    e.mu_star = Belief(0.5);
  }

  if (doc.contains("learner")) {
    const auto& l = doc.at("learner");
    if (l.is_array()) {
      if (l.empty()) fail("learner", "empty learner list");
      for (std::size_t i = 0; i < l.size(); ++i) {
        out.learners.push_back(parse_learner(l[i], "learner[" + std::to_string(i) + "]"));
      }
    } else {
      out.learners.push_back(parse_learner(l, "learner"));
    }
  } else {
    out.learners.push_back(LearnerSpec{});
  }
  e.learner = out.learners.front();

  if (doc.contains("horizon")) {
    e.horizon = get_integer(doc, "horizon", "horizon");
    if (e.horizon < 1) fail("horizon", "must be >= 1");
  } else {
    e.horizon = 10000;
  }
  if (doc.contains("replications")) {
    const auto r = get_integer(doc, "replications", "replications");
    if (r < 1 || r > 1'000'000) fail("replications", "must lie in 1..1000000");
    e.replications = static_cast<int>(r);
  } else {
    e.replications = 200;
  }
  if (doc.contains("base_seed")) {
    const auto& s = doc.at("base_seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail("base_seed", "expected a nonnegative integer");
    }
    e.base_seed = s.get<std::uint64_t>();
  } else {
    e.base_seed = 1;
  }
  if (doc.contains("transition_mode")) {
    const auto& t = doc.at("transition_mode");
    const std::string mode = t.is_string() ? t.get<std::string>() : "";
    if (mode == "realized") {
      e.transition_mode = TransitionMode::kRealized;
    } else if (mode == "pseudocode") {
      e.transition_mode = TransitionMode::kPseudocode;
    } else {
      fail("transition_mode", "expected 'realized' or 'pseudocode'");
    }
  }
  return out;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& config) {
  const ExperimentConfig& e = config.experiment;
  json params = {{"T", e.params.frame_length},
                 {"d", e.params.channel_cost},
                 {"lambda", e.params.penalty},
                 {"a_max", e.params.max_arrivals},
                 {"channel_cap", nullptr}};
  if (e.params.channel_cap) params["channel_cap"] = *e.params.channel_cap;
  json learners = json::array();
  for (const auto& l : config.learners) learners.push_back(learner_to_json(l));
  return json{{"params", params},
              {"arrivals", config.arrivals_spec},
              {"mu_star", e.mu_star.value()},
              {"learner", learners.size() == 1 ? learners[0] : learners},
              {"horizon", e.horizon},
              {"replications", e.replications},
              {"base_seed", e.base_seed},
              {"transition_mode",
               e.transition_mode == TransitionMode::kRealized ? "realized" : "pseudocode"}};
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = [] {
    auto make = [](int T, double d, double lambda, int a_max, json arrivals, double mu_star,
                   json learner, std::optional<int> cap = std::nullopt) {
      json params = {{"T", T}, {"d", d}, {"lambda", lambda}, {"a_max", a_max}};
      if (cap) params["channel_cap"] = *cap;
      return json{{"params", params},
                  {"arrivals", std::move(arrivals)},
                  {"mu_star", mu_star},
                  {"learner", std::move(learner)},
                  {"horizon", 10000},
                  {"replications", 200},
                  {"base_seed", 2019},
                  {"transition_mode", "realized"}};
    };
    const json ucb = {{"kind", "ucb"}, {"beta", 4.0}};
    const json both = json::array({ucb, {{"kind", "ts"}}});
    const json one = {{"kind", "constant"}, {"value", 1}};
    const json six = {{"kind", "constant"}, {"value", 6}};
    const json two = {{"kind", "constant"}, {"value", 2}};
    const json uniform = {{"kind", "uniform"}};
    const json poisson = {{"kind", "truncated_poisson"}, {"rate", 3.0}};

    std::vector<Preset> p;
    p.push_back({"fig3", "single-packet optimal policy bands over mu (T=4, d=0.25, lambda=1)",
                 make(4, 0.25, 1.0, 1, one, 0.7, ucb)});
    p.push_back({"fig5", "continuous-approximation (m1, x1) over mu for a=6, d=0.25, lambda=1",
                 make(1, 0.25, 1.0, 6, six, 0.7, ucb)});
    p.push_back({"fig6", "continuous-approximation code rate over mu for a=6, d=0.25, lambda=1",
                 make(1, 0.25, 1.0, 6, six, 0.7, ucb)});
    p.push_back({"dtlow", "single-packet regret/throughput, mu*=0.05 below the critical point",
                 make(4, 0.25, 1.0, 1, one, 0.05, both)});
    p.push_back({"fig7", "single-packet regret, mu*=0.7 (bounded regret)",
                 make(4, 0.25, 1.0, 1, one, 0.7, both)});
    p.push_back({"fig8", "single-packet throughput, mu*=0.7 (same runs as fig7)",
                 make(4, 0.25, 1.0, 1, one, 0.7, both)});
    p.push_back({"fig9", "one-slot bursty arrivals, uniform A_max=6, mu*=0.05",
                 make(1, 0.25, 1.0, 6, uniform, 0.05, both)});
    p.push_back({"fig10", "throughput of the fig9 runs", make(1, 0.25, 1.0, 6, uniform, 0.05, both)});
    p.push_back({"fig9alt", "fig9 with d=0.2, lambda=0", make(1, 0.2, 0.0, 6, uniform, 0.05, both)});
    p.push_back({"fig10alt", "fig10 with d=0.2, lambda=0", make(1, 0.2, 0.0, 6, uniform, 0.05, both)});
    p.push_back({"fig11", "one-slot bursty arrivals, truncated Poisson A_max=6, mu*=0.81",
                 make(1, 0.25, 1.0, 6, poisson, 0.81, both)});
    p.push_back({"fig11alt", "fig11 with d=0.2, lambda=0",
                 make(1, 0.2, 0.0, 6, poisson, 0.81, both)});
    p.push_back({"fig12", "UCB vs TS, A=2, T=1, lambda=0, d=0.2, m<=2; sweep mu* with --mu-star",
                 make(1, 0.2, 0.0, 2, two, 0.25, both, 2)});
    return p;
  }();
  return all;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("preset: unknown preset '" + name + "'");
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double Sweep::at(int i) const {
  if (steps <= 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

Sweep parse_sweep(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw ConfigError("--sweep: expected var:lo:hi:steps");
  Sweep s;
  s.variable = parts[0];
  if (s.variable != "mu" && s.variable != "lambda" && s.variable != "d") {
    throw ConfigError("--sweep: variable must be mu, lambda or d");
  }
  try {
    s.lo = std::stod(parts[1]);
    s.hi = std::stod(parts[2]);
    s.steps = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("--sweep: malformed number in '" + text + "'");
  }
  if (s.steps < 1) throw ConfigError("--sweep: steps must be >= 1");
  if (!(s.hi >= s.lo)) throw ConfigError("--sweep: hi must be >= lo");
  return s;
}

json policy_to_json(const PolicyTable& table) {
  json stages = json::array();
  for (int s = table.stages(); s >= 1; --s) {
    json rows = json::array();
    for (int q = 0; q <= table.max_queue(); ++q) {
      const auto& c = table.decision(s, q);
      rows.push_back({{"queue", q},
                      {"m", c.block_length},
                      {"x", c.word_length},
                      {"value", table.value(s, q)}});
    }
    stages.push_back({{"stage", s}, {"decisions", rows}});
  }
  json terminal = json::array();
  for (int q = 0; q <= table.max_queue(); ++q) terminal.push_back(table.value(0, q));
  json params = {{"T", table.params.frame_length},
                 {"d", table.params.channel_cost},
                 {"lambda", table.params.penalty},
                 {"a_max", table.params.max_arrivals},
                 {"channel_cap", nullptr}};
  if (table.params.channel_cap) params["channel_cap"] = *table.params.channel_cap;
  return {{"params", params},
          {"belief", table.belief.value()},
          {"all_idle", table.all_idle()},
          {"stages", stages},
          {"terminal_values", terminal}};
}

void write_curve_csv(std::ostream& out, const RegretCurve& curve, const BoundColumn& bound) {
  out << "n,mean_cum_regret,se_cum_regret,mean_throughput";
  if (bound.enabled) out << ",bound";
  out << '\n';
  for (std::size_t i = 0; i < curve.mean_cum_regret.size(); ++i) {
    out << (i + 1) << ',' << format_number(curve.mean_cum_regret[i]) << ','
        << format_number(curve.se_cum_regret[i]) << ',' << format_number(curve.mean_throughput[i]);
    if (bound.enabled) {
      out << ','
          << (bound.values ? format_number((*bound.values)[i])
                           : format_number(std::numeric_limits<double>::infinity()));
    }
    out << '\n';
  }
}

void write_analysis_csv(std::ostream& out, const SystemParams& base, const Sweep& sweep,
                        const std::string& what) {
  auto params_at = [&](double v) {
    SystemParams p = base;
    if (sweep.variable == "lambda") p.penalty = v;
    if (sweep.variable == "d") p.channel_cost = v;
    return p;
  };
  const bool needs_mu = what == "policy" || what == "continuous" || what == "rate";
  if (needs_mu && sweep.variable != "mu") {
    throw ConfigError("--sweep: '" + what + "' sweeps mu");
  }
  if (what == "policy") {
    out << "mu,value";
    for (int s = base.frame_length; s >= 1; --s) {
      for (int q = 1; q <= base.max_arrivals; ++q) {
        out << ",m_s" << s << "_q" << q << ",x_s" << s << "_q" << q;
      }
    }
    out << '\n';
    for (int i = 0; i < sweep.steps; ++i) {
      const double mu = sweep.at(i);
      const PolicyTable t = solve_policy(Belief(mu), base);
      out << format_number(mu) << ',' << format_number(t.value(base.frame_length, base.max_arrivals));
      for (int s = base.frame_length; s >= 1; --s) {
        for (int q = 1; q <= base.max_arrivals; ++q) {
          out << ',' << t.decision(s, q).block_length << ',' << t.decision(s, q).word_length;
        }
      }
      out << '\n';
    }
  } else if (what == "critical") {
    out << sweep.variable << ",zeta,bracket_lo,bracket_hi\n";
    for (int i = 0; i < sweep.steps; ++i) {
      const double v = sweep.at(i);
      const SystemParams p = params_at(v);
      const double lo = p.channel_cost / (1.0 + p.penalty);
      out << format_number(v) << ',' << format_number(critical_point(p)) << ','
          << format_number(lo) << ',' << format_number(2.0 * lo) << '\n';
    }
  } else if (what == "continuous" || what == "rate") {
    out << (what == "continuous" ? "mu,idle,m1,x1,rate,nu\n" : "mu,rate,below_mu\n");
    for (int i = 0; i < sweep.steps; ++i) {
      const double mu = sweep.at(i);
      std::optional<ContinuousOptimum> opt;
      if (mu > 0.0 && mu < 1.0) {
        opt = continuous_optimum(base.max_arrivals, Belief(mu), base.channel_cost, base.penalty);
      }
      if (what == "continuous") {
        out << format_number(mu) << ',' << (opt ? 0 : 1);
        if (opt) {
          out << ',' << format_number(opt->block_length) << ',' << format_number(opt->word_length)
              << ',' << format_number(opt->rate) << ',' << format_number(opt->value);
        } else {
          out << ",0,0,nan,0";
        }
        out << '\n';
      } else {
        out << format_number(mu) << ',';
        if (opt) {
          out << format_number(opt->rate) << ',' << (opt->rate < mu ? 1 : 0);
        } else {
          out << "nan,0";
        }
        out << '\n';
      }
    }
  } else {
    throw ConfigError("--what: expected policy, critical, continuous or rate");
  }
}

}  // namespace dlcode::cli
