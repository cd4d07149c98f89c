// dlcode: optimal dynamic coding policies and learning experiments for
// deadline-constrained multi-channel transmission.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "dlcode/analysis.hpp"
#include "dlcode/dp.hpp"
#include "dlcode/sim.hpp"

namespace {

using dlcode::cli::ConfigError;
using nlohmann::json;

int default_workers() {
  if (const char* env = std::getenv("DLCODE_WORKERS")) {
    try {
      const int w = std::stoi(env);
      if (w >= 1) return w;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring invalid DLCODE_WORKERS='" << env << "'\n";
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

dlcode::cli::RunConfig resolve_config(const std::string& path, const std::string& preset) {
  if (!path.empty() && !preset.empty()) throw ConfigError("give either a config file or --preset");
  if (!preset.empty()) return dlcode::cli::parse_config(dlcode::cli::find_preset(preset).config);
  if (path.empty()) throw ConfigError("a config file or --preset is required");
  return dlcode::cli::load_config(path);
}

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << text;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("--mu-star: malformed value '" + item + "'");
    }
  }
  return out;
}

std::string run_suffix(const dlcode::LearnerSpec& learner, double mu_star, bool many_learners,
                       bool many_mu) {
  std::string s;
  if (many_learners) s += "_" + learner.name();
  if (many_mu) s += "_mu" + dlcode::cli::format_number(mu_star);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dlcode: optimal coding and learning for deadline-constrained channels"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::string out_path;

  auto* solve = app.add_subcommand("solve", "Solve the optimal policy for one belief (JSON)");
  double solve_mu = 0.5;
  solve->add_option("config", config_path, "Experiment config (JSON)");
  solve->add_option("--preset", preset, "Use a named preset instead of a config file");
  solve->add_option("--mu", solve_mu, "Channel-mean belief")->required();
  solve->add_option("--out", out_path, "Output path (default stdout)");

  auto* analyze = app.add_subcommand("analyze", "Sweep structural quantities (CSV)");
  std::string sweep_text = "mu:0:1:101";
  std::string what = "policy";
  analyze->add_option("config", config_path, "Experiment config (JSON)");
  analyze->add_option("--preset", preset, "Use a named preset instead of a config file");
  analyze->add_option("--sweep", sweep_text, "var:lo:hi:steps, var in {mu, lambda, d}");
  analyze->add_option("--what", what, "policy | critical | continuous | rate")
      ->check(CLI::IsMember({"policy", "critical", "continuous", "rate"}));
  analyze->add_option("--out", out_path, "Output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Run regret experiments (CSV + JSON summary)");
  int workers = default_workers();
  std::string mu_list;
  std::string learner_override;
  std::int64_t horizon = 0;
  int replications = 0;
  std::optional<std::uint64_t> seed;
  simulate->add_option("config", config_path, "Experiment config (JSON)");
  simulate->add_option("--preset", preset, "Use a named preset instead of a config file");
  simulate->add_option("--out", out_path, "CSV output path; the summary goes next to it")
      ->required();
  simulate->add_option("--workers", workers, "Worker threads (default $DLCODE_WORKERS or cores)")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--mu-star", mu_list, "Comma-separated true means overriding the config");
  simulate->add_option("--learner", learner_override, "Run only this learner: ucb | ts | genie")
      ->check(CLI::IsMember({"ucb", "ts", "genie"}));
  simulate->add_option("--horizon", horizon, "Override the horizon N")->check(CLI::PositiveNumber);
  simulate->add_option("--replications", replications, "Override the replication count R")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Override the base seed");

  auto* list = app.add_subcommand("presets", "List the named presets");
  bool show_json = false;
  list->add_flag("--json", show_json, "Print each preset's full config");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& p : dlcode::cli::presets()) {
        std::cout << p.name << "\t" << p.description << '\n';
        if (show_json) std::cout << p.config.dump(2) << '\n';
      }
      return 0;
    }

    auto config = resolve_config(config_path, preset);

    if (*solve) {
      if (!(solve_mu >= 0.0 && solve_mu <= 1.0)) throw ConfigError("--mu: must lie in [0, 1]");
      const auto table = dlcode::solve_policy(dlcode::Belief(solve_mu), config.experiment.params);
      emit(out_path, dlcode::cli::policy_to_json(table).dump(2) + "\n");
      return 0;
    }

    if (*analyze) {
      const auto sweep = dlcode::cli::parse_sweep(sweep_text);
      std::ostringstream csv;
      dlcode::cli::write_analysis_csv(csv, config.experiment.params, sweep, what);
      emit(out_path, csv.str());
      return 0;
    }

    // simulate
    if (horizon > 0) config.experiment.horizon = horizon;
    if (replications > 0) config.experiment.replications = replications;
    if (seed) config.experiment.base_seed = *seed;
    std::vector<dlcode::LearnerSpec> learners = config.learners;
    if (!learner_override.empty()) {
      auto it = std::find_if(learners.begin(), learners.end(),
                             [&](const auto& l) { return l.name() == learner_override; });
      dlcode::LearnerSpec spec;
      if (it != learners.end()) {
        spec = *it;
      } else if (learner_override == "ts") {
        spec.kind = dlcode::LearnerKind::kThompson;
      } else if (learner_override == "genie") {
        spec.kind = dlcode::LearnerKind::kGenie;
      }
      learners = {spec};
    }
    std::vector<double> mus = {config.experiment.mu_star.value()};
    if (!mu_list.empty()) mus = parse_list(mu_list);

    const std::filesystem::path out(out_path);
    const auto stem = (out.parent_path() / out.stem()).string();
    const auto ext = out.has_extension() ? out.extension().string() : std::string(".csv");
    json runs = json::array();
    for (double mu : mus) {
      if (!(mu >= 0.0 && mu <= 1.0)) throw ConfigError("--mu-star: values must lie in [0, 1]");
      for (const auto& learner : learners) {
        dlcode::ExperimentConfig e = config.experiment;
        e.mu_star = dlcode::Belief(mu);
        e.learner = learner;
        if (learner.kind == dlcode::LearnerKind::kUcb && learner.beta < 4.0) {
          std::cerr << "warning: beta < 4 is outside the regret bound's assumptions\n";
        }
        const auto curve = dlcode::run_experiment(e, workers);
        dlcode::cli::BoundColumn bound;
        json bound_json = nullptr;
        std::string bound_status = "not_applicable";
        if (learner.kind == dlcode::LearnerKind::kUcb && learner.beta >= 4.0 &&
            e.params.channel_cost > 0.0) {
          bound.enabled = true;
          bound.values = dlcode::bound_overlay(e);
          bound_status = bound.values ? "bounded" : "unbounded";
          if (bound.values) bound_json = bound.values->back();
        }
        const std::string path =
            stem + run_suffix(learner, mu, learners.size() > 1, mus.size() > 1) + ext;
        std::ostringstream csv;
        dlcode::cli::write_curve_csv(csv, curve, bound);
        emit(path, csv.str());

        json learner_json = {{"kind", learner.name()}};
        if (learner.kind == dlcode::LearnerKind::kUcb) learner_json["beta"] = learner.beta;
        runs.push_back({{"learner", learner_json},
                        {"mu_star", mu},
                        {"csv", path},
                        {"horizon", e.horizon},
                        {"replications", e.replications},
                        {"final_mean_cum_regret", curve.mean_cum_regret.back()},
                        {"final_se_cum_regret", curve.se_cum_regret.back()},
                        {"final_mean_throughput", curve.mean_throughput.back()},
                        {"final_bound", bound_json},
                        {"bound_status", bound_status}});
        std::cerr << learner.name() << " mu*=" << mu
                  << ": final regret " << curve.mean_cum_regret.back() << " +/- "
                  << curve.se_cum_regret.back() << " -> " << path << '\n';
      }
    }
    json summary = {{"tool", "dlcode"},
                    {"version", 1},
                    {"config", dlcode::cli::to_json(config)},
                    {"resolved_seed", config.experiment.base_seed},
                    {"runs", runs}};
    emit(stem + ".summary.json", summary.dump(2) + "\n");
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
