#pragma once

// JSON experiment configs, named presets and CSV/JSON report writers for the
// dlcode command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dlcode/sim.hpp"

namespace dlcode::cli {

/// Parse failure; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parsed experiment document. `learners` holds every learner listed in the
/// config; `experiment.learner` is the first.
struct RunConfig {
  ExperimentConfig experiment;
  std::vector<LearnerSpec> learners;
  nlohmann::json arrivals_spec;  // as written, for echoing back
};

/// Parses a config document. Unknown keys and malformed values raise
/// ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

nlohmann::json to_json(const RunConfig& config);

struct Preset {
  std::string name;
  std::string description;
  nlohmann::json config;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for unknown names.
const Preset& find_preset(const std::string& name);

/// "%.12g", with "inf"/"-inf"/"nan" for non-finite values.
std::string format_number(double v);

/// Sweep specification "var:lo:hi:steps" (steps = number of grid points).
struct Sweep {
  std::string variable;
  double lo = 0.0;
  double hi = 1.0;
  int steps = 101;

  double at(int i) const;
};
Sweep parse_sweep(const std::string& text);

nlohmann::json policy_to_json(const PolicyTable& table);

/// Optional bound column of the curve CSV. An enabled column without values
/// is written as "inf" (the bound is infinite).
struct BoundColumn {
  bool enabled = false;
  std::optional<std::vector<double>> values;
};

void write_curve_csv(std::ostream& out, const RegretCurve& curve, const BoundColumn& bound);

/// Writes the analysis sweep CSV for `what` in {policy, critical, continuous, rate}.
void write_analysis_csv(std::ostream& out, const SystemParams& params, const Sweep& sweep,
                        const std::string& what);

}  // namespace dlcode::cli
