#pragma once

#include "latcb/config.hpp"

#include <string>
#include <vector>

namespace latcb {

std::string version();

/// One acceptance band declared by a config.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct ExperimentOutcome {
  std::vector<Check> checks;
  std::vector<std::string> files;  // written artifacts
  bool pass() const;
  int exit_code() const { return pass() ? 0 : 1; }
};

/// Runs the experiment, writes <out_dir>/<name>.csv and
/// <name>.report.json (plus kind-specific extras). Library errors propagate.
ExperimentOutcome run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace latcb
