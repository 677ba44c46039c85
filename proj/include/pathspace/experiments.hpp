#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathspace/config.hpp"

namespace pathspace {

// One named statistical or deterministic check inside an experiment.
// `z` is the standardized residual when the check is a z-test (0 when the
// pass rule is a direct tolerance or a closed-form identity). `mandatory`
// distinguishes gating checks from informational rows: the experiment
// verdict is the AND of the mandatory ones.
struct CheckRow {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool pass = true;
  bool mandatory = true;
};

struct ExperimentResult {
  std::string id;
  std::uint64_t seed = 0;
  bool pass = true;  // AND of the mandatory checks
  double wall_seconds = 0.0;
  std::vector<CheckRow> checks;
  std::vector<std::string> artifacts;  // files written under <out>/<id>/<seed>/
};

// Registered experiment names, in a stable order.
const std::vector<std::string>& experiment_ids();

// Run one experiment under the given configuration (merged with defaults by
// the caller or not; missing keys are filled from defaults here). Writes
// results.csv and summary.txt (and plot.svg when plots=1) under
// <out>/<id>/<seed>/ and returns the check table. Unknown ids throw
// ConfigError; numerical check failures do NOT throw, they set pass=false.
ExperimentResult run_experiment(const std::string& id, const Config& cfg);

}  // namespace pathspace
