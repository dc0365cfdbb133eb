#pragma once

#include "cylwiener/config.hpp"

namespace cylwiener {

// Command drivers. Artifacts land in config.output.directory; the returned
// code follows the contract: 0 all requested checks pass, 1 check failure
// (or verdict mismatch), 3 inconclusive verdict. Configuration problems
// throw ConfigError, which the CLI maps to exit 2.
int cmd_simulate(const ExperimentConfig& cfg);
int cmd_integrate(const ExperimentConfig& cfg);
int cmd_check(const ExperimentConfig& cfg);

}  // namespace cylwiener
