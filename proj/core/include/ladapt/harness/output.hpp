#pragma once

#include <filesystem>
#include <string>

#include "ladapt/harness/experiment.hpp"

namespace ladapt::harness {

inline constexpr const char* kCsvHeader =
    "t,b_t,B_t,active_slaves,potential,restart,regret_best,bound,slack";

// One row per round; fields that do not apply are empty, numbers are
// printed with 17 significant digits so that identical runs give
// identical bytes.
std::string trace_csv(const ExperimentTrace& trace);

// Final regret, bound, slack, restarts, checkpoints, invariant checks and
// wall time, plus the configuration that produced them.
std::string summary_json(const ExperimentTrace& trace);

struct OutputPaths {
  std::filesystem::path csv;
  std::filesystem::path summary;
};

// Writes <name>.csv and <name>.summary.json into dir (created if needed).
OutputPaths write_outputs(const ExperimentTrace& trace, const std::filesystem::path& dir);

}  // namespace ladapt::harness
