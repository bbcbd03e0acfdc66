#pragma once

#include <filesystem>
#include <string>

#include "ladapt/harness/experiment.hpp"

namespace ladapt::harness {

// Experiment configuration as JSON:
//
//   {
//     "name": "squint-bernoulli",
//     "environment": {
//       "kind": "expert-bernoulli", "dimension": 8, "horizon": 10000, "seed": 3,
//       "schedule": [{"round": 2000, "multiplier": 10}],
//       "setting": "experts",            // scale-jump only: experts | oco
//       "best_mean": 0.3, "bias": 0.2, "mean_norm": 0.5, "noise": 1.0,
//       "diameter": 2.0
//     },
//     "algorithm": {"kind": "squint+l", "initial_scale": 1.0, "range_scale": 1.0},
//     "checkpoints": [4000, 8000],
//     "slack_tolerance": 1e-9,
//     "track_potential": true
//   }
//
// Only "environment.kind" and "algorithm.kind" are required. Unknown keys
// are rejected. Throws InvalidInput with the offending key on error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

}  // namespace ladapt::harness
