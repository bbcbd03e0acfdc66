#include "ladapt/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace ladapt::harness {

namespace {

using nlohmann::json;

void reject_unknown(const json& object, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!object.is_object()) throw InvalidInput(fmt::format("config: {} must be an object", where));
  for (const auto& item : object.items()) {
    if (!allowed.count(item.key())) {
      throw InvalidInput(fmt::format("config: unknown key '{}' in {}", item.key(), where));
    }
  }
}

template <class T>
void read(const json& object, const char* key, T& target, const std::string& where) {
  if (!object.contains(key)) return;
  try {
    target = object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(fmt::format("config: bad value for {}.{}: {}", where, key, e.what()));
  }
}

EnvironmentSpec parse_environment(const json& j) {
  reject_unknown(j, {"kind", "dimension", "horizon", "seed", "schedule", "setting", "best_mean",
                     "bias", "mean_norm", "noise", "diameter"},
                 "environment");
  if (!j.contains("kind")) throw InvalidInput("config: environment.kind is required");
  EnvironmentSpec spec;
  spec.kind = environment_kind_from_string(j.at("kind").get<std::string>());
  read(j, "dimension", spec.dimension, "environment");
  read(j, "horizon", spec.horizon, "environment");
  read(j, "seed", spec.seed, "environment");
  read(j, "best_mean", spec.best_mean, "environment");
  read(j, "bias", spec.bias, "environment");
  read(j, "mean_norm", spec.mean_norm, "environment");
  read(j, "noise", spec.noise, "environment");
  read(j, "diameter", spec.diameter, "environment");
  if (j.contains("setting")) {
    const std::string s = j.at("setting").get<std::string>();
    if (s == "experts") {
      spec.scale_jump_setting = Setting::experts;
    } else if (s == "oco") {
      spec.scale_jump_setting = Setting::oco;
    } else {
      throw InvalidInput(fmt::format("config: environment.setting must be experts or oco, got '{}'", s));
    }
  }
  if (j.contains("schedule")) {
    if (!j.at("schedule").is_array()) throw InvalidInput("config: environment.schedule must be a list");
    for (const json& entry : j.at("schedule")) {
      reject_unknown(entry, {"round", "multiplier"}, "environment.schedule entry");
      ScaleJump jump;
      read(entry, "round", jump.round, "schedule");
      read(entry, "multiplier", jump.multiplier, "schedule");
      spec.schedule.push_back(jump);
    }
  }
  return spec;
}

AlgorithmSpec parse_algorithm(const json& j) {
  reject_unknown(j, {"kind", "initial_scale", "range_scale"}, "algorithm");
  if (!j.contains("kind")) throw InvalidInput("config: algorithm.kind is required");
  AlgorithmSpec spec;
  spec.kind = algorithm_kind_from_string(j.at("kind").get<std::string>());
  read(j, "initial_scale", spec.initial_scale, "algorithm");
  read(j, "range_scale", spec.range_scale, "algorithm");
  return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(fmt::format("config: invalid JSON: {}", e.what()));
  }
  reject_unknown(j, {"name", "environment", "algorithm", "checkpoints", "slack_tolerance",
                     "track_potential"},
                 "config");
  if (!j.contains("environment") || !j.contains("algorithm")) {
    throw InvalidInput("config: 'environment' and 'algorithm' are required");
  }
  ExperimentConfig config;
  read(j, "name", config.name, "config");
  config.environment = parse_environment(j.at("environment"));
  config.algorithm = parse_algorithm(j.at("algorithm"));
  read(j, "checkpoints", config.checkpoints, "config");
  read(j, "slack_tolerance", config.slack_tolerance, "config");
  read(j, "track_potential", config.track_potential, "config");
  config.validate();
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(fmt::format("config: cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
  const EnvironmentSpec& e = config.environment;
  json env = {{"kind", to_string(e.kind)},   {"dimension", e.dimension}, {"horizon", e.horizon},
              {"seed", e.seed},              {"best_mean", e.best_mean}, {"bias", e.bias},
              {"mean_norm", e.mean_norm},    {"noise", e.noise},         {"diameter", e.diameter}};
  if (e.kind == EnvironmentKind::scale_jump) {
    env["setting"] = e.scale_jump_setting == Setting::experts ? "experts" : "oco";
  }
  json schedule = json::array();
  for (const ScaleJump& jump : e.schedule) {
    schedule.push_back({{"round", jump.round}, {"multiplier", jump.multiplier}});
  }
  env["schedule"] = schedule;
  json j = {{"name", config.name},
            {"environment", env},
            {"algorithm",
             {{"kind", to_string(config.algorithm.kind)},
              {"initial_scale", config.algorithm.initial_scale},
              {"range_scale", config.algorithm.range_scale}}},
            {"checkpoints", config.checkpoints},
            {"slack_tolerance", config.slack_tolerance},
            {"track_potential", config.track_potential}};
  return j.dump(2);
}

}  // namespace ladapt::harness
