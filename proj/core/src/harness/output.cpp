#include "ladapt/harness/output.hpp"

#include <fstream>

#include <fmt/format.h>
#include <json.hpp>

#include "ladapt/harness/config.hpp"

namespace ladapt::harness {

namespace {

using nlohmann::json;

void append_number(std::string& out, const std::optional<double>& value) {
  out += ',';
  if (value) out += fmt::format("{:.17g}", *value);
}

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << content;
}

}  // namespace

std::string trace_csv(const ExperimentTrace& trace) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const RoundRecord& r : trace.rows) {
    out += fmt::format("{},{:.17g},{:.17g},", r.t, r.magnitude, r.running_max);
    if (r.active_slaves) out += fmt::format("{}", *r.active_slaves);
    append_number(out, r.potential);
    out += r.restart ? ",1" : ",0";
    append_number(out, r.regret_best);
    append_number(out, r.bound);
    append_number(out, r.slack);
    out += '\n';
  }
  return out;
}

std::string summary_json(const ExperimentTrace& trace) {
  const ExperimentSummary& s = trace.summary;
  json restarts = json::array();
  for (const RestartEvent& e : s.restart_events) {
    restarts.push_back({{"round", e.round}, {"old_scale", e.old_scale}, {"new_scale", e.new_scale}});
  }
  json checkpoints = json::array();
  for (const CheckpointRegret& c : s.checkpoints) {
    checkpoints.push_back({{"round", c.round}, {"regret", c.regret}});
  }
  json j = {
      {"name", trace.config.name},
      {"algorithm", trace.algorithm_name},
      {"environment", to_string(trace.config.environment.kind)},
      {"rounds", trace.rows.size()},
      {"comparator", s.comparator},
      {"regret", s.regret},
      {"pseudo_regret", s.pseudo_regret},
      {"bound", optional_number(s.bound)},
      {"slack", optional_number(s.slack)},
      {"min_slack", optional_number(s.min_slack)},
      {"bound_violations", s.bound_violations},
      {"bound_clamped", s.bound_clamped},
      {"restart_count", s.restarts},
      {"restarts", restarts},
      {"checkpoints", checkpoints},
      {"invariant_checks", s.invariant_checks},
      {"invariant_violation_count", s.invariant_violation_count},
      {"invariant_violations", s.invariant_violations},
      {"max_newton_iterations", s.max_newton_iterations},
      {"wall_seconds", s.wall_seconds},
      {"config", json::parse(config_to_json(trace.config))},
  };
  return j.dump(2) + "\n";
}

OutputPaths write_outputs(const ExperimentTrace& trace, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  OutputPaths paths{dir / (trace.config.name + ".csv"), dir / (trace.config.name + ".summary.json")};
  write_file(paths.csv, trace_csv(trace));
  write_file(paths.summary, summary_json(trace));
  return paths;
}

}  // namespace ladapt::harness
