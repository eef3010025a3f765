#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/harness/config.hpp"
#include "chaoslab/harness/experiments.hpp"
#include "chaoslab/harness/report.hpp"

namespace chaoslab::harness {

struct RunOutcome {
  RunManifest manifest;
  ExperimentResult result;
};

// Runs the experiment and writes metrics.csv, report.json (when a rate is
// fitted), plot.svg (when there is a series) and manifest.json, the latter
// last, into `output_dir`.
RunOutcome run(const ExperimentConfig& config, const std::string& output_dir, unsigned threads);

// Built-in configurations used by the acceptance suite, keyed by name.
const std::vector<std::pair<std::string, std::string>>& builtin_configs();
ExperimentConfig builtin_config(const std::string& name);

// Smaller variant of a config (fewer replicas, trials and N values) used by
// the determinism criterion.
ExperimentConfig reduced_config(const ExperimentConfig& config);

enum class Suite { kFast, kFull };

Suite parse_suite(const std::string& name);

struct VerifyLine {
  std::string id;
  std::string name;
  bool pass = false;
  bool skipped = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria, printing one line per criterion to `log`.
std::vector<VerifyLine> verify(Suite suite, unsigned threads, std::ostream& log);

}  // namespace chaoslab::harness
