#include "chaoslab/harness/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chaoslab/parallel.hpp"

#ifndef CHAOSLAB_VERSION
#define CHAOSLAB_VERSION "unknown"
#endif

namespace chaoslab::harness {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
  if (!out) throw NumericalError("write failed for " + path.string());
}

}  // namespace

RunOutcome run(const ExperimentConfig& config, const std::string& output_dir, unsigned threads) {
  if (threads == 0) threads = default_thread_count();
  const fs::path dir(output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + output_dir + ": " + ec.message());

  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.result = run_experiment(config, threads);
  const auto& result = outcome.result;
  auto& m = outcome.manifest;

  std::ostringstream csv;
  write_metrics_csv(csv, result.rows);
  write_file(dir / "metrics.csv", csv.str());
  m.outputs.push_back("metrics.csv");

  std::ostringstream checks;
  for (const auto& c : result.checks)
    checks << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.measured << '\n';
  for (const auto& n : result.notes) checks << "NOTE " << n << '\n';
  write_file(dir / "checks.txt", checks.str());
  m.outputs.push_back("checks.txt");

  if (result.report) {
    write_file(dir / "report.json", convergence_report_json(*result.report, result.report_metric));
    m.outputs.push_back("report.json");
  }
  if (!result.plot.empty()) {
    write_file(dir / "plot.svg", loglog_svg(config.experiment, result.plot_x, result.report_metric.empty() ? "value" : result.report_metric,
                                            result.plot));
    m.outputs.push_back("plot.svg");
  }

  m.config_hash = sha256_hex(config.source_text);
  m.config_source = config.source_name;
  m.experiment = config.experiment;
  m.version = CHAOSLAB_VERSION;
  m.threads = threads;
  m.stage_seeds = result.stage_seeds;
  m.stage_seeds["run"] = config.seed;
  m.output_dir = output_dir;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  m.outputs.push_back("manifest.json");
  write_file(dir / "manifest.json", m.to_json());
  return outcome;
}

}  // namespace chaoslab::harness
