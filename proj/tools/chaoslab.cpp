// chaoslab command line: run an experiment config, run the acceptance suite,
// or re-emit a finished run's outputs.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "chaoslab/harness/run.hpp"
#include "chaoslab/parallel.hpp"

namespace fs = std::filesystem;
using namespace chaoslab;
using namespace chaoslab::harness;

namespace {

constexpr int kOk = 0;
constexpr int kCriterionFailed = 1;
constexpr int kUsage = 2;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& path, const std::string& out_dir, std::optional<std::uint64_t> seed,
            unsigned threads) {
  auto config = load_config(path);
  if (seed) config.seed = *seed;
  const std::string dir = out_dir.empty() ? config.output_dir : out_dir;
  const auto outcome = run(config, dir, threads);
  for (const auto& c : outcome.result.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.measured << '\n';
  for (const auto& n : outcome.result.notes) std::cout << "NOTE " << n << '\n';
  std::cout << fmt::format("wrote {} files to {} in {:.1f}s\n", outcome.manifest.outputs.size(), dir,
                           outcome.manifest.wall_seconds);
  return outcome.result.passed() ? kOk : kCriterionFailed;
}

int cmd_verify(const std::string& suite, unsigned threads) {
  const auto lines = verify(parse_suite(suite), threads, std::cout);
  const bool ok = std::all_of(lines.begin(), lines.end(), [](const VerifyLine& l) { return l.pass; });
  return ok ? kOk : kCriterionFailed;
}

int cmd_report(const std::string& manifest_path, const std::string& format) {
  const auto m = RunManifest::from_json(slurp(manifest_path));
  const fs::path dir = fs::path(manifest_path).parent_path();
  const std::string file = format == "csv" ? "metrics.csv" : format == "json" ? "report.json" : "plot.svg";
  if (std::find(m.outputs.begin(), m.outputs.end(), file) == m.outputs.end())
    throw InvalidArgument("run " + m.experiment + " produced no " + file);
  std::cout << slurp(dir / file);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: interacting particle systems and their mean-field limits"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (default: CHAOSLAB_THREADS or all cores)");

  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  run_cmd->add_option("config", config_path, "YAML config")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "output directory (default: output_dir from the config)");
  run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--threads", threads, "worker threads");

  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
  std::string suite = "fast";
  verify_cmd->add_option("suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify_cmd->add_option("--threads", threads, "worker threads");

  auto* report_cmd = app.add_subcommand("report", "print an output of a finished run");
  std::string manifest, format = "csv";
  report_cmd->add_option("manifest", manifest, "manifest.json of the run")->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  if (threads == 0) threads = default_thread_count();

  try {
    if (*run_cmd) return cmd_run(config_path, out_dir, seed, threads);
    if (*verify_cmd) return cmd_verify(suite, threads);
    return cmd_report(manifest, format);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCriterionFailed;
  }
}
