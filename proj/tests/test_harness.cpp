#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chaoslab/harness/config.hpp"
#include "chaoslab/harness/report.hpp"
#include "chaoslab/harness/run.hpp"

namespace fs = std::filesystem;
using namespace chaoslab;
using namespace chaoslab::harness;

namespace {

const char* kSmallStrongRate = R"(experiment: strong_rate
seed: 7
kernel:
  name: smooth_sin
drift:
  name: identity
initial:
  density: gaussian
sim:
  T: 0.05
  dt: 0.01
  sigma: 1.0
  replicas: 2
sweep:
  Ns: [64, 128, 256, 512, 1024, 2048, 4096]
pde:
  lo: -8.0
  hi: 8.0
  cells: 160
)";

std::string message_of(const std::string& text) {
  try {
    parse_config(text, "test.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("chaoslab_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesSmallStrongRate) {
  const auto c = parse_config(kSmallStrongRate, "inline");
  EXPECT_EQ(c.experiment, "strong_rate");
  EXPECT_EQ(c.seed, 7u);
  ASSERT_TRUE(c.kernel.has_value());
  EXPECT_EQ(c.kernel->name, "smooth_sin");
  EXPECT_EQ(c.Ns.size(), 7u);
  EXPECT_EQ(c.sim.replicas, 2u);
  EXPECT_EQ(c.pde.cells, 160u);
}

TEST(Config, MissingKernelNamesTheKey) {
  std::string text = kSmallStrongRate;
  text.replace(text.find("kernel:\n  name: smooth_sin\n"), 27, "");
  const auto msg = message_of(text);
  EXPECT_NE(msg.find("kernel"), std::string::npos) << msg;
}

TEST(Config, ZeroReplicasRejected) {
  std::string text = kSmallStrongRate;
  text.replace(text.find("replicas: 2"), 11, "replicas: 0");
  const auto msg = message_of(text);
  EXPECT_NE(msg.find("replicas"), std::string::npos) << msg;
  EXPECT_NE(msg.find("test.yaml:13"), std::string::npos) << msg;
}

TEST(Config, UnknownKeyCarriesLineNumber) {
  std::string text = kSmallStrongRate;
  text.replace(text.find("  dt: 0.01"), 10, "  dtt: 0.01");
  const auto msg = message_of(text);
  EXPECT_NE(msg.find("test.yaml:11"), std::string::npos) << msg;
  EXPECT_NE(msg.find("dtt"), std::string::npos) << msg;
}

TEST(Config, UnknownExperimentAndBadSweep) {
  EXPECT_NE(message_of("experiment: nope\n").find("nope"), std::string::npos);
  std::string text = kSmallStrongRate;
  text.replace(text.find("[64, 128"), 8, "[128, 64");
  EXPECT_FALSE(message_of(text).empty());
}

TEST(Config, MalformedYaml) {
  EXPECT_FALSE(message_of("experiment: [strong_rate\n").empty());
}

TEST(Config, BuiltinsParse) {
  for (const auto& [name, text] : builtin_configs()) {
    EXPECT_NO_THROW(builtin_config(name)) << name;
  }
  EXPECT_EQ(builtin_configs().size(), experiment_names().size());
}

TEST(Suite, ParseNames) {
  EXPECT_EQ(parse_suite("fast"), Suite::kFast);
  EXPECT_EQ(parse_suite("full"), Suite::kFull);
  EXPECT_THROW(parse_suite("fulll"), InvalidArgument);
}

TEST(Report, FormatValue) {
  EXPECT_EQ(format_value(0.5), "0.5");
  EXPECT_EQ(format_value(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_value(1.5e-5), "1.5e-05");
}

TEST(Report, MetricsCsvRoundTrip) {
  const std::vector<MetricRow> rows{{"strong_rate", 64, "strong_error", 1.25e-3, 2e-5},
                                    {"strong_rate", 128, "strong_error", 6.5e-4, 1e-5}};
  std::stringstream ss;
  write_metrics_csv(ss, rows);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "experiment,N,metric,value,std_error");
  const auto back = read_metrics_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].N, 128u);
  EXPECT_EQ(back[1].metric, "strong_error");
  EXPECT_DOUBLE_EQ(back[0].value, 1.25e-3);
  EXPECT_DOUBLE_EQ(back[1].std_error, 1e-5);
}

TEST(Report, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Report, ManifestRoundTrip) {
  RunManifest m;
  m.config_hash = sha256_hex("x");
  m.config_source = "configs/x.yaml";
  m.experiment = "picard";
  m.version = "0.3.0";
  m.wall_seconds = 1.5;
  m.threads = 3;
  m.stage_seeds = {{"trials", 42u}, {"mc", 18446744073709551615ull}};
  m.outputs = {"metrics.csv", "checks.txt"};
  m.output_dir = "out/x";
  const auto back = RunManifest::from_json(m.to_json());
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(back.experiment, "picard");
  EXPECT_EQ(back.threads, 3u);
  EXPECT_EQ(back.stage_seeds, m.stage_seeds);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_DOUBLE_EQ(back.wall_seconds, 1.5);
}

TEST(Report, SvgHasOnePolylinePerSeries) {
  const auto svg = loglog_svg("t", "N", "err", {{"a", {1, 10, 100}, {1, 0.1, 0.01}}, {"b", {1, 10}, {2, 1}}});
  std::size_t count = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
  EXPECT_EQ(count, 2u);
}

TEST(Run, StrongRateWritesSevenRowsAndSlope) {
  auto c = parse_config(kSmallStrongRate, "inline");
  const auto dir = fresh_dir("strong_rate");
  const auto out = run(c, dir.string(), 1);
  std::ifstream csv(dir / "metrics.csv");
  const auto rows = read_metrics_csv(csv);
  EXPECT_EQ(rows.size(), 7u);
  const auto report = slurp(dir / "report.json");
  EXPECT_NE(report.find("\"slope\""), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "plot.svg"));
  const auto manifest = RunManifest::from_json(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.config_hash, sha256_hex(kSmallStrongRate));
  EXPECT_EQ(manifest.experiment, "strong_rate");
  EXPECT_FALSE(manifest.stage_seeds.empty());
  for (const auto& f : manifest.outputs) EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Run, DeterministicAcrossThreadCounts) {
  const auto c = reduced_config(builtin_config("mixedlp_suite"));
  const auto a = fresh_dir("det_a"), b = fresh_dir("det_b");
  run(c, a.string(), 1);
  run(c, b.string(), 3);
  EXPECT_FALSE(slurp(a / "metrics.csv").empty());
  EXPECT_EQ(slurp(a / "metrics.csv"), slurp(b / "metrics.csv"));
}

#ifdef CHAOSLAB_CLI
namespace {

int cli(const std::string& args) {
  const int status = std::system((std::string(CHAOSLAB_CLI) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  fs::create_directories(dir);
  std::string text = kSmallStrongRate;
  text.replace(text.find("kernel:\n  name: smooth_sin\n"), 27, "");
  std::ofstream(dir / "bad.yaml") << text;
  EXPECT_EQ(cli("run " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(cli("verify fulll"), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, RunAndReport) {
  const auto dir = fresh_dir("cli_run");
  fs::create_directories(dir);
  for (const auto& [name, text] : builtin_configs())
    if (name == "picard") std::ofstream(dir / "cfg.yaml") << text;
  const auto out = dir / "out";
  EXPECT_EQ(cli("run " + (dir / "cfg.yaml").string() + " --out " + out.string() + " --threads 1"), 0);
  EXPECT_TRUE(fs::exists(out / "manifest.json"));
  EXPECT_EQ(cli("report " + (out / "manifest.json").string() + " --format csv"), 0);
  // No rate is fitted for this experiment, so there is no report.json.
  EXPECT_EQ(cli("report " + (out / "manifest.json").string() + " --format json"), 2);
  EXPECT_EQ(cli("report " + (out / "manifest.json").string() + " --format xml"), 2);
}
#endif
