#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "chaoslab/harness/run.hpp"

namespace chaoslab::harness {

Suite parse_suite(const std::string& name) {
  if (name == "fast") return Suite::kFast;
  if (name == "full") return Suite::kFull;
  throw InvalidArgument("unknown suite '" + name + "' (expected fast or full)");
}

ExperimentConfig reduced_config(const ExperimentConfig& config) {
  ExperimentConfig c = config;
  c.sim.replicas = std::min<std::size_t>(c.sim.replicas, 6);
  if (c.Ns.size() > 4) c.Ns.resize(4);
  auto shrink = [&](const char* key, double cap) {
    if (c.params.count(key)) c.params[key] = std::min(c.params[key], cap);
  };
  shrink("trials", 200);
  shrink("reps", 400);
  shrink("N", 100);
  shrink("refine", 2);
  if (c.lists.count("refine_dx")) c.lists["refine_dx"] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  if (c.experiment == "exp_moment") c.pde.cells = std::min<std::size_t>(c.pde.cells, 256);
  return c;
}

namespace {

struct Criterion {
  std::string id;
  std::string name;
  bool large;  // skipped by the fast suite
  std::string config;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list = {
      {"1", "strong rate, smooth kernel", true, "strong_rate"},
      {"2", "rank-based Burgers", true, "rank_burgers"},
      {"3", "moderate interaction", true, "moderate"},
      {"4", "centred exponential moment", false, "exp_moment"},
      {"5", "entropy inequality suite", false, "entropy_suite"},
      {"6", "TV marginal rate", true, "tv_marginal"},
      {"7", "mixed-norm suite", false, "mixedlp_suite"},
      {"8", "PDE invariants", false, "pde_invariants"},
      {"9", "Zvonkin lambda decay", false, "zvonkin"},
      {"10", "Picard contraction", false, "picard"},
      {"11", "determinism across thread counts", false, ""},
  };
  return list;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_metrics_csv(os, r.rows);
  return os.str();
}

void summarize(const ExperimentResult& r, VerifyLine& line) {
  line.pass = r.passed() && !r.checks.empty();
  std::string failing, passing;
  for (const auto& c : r.checks) {
    auto& dst = c.pass ? passing : failing;
    dst += (dst.empty() ? "" : "; ") + c.name + " -> " + c.measured;
  }
  line.detail = failing.empty() ? passing : "FAILED: " + failing + (passing.empty() ? "" : " | ok: " + passing);
}

void determinism(unsigned threads, VerifyLine& line) {
  const unsigned other = threads == 1 ? 3 : 1;
  std::vector<std::string> mismatched;
  std::size_t compared = 0;
  for (const auto& [name, text] : builtin_configs()) {
    const auto config = reduced_config(parse_config(text, "builtin:" + name));
    const auto a = csv_of(run_experiment(config, threads));
    const auto b = csv_of(run_experiment(config, other));
    const auto again = csv_of(run_experiment(config, threads));
    ++compared;
    if (a != b || a != again) mismatched.push_back(name);
  }
  line.pass = mismatched.empty();
  if (line.pass) {
    line.detail = fmt::format("{} reduced configs byte-identical at {} and {} threads and on re-run", compared,
                              threads, other);
  } else {
    std::string names;
    for (const auto& n : mismatched) names += (names.empty() ? "" : ", ") + n;
    line.detail = "CSV differs for: " + names;
  }
}

}  // namespace

std::vector<VerifyLine> verify(Suite suite, unsigned threads, std::ostream& log) {
  std::vector<VerifyLine> lines;
  for (const auto& c : criteria()) {
    VerifyLine line;
    line.id = c.id;
    line.name = c.name;
    const auto start = std::chrono::steady_clock::now();
    if (suite == Suite::kFast && c.large) {
      line.skipped = true;
      line.pass = true;
      line.detail = "skipped by the fast suite";
    } else {
      try {
        if (c.config.empty())
          determinism(threads, line);
        else
          summarize(run_experiment(builtin_config(c.config), threads), line);
      } catch (const std::exception& e) {
        line.pass = false;
        line.detail = std::string("error: ") + e.what();
      }
    }
    line.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log << fmt::format("{} {:>2} {}: {} [{:.1f}s]", line.skipped ? "SKIP" : line.pass ? "PASS" : "FAIL", line.id,
                       line.name, line.detail, line.seconds)
        << std::endl;
    lines.push_back(line);
  }
  return lines;
}

}  // namespace chaoslab::harness
