#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/chaosmetrics.hpp"
#include "chaoslab/harness/config.hpp"
#include "chaoslab/harness/report.hpp"

namespace chaoslab::harness {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string measured;
};

struct ExperimentResult {
  std::vector<MetricRow> rows;
  std::optional<ConvergenceReport> report;
  std::string report_metric;
  std::vector<CriterionResult> checks;
  std::vector<SvgSeries> plot;
  std::string plot_x = "N";
  std::vector<std::string> notes;
  // Seed used by each randomised stage, recorded in the manifest.
  std::map<std::string, std::uint64_t> stage_seeds;

  bool passed() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads);

ExperimentResult run_strong_rate(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_rank_burgers(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_moderate(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_tv_marginal(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_exp_moment(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_entropy_suite(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_mixedlp_suite(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_pde_invariants(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_zvonkin(const ExperimentConfig& config, unsigned threads);
ExperimentResult run_picard(const ExperimentConfig& config, unsigned threads);

}  // namespace chaoslab::harness
