#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/errors.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/particles.hpp"
#include "chaoslab/pde.hpp"

namespace chaoslab::harness {

// Config validation failure; the message carries the source line when known.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct KernelSpec {
  std::string name;  // rank | power | axis | mollified | smooth_sin | zero
  int dim = 1;
  double alpha = 0.5;
  std::vector<double> alphas;
  double eps = 0.5;
  double c = 1.0;
  // Moderate systems: eps_N = eps_c / (ln N)^{1/eps_k}.
  double eps_c = 1.0;
  double eps_k = 2.0;

  InteractionKernel build() const;
};

struct DriftSpec {
  std::string name = "identity";  // identity | linear | tanh | zero | constant
  double scale = 1.0;
  std::vector<double> value;

  DriftEnvelope build() const;
};

struct PdeSpec {
  double lo = -8.0;
  double hi = 8.0;
  std::size_t cells = 512;
  double dt = 0.0;
  Boundary boundary = Boundary::kPeriodic;
  bool limiter = true;
  bool has_section = false;

  GridField grid() const;
  PdeScheme scheme(double horizon) const;
};

struct ExperimentConfig {
  std::string experiment;
  std::string source_name;
  std::string source_text;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  std::optional<KernelSpec> kernel;
  DriftSpec drift;
  InitialLaw initial;
  SimConfig sim;
  double sigma = 1.0;
  std::vector<std::size_t> Ns;
  PdeSpec pde;
  // Experiment-specific scalars and lists.
  std::map<std::string, double> params;
  std::map<std::string, std::vector<double>> lists;

  double param(const std::string& key, double fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback) const;
};

const std::vector<std::string>& experiment_names();

// Parses YAML text. `source_name` labels error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name);
ExperimentConfig load_config(const std::string& path);

}  // namespace chaoslab::harness
