#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/grid_field.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/random.hpp"

namespace chaoslab {

// N particles in R^d at one time point. Particle i draws its Brownian
// increments from stream stream_ids[i] (identity by default).
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;
  ParticleEnsemble(std::size_t n, std::size_t d, std::vector<double> positions,
                   double time = 0.0);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return d_; }
  double time() const { return time_; }
  std::uint64_t step() const { return step_; }
  std::uint64_t seed() const { return seed_; }

  ConstPoint position(std::size_t i) const { return {positions_.data() + i * d_, d_}; }
  std::span<double> position(std::size_t i) { return {positions_.data() + i * d_, d_}; }
  std::span<const double> positions() const { return positions_; }
  std::span<double> positions() { return positions_; }
  const std::vector<std::uint32_t>& stream_ids() const { return stream_ids_; }

  void set_time(double t, std::uint64_t step) {
    time_ = t;
    step_ = step;
  }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void set_stream_ids(std::vector<std::uint32_t> ids);

  // Throws NumericalError naming the first non-finite particle.
  void require_finite() const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> positions_;
  std::vector<std::uint32_t> stream_ids_;
  double time_ = 0.0;
  std::uint64_t step_ = 0;
  std::uint64_t seed_ = 0;
};

// Scalar (isotropic) diffusion sigma(t, x) I with declared ellipticity
// constant kappa0: 1/kappa0 <= sigma <= kappa0.
struct Diffusion {
  std::function<double(double t, ConstPoint x)> sigma;
  double kappa0 = 1.0;
  std::optional<double> constant;

  static Diffusion constant_value(double s);
  // sigma(x) = base + amplitude |sin(x_0)|^gamma, Hoelder of order gamma.
  static Diffusion holder(double base, double amplitude, double gamma);

  double operator()(double t, ConstPoint x) const { return constant ? *constant : sigma(t, x); }
  // Diffusion coefficient a = sigma^2 / 2 of the forward equation.
  double coefficient(double t, ConstPoint x) const {
    const double s = (*this)(t, x);
    return 0.5 * s * s;
  }
};

struct SimConfig {
  std::size_t N = 1;
  std::size_t d = 1;
  double T = 1.0;
  double dt = 1e-3;
  Diffusion sigma = Diffusion::constant_value(1.0);
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  // Keep every k-th step (0: initial and terminal only).
  std::size_t snapshot_every = 0;
  double pair_budget = 1e11;
  double near_singular_tol = 1e-9;

  std::size_t steps() const;
  // Throws InvalidArgument on dt <= 0, T < dt, N == 0, replicas == 0 or a
  // failed ellipticity probe.
  void validate() const;
};

// Evaluates the drift at every particle of the pre-step ensemble (N x d).
using DriftField =
    std::function<void(double t, const ParticleEnsemble& ensemble, std::span<double> out)>;

// Explicit Euler-Maruyama step; step index k selects the Brownian counter.
ParticleEnsemble em_step(const ParticleEnsemble& ensemble, const DriftField& drift,
                         const Diffusion& sigma, double dt, const BrownianDriver& driver);

struct SimulationStats {
  std::size_t steps = 0;
  double pair_evaluations = 0.0;
  // Pairs closer than near_singular_tol seen while evaluating a singular
  // kernel; diagnostic only.
  std::size_t near_singular_pairs = 0;
};

struct ParticlePath {
  std::vector<ParticleEnsemble> snapshots;
  SimulationStats stats;
};

// Pairwise evaluations the generic route would need for the whole run.
double projected_pair_evaluations(const SimConfig& config, const InteractionKernel& kernel);

ParticlePath simulate_particle_system(const SimConfig& config, const InteractionKernel& kernel,
                                      const DriftEnvelope& F, ParticleEnsemble initial,
                                      std::uint32_t replica = 0);

// eps_N = c / (ln N)^{1/k}
std::function<double(std::size_t)> log_eps_schedule(double c, double k);

ParticlePath simulate_moderate_system(const SimConfig& config, const MollifierFamily& mollifier,
                                      const std::function<double(std::size_t)>& eps_schedule,
                                      const DriftEnvelope& F, ParticleEnsemble initial,
                                      std::uint32_t replica = 0);

// How the coupled limit process reads the law it depends on.
enum class LimitMode {
  kMeasure,  // F(t, X, (phi_t * mu_t)(X)) by measure_convolve
  kDensity,  // F(t, X, rho_t(X)) by grid interpolation
};

struct LimitSpec {
  LimitMode mode = LimitMode::kMeasure;
  const DensityPath* density = nullptr;
  // kMeasure only; defaults to the particle kernel when null.
  const InteractionKernel* kernel = nullptr;
  // Optional memo of the limit path. The limit process does not depend on N,
  // so a sweep can compute it once per replica: an empty vector is filled, a
  // filled one is reused when it starts at the same point with steps + 1
  // entries.
  std::vector<double>* cache = nullptr;
};

struct CoupledPaths {
  std::vector<double> times;
  std::vector<double> particle;  // (steps + 1) x d, particle 1
  std::vector<double> limit;     // (steps + 1) x d
  ParticleEnsemble terminal;
  SimulationStats stats;
};

// Particle 1 of the N-system and the limit process share the initial point and
// Brownian stream 1; both use the same Euler grid.
CoupledPaths simulate_coupled_limit(const SimConfig& config, const InteractionKernel& kernel,
                                    const DriftEnvelope& F, const LimitSpec& limit,
                                    ParticleEnsemble initial, std::uint32_t replica = 0);

// Named initial densities.
struct DensitySpec {
  enum class Kind { kGaussian, kUniform, kBimodal };
  Kind kind = Kind::kGaussian;
  std::vector<double> mean = {0.0};  // gaussian; bimodal: first-mode centre
  double stddev = 1.0;               // gaussian / bimodal per-mode std
  std::vector<double> lo = {0.0};    // uniform
  std::vector<double> hi = {1.0};
  double separation = 2.0;           // bimodal: second mode at mean + separation (axis 0)
  double weight = 0.5;               // bimodal weight of the first mode

  static DensitySpec gaussian(double mean, double stddev);
  static DensitySpec uniform(double lo, double hi);
  static DensitySpec bimodal(double mean, double separation, double stddev, double weight);
  // Parses "gaussian" | "uniform" | "bimodal"; throws InvalidArgument otherwise.
  static Kind parse_kind(const std::string& name);

  std::size_t dim() const;
  double pdf(ConstPoint x) const;
  double pdf(double x) const;
  // Draws one point from two uniforms/normals addressed by (rng, stream, index).
  void draw(const CounterRng& rng, std::uint32_t stream, std::uint32_t index, StreamTag tag,
            std::span<double> out) const;
  // Cell-averaged 1D density on [lo, hi], renormalised to unit mass.
  GridField to_grid(double lo, double hi, std::size_t cells) const;
};

enum class InitialCorrelation { kIid, kExchangeableMixture };

struct InitialLaw {
  DensitySpec component;
  InitialCorrelation correlation = InitialCorrelation::kIid;
  // Exchangeable mixture: mu^N = w component^{(x)N} + (1 - w) alternate^{(x)N}.
  std::optional<DensitySpec> alternate;
  double weight = 1.0;

  // One-particle marginal mu_0.
  double marginal_pdf(double x) const;
};

ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t N, std::uint64_t seed,
                                std::uint32_t replica = 0);

// H(mu^N_0 | mu_0^{(x)N}) of a 1D initial law by tensor Gauss-Legendre
// quadrature; N <= 3. Zero for iid laws.
double initial_relative_entropy(const InitialLaw& law, std::size_t N);

// Columnar snapshot layout: replica,time_index,particle,x0[,x1,x2]
void write_snapshot_header(std::ostream& os, std::size_t d);
void write_snapshot_rows(std::ostream& os, std::uint32_t replica, std::size_t time_index,
                         const ParticleEnsemble& ensemble);

}  // namespace chaoslab
