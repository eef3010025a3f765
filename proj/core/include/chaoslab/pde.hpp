#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/grid_field.hpp"
#include "chaoslab/kernels.hpp"

namespace chaoslab {

enum class Boundary { kPeriodic, kZeroFlux };

Boundary parse_boundary(const std::string& name);

struct PdeScheme {
  double dt_pde = 0.0;  // 0: 0.4 dx^2 / a_max
  double horizon = 1.0;
  Boundary boundary = Boundary::kPeriodic;
  // Hybrid transport flux: central where the cell Peclet number is <= 1,
  // upwind elsewhere. Off: pure upwind.
  bool limiter_on = true;
};

using DiffusionCoefficient = std::function<double(double x)>;

DiffusionCoefficient constant_coefficient(double a);

// Forward equation rho_t = (a rho)'' - (v rho)' in conservative finite-volume
// form, explicit in time. The transport velocity at face i+1/2 is supplied by
// a callback so the same stepper serves the local, nonlocal and frozen-drift
// (Picard) problems.
class FokkerPlanck1D {
 public:
  // faces[k] is the velocity at the right face of cell k (size G; for
  // zero-flux boundaries the last entry is ignored).
  using FaceVelocity =
      std::function<void(std::size_t step, double t, const GridField& rho, std::span<double> faces)>;

  FokkerPlanck1D(GridField rho0, DiffusionCoefficient a, PdeScheme scheme);

  // Integrates to every requested time (ascending, > 0, <= horizon) and returns
  // the snapshots, including t = 0. Each interval between consecutive output
  // times uses equal substeps no larger than dt_pde. When `every_step` is set,
  // all substeps are recorded.
  DensityPath solve(const FaceVelocity& velocity, std::vector<double> output_times,
                    bool every_step = false) const;

  // Substep schedule implied by output times: returned as the list of
  // substep end times.
  std::vector<double> step_times(const std::vector<double>& output_times) const;

  double dt() const { return dt_; }
  const GridField& initial() const { return rho0_; }

 private:
  GridField rho0_;
  DiffusionCoefficient a_;
  PdeScheme scheme_;
  double dt_;
  std::vector<double> a_cells_;
};

// Local (Nemytskii) nonlinear equation: v = F(t, x, rho(x)).
DensityPath solve_nonlinear_fp(const GridField& rho0, const DriftEnvelope& F,
                               const DiffusionCoefficient& a, const PdeScheme& scheme,
                               std::vector<double> output_times);

// McKean-Vlasov equation: v = F(t, x, (phi_t * rho)(x)).
DensityPath solve_nonlocal_fp(const GridField& rho0, const DriftEnvelope& F,
                              const InteractionKernel& kernel, const DiffusionCoefficient& a,
                              const PdeScheme& scheme, std::vector<double> output_times);

// Uniform output grid t_k = k * dt for k = 1..ceil(T/dt).
std::vector<double> uniform_times(double horizon, double dt);

// Burgers-type CDF equation V_t = V'' - (G(V))', G(V) = int_0^V g. Zero-gradient
// ghost cells hold the far field. Rejects non-monotone V0.
DensityPath solve_burgers_cdf(const GridField& V0, const std::function<double(double)>& g,
                              const PdeScheme& scheme, std::vector<double> output_times);

// Hopf-Cole solution of V_t = V_xx - V V_x from V0 (piecewise linear between
// centres, held constant beyond the grid). Throws NumericalError when the
// adaptive quadrature misses tolerance, naming the node count used.
GridField cole_hopf_exact(const GridField& V0, double t, double tolerance = 1e-8);

// Gaussian heat semigroup P_t f = g_t * f, g_t(x) = (2 pi t)^{-d/2} e^{-|x|^2/2t},
// as a separable discrete convolution with weights renormalised to sum to one
// and mirror extension at the grid edges.
GridField heat_semigroup_apply(const GridField& f, double t);

struct PicardDrift {
  const DriftEnvelope* F = nullptr;
  // Null: local density mode v = F(rho). Otherwise v = F(phi * rho).
  const InteractionKernel* kernel = nullptr;
};

struct PicardResult {
  DensityPath final_iterate;  // snapshots at the requested times
  // gamma[n-1] = sup_t Gamma_n(t), Gamma_n = ||rho^n - rho^{n-1}||_inf + ||.||_L1
  std::vector<double> gamma;
  std::vector<double> gamma_terminal;
  bool diverged = false;
  std::string diagnostic;
};

// Picard scheme for the nonlinear equation: iterate n solves the linear
// equation whose drift is frozen at the previous iterate, starting from
// rho^0_t = rho_0 for all t.
PicardResult picard_density_iteration(const GridField& rho0, const PicardDrift& drift,
                                      const DiffusionCoefficient& a, const PdeScheme& scheme,
                                      std::size_t n_iters, std::vector<double> output_times);

struct ZvonkinScheme {
  double horizon = 1.0;
  double dt = 0.0;  // 0: dx^2
  // Stored time levels besides u(T): evenly spaced in t, hit exactly.
  std::size_t snapshots = 8;
};

struct ZvonkinSolution {
  DensityPath u;  // u(t, .) at the time levels, ascending in t, u(T) = 0
  double grad_sup = 0.0;
};

// Backward equation u_t + a u'' + b u' - lambda u + b = 0, u(T) = 0, on a
// zero-gradient 1D grid, solved in reversed time with Crank-Nicolson after two
// implicit Euler half steps. Rejects grids whose cell Peclet number exceeds 1.
ZvonkinSolution solve_zvonkin_backward(const GridField& b, const DiffusionCoefficient& a,
                                       double lambda, const ZvonkinScheme& scheme);

struct LambdaSweepPoint {
  double lambda;
  double grad_sup;
};

std::vector<LambdaSweepPoint> zvonkin_lambda_sweep(const GridField& b,
                                                   const DiffusionCoefficient& a,
                                                   const std::vector<double>& lambdas,
                                                   const ZvonkinScheme& scheme,
                                                   unsigned threads = 1);

std::vector<double> geometric_grid(double first, double ratio, std::size_t count);

}  // namespace chaoslab
