#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/grid_field.hpp"

namespace chaoslab {

class ParticleEnsemble;

using ConstPoint = std::span<const double>;

// Interaction kernel phi_t(x, y) with values in R^m (m = channels()).
//
// The wrapper enforces phi_t(x, x) = 0: any exactly coincident pair yields a
// zero value regardless of the underlying formula. Kernels may carry fast
// paths that evaluate the empirical convolution at every particle at once or
// the measure convolution at every grid centre; both must agree with the
// pairwise definition and are tested against it.
class InteractionKernel {
 public:
  using EvalFn =
      std::function<void(double t, ConstPoint x, ConstPoint y, std::span<double> out)>;
  // out[i * m + c] = (1/N) sum_j phi_t(X^i, X^j)_c
  using EnsembleFn =
      std::function<void(double t, const ParticleEnsemble& e, std::span<double> out)>;
  // out[k * m + c] = sum_cells phi_t(x_k, y) rho(y) |cell| at every centre x_k
  using GridFn = std::function<void(double t, const GridField& rho, std::span<double> out)>;

  struct Info {
    std::string name;
    int dim = 1;
    int channels = 1;
    bool bounded = false;
    std::optional<double> sup_norm;
    std::vector<double> singular_exponents;
  };

  InteractionKernel(Info info, EvalFn eval);

  const Info& info() const { return info_; }
  const std::string& name() const { return info_.name; }
  int dim() const { return info_.dim; }
  int channels() const { return info_.channels; }
  bool is_bounded() const { return info_.bounded; }
  std::optional<double> sup_norm() const { return info_.sup_norm; }
  const std::vector<double>& singular_exponents() const {
    return info_.singular_exponents;
  }
  bool is_singular() const { return !info_.singular_exponents.empty(); }
  static constexpr bool diag_zero() { return true; }

  void eval(double t, ConstPoint x, ConstPoint y, std::span<double> out) const;
  // First channel only.
  double eval_scalar(double t, ConstPoint x, ConstPoint y) const;
  double eval_scalar(double t, double x, double y) const;

  InteractionKernel& with_ensemble_path(EnsembleFn fn);
  InteractionKernel& with_grid_path(GridFn fn);
  bool has_ensemble_path() const { return static_cast<bool>(ensemble_fn_); }
  bool has_grid_path() const { return static_cast<bool>(grid_fn_); }
  const EnsembleFn& ensemble_path() const { return ensemble_fn_; }
  const GridFn& grid_path() const { return grid_fn_; }

 private:
  Info info_;
  EvalFn eval_;
  EnsembleFn ensemble_fn_;
  GridFn grid_fn_;
};

// Outer drift F(t, x, r): R_+ x R^d x R^m -> R^d with
// |F(t,x,r) - F(t,x,r')| <= kappa1 |r - r'| and |F| <= h(t,x) + kappa1 |r|.
class DriftEnvelope {
 public:
  using EvalFn =
      std::function<void(double t, ConstPoint x, std::span<const double> r, std::span<double> out)>;
  using GrowthFn = std::function<double(double t, ConstPoint x)>;

  DriftEnvelope(std::string name, int dim, int channels, double lipschitz_r,
                GrowthFn growth, EvalFn eval);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  int channels() const { return channels_; }
  double lipschitz_r() const { return lipschitz_r_; }
  double growth(double t, ConstPoint x) const { return growth_ ? growth_(t, x) : 0.0; }
  void eval(double t, ConstPoint x, std::span<const double> r, std::span<double> out) const {
    eval_(t, x, r, out);
  }
  // d = m = 1 convenience.
  double eval_scalar(double t, double x, double r) const;

 private:
  std::string name_;
  int dim_;
  int channels_;
  double lipschitz_r_;
  GrowthFn growth_;
  EvalFn eval_;
};

// phi_eps(x) = eps^{-d} phi(x / eps) for a probability density phi supported
// in the closed unit ball.
class MollifierFamily {
 public:
  using BaseFn = std::function<double(ConstPoint x)>;

  MollifierFamily(std::string name, int dim, double base_sup, BaseFn base);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double base(ConstPoint x) const;
  double eval_at_eps(double eps, ConstPoint x) const;
  double eval_at_eps(double eps, double x) const;
  // sup of phi_eps, i.e. eps^{-d} sup phi.
  double sup_at_eps(double eps) const;

 private:
  std::string name_;
  int dim_;
  double base_sup_;
  BaseFn base_;
};

using ScalarCoefficient = std::function<double(double t, ConstPoint x, ConstPoint y)>;

// Built-in kernels.
InteractionKernel make_rank_kernel(int dim = 1);
InteractionKernel make_power_kernel(ScalarCoefficient c, double c_sup, double alpha, int dim);
InteractionKernel make_axis_kernel(std::vector<double> alphas, ScalarCoefficient c, double c_sup);
InteractionKernel make_smooth_sin_kernel();
InteractionKernel make_zero_kernel(int dim = 1, int channels = 1);
InteractionKernel make_mollified_kernel(const MollifierFamily& mollifier, double eps);

MollifierFamily make_box_mollifier(int dim = 1);

// Built-in envelopes.
DriftEnvelope make_identity_drift();                     // F = r
DriftEnvelope make_linear_drift(double scale);           // F = scale * r
DriftEnvelope make_tanh_drift(double scale);             // F = scale * tanh(r)
DriftEnvelope make_zero_drift(int dim = 1, int channels = 1);
DriftEnvelope make_constant_drift(std::vector<double> value, int channels = 1);

// (1/N) sum_j phi_t(x, X^j).
std::vector<double> empirical_convolve(const InteractionKernel& kernel, double t,
                                       ConstPoint x, const ParticleEnsemble& ensemble);

// Midpoint-rule approximation of int phi_t(x, y) rho(y) dy. Rejects densities
// whose mass deviates from 1 by more than 1e-3 or that have negative values.
std::vector<double> measure_convolve(const InteractionKernel& kernel, double t,
                                     ConstPoint x, const GridField& density);

// F(t, x, (phi_t * eta)(x)).
std::vector<double> assemble_drift(const DriftEnvelope& F, const InteractionKernel& kernel,
                                   double t, ConstPoint x, const ParticleEnsemble& ensemble);

// Empirical convolution evaluated at every particle (N x m, row-major), using
// the kernel's fast path when present. `pair_evaluations` accumulates the
// number of pairwise kernel calls made by the generic path.
void empirical_convolve_all(const InteractionKernel& kernel, double t,
                            const ParticleEnsemble& ensemble, std::span<double> out,
                            double* pair_evaluations = nullptr);
// Generic O(N^2) route regardless of fast paths.
void empirical_convolve_all_pairwise(const InteractionKernel& kernel, double t,
                                     const ParticleEnsemble& ensemble, std::span<double> out);

// Measure convolution at every centre of a 1D density grid (G x m).
void measure_convolve_grid(const InteractionKernel& kernel, double t, const GridField& density,
                           std::span<double> out);
void measure_convolve_grid_pairwise(const InteractionKernel& kernel, double t,
                                    const GridField& density, std::span<double> out);

// Drift at every particle, N x d row-major.
void assemble_drift_all(const DriftEnvelope& F, const InteractionKernel& kernel, double t,
                        const ParticleEnsemble& ensemble, std::span<double> out,
                        double* pair_evaluations = nullptr);

}  // namespace chaoslab
