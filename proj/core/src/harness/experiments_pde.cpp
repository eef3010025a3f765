#include <algorithm>
#include <cmath>

#include "chaoslab/harness/experiments.hpp"
#include "common.hpp"

namespace chaoslab::harness {

using detail::add_check;
using detail::add_row;

namespace {

double sup_distance(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

double max_mass_drift(const DensityPath& path) {
  const double m0 = path.front().integral();
  double worst = 0.0;
  for (const auto& f : path.fields()) worst = std::max(worst, std::abs(f.integral() - m0));
  return worst;
}

}  // namespace

ExperimentResult run_pde_invariants(const ExperimentConfig& c, unsigned) {
  ExperimentResult out;
  const auto& id = c.experiment;
  const auto F = c.drift.build();
  const GridField rho0 = c.initial.component.to_grid(c.pde.lo, c.pde.hi, c.pde.cells);
  const double T = c.param("horizon", 1.0);
  const auto times = uniform_times(T, c.param("output_dt", 0.05));
  const double mass_tol = c.param("mass_tol", 1e-10);

  // Mass: periodic nonlocal run and zero-flux local run.
  {
    PdeScheme s = c.pde.scheme(T);
    s.boundary = Boundary::kPeriodic;
    const auto path = solve_nonlocal_fp(rho0, F, make_smooth_sin_kernel(), constant_coefficient(0.5), s, times);
    const double drift = max_mass_drift(path) / T;
    add_row(out, id, 0, "mass_drift_periodic_nonlocal", drift);
    add_check(out, "mass conserved (periodic, nonlocal)", drift <= mass_tol,
              fmt::format("{:.3e} per unit time", drift));
    s.boundary = Boundary::kZeroFlux;
    const auto local = solve_nonlinear_fp(rho0, F, constant_coefficient(1.0), s, times);
    const double drift2 = max_mass_drift(local) / T;
    add_row(out, id, 0, "mass_drift_zero_flux_local", drift2);
    add_check(out, "mass conserved (zero flux, local)", drift2 <= mass_tol,
              fmt::format("{:.3e} per unit time", drift2));
  }

  // Maximum principle for the Burgers run rho_t = rho'' - (rho^2)' from a
  // uniform bump.
  const double half = c.param("bump_half_width", 1.0);
  const GridField bump = DensitySpec::uniform(-half, half).to_grid(c.pde.lo, c.pde.hi, c.pde.cells);
  {
    const auto path = solve_nonlinear_fp(bump, make_identity_drift(), constant_coefficient(1.0), c.pde.scheme(T), times);
    double sup = 0.0;
    for (const auto& f : path.fields()) sup = std::max(sup, f.sup_abs());
    const double bound = bump.sup_abs() * (1.0 + 1e-8);
    add_row(out, id, 0, "burgers_sup_ratio", sup / bump.sup_abs());
    add_check(out, "maximum principle for the Burgers run", sup <= bound,
              fmt::format("sup_t ||rho_t|| = {:.12g}, ||rho_0|| = {:.12g}", sup, bump.sup_abs()));
  }

  // CDF monotonicity along the Burgers CDF solve.
  {
    const GridField V0 = detail::cdf_from_density(bump);
    const auto path = solve_burgers_cdf(V0, [](double r) { return r; }, c.pde.scheme(T), times);
    double worst = 0.0;
    for (const auto& V : path.fields())
      for (std::size_t i = 1; i < V.size(); ++i) worst = std::min(worst, V[i] - V[i - 1]);
    add_row(out, id, 0, "cdf_min_increment", worst);
    add_check(out, "CDF stays nondecreasing", worst >= -1e-10, fmt::format("min increment {:.3e}", worst));
  }
  return out;
}

ExperimentResult run_zvonkin(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto& id = c.experiment;
  const double a = c.param("a", 1.0);
  const double jump = c.param("jump_at", 0.0);
  const auto lambdas = c.list("lambdas", {1.0, 10.0, 100.0, 1000.0});
  const auto refine = static_cast<std::size_t>(c.param("refine", 8));
  ZvonkinScheme scheme;
  scheme.horizon = c.param("horizon", 1.0);
  scheme.snapshots = static_cast<std::size_t>(c.param("snapshots", 8));

  auto step_drift = [&](std::size_t cells) {
    return GridField::sample(c.pde.lo, c.pde.hi, cells, [&](double x) { return x > jump ? 1.0 : 0.0; });
  };
  const GridField b = step_drift(c.pde.cells);
  const double dx = b.spacing()[0];
  const auto sweep = zvonkin_lambda_sweep(b, constant_coefficient(a), lambdas, scheme, threads);
  std::vector<double> grads;
  for (const auto& p : sweep) {
    grads.push_back(p.grad_sup);
    add_row(out, id, 0, fmt::format("grad_sup_lambda_{}", p.lambda), p.grad_sup);
  }
  bool nonincreasing = true;
  for (std::size_t k = 1; k < grads.size(); ++k) nonincreasing = nonincreasing && grads[k] <= grads[k - 1];
  add_check(out, "grad_sup nonincreasing in lambda", nonincreasing, "grad_sup " + detail::join_values(grads));
  const double limit = c.param("grad_bound", 0.5);
  add_check(out, fmt::format("grad_sup at lambda = {} <= {}", lambdas.back(), limit), grads.back() <= limit,
            fmt::format("{:.4g}", grads.back()));

  // Fine-grid oracle: refine x by `refine` and t by refine^2 (dt = dx^2). A
  // coarse centre sits on a fine face, so the oracle value there is the mean
  // of the two fine cells around it.
  SvgSeries err_series;
  err_series.label = "oracle error";
  const GridField bf = step_drift(c.pde.cells * refine);
  double worst = 0.0;
  for (double lambda : lambdas) {
    const auto coarse = solve_zvonkin_backward(b, constant_coefficient(a), lambda, scheme);
    const auto fine = solve_zvonkin_backward(bf, constant_coefficient(a), lambda, scheme);
    if (coarse.u.times() != fine.u.times())
      throw NumericalError("zvonkin: coarse and fine solutions store different time levels");
    double e = 0.0;
    for (std::size_t k = 0; k < coarse.u.size(); ++k) {
      const auto& uc = coarse.u.fields()[k];
      const auto& uf = fine.u.fields()[k];
      for (std::size_t i = 0; i < uc.size(); ++i) {
        const std::size_t j = i * refine + refine / 2;
        e = std::max(e, std::abs(uc[i] - 0.5 * (uf[j - 1] + uf[j])));
      }
    }
    add_row(out, id, 0, fmt::format("oracle_error_lambda_{}", lambda), e);
    err_series.x.push_back(lambda);
    err_series.y.push_back(e);
    worst = std::max(worst, e);
  }
  add_check(out, "matches the refined-grid oracle within 5 dx^2", worst <= 5.0 * dx * dx,
            fmt::format("max error {:.3e} vs 5 dx^2 = {:.3e}", worst, 5.0 * dx * dx));
  SvgSeries grad_series;
  grad_series.label = "grad_sup";
  for (const auto& p : sweep) {
    grad_series.x.push_back(p.lambda);
    grad_series.y.push_back(p.grad_sup);
  }
  out.plot = {grad_series, err_series};
  out.plot_x = "lambda";
  return out;
}

ExperimentResult run_picard(const ExperimentConfig& c, unsigned) {
  ExperimentResult out;
  const auto& id = c.experiment;
  const auto F = c.drift.build();
  const double a = 0.5 * c.sigma * c.sigma;
  const double T = c.sim.T;
  const auto iters = static_cast<std::size_t>(c.param("iterations", 8));
  const auto first = static_cast<std::size_t>(c.param("check_from", 2));
  const auto last = static_cast<std::size_t>(c.param("check_to", 6));
  if (last > iters || first < 1 || first >= last)
    throw ConfigError(c.source_name + ": picard needs 1 <= check_from < check_to <= iterations");
  const GridField rho0 = c.initial.component.to_grid(c.pde.lo, c.pde.hi, c.pde.cells);
  const auto times = uniform_times(T, c.param("output_dt", T / 5.0));
  const auto scheme = c.pde.scheme(T);

  PicardDrift drift;
  drift.F = &F;
  std::optional<InteractionKernel> kernel;
  if (c.kernel) {
    kernel = c.kernel->build();
    drift.kernel = &*kernel;
  }
  const auto res = picard_density_iteration(rho0, drift, constant_coefficient(a), scheme, iters, times);
  SvgSeries series;
  series.label = "Gamma_n";
  for (std::size_t n = 0; n < res.gamma.size(); ++n) {
    add_row(out, id, n + 1, "gamma", res.gamma[n]);
    series.x.push_back(static_cast<double>(n + 1));
    series.y.push_back(res.gamma[n]);
  }
  if (res.diverged) out.notes.push_back(res.diagnostic);
  std::vector<double> window(res.gamma.begin() + static_cast<std::ptrdiff_t>(first - 1),
                             res.gamma.begin() + static_cast<std::ptrdiff_t>(last));
  add_check(out, fmt::format("Gamma_n strictly decreasing for n = {}..{}", first, last),
            detail::strictly_decreasing(window), "Gamma " + detail::join_values(window));

  const DensityPath direct = kernel ? solve_nonlocal_fp(rho0, F, *kernel, constant_coefficient(a), scheme, times)
                                    : solve_nonlinear_fp(rho0, F, constant_coefficient(a), scheme, times);
  const double dist = sup_distance(res.final_iterate.back(), direct.back());
  const double dx = rho0.spacing()[0];
  add_row(out, id, iters, "final_vs_direct_sup", dist);
  add_check(out, "final iterate within 2 dx of the direct solve", dist <= 2.0 * dx,
            fmt::format("sup {:.3e} vs 2 dx = {:.3e}", dist, 2.0 * dx));
  out.plot = {series};
  out.plot_x = "iterate n";
  return out;
}

}  // namespace chaoslab::harness
