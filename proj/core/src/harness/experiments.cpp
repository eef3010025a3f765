#include "chaoslab/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaoslab/parallel.hpp"
#include "common.hpp"

namespace chaoslab::harness {

using detail::add_check;
using detail::add_row;
using detail::mean_se;

bool ExperimentResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CriterionResult& c) { return c.pass; });
}

ExperimentResult run_experiment(const ExperimentConfig& config, unsigned threads) {
  const auto& e = config.experiment;
  if (e == "strong_rate") return run_strong_rate(config, threads);
  if (e == "rank_burgers") return run_rank_burgers(config, threads);
  if (e == "moderate") return run_moderate(config, threads);
  if (e == "tv_marginal") return run_tv_marginal(config, threads);
  if (e == "exp_moment") return run_exp_moment(config, threads);
  if (e == "entropy_suite") return run_entropy_suite(config, threads);
  if (e == "mixedlp_suite") return run_mixedlp_suite(config, threads);
  if (e == "pde_invariants") return run_pde_invariants(config, threads);
  if (e == "zvonkin") return run_zvonkin(config, threads);
  if (e == "picard") return run_picard(config, threads);
  throw ConfigError("unknown experiment '" + e + "'");
}

namespace {

const KernelSpec& require_kernel(const ExperimentConfig& c) {
  if (!c.kernel) throw ConfigError(c.source_name + ": experiment '" + c.experiment + "' needs a kernel");
  return *c.kernel;
}

SimConfig sim_for(const ExperimentConfig& c, std::size_t N, std::uint64_t seed) {
  SimConfig s = c.sim;
  s.N = N;
  s.d = 1;
  s.seed = seed;
  s.snapshot_every = 0;
  s.sigma = Diffusion::constant_value(c.sigma);
  return s;
}

GridField initial_grid(const ExperimentConfig& c) {
  return c.initial.component.to_grid(c.pde.lo, c.pde.hi, c.pde.cells);
}

// Snapshot times on the particle Euler grid, so the limit process reads the
// density at exactly the times it is evaluated.
std::vector<double> euler_times(const SimConfig& s) {
  const double h = s.T / static_cast<double>(s.steps());
  return uniform_times(s.T, h);
}

// One coupled sweep: error[n][r] = (sup_t |X^{N,1} - X|)^{2 gamma}.
std::vector<std::vector<double>> coupled_sweep(
    const ExperimentConfig& c, const std::function<InteractionKernel(std::size_t)>& kernel_for,
    const DriftEnvelope& F, const LimitSpec& base_limit, std::uint64_t sim_seed,
    std::uint64_t init_seed, double gamma, unsigned threads) {
  const std::size_t R = c.sim.replicas;
  std::vector<std::vector<double>> err(c.Ns.size(), std::vector<double>(R));
  std::vector<InteractionKernel> kernels;
  for (std::size_t N : c.Ns) kernels.push_back(kernel_for(N));
  parallel_for(R, threads, [&](std::size_t r) {
    std::vector<double> cache;
    LimitSpec limit = base_limit;
    limit.cache = &cache;
    for (std::size_t n = 0; n < c.Ns.size(); ++n) {
      const std::size_t N = c.Ns[n];
      const auto rep = static_cast<std::uint32_t>(r);
      auto path = simulate_coupled_limit(sim_for(c, N, sim_seed), kernels[n], F, limit,
                                         sample_initial(c.initial, N, init_seed, rep), rep);
      err[n][r] = strong_error_path(path.particle, path.limit, 1, gamma);
    }
  });
  return err;
}

void rate_rows(ExperimentResult& out, const ExperimentConfig& c, const std::string& metric,
               const std::vector<std::vector<double>>& samples, std::vector<RatePoint>& points) {
  for (std::size_t n = 0; n < c.Ns.size(); ++n) {
    const auto ms = mean_se(samples[n]);
    add_row(out, c.experiment, c.Ns[n], metric, ms.mean, ms.se);
    points.push_back({static_cast<double>(c.Ns[n]), ms.mean, ms.se});
  }
}

SvgSeries series_of(const std::string& label, const std::vector<RatePoint>& pts) {
  SvgSeries s;
  s.label = label;
  for (const auto& p : pts) {
    s.x.push_back(p.N);
    s.y.push_back(p.mean);
  }
  return s;
}

// Reference line c N^slope through the first point.
SvgSeries slope_guide(const std::vector<RatePoint>& pts, double slope) {
  SvgSeries s;
  s.label = fmt::format("N^{}", slope);
  for (const auto& p : pts) {
    s.x.push_back(p.N);
    s.y.push_back(pts.front().mean * std::pow(p.N / pts.front().N, slope));
  }
  return s;
}

void slope_check(ExperimentResult& out, const ExperimentConfig& c, const std::vector<RatePoint>& pts,
                 const std::string& metric, double lo, double hi) {
  const auto report = rate_fit(pts);
  out.report = report;
  out.report_metric = metric;
  add_check(out, "fitted slope in [" + fmt::format("{}, {}", lo, hi) + "]",
            report.slope >= lo && report.slope <= hi,
            fmt::format("slope {:.4f} +- {:.4f} (95% [{:.4f}, {:.4f}])", report.slope, report.slope_se,
                        report.slope_ci_lo, report.slope_ci_hi));
}

}  // namespace

ExperimentResult run_strong_rate(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto kernel = require_kernel(c).build();
  const auto F = c.drift.build();
  const double a = 0.5 * c.sigma * c.sigma;
  const auto sim_seed = detail::use_seed(out, c.seed, "simulation");
  const auto init_seed = detail::use_seed(out, c.seed, "initial");

  const SimConfig probe = sim_for(c, c.Ns.front(), sim_seed);
  probe.validate();
  const DensityPath rho = solve_nonlocal_fp(initial_grid(c), F, kernel, constant_coefficient(a),
                                            c.pde.scheme(c.sim.T), euler_times(probe));
  LimitSpec limit;
  limit.mode = LimitMode::kMeasure;
  limit.density = &rho;
  const double gamma = c.param("gamma", 1.0);
  const auto err = coupled_sweep(c, [&](std::size_t) { return kernel; }, F, limit, sim_seed, init_seed,
                                 gamma, threads);
  std::vector<RatePoint> pts;
  rate_rows(out, c, "strong_error", err, pts);
  slope_check(out, c, pts, "strong_error", c.param("slope_lo", -1.25), c.param("slope_hi", -0.75));
  out.plot = {series_of("E sup|X^N - X|^2", pts), slope_guide(pts, -1.0)};
  return out;
}

ExperimentResult run_moderate(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto& ks = require_kernel(c);
  if (ks.name != "mollified")
    throw ConfigError(c.source_name + ": moderate needs kernel 'mollified' (box mollifier)");
  const auto F = c.drift.build();
  const double a = 0.5 * c.sigma * c.sigma;
  const auto sim_seed = detail::use_seed(out, c.seed, "simulation");
  const auto init_seed = detail::use_seed(out, c.seed, "initial");
  const auto mollifier = make_box_mollifier(1);
  const auto eps_of = log_eps_schedule(ks.eps_c, ks.eps_k);
  for (std::size_t N : c.Ns) {
    const double eps = eps_of(N);
    if (!(eps > 0.0 && eps < 1.0))
      throw ConfigError(fmt::format("{}: eps_N = {} for N = {} is outside (0, 1)", c.source_name, eps, N));
    add_row(out, c.experiment, N, "eps_N", eps);
  }

  const SimConfig probe = sim_for(c, c.Ns.front(), sim_seed);
  probe.validate();
  const DensityPath rho = solve_nonlinear_fp(initial_grid(c), F, constant_coefficient(a),
                                             c.pde.scheme(c.sim.T), euler_times(probe));
  LimitSpec limit;
  limit.mode = LimitMode::kDensity;
  limit.density = &rho;
  const auto err = coupled_sweep(
      c, [&](std::size_t N) { return make_mollified_kernel(mollifier, eps_of(N)); }, F, limit, sim_seed,
      init_seed, c.param("gamma", 1.0), threads);
  std::vector<RatePoint> pts;
  rate_rows(out, c, "strong_error", err, pts);
  std::vector<double> means;
  for (const auto& p : pts) means.push_back(p.mean);
  add_check(out, "coupled error strictly decreasing in N", detail::strictly_decreasing(means),
            "errors " + detail::join_values(means));
  out.plot = {series_of("E sup|X^N - X|^2", pts)};
  return out;
}

ExperimentResult run_rank_burgers(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto kernel = require_kernel(c).build();
  const auto F = c.drift.build();
  const auto sim_seed = detail::use_seed(out, c.seed, "simulation");
  const auto init_seed = detail::use_seed(out, c.seed, "initial");
  if (std::abs(c.sigma - std::numbers::sqrt2) > 1e-12)
    out.notes.push_back("sigma differs from sqrt(2); the CDF equation below assumes unit diffusion");

  const GridField V0 = detail::cdf_from_density(initial_grid(c));
  const double T = c.sim.T;
  auto g = [&](double r) { return F.eval_scalar(0.0, 0.0, r); };
  const DensityPath V = solve_burgers_cdf(V0, g, c.pde.scheme(T), {T});
  const GridField& VT = V.back();
  const double dx = V0.spacing()[0];

  if (F.name() == "identity" || (F.name() == "linear" && c.drift.scale == 1.0)) {
    const GridField exact = cole_hopf_exact(V0, T);
    double sup = 0.0;
    for (std::size_t i = 0; i < VT.size(); ++i) sup = std::max(sup, std::abs(VT[i] - exact[i]));
    add_row(out, c.experiment, 0, "pde_vs_cole_hopf_sup", sup);
    add_check(out, "Burgers CDF solve within 2 dx of the Hopf-Cole solution", sup <= 2.0 * dx,
              fmt::format("sup {:.3e} vs 2 dx = {:.3e}", sup, 2.0 * dx));
  } else {
    out.notes.push_back("Hopf-Cole comparison skipped: it applies to g(r) = r only");
  }

  const std::size_t R = c.sim.replicas;
  std::vector<std::vector<double>> ks(c.Ns.size(), std::vector<double>(R));
  parallel_for(R, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    for (std::size_t n = 0; n < c.Ns.size(); ++n) {
      const std::size_t N = c.Ns[n];
      auto path = simulate_particle_system(sim_for(c, N, sim_seed), kernel, F,
                                           sample_initial(c.initial, N, init_seed, rep), rep);
      const auto pos = path.snapshots.back().positions();
      ks[n][r] = ks_distance_to_cdf(EmpiricalSample({pos.begin(), pos.end()}), VT);
    }
  });
  std::vector<RatePoint> pts;
  rate_rows(out, c, "ks_to_burgers_cdf", ks, pts);
  std::vector<double> means;
  for (const auto& p : pts) means.push_back(p.mean);
  add_check(out, "KS distance strictly decreasing in N", detail::strictly_decreasing(means),
            "KS " + detail::join_values(means));
  if (c.Ns.size() >= 4) {
    out.report = rate_fit(pts);
    out.report_metric = "ks_to_burgers_cdf";
  }
  out.plot = {series_of("sup |F_N - V|", pts), slope_guide(pts, -0.5)};
  return out;
}

ExperimentResult run_tv_marginal(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto kernel = require_kernel(c).build();
  const auto F = c.drift.build();
  const double a = 0.5 * c.sigma * c.sigma;
  const auto sim_seed = detail::use_seed(out, c.seed, "simulation");
  const auto init_seed = detail::use_seed(out, c.seed, "initial");
  const double T = c.sim.T;
  const GridField rhoT =
      solve_nonlocal_fp(initial_grid(c), F, kernel, constant_coefficient(a), c.pde.scheme(T), {T}).back();

  const std::size_t R = c.sim.replicas;
  // terminal[n][r]: particle positions at T.
  std::vector<std::vector<std::vector<double>>> terminal(c.Ns.size(), std::vector<std::vector<double>>(R));
  parallel_for(R, threads, [&](std::size_t r) {
    const auto rep = static_cast<std::uint32_t>(r);
    for (std::size_t n = 0; n < c.Ns.size(); ++n) {
      const std::size_t N = c.Ns[n];
      auto path = simulate_particle_system(sim_for(c, N, sim_seed), kernel, F,
                                           sample_initial(c.initial, N, init_seed, rep), rep);
      const auto pos = path.snapshots.back().positions();
      terminal[n][r].assign(pos.begin(), pos.end());
    }
  });

  auto pool_of = [&](std::size_t n, std::size_t skip_group, std::size_t groups) {
    std::vector<double> pool;
    for (std::size_t r = 0; r < R; ++r)
      if (groups == 0 || r * groups / R != skip_group)
        pool.insert(pool.end(), terminal[n][r].begin(), terminal[n][r].end());
    return pool;
  };
  // Bins fixed once from the smallest-N pool so the estimator is the same
  // functional at every N.
  const Binning bins =
      freedman_diaconis_binning(pool_of(0, 0, 0), static_cast<std::size_t>(c.param("max_bins", 128)));
  const auto ref = bins.masses(rhoT);
  add_row(out, c.experiment, 0, "bins", static_cast<double>(bins.bins));
  const std::size_t groups = std::min<std::size_t>(R, static_cast<std::size_t>(c.param("jackknife_groups", 10)));

  std::vector<RatePoint> pts;
  for (std::size_t n = 0; n < c.Ns.size(); ++n) {
    const auto pool = pool_of(n, 0, 0);
    const double tv = tv_masses(bins.masses(pool), ref);
    std::vector<double> loo(groups);
    for (std::size_t g = 0; g < groups; ++g) loo[g] = tv_masses(bins.masses(pool_of(n, g, groups)), ref);
    double m = 0.0, var = 0.0;
    for (double v : loo) m += v;
    m /= static_cast<double>(groups);
    for (double v : loo) var += (v - m) * (v - m);
    const double se = std::sqrt(var * static_cast<double>(groups - 1) / static_cast<double>(groups));
    const double floor = tv_sampling_floor(ref, static_cast<double>(pool.size()));
    add_row(out, c.experiment, c.Ns[n], "tv_marginal", tv, se);
    add_row(out, c.experiment, c.Ns[n], "tv_sampling_floor", floor);
    pts.push_back({static_cast<double>(c.Ns[n]), tv, se});
  }
  if (R >= 100) {
    std::vector<ParticleEnsemble> ens;
    const std::size_t last = c.Ns.size() - 1;
    for (std::size_t r = 0; r < R; ++r) ens.emplace_back(c.Ns[last], 1, terminal[last][r], T);
    const auto kac = kac_chaos_statistic(ens, rhoT);
    add_row(out, c.experiment, c.Ns[last], "kac_pair_tv", kac.tv);
    add_row(out, c.experiment, c.Ns[last], "kac_pair_noise_floor", kac.noise_floor);
  }
  out.notes.push_back(
      "tv_marginal pools all particles of every replica, so it includes histogram sampling noise of order "
      "tv_sampling_floor; both shrink with N");
  slope_check(out, c, pts, "tv_marginal", c.param("slope_lo", -0.75), c.param("slope_hi", -0.25));
  SvgSeries floor_series;
  floor_series.label = "sampling floor";
  for (const auto& row : out.rows)
    if (row.metric == "tv_sampling_floor") {
      floor_series.x.push_back(static_cast<double>(row.N));
      floor_series.y.push_back(row.value);
    }
  out.plot = {series_of("histogram TV", pts), floor_series, slope_guide(pts, -0.5)};
  return out;
}

ExperimentResult run_exp_moment(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto kernel = require_kernel(c).build();
  if (!kernel.sup_norm()) throw ConfigError(c.source_name + ": exp_moment needs a bounded kernel");
  const auto& mu = c.initial.component;
  const auto N = static_cast<std::size_t>(c.param("N", 1000));
  const double threshold = exp_moment_lambda_threshold(*kernel.sup_norm());
  const double lambda = c.param("lambda", threshold);
  const auto reps = static_cast<std::size_t>(c.param("reps", 10000));
  const double bound = c.param("bound", 6.0);
  const GridField mu_grid = mu.to_grid(c.pde.lo, c.pde.hi, c.pde.cells);
  const auto mc_seed = detail::use_seed(out, c.seed, "monte_carlo");

  const auto est = centred_exp_moment(kernel, mu, mu_grid, N, lambda, reps, mc_seed, threads);
  if (est.above_threshold) out.notes.push_back(fmt::format("lambda {} exceeds the threshold {}", lambda, threshold));
  add_row(out, c.experiment, N, "exp_moment", est.estimate, est.std_error);
  add_row(out, c.experiment, N, "lambda", lambda);
  add_check(out, fmt::format("estimate <= {} + 2 SE at N = {}", bound, N),
            est.estimate <= bound + 2.0 * est.std_error,
            fmt::format("{:.5f} +- {:.5f}", est.estimate, est.std_error));

  // N = 2 by tensor midpoint quadrature with the same centring. The diagonal
  // cell is split into 4x4 sub-cells so kernels that jump there are resolved.
  const auto small = centred_exp_moment(kernel, mu, mu_grid, 2, lambda, reps, mc_seed, threads);
  const std::size_t G = mu_grid.size();
  const double h = mu_grid.spacing()[0];
  std::vector<double> centre(G);
  measure_convolve_grid(kernel, 0.0, mu_grid, centre);
  auto term = [&](double x, double y, double cx) {
    const double s = 0.5 * ((kernel.eval_scalar(0.0, x, x) - cx) + (kernel.eval_scalar(0.0, x, y) - cx));
    return std::exp(lambda * 2.0 * s * s);
  };
  double quad = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    if (mu_grid[i] == 0.0) continue;
    const double x = mu_grid.center(0, i);
    double row = 0.0;
    for (std::size_t j = 0; j < G; ++j) {
      if (mu_grid[j] == 0.0) continue;
      if (j != i) {
        row += mu_grid[j] * h * term(x, mu_grid.center(0, j), centre[i]);
        continue;
      }
      double sub = 0.0;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          const double xs = mu_grid.lower(0) + (static_cast<double>(i) + (p + 0.5) / 4.0) * h;
          const double ys = mu_grid.lower(0) + (static_cast<double>(i) + (q + 0.5) / 4.0) * h;
          const double cs = measure_convolve(kernel, 0.0, ConstPoint(&xs, 1), mu_grid)[0];
          sub += term(xs, ys, cs) / 16.0;
        }
      row += mu_grid[j] * h * sub;
    }
    quad += mu_grid[i] * h * row;
  }
  add_row(out, c.experiment, 2, "exp_moment", small.estimate, small.std_error);
  add_row(out, c.experiment, 2, "exp_moment_quadrature", quad);
  const double gap = std::abs(small.estimate - quad);
  add_check(out, "N = 2 Monte Carlo agrees with quadrature within 3 SE", gap <= 3.0 * small.std_error,
            fmt::format("MC {:.6f} +- {:.6f}, quadrature {:.6f}", small.estimate, small.std_error, quad));
  return out;
}

}  // namespace chaoslab::harness
