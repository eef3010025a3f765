#include "chaoslab/particles.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

BrownianDriver::BrownianDriver(std::uint64_t seed, std::uint32_t replica, double dt)
    : seed_(seed), rng_(seed, replica), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0.0)) throw InvalidArgument("BrownianDriver: dt must be positive");
}

ParticleEnsemble::ParticleEnsemble(std::size_t n, std::size_t d, std::vector<double> positions,
                                   double time)
    : n_(n), d_(d), positions_(std::move(positions)), time_(time) {
  if (n_ == 0 || d_ == 0) throw InvalidArgument("ParticleEnsemble: need N >= 1 and d >= 1");
  if (positions_.size() != n_ * d_)
    throw InvalidArgument("ParticleEnsemble: positions length must be N * d");
  stream_ids_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) stream_ids_[i] = static_cast<std::uint32_t>(i);
}

void ParticleEnsemble::set_stream_ids(std::vector<std::uint32_t> ids) {
  if (ids.size() != n_) throw InvalidArgument("ParticleEnsemble: one stream id per particle");
  stream_ids_ = std::move(ids);
}

void ParticleEnsemble::require_finite() const {
  for (std::size_t k = 0; k < positions_.size(); ++k)
    if (!std::isfinite(positions_[k]))
      throw NumericalError("non-finite coordinate for particle " + std::to_string(k / d_) +
                           " at step " + std::to_string(step_));
}

Diffusion Diffusion::constant_value(double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidArgument("Diffusion: sigma must be finite and >= 0");
  Diffusion d;
  d.sigma = [s](double, ConstPoint) { return s; };
  d.constant = s;
  d.kappa0 = s > 0.0 ? std::max(s, 1.0 / s) : 1.0;
  return d;
}

Diffusion Diffusion::holder(double base, double amplitude, double gamma) {
  if (!(base > 0.0) || !(amplitude >= 0.0) || !(gamma > 0.0 && gamma <= 1.0))
    throw InvalidArgument("Diffusion::holder: need base > 0, amplitude >= 0, gamma in (0, 1]");
  Diffusion d;
  d.sigma = [=](double, ConstPoint x) { return base + amplitude * std::pow(std::abs(std::sin(x[0])), gamma); };
  d.kappa0 = std::max(base + amplitude, 1.0 / base);
  return d;
}

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("sim: dt must be positive");
  if (!(T >= dt * (1.0 - 1e-12))) throw InvalidArgument("sim: horizon T must be >= dt");
  if (N == 0) throw InvalidArgument("sim: N must be >= 1");
  if (d == 0) throw InvalidArgument("sim: d must be >= 1");
  if (replicas == 0) throw InvalidArgument("sim: replicas must be >= 1");
  if (!sigma.constant && !sigma.sigma) throw InvalidArgument("sim: sigma is not set");
  // Ellipticity probe on a coarse space-time lattice. sigma = 0 is accepted
  // as the deterministic limit.
  if (sigma.constant && *sigma.constant == 0.0) return;
  std::vector<double> x(d);
  for (int it = 0; it <= 4; ++it) {
    const double t = T * it / 4.0;
    for (int k = -40; k <= 40; ++k) {
      std::fill(x.begin(), x.end(), 0.25 * k);
      const double s = sigma(t, x);
      if (!(s >= 1.0 / sigma.kappa0 - 1e-12 && s <= sigma.kappa0 + 1e-12)) {
        std::ostringstream os;
        os << "sim: sigma(" << t << ", " << x[0] << ") = " << s << " violates ellipticity with kappa0 = "
           << sigma.kappa0;
        throw InvalidArgument(os.str());
      }
    }
  }
}

ParticleEnsemble em_step(const ParticleEnsemble& ensemble, const DriftField& drift,
                         const Diffusion& sigma, double dt, const BrownianDriver& driver) {
  if (!(dt > 0.0)) throw InvalidArgument("em_step: dt must be positive");
  const std::size_t n = ensemble.size(), d = ensemble.dim();
  const double t = ensemble.time();
  std::vector<double> b(n * d);
  drift(t, ensemble, b);
  ParticleEnsemble next = ensemble;
  std::vector<double> dw(d);
  const auto step = static_cast<std::uint32_t>(ensemble.step());
  const auto& streams = ensemble.stream_ids();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = ensemble.position(i);
    const double s = sigma(t, x);
    auto y = next.position(i);
    if (s != 0.0) driver.increment(streams[i], step, dw);
    for (std::size_t a = 0; a < d; ++a) {
      y[a] = x[a] + b[i * d + a] * dt + (s != 0.0 ? s * dw[a] : 0.0);
      if (!std::isfinite(y[a]))
        throw NumericalError("em_step: non-finite update for particle " + std::to_string(i) +
                             " at step " + std::to_string(step));
    }
  }
  next.set_time(t + dt, ensemble.step() + 1);
  return next;
}

double projected_pair_evaluations(const SimConfig& config, const InteractionKernel& kernel) {
  if (kernel.has_ensemble_path()) return 0.0;
  const double n = static_cast<double>(config.N);
  return static_cast<double>(config.steps()) * n * n * static_cast<double>(config.replicas);
}

namespace {

std::size_t count_near_pairs(const ParticleEnsemble& e, double tol) {
  std::size_t count = 0;
  const std::size_t n = e.size(), d = e.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) {
        const double diff = e.position(i)[a] - e.position(j)[a];
        r2 += diff * diff;
      }
      if (std::sqrt(r2) < tol) ++count;
    }
  return count;
}

void check_initial(const SimConfig& config, const ParticleEnsemble& initial) {
  if (initial.size() != config.N || initial.dim() != config.d)
    throw InvalidArgument("initial ensemble does not match N and d of the configuration");
  initial.require_finite();
}

}  // namespace

ParticlePath simulate_particle_system(const SimConfig& config, const InteractionKernel& kernel,
                                      const DriftEnvelope& F, ParticleEnsemble initial,
                                      std::uint32_t replica) {
  config.validate();
  check_initial(config, initial);
  if (static_cast<std::size_t>(kernel.dim()) != config.d || static_cast<std::size_t>(F.dim()) != config.d)
    throw InvalidArgument("kernel/drift dimension does not match the configuration");
  const double projected = projected_pair_evaluations(config, kernel);
  if (projected > config.pair_budget) throw BudgetExceeded(projected, config.pair_budget);

  const std::size_t n_steps = config.steps();
  const double h = config.T / static_cast<double>(n_steps);
  const BrownianDriver driver(config.seed, replica, h);
  ParticlePath path;
  initial.set_time(0.0, 0);
  initial.set_seed(config.seed);
  path.snapshots.push_back(initial);

  DriftField drift = [&](double t, const ParticleEnsemble& e, std::span<double> out) {
    assemble_drift_all(F, kernel, t, e, out, &path.stats.pair_evaluations);
  };
  ParticleEnsemble cur = std::move(initial);
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (kernel.is_singular()) path.stats.near_singular_pairs += count_near_pairs(cur, config.near_singular_tol);
    cur = em_step(cur, drift, config.sigma, h, driver);
    cur.set_time(static_cast<double>(k + 1) * h, k + 1);
    const bool last = k + 1 == n_steps;
    if (!last && config.snapshot_every > 0 && (k + 1) % config.snapshot_every == 0)
      path.snapshots.push_back(cur);
    if (last) path.snapshots.push_back(cur);
  }
  path.stats.steps = n_steps;
  return path;
}

std::function<double(std::size_t)> log_eps_schedule(double c, double k) {
  if (!(c > 0.0) || !(k > 0.0)) throw InvalidArgument("log_eps_schedule: need c > 0 and k > 0");
  return [c, k](std::size_t N) {
    if (N < 2) throw InvalidArgument("log_eps_schedule: N must be >= 2");
    return c / std::pow(std::log(static_cast<double>(N)), 1.0 / k);
  };
}

ParticlePath simulate_moderate_system(const SimConfig& config, const MollifierFamily& mollifier,
                                      const std::function<double(std::size_t)>& eps_schedule,
                                      const DriftEnvelope& F, ParticleEnsemble initial,
                                      std::uint32_t replica) {
  const double eps = eps_schedule(config.N);
  if (!(eps > 0.0 && eps < 1.0)) {
    std::ostringstream os;
    os << "moderate system: eps_N = " << eps << " for N = " << config.N << " is outside (0, 1)";
    throw InvalidArgument(os.str());
  }
  return simulate_particle_system(config, make_mollified_kernel(mollifier, eps), F,
                                  std::move(initial), replica);
}

CoupledPaths simulate_coupled_limit(const SimConfig& config, const InteractionKernel& kernel,
                                    const DriftEnvelope& F, const LimitSpec& limit,
                                    ParticleEnsemble initial, std::uint32_t replica) {
  config.validate();
  check_initial(config, initial);
  if (config.d != 1) throw InvalidArgument("coupled limit: one dimension only");
  if (!limit.density || limit.density->empty())
    throw InvalidArgument("coupled limit: a limit density path is required");
  const double projected = projected_pair_evaluations(config, kernel);
  if (projected > config.pair_budget) throw BudgetExceeded(projected, config.pair_budget);

  const std::size_t n_steps = config.steps();
  const double h = config.T / static_cast<double>(n_steps);
  const DensityPath& rho = *limit.density;
  if (rho.t_begin() > 1e-12 || rho.t_end() < config.T * (1.0 - 1e-12))
    throw NumericalError("coupled limit: density snapshots do not cover [0, T]");
  const InteractionKernel& limit_kernel = limit.kernel ? *limit.kernel : kernel;

  const BrownianDriver driver(config.seed, replica, h);
  CoupledPaths out;
  out.times.reserve(n_steps + 1);
  out.particle.reserve(n_steps + 1);
  out.limit.reserve(n_steps + 1);
  initial.set_time(0.0, 0);
  initial.set_seed(config.seed);
  const std::uint32_t stream = initial.stream_ids()[0];
  double y = initial.position(0)[0];
  out.times.push_back(0.0);
  out.particle.push_back(y);
  out.limit.push_back(y);

  DriftField drift = [&](double t, const ParticleEnsemble& e, std::span<double> b) {
    assemble_drift_all(F, kernel, t, e, b, &out.stats.pair_evaluations);
  };
  ParticleEnsemble cur = std::move(initial);
  double dw = 0.0;
  const bool reuse = limit.cache && limit.cache->size() == n_steps + 1 && (*limit.cache)[0] == y;
  for (std::size_t k = 0; k < n_steps; ++k) {
    if (reuse) {
      cur = em_step(cur, drift, config.sigma, h, driver);
      cur.set_time(static_cast<double>(k + 1) * h, k + 1);
      out.times.push_back(cur.time());
      out.particle.push_back(cur.position(0)[0]);
      out.limit.push_back((*limit.cache)[k + 1]);
      continue;
    }
    const double t = static_cast<double>(k) * h;
    double r = 0.0;
    if (limit.mode == LimitMode::kDensity) {
      r = rho.value(t, y);
    } else {
      const GridField mu = rho.at(t);
      r = measure_convolve(limit_kernel, t, ConstPoint(&y, 1), mu)[0];
    }
    double by = 0.0;
    F.eval(t, ConstPoint(&y, 1), std::span<const double>(&r, 1), std::span<double>(&by, 1));
    const double s = config.sigma(t, ConstPoint(&y, 1));
    driver.increment(stream, static_cast<std::uint32_t>(k), std::span<double>(&dw, 1));
    y = y + by * h + s * dw;
    if (!std::isfinite(y))
      throw NumericalError("coupled limit: non-finite limit process at step " + std::to_string(k));

    cur = em_step(cur, drift, config.sigma, h, driver);
    cur.set_time(static_cast<double>(k + 1) * h, k + 1);
    out.times.push_back(cur.time());
    out.particle.push_back(cur.position(0)[0]);
    out.limit.push_back(y);
  }
  if (limit.cache && !reuse) *limit.cache = out.limit;
  out.stats.steps = n_steps;
  out.terminal = std::move(cur);
  return out;
}

DensitySpec DensitySpec::gaussian(double mean, double stddev) {
  DensitySpec s;
  s.kind = Kind::kGaussian;
  s.mean = {mean};
  s.stddev = stddev;
  return s;
}

DensitySpec DensitySpec::uniform(double lo, double hi) {
  DensitySpec s;
  s.kind = Kind::kUniform;
  s.lo = {lo};
  s.hi = {hi};
  return s;
}

DensitySpec DensitySpec::bimodal(double mean, double separation, double stddev, double weight) {
  DensitySpec s;
  s.kind = Kind::kBimodal;
  s.mean = {mean};
  s.separation = separation;
  s.stddev = stddev;
  s.weight = weight;
  return s;
}

DensitySpec::Kind DensitySpec::parse_kind(const std::string& name) {
  if (name == "gaussian") return Kind::kGaussian;
  if (name == "uniform") return Kind::kUniform;
  if (name == "bimodal") return Kind::kBimodal;
  throw InvalidArgument("unknown initial density '" + name + "' (expected gaussian, uniform or bimodal)");
}

std::size_t DensitySpec::dim() const { return kind == Kind::kUniform ? lo.size() : mean.size(); }

namespace {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

double DensitySpec::pdf(ConstPoint x) const {
  switch (kind) {
    case Kind::kGaussian: {
      double p = 1.0;
      for (std::size_t a = 0; a < x.size(); ++a) p *= normal_pdf((x[a] - mean[a]) / stddev) / stddev;
      return p;
    }
    case Kind::kUniform: {
      double p = 1.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        if (x[a] < lo[a] || x[a] > hi[a]) return 0.0;
        p /= hi[a] - lo[a];
      }
      return p;
    }
    case Kind::kBimodal: {
      double p1 = 1.0, p2 = 1.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        const double m2 = mean[a] + (a == 0 ? separation : 0.0);
        p1 *= normal_pdf((x[a] - mean[a]) / stddev) / stddev;
        p2 *= normal_pdf((x[a] - m2) / stddev) / stddev;
      }
      return weight * p1 + (1.0 - weight) * p2;
    }
  }
  return 0.0;
}

double DensitySpec::pdf(double x) const { return pdf(ConstPoint(&x, 1)); }

void DensitySpec::draw(const CounterRng& rng, std::uint32_t stream, std::uint32_t index,
                       StreamTag tag, std::span<double> out) const {
  switch (kind) {
    case Kind::kGaussian:
      rng.normals(stream, index, tag, out);
      for (std::size_t a = 0; a < out.size(); ++a) out[a] = mean[a] + stddev * out[a];
      return;
    case Kind::kUniform:
      for (std::size_t a = 0; a < out.size(); a += 2) {
        const auto u = rng.uniform2(stream, index, tag, static_cast<std::uint32_t>(a / 2));
        out[a] = lo[a] + (hi[a] - lo[a]) * (1.0 - u[0]);
        if (a + 1 < out.size()) out[a + 1] = lo[a + 1] + (hi[a + 1] - lo[a + 1]) * (1.0 - u[1]);
      }
      return;
    case Kind::kBimodal: {
      const bool first = rng.uniform2(stream, index, tag, 0xFFFFFFu)[0] <= weight;
      rng.normals(stream, index, tag, out);
      for (std::size_t a = 0; a < out.size(); ++a) {
        const double m = mean[a] + (!first && a == 0 ? separation : 0.0);
        out[a] = m + stddev * out[a];
      }
      return;
    }
  }
}

GridField DensitySpec::to_grid(double lo_x, double hi_x, std::size_t cells) const {
  if (dim() != 1) throw InvalidArgument("DensitySpec::to_grid: one dimension only");
  GridField g = GridField::line(lo_x, hi_x, cells);
  const double h = g.spacing()[0];
  auto cdf = [&](double x) {
    switch (kind) {
      case Kind::kGaussian:
        return normal_cdf((x - mean[0]) / stddev);
      case Kind::kUniform:
        return std::clamp((x - lo[0]) / (hi[0] - lo[0]), 0.0, 1.0);
      case Kind::kBimodal:
        return weight * normal_cdf((x - mean[0]) / stddev) +
               (1.0 - weight) * normal_cdf((x - mean[0] - separation) / stddev);
    }
    return 0.0;
  };
  double prev = cdf(lo_x);
  double mass = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const double next = cdf(lo_x + static_cast<double>(k + 1) * h);
    g[k] = std::max(0.0, next - prev) / h;
    mass += g[k] * h;
    prev = next;
  }
  if (!(mass > 0.0)) throw InvalidArgument("DensitySpec::to_grid: no mass on the requested interval");
  for (std::size_t k = 0; k < cells; ++k) g[k] /= mass;
  return g;
}

double InitialLaw::marginal_pdf(double x) const {
  if (correlation == InitialCorrelation::kIid || !alternate) return component.pdf(x);
  return weight * component.pdf(x) + (1.0 - weight) * alternate->pdf(x);
}

ParticleEnsemble sample_initial(const InitialLaw& law, std::size_t N, std::uint64_t seed,
                                std::uint32_t replica) {
  if (N == 0) throw InvalidArgument("sample_initial: N must be >= 1");
  const std::size_t d = law.component.dim();
  if (law.correlation == InitialCorrelation::kExchangeableMixture) {
    if (!law.alternate) throw InvalidArgument("sample_initial: exchangeable mixture needs an alternate law");
    if (!(law.weight >= 0.0 && law.weight <= 1.0))
      throw InvalidArgument("sample_initial: mixture weight must lie in [0, 1]");
    if (law.alternate->dim() != d) throw InvalidArgument("sample_initial: mixture components differ in dimension");
  }
  const CounterRng rng(seed, replica);
  const DensitySpec* spec = &law.component;
  if (law.correlation == InitialCorrelation::kExchangeableMixture) {
    // One draw per replica picks the product component for all particles.
    const double u = rng.uniform2(0, 0, StreamTag::kMixture)[0];
    if (u > law.weight) spec = &*law.alternate;
  }
  std::vector<double> pos(N * d);
  for (std::size_t i = 0; i < N; ++i)
    spec->draw(rng, static_cast<std::uint32_t>(i), 0, StreamTag::kInitial,
               std::span<double>(pos.data() + i * d, d));
  ParticleEnsemble e(N, d, std::move(pos));
  e.set_seed(seed);
  return e;
}

double initial_relative_entropy(const InitialLaw& law, std::size_t N) {
  if (N == 0 || N > 3) throw InvalidArgument("initial_relative_entropy: N must be 1..3");
  if (law.component.dim() != 1) throw InvalidArgument("initial_relative_entropy: one dimension only");
  if (law.correlation == InitialCorrelation::kIid || !law.alternate || law.weight == 1.0 ||
      N == 1)
    return 0.0;
  const DensitySpec& a = law.component;
  const DensitySpec& b = *law.alternate;
  const double w = law.weight;

  // Integration interval split at every support breakpoint.
  std::vector<double> brk;
  for (const DensitySpec* s : {&a, &b}) {
    if (s->kind == DensitySpec::Kind::kUniform) {
      brk.push_back(s->lo[0]);
      brk.push_back(s->hi[0]);
    } else {
      const double m2 = s->kind == DensitySpec::Kind::kBimodal ? s->separation : 0.0;
      brk.push_back(s->mean[0] + std::min(0.0, m2) - 12.0 * s->stddev);
      brk.push_back(s->mean[0] + std::max(0.0, m2) + 12.0 * s->stddev);
    }
  }
  std::sort(brk.begin(), brk.end());
  const double lo = brk.front(), hi = brk.back();
  std::vector<double> edges;
  const int panels = 24;
  for (int k = 0; k <= panels; ++k) edges.push_back(lo + (hi - lo) * k / panels);
  for (double v : brk) edges.push_back(v);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              edges.end());

  using Rule = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> nodes, weights, pa, pb;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double c = 0.5 * (edges[e] + edges[e + 1]), r = 0.5 * (edges[e + 1] - edges[e]);
    for (std::size_t k = 0; k < Rule::abscissa().size(); ++k) {
      const double z = Rule::abscissa()[k], wt = Rule::weights()[k];
      for (double sgn : {-1.0, 1.0}) {
        if (z == 0.0 && sgn > 0.0) continue;
        const double x = c + sgn * z * r;
        nodes.push_back(x);
        weights.push_back(wt * r);
        pa.push_back(a.pdf(x));
        pb.push_back(b.pdf(x));
      }
    }
  }
  const std::size_t m = nodes.size();
  double total = 0.0;
  std::vector<std::size_t> idx(N, 0);
  for (;;) {
    double wq = 1.0, ra = 1.0, rb = 1.0, r0 = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
      wq *= weights[idx[i]];
      ra *= pa[idx[i]];
      rb *= pb[idx[i]];
      r0 *= w * pa[idx[i]] + (1.0 - w) * pb[idx[i]];
    }
    const double mu = w * ra + (1.0 - w) * rb;
    if (mu > 0.0 && r0 > 0.0) total += wq * mu * std::log(mu / r0);
    std::size_t pos = 0;
    while (pos < N && ++idx[pos] == m) idx[pos++] = 0;
    if (pos == N) break;
  }
  return std::max(0.0, total);
}

void write_snapshot_header(std::ostream& os, std::size_t d) {
  os << "replica,time_index,particle";
  for (std::size_t a = 0; a < d; ++a) os << ",x" << a;
  os << '\n';
}

void write_snapshot_rows(std::ostream& os, std::uint32_t replica, std::size_t time_index,
                         const ParticleEnsemble& ensemble) {
  const auto prec = os.precision(17);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    os << replica << ',' << time_index << ',' << i;
    for (double v : ensemble.position(i)) os << ',' << v;
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace chaoslab
