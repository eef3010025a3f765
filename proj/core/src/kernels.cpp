#include "chaoslab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "chaoslab/errors.hpp"
#include "chaoslab/particles.hpp"

namespace chaoslab {

BudgetExceeded::BudgetExceeded(double projected, double budget)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "projected pair evaluations " << projected << " exceed the budget " << budget;
        return os.str();
      }()),
      projected_(projected),
      budget_(budget) {}

namespace {

bool coincide(ConstPoint x, ConstPoint y) {
  for (std::size_t a = 0; a < x.size(); ++a)
    if (x[a] != y[a]) return false;
  return true;
}

double norm(ConstPoint x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

void require_finite_ensemble(const ParticleEnsemble& e) { e.require_finite(); }

}  // namespace

InteractionKernel::InteractionKernel(Info info, EvalFn eval)
    : info_(std::move(info)), eval_(std::move(eval)) {
  if (info_.dim < 1 || info_.channels < 1)
    throw InvalidArgument("InteractionKernel: dim and channels must be >= 1");
  if (!eval_) throw InvalidArgument("InteractionKernel: missing evaluation function");
}

void InteractionKernel::eval(double t, ConstPoint x, ConstPoint y, std::span<double> out) const {
  if (coincide(x, y)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  eval_(t, x, y, out);
}

double InteractionKernel::eval_scalar(double t, ConstPoint x, ConstPoint y) const {
  std::vector<double> out(static_cast<std::size_t>(info_.channels));
  eval(t, x, y, out);
  return out[0];
}

double InteractionKernel::eval_scalar(double t, double x, double y) const {
  return eval_scalar(t, ConstPoint(&x, 1), ConstPoint(&y, 1));
}

InteractionKernel& InteractionKernel::with_ensemble_path(EnsembleFn fn) {
  ensemble_fn_ = std::move(fn);
  return *this;
}

InteractionKernel& InteractionKernel::with_grid_path(GridFn fn) {
  grid_fn_ = std::move(fn);
  return *this;
}

DriftEnvelope::DriftEnvelope(std::string name, int dim, int channels, double lipschitz_r,
                             GrowthFn growth, EvalFn eval)
    : name_(std::move(name)),
      dim_(dim),
      channels_(channels),
      lipschitz_r_(lipschitz_r),
      growth_(std::move(growth)),
      eval_(std::move(eval)) {
  if (dim_ < 1 || channels_ < 1) throw InvalidArgument("DriftEnvelope: dim and channels must be >= 1");
  if (!(lipschitz_r_ >= 0.0)) throw InvalidArgument("DriftEnvelope: lipschitz_r must be >= 0");
  if (!eval_) throw InvalidArgument("DriftEnvelope: missing evaluation function");
}

double DriftEnvelope::eval_scalar(double t, double x, double r) const {
  double out = 0.0;
  eval_(t, ConstPoint(&x, 1), std::span<const double>(&r, 1), std::span<double>(&out, 1));
  return out;
}

MollifierFamily::MollifierFamily(std::string name, int dim, double base_sup, BaseFn base)
    : name_(std::move(name)), dim_(dim), base_sup_(base_sup), base_(std::move(base)) {
  if (dim_ < 1) throw InvalidArgument("MollifierFamily: dim must be >= 1");
  if (!base_) throw InvalidArgument("MollifierFamily: missing base density");
}

double MollifierFamily::base(ConstPoint x) const {
  if (norm(x) > 1.0) return 0.0;
  return base_(x);
}

double MollifierFamily::eval_at_eps(double eps, ConstPoint x) const {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("MollifierFamily: eps must lie in (0, 1]");
  std::vector<double> s(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) s[a] = x[a] / eps;
  return base(s) / std::pow(eps, dim_);
}

double MollifierFamily::eval_at_eps(double eps, double x) const {
  return eval_at_eps(eps, ConstPoint(&x, 1));
}

double MollifierFamily::sup_at_eps(double eps) const { return base_sup_ / std::pow(eps, dim_); }

InteractionKernel make_rank_kernel(int dim) {
  if (dim != 1) throw InvalidArgument("rank kernel is defined in one dimension only");
  InteractionKernel k({"rank", 1, 1, true, 1.0, {}},
                      [](double, ConstPoint x, ConstPoint y, std::span<double> out) {
                        out[0] = x[0] - y[0] > 0.0 ? 1.0 : 0.0;
                      });
  // Fraction of particles strictly below each particle.
  k.with_ensemble_path([](double, const ParticleEnsemble& e, std::span<double> out) {
    const std::size_t n = e.size();
    std::vector<double> sorted(e.positions().begin(), e.positions().end());
    std::sort(sorted.begin(), sorted.end());
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = e.position(i)[0];
      const auto below = std::lower_bound(sorted.begin(), sorted.end(), x) - sorted.begin();
      out[i] = static_cast<double>(below) * inv;
    }
  });
  k.with_grid_path([](double, const GridField& rho, std::span<double> out) {
    const double h = rho.spacing()[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      out[i] = acc * h;
      acc += rho[i];
    }
  });
  return k;
}

InteractionKernel make_power_kernel(ScalarCoefficient c, double c_sup, double alpha, int dim) {
  if (dim == 1)
    throw InvalidArgument("power kernel needs d >= 2; use make_axis_kernel for one dimension");
  if (dim < 1) throw InvalidArgument("power kernel: invalid dimension");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("power kernel: alpha must lie in (0, 1)");
  if (!c) throw InvalidArgument("power kernel: missing coefficient");
  return InteractionKernel(
      {"power", dim, 1, false, std::nullopt, {alpha}},
      [c = std::move(c), c_sup, alpha](double t, ConstPoint x, ConstPoint y, std::span<double> out) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < x.size(); ++a) r2 += (x[a] - y[a]) * (x[a] - y[a]);
        if (r2 == 0.0) {
          out[0] = 0.0;
          return;
        }
        (void)c_sup;
        out[0] = c(t, x, y) / std::pow(r2, 0.5 * alpha);
      });
}

InteractionKernel make_axis_kernel(std::vector<double> alphas, ScalarCoefficient c, double c_sup) {
  if (alphas.empty()) throw InvalidArgument("axis kernel: need at least one exponent");
  double sum = 0.0;
  for (double a : alphas) {
    if (!(a > 0.0 && a < 0.5)) throw InvalidArgument("axis kernel: each alpha must lie in (0, 1/2)");
    sum += a;
  }
  if (!(sum < 1.0)) throw InvalidArgument("axis kernel: exponents must sum to less than 1");
  if (!c) throw InvalidArgument("axis kernel: missing coefficient");
  const int dim = static_cast<int>(alphas.size());
  InteractionKernel::Info info{"axis", dim, 1, false, std::nullopt, alphas};
  (void)c_sup;
  return InteractionKernel(
      std::move(info),
      [c = std::move(c), alphas](double t, ConstPoint x, ConstPoint y, std::span<double> out) {
        double denom = 1.0;
        for (std::size_t a = 0; a < alphas.size(); ++a) {
          const double d = std::abs(x[a] - y[a]);
          if (d == 0.0) {
            out[0] = 0.0;
            return;
          }
          denom *= std::pow(d, alphas[a]);
        }
        out[0] = c(t, x, y) / denom;
      });
}

InteractionKernel make_smooth_sin_kernel() {
  InteractionKernel k({"smooth_sin", 1, 1, true, 1.0, {}},
                      [](double, ConstPoint x, ConstPoint y, std::span<double> out) {
                        out[0] = std::sin(x[0] - y[0]);
                      });
  // sin(x - y) = sin x cos y - cos x sin y separates into two ensemble sums.
  k.with_ensemble_path([](double, const ParticleEnsemble& e, std::span<double> out) {
    const std::size_t n = e.size();
    double sc = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double y = e.position(j)[0];
      sc += std::cos(y);
      ss += std::sin(y);
    }
    sc /= static_cast<double>(n);
    ss /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = e.position(i)[0];
      out[i] = std::sin(x) * sc - std::cos(x) * ss;
    }
  });
  k.with_grid_path([](double, const GridField& rho, std::span<double> out) {
    const double h = rho.spacing()[0];
    double sc = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < rho.size(); ++j) {
      const double y = rho.center(0, j);
      sc += std::cos(y) * rho[j];
      ss += std::sin(y) * rho[j];
    }
    sc *= h;
    ss *= h;
    for (std::size_t i = 0; i < rho.size(); ++i) {
      const double x = rho.center(0, i);
      out[i] = std::sin(x) * sc - std::cos(x) * ss;
    }
  });
  return k;
}

InteractionKernel make_zero_kernel(int dim, int channels) {
  InteractionKernel k({"zero", dim, channels, true, 0.0, {}},
                      [](double, ConstPoint, ConstPoint, std::span<double> out) {
                        std::fill(out.begin(), out.end(), 0.0);
                      });
  k.with_ensemble_path([](double, const ParticleEnsemble&, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  });
  k.with_grid_path([](double, const GridField&, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  });
  return k;
}

MollifierFamily make_box_mollifier(int dim) {
  if (dim != 1) throw InvalidArgument("box mollifier is defined in one dimension only");
  return MollifierFamily("box", 1, 0.5, [](ConstPoint x) { return std::abs(x[0]) <= 1.0 ? 0.5 : 0.0; });
}

InteractionKernel make_mollified_kernel(const MollifierFamily& mollifier, double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("mollified kernel: eps must lie in (0, 1]");
  InteractionKernel k(
      {"mollified", mollifier.dim(), 1, true, mollifier.sup_at_eps(eps), {}},
      [mollifier, eps](double, ConstPoint x, ConstPoint y, std::span<double> out) {
        std::vector<double> diff(x.size());
        for (std::size_t a = 0; a < x.size(); ++a) diff[a] = x[a] - y[a];
        out[0] = mollifier.eval_at_eps(eps, diff);
      });
  if (mollifier.name() == "box") {
    // Neighbours within eps, found on the sorted ensemble with the same
    // comparison the pairwise route uses; exact coincidences contribute 0.
    const double height = mollifier.sup_at_eps(eps);
    k.with_ensemble_path([eps, height](double, const ParticleEnsemble& e, std::span<double> out) {
      const std::size_t n = e.size();
      std::vector<double> s(e.positions().begin(), e.positions().end());
      std::sort(s.begin(), s.end());
      const double inv = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double x = e.position(i)[0];
        const auto lo = std::partition_point(s.begin(), s.end(), [&](double y) {
          return y < x && !(std::abs(x - y) / eps <= 1.0);
        });
        const auto hi = std::partition_point(s.begin(), s.end(), [&](double y) {
          return y <= x || std::abs(x - y) / eps <= 1.0;
        });
        const auto eq = std::equal_range(s.begin(), s.end(), x);
        const auto count = (hi - lo) - (eq.second - eq.first);
        out[i] = static_cast<double>(count) * height * inv;
      }
    });
  }
  return k;
}

DriftEnvelope make_identity_drift() { return make_linear_drift(1.0); }

DriftEnvelope make_linear_drift(double scale) {
  return DriftEnvelope(
      scale == 1.0 ? "identity" : "linear", 1, 1, std::abs(scale), nullptr,
      [scale](double, ConstPoint, std::span<const double> r, std::span<double> out) {
        out[0] = scale * r[0];
      });
}

DriftEnvelope make_tanh_drift(double scale) {
  return DriftEnvelope("tanh", 1, 1, std::abs(scale), nullptr,
                       [scale](double, ConstPoint, std::span<const double> r, std::span<double> out) {
                         out[0] = scale * std::tanh(r[0]);
                       });
}

DriftEnvelope make_zero_drift(int dim, int channels) {
  return DriftEnvelope("zero", dim, channels, 0.0, nullptr,
                       [](double, ConstPoint, std::span<const double>, std::span<double> out) {
                         std::fill(out.begin(), out.end(), 0.0);
                       });
}

DriftEnvelope make_constant_drift(std::vector<double> value, int channels) {
  if (value.empty()) throw InvalidArgument("constant drift: empty value");
  const double mag = norm(value);
  const int dim = static_cast<int>(value.size());
  return DriftEnvelope(
      "constant", dim, channels, 0.0, [mag](double, ConstPoint) { return mag; },
      [value = std::move(value)](double, ConstPoint, std::span<const double>, std::span<double> out) {
        std::copy(value.begin(), value.end(), out.begin());
      });
}

std::vector<double> empirical_convolve(const InteractionKernel& kernel, double t, ConstPoint x,
                                       const ParticleEnsemble& ensemble) {
  if (ensemble.size() == 0) throw InvalidArgument("empirical_convolve: empty ensemble");
  if (ensemble.dim() != static_cast<std::size_t>(kernel.dim()))
    throw InvalidArgument("empirical_convolve: ensemble and kernel dimensions differ");
  require_finite_ensemble(ensemble);
  const auto m = static_cast<std::size_t>(kernel.channels());
  std::vector<double> acc(m, 0.0), tmp(m);
  for (std::size_t j = 0; j < ensemble.size(); ++j) {
    kernel.eval(t, x, ensemble.position(j), tmp);
    for (std::size_t c = 0; c < m; ++c) acc[c] += tmp[c];
  }
  for (double& v : acc) v /= static_cast<double>(ensemble.size());
  return acc;
}

std::vector<double> measure_convolve(const InteractionKernel& kernel, double t, ConstPoint x,
                                     const GridField& density) {
  if (density.dims() != static_cast<std::size_t>(kernel.dim()))
    throw InvalidArgument("measure_convolve: density and kernel dimensions differ");
  density.require_density(1e-3, "measure_convolve");
  const auto m = static_cast<std::size_t>(kernel.channels());
  std::vector<double> acc(m, 0.0), tmp(m), y(density.dims());
  for (std::size_t j = 0; j < density.size(); ++j) {
    if (density[j] == 0.0) continue;
    density.center_of(j, y);
    kernel.eval(t, x, y, tmp);
    for (std::size_t c = 0; c < m; ++c) acc[c] += tmp[c] * density[j];
  }
  const double vol = density.cell_volume();
  for (double& v : acc) v *= vol;
  return acc;
}

std::vector<double> assemble_drift(const DriftEnvelope& F, const InteractionKernel& kernel,
                                   double t, ConstPoint x, const ParticleEnsemble& ensemble) {
  const auto r = empirical_convolve(kernel, t, x, ensemble);
  std::vector<double> out(static_cast<std::size_t>(F.dim()));
  F.eval(t, x, r, out);
  return out;
}

void empirical_convolve_all_pairwise(const InteractionKernel& kernel, double t,
                                     const ParticleEnsemble& ensemble, std::span<double> out) {
  const std::size_t n = ensemble.size();
  const auto m = static_cast<std::size_t>(kernel.channels());
  std::vector<double> tmp(m);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double* row = out.data() + i * m;
    std::fill(row, row + m, 0.0);
    const auto xi = ensemble.position(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      kernel.eval(t, xi, ensemble.position(j), tmp);
      for (std::size_t c = 0; c < m; ++c) row[c] += tmp[c];
    }
    for (std::size_t c = 0; c < m; ++c) row[c] *= inv;
  }
}

void empirical_convolve_all(const InteractionKernel& kernel, double t,
                            const ParticleEnsemble& ensemble, std::span<double> out,
                            double* pair_evaluations) {
  if (ensemble.size() == 0) throw InvalidArgument("empirical_convolve_all: empty ensemble");
  if (ensemble.dim() != static_cast<std::size_t>(kernel.dim()))
    throw InvalidArgument("empirical_convolve_all: ensemble and kernel dimensions differ");
  const auto m = static_cast<std::size_t>(kernel.channels());
  if (out.size() != ensemble.size() * m)
    throw InvalidArgument("empirical_convolve_all: output size mismatch");
  require_finite_ensemble(ensemble);
  if (kernel.has_ensemble_path()) {
    kernel.ensemble_path()(t, ensemble, out);
    return;
  }
  empirical_convolve_all_pairwise(kernel, t, ensemble, out);
  if (pair_evaluations) {
    const double n = static_cast<double>(ensemble.size());
    *pair_evaluations += n * (n - 1.0);
  }
}

void measure_convolve_grid_pairwise(const InteractionKernel& kernel, double t,
                                    const GridField& density, std::span<double> out) {
  const auto m = static_cast<std::size_t>(kernel.channels());
  const std::size_t d = density.dims();
  std::vector<double> tmp(m), x(d), y(d);
  const double vol = density.cell_volume();
  for (std::size_t i = 0; i < density.size(); ++i) {
    density.center_of(i, x);
    double* row = out.data() + i * m;
    std::fill(row, row + m, 0.0);
    for (std::size_t j = 0; j < density.size(); ++j) {
      if (density[j] == 0.0) continue;
      density.center_of(j, y);
      kernel.eval(t, x, y, tmp);
      for (std::size_t c = 0; c < m; ++c) row[c] += tmp[c] * density[j];
    }
    for (std::size_t c = 0; c < m; ++c) row[c] *= vol;
  }
}

void measure_convolve_grid(const InteractionKernel& kernel, double t, const GridField& density,
                           std::span<double> out) {
  if (density.dims() != static_cast<std::size_t>(kernel.dim()))
    throw InvalidArgument("measure_convolve_grid: density and kernel dimensions differ");
  if (out.size() != density.size() * static_cast<std::size_t>(kernel.channels()))
    throw InvalidArgument("measure_convolve_grid: output size mismatch");
  if (kernel.has_grid_path() && density.dims() == 1) {
    kernel.grid_path()(t, density, out);
    return;
  }
  measure_convolve_grid_pairwise(kernel, t, density, out);
}

void assemble_drift_all(const DriftEnvelope& F, const InteractionKernel& kernel, double t,
                        const ParticleEnsemble& ensemble, std::span<double> out,
                        double* pair_evaluations) {
  const std::size_t n = ensemble.size();
  const auto m = static_cast<std::size_t>(kernel.channels());
  const auto d = static_cast<std::size_t>(F.dim());
  if (d != ensemble.dim()) throw InvalidArgument("assemble_drift_all: drift and ensemble dimensions differ");
  if (static_cast<std::size_t>(F.channels()) != m)
    throw InvalidArgument("assemble_drift_all: drift channels differ from kernel channels");
  std::vector<double> conv(n * m);
  empirical_convolve_all(kernel, t, ensemble, conv, pair_evaluations);
  for (std::size_t i = 0; i < n; ++i)
    F.eval(t, ensemble.position(i), std::span<const double>(conv.data() + i * m, m),
           out.subspan(i * d, d));
}

}  // namespace chaoslab
