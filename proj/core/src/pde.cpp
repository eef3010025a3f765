#include "chaoslab/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

Boundary parse_boundary(const std::string& name) {
  if (name == "periodic") return Boundary::kPeriodic;
  if (name == "zero_flux") return Boundary::kZeroFlux;
  throw InvalidArgument("unknown boundary '" + name + "' (expected periodic or zero_flux)");
}

DiffusionCoefficient constant_coefficient(double a) {
  return [a](double) { return a; };
}

namespace {

void check_output_times(const std::vector<double>& times, double horizon) {
  if (times.empty()) throw InvalidArgument("PDE solve: no output times requested");
  double prev = 0.0;
  for (double t : times) {
    if (!(t > prev)) throw InvalidArgument("PDE solve: output times must be positive and increasing");
    if (t > horizon * (1.0 + 1e-12)) throw InvalidArgument("PDE solve: output time beyond the horizon");
    prev = t;
  }
}

std::size_t substeps(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

}  // namespace

FokkerPlanck1D::FokkerPlanck1D(GridField rho0, DiffusionCoefficient a, PdeScheme scheme)
    : rho0_(std::move(rho0)), a_(std::move(a)), scheme_(scheme) {
  if (rho0_.dims() != 1) throw InvalidArgument("FokkerPlanck1D: one dimension only");
  if (!a_) throw InvalidArgument("FokkerPlanck1D: missing diffusion coefficient");
  if (!(scheme_.horizon > 0.0)) throw InvalidArgument("FokkerPlanck1D: horizon must be positive");
  const std::size_t G = rho0_.size();
  a_cells_.resize(G);
  double a_max = 0.0;
  for (std::size_t i = 0; i < G; ++i) {
    a_cells_[i] = a_(rho0_.center(0, i));
    if (!(a_cells_[i] >= 0.0) || !std::isfinite(a_cells_[i]))
      throw InvalidArgument("FokkerPlanck1D: diffusion coefficient must be finite and >= 0");
    a_max = std::max(a_max, a_cells_[i]);
  }
  const double dx = rho0_.spacing()[0];
  if (scheme_.dt_pde < 0.0) throw InvalidArgument("FokkerPlanck1D: dt_pde must be >= 0");
  if (scheme_.dt_pde == 0.0) {
    dt_ = a_max > 0.0 ? 0.4 * dx * dx / a_max : 0.5 * dx;
  } else {
    dt_ = scheme_.dt_pde;
    if (a_max > 0.0 && dt_ > dx * dx / (2.0 * a_max) * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "FokkerPlanck1D: dt_pde = " << dt_ << " violates the stability bound dx^2/(2 a_max) = "
         << dx * dx / (2.0 * a_max);
      throw InvalidArgument(os.str());
    }
  }
}

std::vector<double> FokkerPlanck1D::step_times(const std::vector<double>& output_times) const {
  check_output_times(output_times, scheme_.horizon);
  std::vector<double> out;
  double t = 0.0;
  for (double target : output_times) {
    const std::size_t n = substeps(target - t, dt_);
    const double h = (target - t) / static_cast<double>(n);
    for (std::size_t s = 1; s <= n; ++s) out.push_back(s == n ? target : t + static_cast<double>(s) * h);
    t = target;
  }
  return out;
}

DensityPath FokkerPlanck1D::solve(const FaceVelocity& velocity, std::vector<double> output_times,
                                  bool every_step) const {
  check_output_times(output_times, scheme_.horizon);
  const std::size_t G = rho0_.size();
  const double dx = rho0_.spacing()[0];
  const bool periodic = scheme_.boundary == Boundary::kPeriodic;
  const double a_max = *std::max_element(a_cells_.begin(), a_cells_.end());

  DensityPath path;
  path.push(0.0, rho0_);
  GridField state = rho0_;
  std::vector<double> faces(G, 0.0), flux(G, 0.0), next(G);
  std::size_t step = 0;
  double t = 0.0;
  for (double target : output_times) {
    const std::size_t n = substeps(target - t, dt_);
    const double h = (target - t) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      const double ts = t + static_cast<double>(s) * h;
      velocity(step, ts, state, faces);
      const auto rho = state.values();
      const std::size_t n_faces = periodic ? G : G - 1;
      double v_max = 0.0;
      for (std::size_t i = 0; i < n_faces; ++i) {
        const std::size_t j = (i + 1) % G;
        const double v = faces[i];
        if (!std::isfinite(v))
          throw NumericalError("FokkerPlanck1D: non-finite transport velocity at face " + std::to_string(i));
        v_max = std::max(v_max, std::abs(v));
        const double a_face = 0.5 * (a_cells_[i] + a_cells_[j]);
        double rho_face;
        if (scheme_.limiter_on && a_face > 0.0 && std::abs(v) * dx <= 2.0 * a_face)
          rho_face = 0.5 * (rho[i] + rho[j]);
        else
          rho_face = v >= 0.0 ? rho[i] : rho[j];
        flux[i] = v * rho_face - (a_cells_[j] * rho[j] - a_cells_[i] * rho[i]) / dx;
      }
      if (!periodic) flux[G - 1] = 0.0;
      if (h * (2.0 * a_max / (dx * dx) + v_max / dx) > 1.0 + 1e-12) {
        std::ostringstream os;
        os << "FokkerPlanck1D: step " << step << " at t = " << ts << " violates the transport CFL bound"
           << " (max |v| = " << v_max << ", dt = " << h << ")";
        throw NumericalError(os.str());
      }
      const double r = h / dx;
      for (std::size_t i = 0; i < G; ++i) {
        const double left = i == 0 ? (periodic ? flux[G - 1] : 0.0) : flux[i - 1];
        next[i] = rho[i] - r * (flux[i] - left);
        if (next[i] < -1e-12) {
          std::ostringstream os;
          os << "FokkerPlanck1D: density " << next[i] << " at cell " << i << " after step " << step
             << " (t = " << ts + h << ")";
          throw NumericalError(os.str());
        }
      }
      std::copy(next.begin(), next.end(), rho.begin());
      ++step;
      const bool last = s + 1 == n;
      if (every_step || last) path.push(last ? target : ts + h, state);
    }
    t = target;
  }
  return path;
}

DensityPath solve_nonlinear_fp(const GridField& rho0, const DriftEnvelope& F,
                               const DiffusionCoefficient& a, const PdeScheme& scheme,
                               std::vector<double> output_times) {
  rho0.require_density(1e-6, "solve_nonlinear_fp");
  if (F.dim() != 1 || F.channels() != 1) throw InvalidArgument("solve_nonlinear_fp: scalar drift required");
  FokkerPlanck1D fp(rho0, a, scheme);
  const std::size_t G = rho0.size();
  const bool periodic = scheme.boundary == Boundary::kPeriodic;
  auto velocity = [&](std::size_t, double t, const GridField& rho, std::span<double> faces) {
    const std::size_t n_faces = periodic ? G : G - 1;
    for (std::size_t i = 0; i < n_faces; ++i) {
      const double x = rho.lower(0) + static_cast<double>(i + 1) * rho.spacing()[0];
      faces[i] = F.eval_scalar(t, x, 0.5 * (rho[i] + rho[(i + 1) % G]));
    }
  };
  return fp.solve(velocity, std::move(output_times));
}

namespace {

void centre_to_faces(std::span<const double> v, bool periodic, std::span<double> faces) {
  const std::size_t G = v.size();
  const std::size_t n_faces = periodic ? G : G - 1;
  for (std::size_t i = 0; i < n_faces; ++i) faces[i] = 0.5 * (v[i] + v[(i + 1) % G]);
}

void nonlocal_centre_velocity(const DriftEnvelope& F, const InteractionKernel& kernel, double t,
                              const GridField& rho, std::vector<double>& conv,
                              std::vector<double>& v) {
  measure_convolve_grid(kernel, t, rho, conv);
  for (std::size_t i = 0; i < rho.size(); ++i)
    v[i] = F.eval_scalar(t, rho.center(0, i), conv[i]);
}

}  // namespace

DensityPath solve_nonlocal_fp(const GridField& rho0, const DriftEnvelope& F,
                              const InteractionKernel& kernel, const DiffusionCoefficient& a,
                              const PdeScheme& scheme, std::vector<double> output_times) {
  rho0.require_density(1e-6, "solve_nonlocal_fp");
  if (kernel.dim() != 1 || kernel.channels() != 1 || F.dim() != 1 || F.channels() != 1)
    throw InvalidArgument("solve_nonlocal_fp: scalar one-dimensional kernel and drift required");
  FokkerPlanck1D fp(rho0, a, scheme);
  const bool periodic = scheme.boundary == Boundary::kPeriodic;
  std::vector<double> conv(rho0.size()), v(rho0.size());
  auto velocity = [&](std::size_t, double t, const GridField& rho, std::span<double> faces) {
    nonlocal_centre_velocity(F, kernel, t, rho, conv, v);
    centre_to_faces(v, periodic, faces);
  };
  return fp.solve(velocity, std::move(output_times));
}

std::vector<double> uniform_times(double horizon, double dt) {
  if (!(horizon > 0.0) || !(dt > 0.0)) throw InvalidArgument("uniform_times: need horizon > 0 and dt > 0");
  const auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = k + 1 == n ? horizon : static_cast<double>(k + 1) * dt;
  return out;
}

GridField heat_semigroup_apply(const GridField& f, double t) {
  if (!(t > 0.0)) throw InvalidArgument("heat_semigroup_apply: t must be positive");
  GridField out = f;
  std::vector<double> line, weights;
  for (std::size_t axis = 0; axis < f.dims(); ++axis) {
    const double h = f.spacing()[axis];
    const std::size_t n = f.shape()[axis];
    const auto K = static_cast<std::ptrdiff_t>(std::ceil(8.0 * std::sqrt(t) / h));
    weights.assign(static_cast<std::size_t>(2 * K + 1), 0.0);
    double sum = 0.0;
    for (std::ptrdiff_t k = -K; k <= K; ++k) {
      const double x = static_cast<double>(k) * h;
      weights[static_cast<std::size_t>(k + K)] = std::exp(-x * x / (2.0 * t));
      sum += weights[static_cast<std::size_t>(k + K)];
    }
    for (double& w : weights) w /= sum;

    const std::size_t stride = f.stride(axis);
    const std::size_t outer = f.size() / (n * stride);
    line.resize(n);
    const auto nn = static_cast<std::ptrdiff_t>(n);
    auto reflect = [nn](std::ptrdiff_t j) {
      // Half-sample symmetric extension with period 2n.
      j %= 2 * nn;
      if (j < 0) j += 2 * nn;
      return j < nn ? j : 2 * nn - 1 - j;
    };
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t in = 0; in < stride; ++in) {
        const std::size_t base = o * n * stride + in;
        for (std::size_t i = 0; i < n; ++i) line[i] = out[base + i * stride];
        for (std::size_t i = 0; i < n; ++i) {
          double acc = 0.0;
          for (std::ptrdiff_t k = -K; k <= K; ++k)
            acc += weights[static_cast<std::size_t>(k + K)] *
                   line[static_cast<std::size_t>(reflect(static_cast<std::ptrdiff_t>(i) - k))];
          out[base + i * stride] = acc;
        }
      }
  }
  return out;
}

namespace {

double field_distance(const GridField& a, const GridField& b) {
  double sup = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    sup = std::max(sup, d);
    l1 += d;
  }
  return sup + l1 * a.cell_volume();
}

}  // namespace

PicardResult picard_density_iteration(const GridField& rho0, const PicardDrift& drift,
                                      const DiffusionCoefficient& a, const PdeScheme& scheme,
                                      std::size_t n_iters, std::vector<double> output_times) {
  if (!drift.F) throw InvalidArgument("picard_density_iteration: missing drift");
  if (n_iters == 0) throw InvalidArgument("picard_density_iteration: need at least one iterate");
  rho0.require_density(1e-6, "picard_density_iteration");
  FokkerPlanck1D fp(rho0, a, scheme);
  const std::size_t G = rho0.size();
  const bool periodic = scheme.boundary == Boundary::kPeriodic;
  const DriftEnvelope& F = *drift.F;

  // rho^0_t = rho_0 at every substep.
  const std::size_t n_steps = fp.step_times(output_times).size();
  DensityPath prev;
  {
    const auto st = fp.step_times(output_times);
    prev.push(0.0, rho0);
    for (double t : st) prev.push(t, rho0);
  }

  std::vector<double> conv(G), v(G);
  PicardResult result;
  std::size_t rising = 0;
  for (std::size_t n = 1; n <= n_iters; ++n) {
    const auto& frozen = prev.fields();
    auto velocity = [&](std::size_t step, double t, const GridField&, std::span<double> faces) {
      const GridField& rho = frozen[step];
      if (drift.kernel) {
        nonlocal_centre_velocity(F, *drift.kernel, t, rho, conv, v);
        centre_to_faces(v, periodic, faces);
      } else {
        const std::size_t n_faces = periodic ? G : G - 1;
        for (std::size_t i = 0; i < n_faces; ++i) {
          const double x = rho.lower(0) + static_cast<double>(i + 1) * rho.spacing()[0];
          faces[i] = F.eval_scalar(t, x, 0.5 * (rho[i] + rho[(i + 1) % G]));
        }
      }
    };
    DensityPath cur = fp.solve(velocity, output_times, true);
    if (cur.size() != n_steps + 1) throw NumericalError("picard_density_iteration: substep schedule changed");
    double sup = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k)
      sup = std::max(sup, field_distance(cur.fields()[k], prev.fields()[k]));
    result.gamma.push_back(sup);
    result.gamma_terminal.push_back(field_distance(cur.back(), prev.back()));
    if (n >= 2 && result.gamma[n - 1] > result.gamma[n - 2]) {
      if (++rising >= 3 && !result.diverged) {
        result.diverged = true;
        std::ostringstream os;
        os << "Picard iteration diverges: Gamma increased for 3 consecutive iterates ending at n = " << n
           << " (Gamma = " << sup << ")";
        result.diagnostic = os.str();
      }
    } else {
      rising = 0;
    }
    prev = std::move(cur);
  }
  for (std::size_t k = 0; k < prev.size(); ++k) {
    const double t = prev.times()[k];
    if (std::find(output_times.begin(), output_times.end(), t) != output_times.end() || k == 0)
      result.final_iterate.push(t, prev.fields()[k]);
  }
  return result;
}

}  // namespace chaoslab
