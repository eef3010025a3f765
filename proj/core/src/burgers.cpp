#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/pde.hpp"

namespace chaoslab {

DensityPath solve_burgers_cdf(const GridField& V0, const std::function<double(double)>& g,
                              const PdeScheme& scheme, std::vector<double> output_times) {
  if (V0.dims() != 1) throw InvalidArgument("solve_burgers_cdf: one dimension only");
  if (!g) throw InvalidArgument("solve_burgers_cdf: missing g");
  const std::size_t G = V0.size();
  for (std::size_t i = 0; i < G; ++i) {
    if (V0[i] < 0.0 || V0[i] > 1.0)
      throw InvalidArgument("solve_burgers_cdf: V0 must take values in [0, 1]");
    if (i > 0 && V0[i] < V0[i - 1])
      throw InvalidArgument("solve_burgers_cdf: V0 is not nondecreasing at cell " + std::to_string(i));
  }
  using Rule = boost::math::quadrature::gauss<double, 20>;
  auto Gfun = [&](double v) { return v == 0.0 ? 0.0 : Rule::integrate(g, 0.0, v); };
  // Wave speed bound for the hybrid flux and the CFL check.
  double g_max = 0.0;
  for (int k = 0; k <= 64; ++k) g_max = std::max(g_max, std::abs(g(k / 64.0)));

  // V_t = V'' - G(V)' is a conservation law with flux G(V) - V'; it reuses
  // the finite-volume layout with zero-gradient ghost cells.
  const double dx = V0.spacing()[0];
  const double dt = scheme.dt_pde > 0.0 ? scheme.dt_pde : 0.4 * dx * dx;
  if (dt > 0.5 * dx * dx * (1.0 + 1e-12))
    throw InvalidArgument("solve_burgers_cdf: dt_pde violates the stability bound dx^2/2");
  if (dt * (2.0 / (dx * dx) + g_max / dx) > 1.0 + 1e-12)
    throw InvalidArgument("solve_burgers_cdf: dt_pde violates the transport CFL bound");
  double prev_t = 0.0;
  for (double t : output_times) {
    if (!(t > prev_t) || t > scheme.horizon * (1.0 + 1e-12))
      throw InvalidArgument("solve_burgers_cdf: output times must be increasing in (0, horizon]");
    prev_t = t;
  }

  DensityPath path;
  path.push(0.0, V0);
  GridField state = V0;
  std::vector<double> Gv(G), flux(G + 1), next(G);
  double t = 0.0;
  for (double target : output_times) {
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((target - t) / dt - 1e-9)));
    const double h = (target - t) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      const auto V = state.values();
      for (std::size_t i = 0; i < G; ++i) Gv[i] = Gfun(V[i]);
      // flux[i] sits on the left face of cell i; ghosts copy the edge cells.
      flux[0] = Gv[0];
      flux[G] = Gv[G - 1];
      for (std::size_t i = 1; i < G; ++i) {
        const double speed = g(0.5 * (V[i - 1] + V[i]));
        double transport;
        if (scheme.limiter_on && std::abs(speed) * dx <= 2.0)
          transport = 0.5 * (Gv[i - 1] + Gv[i]);
        else
          transport = speed >= 0.0 ? Gv[i - 1] : Gv[i];
        flux[i] = transport - (V[i] - V[i - 1]) / dx;
      }
      const double r = h / dx;
      for (std::size_t i = 0; i < G; ++i) next[i] = V[i] - r * (flux[i + 1] - flux[i]);
      for (std::size_t i = 0; i < G; ++i) {
        if (!std::isfinite(next[i])) throw NumericalError("solve_burgers_cdf: non-finite value");
        V[i] = next[i];
      }
    }
    path.push(target, state);
    t = target;
  }
  return path;
}

namespace {

// Antiderivative of the piecewise-linear interpolant of V0 (held constant
// beyond the first and last centres), measured from the first centre.
class PiecewiseAntiderivative {
 public:
  explicit PiecewiseAntiderivative(const GridField& V0) : V0_(V0), cum_(V0.size(), 0.0) {
    h_ = V0.spacing()[0];
    x0_ = V0.center(0, 0);
    for (std::size_t i = 1; i < V0.size(); ++i) cum_[i] = cum_[i - 1] + 0.5 * h_ * (V0[i - 1] + V0[i]);
  }

  double operator()(double y) const {
    const std::size_t n = V0_.size();
    const double s = (y - x0_) / h_;
    if (s <= 0.0) return V0_[0] * (y - x0_);
    if (s >= static_cast<double>(n - 1)) {
      const double xl = x0_ + static_cast<double>(n - 1) * h_;
      return cum_[n - 1] + V0_[n - 1] * (y - xl);
    }
    const auto k = static_cast<std::size_t>(s);
    const double d = y - (x0_ + static_cast<double>(k) * h_);
    const double slope = (V0_[k + 1] - V0_[k]) / h_;
    return cum_[k] + V0_[k] * d + 0.5 * slope * d * d;
  }

 private:
  const GridField& V0_;
  std::vector<double> cum_;
  double h_ = 1.0;
  double x0_ = 0.0;
};

}  // namespace

GridField cole_hopf_exact(const GridField& V0, double t, double tolerance) {
  if (V0.dims() != 1) throw InvalidArgument("cole_hopf_exact: one dimension only");
  if (t < 0.0) throw InvalidArgument("cole_hopf_exact: t must be >= 0");
  if (t == 0.0) return V0;
  const PiecewiseAntiderivative Phi(V0);
  GridField out = V0;
  const double st = std::sqrt(t);
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (std::size_t i = 0; i < V0.size(); ++i) {
    const double x = V0.center(0, i);
    const double px = Phi(x);
    std::size_t nodes = 0;
    // theta_0(y) / theta_0(x) with theta_0 = exp(-Phi/2), y = x - 2 sqrt(t) z.
    auto weight = [&](double z) {
      ++nodes;
      return std::exp(-z * z - 0.5 * (Phi(x - 2.0 * st * z) - px));
    };
    double err_num = 0.0, err_den = 0.0, l1_num = 0.0, l1_den = 0.0;
    const double num = GK::integrate([&](double z) { return z * weight(z); }, -12.0, 12.0, 15,
                                     tolerance, &err_num, &l1_num);
    const double den = GK::integrate(weight, -12.0, 12.0, 15, tolerance, &err_den, &l1_den);
    if (!(err_den <= tolerance * std::max(l1_den, 1e-300)) ||
        !(err_num <= tolerance * std::max(l1_num, 1e-300) || err_num <= tolerance * l1_den) ||
        !(den > 0.0)) {
      std::ostringstream os;
      os << "cole_hopf_exact: quadrature missed tolerance " << tolerance << " at x = " << x
         << " after " << nodes << " nodes";
      throw NumericalError(os.str());
    }
    out[i] = 2.0 / st * num / den;
  }
  out.set_time_label(t);
  return out;
}

}  // namespace chaoslab
