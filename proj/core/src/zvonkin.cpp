#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/pde.hpp"

namespace chaoslab {

namespace {

// Tridiagonal operator L v = a v'' + b v' - lambda v with zero-gradient ghosts.
struct Tridiag {
  std::vector<double> lower, diag, upper;
};

Tridiag build_operator(const GridField& b, const std::vector<double>& a, double lambda) {
  const std::size_t G = b.size();
  const double dx = b.spacing()[0];
  Tridiag L{std::vector<double>(G, 0.0), std::vector<double>(G, 0.0), std::vector<double>(G, 0.0)};
  for (std::size_t i = 0; i < G; ++i) {
    const double diff = a[i] / (dx * dx);
    const double adv = b[i] / (2.0 * dx);
    double lo = diff - adv, up = diff + adv, di = -2.0 * diff - lambda;
    // Ghost v_{-1} = v_0 and v_G = v_{G-1} fold into the diagonal.
    if (i == 0) {
      di += lo;
      lo = 0.0;
    }
    if (i + 1 == G) {
      di += up;
      up = 0.0;
    }
    L.lower[i] = lo;
    L.diag[i] = di;
    L.upper[i] = up;
  }
  return L;
}

// Solves (I - c L) x = rhs in place (Thomas algorithm).
void solve_shifted(const Tridiag& L, double c, std::vector<double>& rhs, std::vector<double>& work) {
  const std::size_t G = rhs.size();
  work.resize(G);
  double denom = 1.0 - c * L.diag[0];
  work[0] = -c * L.upper[0] / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < G; ++i) {
    const double lo = -c * L.lower[i];
    denom = (1.0 - c * L.diag[i]) - lo * work[i - 1];
    work[i] = -c * L.upper[i] / denom;
    rhs[i] = (rhs[i] - lo * rhs[i - 1]) / denom;
  }
  for (std::size_t i = G - 1; i-- > 0;) rhs[i] -= work[i] * rhs[i + 1];
}

void apply(const Tridiag& L, const std::vector<double>& v, std::vector<double>& out) {
  const std::size_t G = v.size();
  for (std::size_t i = 0; i < G; ++i) {
    double s = L.diag[i] * v[i];
    if (i > 0) s += L.lower[i] * v[i - 1];
    if (i + 1 < G) s += L.upper[i] * v[i + 1];
    out[i] = s;
  }
}

double max_face_gradient(const std::vector<double>& v, double dx) {
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) m = std::max(m, std::abs(v[i + 1] - v[i]) / dx);
  return m;
}

}  // namespace

ZvonkinSolution solve_zvonkin_backward(const GridField& b, const DiffusionCoefficient& a,
                                       double lambda, const ZvonkinScheme& scheme) {
  if (b.dims() != 1) throw InvalidArgument("solve_zvonkin_backward: one dimension only");
  if (b.size() < 3) throw InvalidArgument("solve_zvonkin_backward: need at least 3 cells");
  if (!(lambda >= 0.0)) throw InvalidArgument("solve_zvonkin_backward: lambda must be >= 0");
  if (!(scheme.horizon > 0.0)) throw InvalidArgument("solve_zvonkin_backward: horizon must be positive");
  if (!a) throw InvalidArgument("solve_zvonkin_backward: missing diffusion coefficient");
  const std::size_t G = b.size();
  const double dx = b.spacing()[0];
  std::vector<double> ac(G);
  for (std::size_t i = 0; i < G; ++i) {
    ac[i] = a(b.center(0, i));
    if (!(ac[i] > 0.0)) throw InvalidArgument("solve_zvonkin_backward: diffusion must be positive");
    const double peclet = std::abs(b[i]) * dx / (2.0 * ac[i]);
    if (peclet > 1.0) {
      std::ostringstream os;
      os << "solve_zvonkin_backward: cell Peclet number " << peclet << " > 1 at cell " << i
         << "; refine the grid";
      throw InvalidArgument(os.str());
    }
  }
  const Tridiag L = build_operator(b, ac, lambda);
  const double T = scheme.horizon;
  const double dt = scheme.dt > 0.0 ? scheme.dt : dx * dx;
  const std::size_t levels = std::max<std::size_t>(1, scheme.snapshots);

  // Reversed time s = T - t: v_s = L v + b, v(0) = 0.
  std::vector<double> v(G, 0.0), rhs(G), Lv(G), work;
  std::vector<std::pair<double, std::vector<double>>> stored;
  stored.emplace_back(T, v);
  double grad_sup = 0.0;
  double s = 0.0;
  bool started = false;
  for (std::size_t lev = 1; lev <= levels; ++lev) {
    const double target = T * static_cast<double>(lev) / static_cast<double>(levels);
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((target - s) / dt - 1e-9)));
    const double h = (target - s) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      if (!started) {
        // Two implicit Euler half steps damp the start-up transient.
        for (int half = 0; half < 2; ++half) {
          for (std::size_t i = 0; i < G; ++i) rhs[i] = v[i] + 0.5 * h * b[i];
          solve_shifted(L, 0.5 * h, rhs, work);
          v.swap(rhs);
        }
        started = true;
      } else {
        apply(L, v, Lv);
        for (std::size_t i = 0; i < G; ++i) rhs[i] = v[i] + 0.5 * h * Lv[i] + h * b[i];
        solve_shifted(L, 0.5 * h, rhs, work);
        v.swap(rhs);
      }
      for (double x : v)
        if (!std::isfinite(x)) throw NumericalError("solve_zvonkin_backward: non-finite solution");
      grad_sup = std::max(grad_sup, max_face_gradient(v, dx));
    }
    s = target;
    stored.emplace_back(T - target, v);
  }

  ZvonkinSolution out;
  out.grad_sup = grad_sup;
  for (auto it = stored.rbegin(); it != stored.rend(); ++it) {
    const double t = std::abs(it->first) < 1e-14 * T ? 0.0 : it->first;
    out.u.push(t, GridField(b.origin(), b.spacing(), b.shape(), it->second));
  }
  return out;
}

std::vector<LambdaSweepPoint> zvonkin_lambda_sweep(const GridField& b, const DiffusionCoefficient& a,
                                                   const std::vector<double>& lambdas,
                                                   const ZvonkinScheme& scheme, unsigned threads) {
  std::vector<LambdaSweepPoint> out(lambdas.size());
  parallel_for(lambdas.size(), threads, [&](std::size_t k) {
    out[k] = {lambdas[k], solve_zvonkin_backward(b, a, lambdas[k], scheme).grad_sup};
  });
  return out;
}

std::vector<double> geometric_grid(double first, double ratio, std::size_t count) {
  if (!(first > 0.0) || !(ratio > 0.0)) throw InvalidArgument("geometric_grid: need first > 0 and ratio > 0");
  std::vector<double> out(count);
  double v = first;
  for (std::size_t k = 0; k < count; ++k, v *= ratio) out[k] = v;
  return out;
}

}  // namespace chaoslab
