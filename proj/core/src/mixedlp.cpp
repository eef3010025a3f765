#include "chaoslab/mixedlp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

MultiIndex MultiIndex::uniform(std::size_t d, double value) {
  MultiIndex m;
  m.p.assign(d, value);
  return m;
}

double MultiIndex::reciprocal_sum() const {
  double s = 0.0;
  for (double v : p) s += std::isinf(v) ? 0.0 : 1.0 / v;
  return s;
}

void MultiIndex::validate() const {
  if (p.empty()) throw InvalidArgument("MultiIndex: empty exponent vector");
  for (double v : p)
    if (!(v > 0.0)) throw InvalidArgument("MultiIndex: exponents must lie in (0, inf]");
  if (q && !(*q > 0.0)) throw InvalidArgument("MultiIndex: time exponent must lie in (0, inf]");
}

PermOrder PermOrder::identity(std::size_t d) {
  PermOrder o;
  for (std::size_t a = 0; a < d; ++a) o.axes.push_back(a);
  return o;
}

void PermOrder::validate(std::size_t d) const {
  if (axes.size() != d) throw InvalidArgument("PermOrder: length differs from the dimension");
  std::vector<bool> seen(d, false);
  for (auto a : axes) {
    if (a >= d || seen[a]) throw InvalidArgument("PermOrder: not a permutation");
    seen[a] = true;
  }
}

double smooth_cutoff(double radius) {
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (radius <= 1.0) return 1.0;
  if (radius >= 2.0) return 0.0;
  const double up = f(2.0 - radius), down = f(radius - 1.0);
  return up / (up + down);
}

LocalizationConfig LocalizationConfig::lattice(const GridField& f, double r) {
  if (!(r > 0.0)) throw InvalidArgument("LocalizationConfig: r must be positive");
  LocalizationConfig loc;
  loc.r = r;
  const std::size_t d = f.dims();
  std::vector<long> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    lo[a] = static_cast<long>(std::floor(f.lower(a) / r));
    hi[a] = static_cast<long>(std::ceil(f.upper(a) / r));
  }
  std::vector<long> k = lo;
  for (;;) {
    std::vector<double> z(d);
    for (std::size_t a = 0; a < d; ++a) z[a] = static_cast<double>(k[a]) * r;
    loc.centers.push_back(std::move(z));
    std::size_t a = 0;
    while (a < d && ++k[a] > hi[a]) k[a] = lo[a], ++a;
    if (a == d) break;
  }
  return loc;
}

namespace {

// Reduces `axis` of a row-major array with the p-norm (midpoint weights h).
std::vector<double> reduce_axis(const std::vector<double>& v, std::vector<std::size_t>& shape,
                                std::size_t axis, double p, double h) {
  std::size_t stride = 1;
  for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
  const std::size_t n = shape[axis];
  const std::size_t outer = v.size() / (n * stride);
  std::vector<double> out(outer * stride);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < stride; ++in) {
      const std::size_t base = o * n * stride + in;
      double acc = 0.0;
      if (std::isinf(p)) {
        for (std::size_t k = 0; k < n; ++k) acc = std::max(acc, std::abs(v[base + k * stride]));
      } else {
        // Scaled by the line maximum so large finite p cannot overflow.
        double m = 0.0;
        for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(v[base + k * stride]));
        if (m > 0.0) {
          for (std::size_t k = 0; k < n; ++k) acc += std::pow(std::abs(v[base + k * stride]) / m, p);
          acc = m * std::pow(acc * h, 1.0 / p);
        }
      }
      out[o * stride + in] = acc;
    }
  shape.erase(shape.begin() + static_cast<std::ptrdiff_t>(axis));
  return out;
}

double mixed_norm_values(std::vector<double> v, std::vector<std::size_t> shape,
                         const std::vector<double>& spacing, const MultiIndex& p,
                         const PermOrder& perm) {
  const std::size_t d = shape.size();
  // Remaining original axes, in current array order.
  std::vector<std::size_t> live(d);
  for (std::size_t a = 0; a < d; ++a) live[a] = a;
  for (std::size_t k = d; k-- > 0;) {
    const std::size_t axis = perm.axes[k];
    const auto pos = static_cast<std::size_t>(std::find(live.begin(), live.end(), axis) - live.begin());
    v = reduce_axis(v, shape, pos, p.p[k], spacing[axis]);
    live.erase(live.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return v.at(0);
}

}  // namespace

double mixed_norm(const GridField& f, const MultiIndex& p, const PermOrder& perm) {
  p.validate();
  if (p.dims() != f.dims()) throw InvalidArgument("mixed_norm: exponent vector length differs from grid rank");
  perm.validate(f.dims());
  return mixed_norm_values(std::vector<double>(f.values().begin(), f.values().end()), f.shape(),
                           f.spacing(), p, perm);
}

double localized_mixed_norm(const GridField& f, const MultiIndex& p, const PermOrder& perm,
                            const LocalizationConfig& loc) {
  p.validate();
  perm.validate(f.dims());
  if (!(loc.r > 0.0)) throw InvalidArgument("localized_mixed_norm: r must be positive");
  if (loc.centers.empty()) throw InvalidArgument("localized_mixed_norm: no centres");
  const std::size_t d = f.dims();
  for (const auto& z : loc.centers)
    if (z.size() != d) throw InvalidArgument("localized_mixed_norm: centre dimension mismatch");
  std::vector<double> x(d);
  std::vector<double> dist(f.size());
  // Covering precondition and per-cell centre distances are computed once.
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    f.center_of(i, x);
    double best = kInf;
    for (const auto& z : loc.centers) {
      double r2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) r2 += (x[a] - z[a]) * (x[a] - z[a]);
      best = std::min(best, r2);
    }
    if (std::sqrt(best) > loc.r * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "localized_mixed_norm: cell " << i << " with f != 0 lies farther than r = " << loc.r
         << " from every centre";
      throw InvalidArgument(os.str());
    }
  }
  double best = 0.0;
  std::vector<double> g(f.size());
  for (const auto& z : loc.centers) {
    bool any = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == 0.0) {
        g[i] = 0.0;
        continue;
      }
      f.center_of(i, x);
      double r2 = 0.0;
      for (std::size_t a = 0; a < d; ++a) r2 += (x[a] - z[a]) * (x[a] - z[a]);
      const double chi = smooth_cutoff(std::sqrt(r2) / loc.r);
      g[i] = chi * f[i];
      any = any || g[i] != 0.0;
    }
    if (!any) continue;
    best = std::max(best, mixed_norm_values(g, f.shape(), f.spacing(), p, perm));
  }
  return best;
}

IndexSet parse_index_set(const std::string& name) {
  if (name == "Io") return IndexSet::kIo;
  if (name == "I1") return IndexSet::kI1;
  if (name == "I2") return IndexSet::kI2;
  throw InvalidArgument("unknown index set '" + name + "' (expected Io, I1 or I2)");
}

bool index_check(double q, const MultiIndex& p, IndexSet which) {
  const double lower = which == IndexSet::kIo ? 2.0 : 1.0;
  const double bound = which == IndexSet::kI2 ? 2.0 : 1.0;
  if (!(q > lower)) return false;
  for (double v : p.p)
    if (!(v > lower)) return false;
  const double two_over_q = std::isinf(q) ? 0.0 : 2.0 / q;
  return p.reciprocal_sum() + two_over_q < bound;
}

GridField pointwise_product(const GridField& f, const GridField& g) {
  if (!f.same_grid(g)) throw InvalidArgument("pointwise_product: grids differ");
  GridField out = f;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f[i] * g[i];
  return out;
}

GridField periodic_convolve(const GridField& f, const GridField& g) {
  if (f.shape() != g.shape()) throw InvalidArgument("periodic_convolve: shapes differ");
  const std::size_t d = f.dims(), n = f.size();
  const auto& shape = f.shape();
  std::vector<std::size_t> idx(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = i;
    for (std::size_t a = d; a-- > 0;) {
      idx[i * d + a] = r % shape[a];
      r /= shape[a];
    }
  }
  GridField out = f;
  const double vol = f.cell_volume();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (g[j] == 0.0) continue;
      std::size_t flat = 0;
      for (std::size_t a = 0; a < d; ++a) {
        const std::size_t k = (idx[i * d + a] + shape[a] - idx[j * d + a]) % shape[a];
        flat = flat * shape[a] + k;
      }
      acc += f[flat] * g[j];
    }
    out[i] = acc * vol;
  }
  return out;
}

namespace {

double recip(double v) { return std::isinf(v) ? 0.0 : 1.0 / v; }

void require_relation(const MultiIndex& p, const MultiIndex& r, const MultiIndex& q, double shift,
                      const char* what) {
  p.validate();
  r.validate();
  q.validate();
  if (p.dims() != r.dims() || p.dims() != q.dims())
    throw InvalidArgument(std::string(what) + ": exponent vectors differ in length");
  for (std::size_t k = 0; k < p.dims(); ++k) {
    const double gap = recip(p.p[k]) + recip(r.p[k]) - shift - recip(q.p[k]);
    if (std::abs(gap) > 1e-12) {
      std::ostringstream os;
      os << what << ": exponent relation fails in component " << k << " by " << gap;
      throw InvalidArgument(os.str());
    }
  }
}

}  // namespace

InequalityCheck holder_check(const GridField& f, const GridField& g, const MultiIndex& p,
                             const MultiIndex& r, const MultiIndex& q, const PermOrder& perm) {
  require_relation(p, r, q, 0.0, "holder_check");
  InequalityCheck c;
  c.lhs = mixed_norm(pointwise_product(f, g), q, perm);
  c.rhs = mixed_norm(f, p, perm) * mixed_norm(g, r, perm);
  c.pass = c.lhs <= c.rhs * (1.0 + 1e-8);
  return c;
}

InequalityCheck young_check(const GridField& f, const GridField& g, const MultiIndex& p,
                            const MultiIndex& r, const MultiIndex& q, const PermOrder& perm) {
  require_relation(p, r, q, 1.0, "young_check");
  for (const auto* m : {&p, &r, &q})
    for (double v : m->p)
      if (v < 1.0) throw InvalidArgument("young_check: exponents must lie in [1, inf]");
  if (!f.same_grid(g)) throw InvalidArgument("young_check: grids differ");
  InequalityCheck c;
  c.lhs = mixed_norm(periodic_convolve(f, g), q, perm);
  c.rhs = mixed_norm(f, p, perm) * mixed_norm(g, r, perm);
  c.pass = c.lhs <= c.rhs * (1.0 + 1e-6);
  return c;
}

}  // namespace chaoslab
