#include <algorithm>
#include <cmath>
#include <numeric>

#include "chaoslab/harness/experiments.hpp"
#include "chaoslab/mixedlp.hpp"
#include "chaoslab/parallel.hpp"
#include "common.hpp"

namespace chaoslab::harness {

using detail::add_check;
using detail::add_row;

namespace {

// Sequential uniforms for one randomized trial.
class TrialDraws {
 public:
  TrialDraws(std::uint64_t seed, std::size_t trial) : rng_(seed, static_cast<std::uint32_t>(trial)) {}

  double uniform() {
    if (k_ % 2 == 0) buf_ = rng_.uniform2(0, static_cast<std::uint32_t>(k_ / 2), StreamTag::kTrial);
    return buf_[k_++ % 2];
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t lo, std::size_t hi) {  // inclusive
    return std::min(hi, lo + static_cast<std::size_t>(uniform() * static_cast<double>(hi - lo + 1)));
  }

  std::vector<double> simplex(std::size_t n, double zero_prob = 0.0) {
    std::vector<double> w(n);
    double s = 0.0;
    for (auto& v : w) {
      v = uniform() < zero_prob ? 0.0 : -std::log(uniform());
      s += v;
    }
    if (s == 0.0) {
      w[index(0, n - 1)] = 1.0;
      return w;
    }
    for (auto& v : w) v /= s;
    return w;
  }

 private:
  CounterRng rng_;
  std::array<double, 2> buf_{};
  std::size_t k_ = 0;
};

DiscreteMeasure measure_of(std::vector<double> w) {
  // Absorb roundoff so the weights sum to one within the constructor's tolerance.
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= s;
  return DiscreteMeasure(std::move(w));
}

// Random pair (mu, nu) with mu << nu. Every third trial puts mu close to nu,
// where the inequalities are nearly tight.
std::pair<DiscreteMeasure, DiscreteMeasure> random_pair(TrialDraws& r, std::size_t trial) {
  const std::size_t n = r.index(2, 8);
  auto nu = r.simplex(n);
  for (auto& v : nu) v = 0.9 * v + 0.1 / static_cast<double>(n);
  std::vector<double> mu;
  if (trial % 3 == 0) {
    const double t = std::pow(10.0, r.uniform(-4.0, -0.5));
    const auto dir = r.simplex(n);
    for (std::size_t i = 0; i < n; ++i) mu.push_back((1.0 - t) * nu[i] + t * dir[i]);
  } else {
    mu = r.simplex(n, 0.3);
  }
  return {measure_of(mu), measure_of(nu)};
}

// Symmetric law on E^N: either a mixture of two tensor powers or weights
// that depend only on the multiset of coordinates.
ProductSpaceMeasure random_symmetric(TrialDraws& r, std::size_t E, std::size_t N) {
  ProductSpaceMeasure m;
  m.alphabet = E;
  m.particles = N;
  if (r.uniform() < 0.5) {
    const auto a = ProductSpaceMeasure::tensor_power(measure_of(r.simplex(E)), N);
    const auto b = ProductSpaceMeasure::tensor_power(measure_of(r.simplex(E)), N);
    const double w = r.uniform();
    m.weights.resize(a.states());
    for (std::size_t s = 0; s < a.states(); ++s) m.weights[s] = w * a.weights[s] + (1.0 - w) * b.weights[s];
    return m;
  }
  std::size_t states = 1;
  for (std::size_t i = 0; i < N; ++i) states *= E;
  // Multiset key: counts of each symbol in base N + 1.
  std::vector<std::size_t> key(states);
  std::size_t keys = 1;
  for (std::size_t i = 0; i < E; ++i) keys *= N + 1;
  for (std::size_t s = 0; s < states; ++s) {
    std::vector<std::size_t> count(E, 0);
    for (std::size_t x = s, i = 0; i < N; ++i, x /= E) ++count[x % E];
    std::size_t k = 0;
    for (auto c : count) k = k * (N + 1) + c;
    key[s] = k;
  }
  std::vector<double> per_key(keys);
  for (auto& v : per_key) v = r.uniform() < 0.2 ? 0.0 : -std::log(r.uniform());
  m.weights.resize(states);
  double total = 0.0;
  for (std::size_t s = 0; s < states; ++s) total += m.weights[s] = per_key[key[s]];
  if (total == 0.0) {
    std::fill(m.weights.begin(), m.weights.end(), 1.0);
    total = static_cast<double>(states);
  }
  for (auto& v : m.weights) v /= total;
  return m;
}

struct TrialTally {
  std::size_t violations = 0;
  double worst_gap = -kInf;  // max of lhs - rhs
};

TrialTally tally(const std::vector<EntropyCheck>& checks) {
  TrialTally t;
  for (const auto& c : checks) {
    if (!c.pass) ++t.violations;
    t.worst_gap = std::max(t.worst_gap, c.lhs - c.rhs);
  }
  return t;
}

}  // namespace

ExperimentResult run_entropy_suite(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto trials = static_cast<std::size_t>(c.param("trials", 10000));
  const double slack = c.param("slack", 1e-10);
  const double f_sup = c.param("f_sup", 2.0);
  const auto seed = detail::use_seed(out, c.seed, "trials");

  std::vector<EntropyCheck> pin(trials), wpin(trials), dim(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    TrialDraws r(seed, t);
    const auto [mu, nu] = random_pair(r, t);
    pin[t] = pinsker_check(mu, nu, slack);
    std::vector<double> f(mu.size());
    for (auto& v : f) v = r.uniform(-f_sup, f_sup);
    wpin[t] = weighted_pinsker_check(mu, nu, f, slack);

    const std::size_t E = r.index(2, 4), N = r.index(2, 5), k = r.index(1, N - 1);
    const auto muN = random_symmetric(r, E, N);
    // Reference law: the one-particle marginal or an unrelated full-support law.
    DiscreteMeasure ref = r.uniform() < 0.5 ? measure_of(muN.marginal(1).weights) : measure_of(r.simplex(E));
    std::vector<double> w = ref.weights();
    bool full = std::all_of(w.begin(), w.end(), [](double v) { return v > 0.0; });
    if (!full) {
      for (auto& v : w) v = 0.5 * v + 0.5 / static_cast<double>(E);
      ref = measure_of(w);
    }
    dim[t] = marginal_entropy_bound_check(muN, ref, k, slack);
  });

  const std::pair<const char*, const std::vector<EntropyCheck>*> suites[] = {
      {"pinsker", &pin}, {"weighted_pinsker", &wpin}, {"marginal_entropy_bound", &dim}};
  for (const auto& [name, checks] : suites) {
    const auto t = tally(*checks);
    add_row(out, c.experiment, trials, std::string(name) + "_violations", static_cast<double>(t.violations));
    add_row(out, c.experiment, trials, std::string(name) + "_worst_gap", t.worst_gap);
    add_check(out, fmt::format("{}: zero violations in {} trials", name, trials), t.violations == 0,
              fmt::format("{} violations, max lhs - rhs = {:.3e}", t.violations, t.worst_gap));
  }
  return out;
}

namespace {

GridField random_field(TrialDraws& r, const std::vector<std::size_t>& shape, double zero_prob) {
  std::vector<double> origin, spacing;
  for (std::size_t a = 0; a < shape.size(); ++a) {
    origin.push_back(r.uniform(-1.0, 1.0));
    spacing.push_back(r.uniform(0.05, 0.5));
  }
  GridField f(origin, spacing, shape);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = r.uniform() < zero_prob ? 0.0 : r.uniform(-3.0, 3.0);
  return f;
}

GridField with_grid_of(const GridField& like, TrialDraws& r, double zero_prob) {
  GridField g = like;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = r.uniform() < zero_prob ? 0.0 : r.uniform(-3.0, 3.0);
  return g;
}

PermOrder random_perm(TrialDraws& r, std::size_t d) {
  PermOrder p = PermOrder::identity(d);
  for (std::size_t i = d; i-- > 1;) std::swap(p.axes[i], p.axes[r.index(0, i)]);
  return p;
}

std::vector<std::size_t> random_shape(TrialDraws& r) {
  const std::size_t d = r.index(1, 3);
  std::vector<std::size_t> shape;
  for (std::size_t a = 0; a < d; ++a) shape.push_back(r.index(2, d == 3 ? 4 : 7));
  return shape;
}

double inv(double x) { return x == 0.0 ? kInf : 1.0 / x; }

// |x|^{-1/2} on |x| <= 1 in d = 2, zero elsewhere, on [-2, 2]^2 with the
// origin at a cell corner.
GridField truncated_power(double dx) {
  const auto n = static_cast<std::size_t>(std::llround(4.0 / dx));
  GridField f({-2.0, -2.0}, {dx, dx}, {n, n});
  std::vector<double> x(2);
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.center_of(i, x);
    const double r = std::hypot(x[0], x[1]);
    f[i] = r <= 1.0 ? 1.0 / std::sqrt(r) : 0.0;
  }
  return f;
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

ExperimentResult run_mixedlp_suite(const ExperimentConfig& c, unsigned threads) {
  ExperimentResult out;
  const auto& id = c.experiment;
  const auto trials = static_cast<std::size_t>(c.param("trials", 1000));
  const auto seed = detail::use_seed(out, c.seed, "trials");

  // (a) Randomized Hoelder and Young trials.
  std::vector<InequalityCheck> hol(trials), yng(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    TrialDraws r(seed, t);
    const auto shape = random_shape(r);
    const std::size_t d = shape.size();
    const auto f = random_field(r, shape, 0.2);
    const auto g = with_grid_of(f, r, 0.2);
    const auto perm = random_perm(r, d);
    MultiIndex p, q, s;
    for (std::size_t a = 0; a < d; ++a) {
      const double qa = r.uniform(0.5, 4.0);
      const double pa = r.uniform() < 0.2 ? kInf : qa * r.uniform(1.0, 8.0);
      q.p.push_back(qa);
      p.p.push_back(pa);
      s.p.push_back(inv(1.0 / qa - (std::isinf(pa) ? 0.0 : 1.0 / pa)));
    }
    hol[t] = holder_check(f, g, p, s, q, perm);

    MultiIndex yp, yr, yq;
    for (std::size_t a = 0; a < d; ++a) {
      const double u = r.uniform() < 0.1 ? 0.0 : r.uniform();
      const double v = r.uniform() < 0.1 ? 1.0 : r.uniform(1.0 - u, 1.0);
      yp.p.push_back(inv(u));
      yr.p.push_back(inv(v));
      yq.p.push_back(inv(u + v - 1.0));
    }
    yng[t] = young_check(f, g, yp, yr, yq, perm);
  });
  for (const auto& [name, checks] : {std::pair{"holder", &hol}, std::pair{"young", &yng}}) {
    std::size_t bad = 0;
    double worst = 0.0;
    for (const auto& k : *checks) {
      bad += k.pass ? 0 : 1;
      if (k.rhs > 0.0) worst = std::max(worst, k.lhs / k.rhs);
    }
    add_row(out, id, trials, std::string(name) + "_violations", static_cast<double>(bad));
    add_row(out, id, trials, std::string(name) + "_worst_ratio", worst);
    add_check(out, fmt::format("{}: zero violations in {} trials", name, trials), bad == 0,
              fmt::format("{} violations, max lhs/rhs = {:.6f}", bad, worst));
  }

  // (b) Separable factorization ||g(x) h(y)|| = ||g||_{p_x} ||h||_{p_y}.
  {
    TrialDraws r(seed, trials + 1);
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      const std::size_t nx = r.index(3, 20), ny = r.index(3, 20);
      const double hx = r.uniform(0.01, 0.3), hy = r.uniform(0.01, 0.3);
      GridField gx({0.0}, {hx}, {nx}), gy({0.0}, {hy}, {ny}), f({0.0, 0.0}, {hx, hy}, {nx, ny});
      for (std::size_t i = 0; i < nx; ++i) gx[i] = r.uniform(-2.0, 2.0);
      for (std::size_t j = 0; j < ny; ++j) gy[j] = r.uniform(-2.0, 2.0);
      for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) f[i * ny + j] = gx[i] * gy[j];
      const double px = r.uniform() < 0.2 ? kInf : r.uniform(0.5, 6.0);
      const double py = r.uniform() < 0.2 ? kInf : r.uniform(0.5, 6.0);
      const bool x_outer = r.uniform() < 0.5;
      PermOrder perm;
      perm.axes = x_outer ? std::vector<std::size_t>{0, 1} : std::vector<std::size_t>{1, 0};
      MultiIndex p;
      p.p = x_outer ? std::vector<double>{px, py} : std::vector<double>{py, px};
      const double lhs = mixed_norm(f, p, perm);
      const double rhs = mixed_norm(gx, MultiIndex::uniform(1, px), PermOrder::identity(1)) *
                         mixed_norm(gy, MultiIndex::uniform(1, py), PermOrder::identity(1));
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
    add_row(out, id, 0, "separable_rel_error", worst);
    add_check(out, "separable norm factorizes within 1e-6", worst <= 1e-6, fmt::format("max rel error {:.3e}", worst));
  }

  // Order matters: ||f||_{L^1_x(L^inf_y)} differs from ||f||_{L^inf_y(L^1_x)}
  // for f = indicator of the diagonal.
  {
    const std::size_t n = 16;
    GridField f({0.0, 0.0}, {1.0 / n, 1.0 / n}, {n, n});
    for (std::size_t i = 0; i < n; ++i) f[i * n + i] = 1.0;
    MultiIndex p;
    p.p = {1.0, kInf};
    PermOrder xy{{0, 1}}, yx{{1, 0}};
    const double a = mixed_norm(f, p, xy);
    MultiIndex p2;
    p2.p = {kInf, 1.0};
    const double b = mixed_norm(f, p2, yx);
    add_row(out, id, 0, "order_witness_x_outer", a);
    add_row(out, id, 0, "order_witness_y_outer", b);
    add_check(out, "integration order changes the norm", std::abs(a - b) > 1e-3 * std::max(a, b),
              fmt::format("{:.6g} vs {:.6g}", a, b));
    const double scaled = [&] {
      GridField g = f;
      for (std::size_t i = 0; i < g.size(); ++i) g[i] *= -2.5;
      return mixed_norm(g, p, xy);
    }();
    add_check(out, "absolute homogeneity", std::abs(scaled - 2.5 * a) <= 1e-12 * a,
              fmt::format("||-2.5 f|| = {:.12g}, 2.5 ||f|| = {:.12g}", scaled, 2.5 * a));
  }

  // (c) Refinement study of the localized norm of |x|^{-1/2} 1_{|x|<=1}, d = 2.
  {
    const auto dxs = c.list("refine_dx", {1.0 / 64, 1.0 / 128, 1.0 / 256});
    const double stable_p = c.param("stable_p", 3.0), growing_p = c.param("growing_p", 6.0);
    std::vector<double> stable, growing;
    for (double dx : dxs) {
      const auto f = truncated_power(dx);
      const auto loc = LocalizationConfig::lattice(f, 1.0);
      const auto perm = PermOrder::identity(2);
      stable.push_back(localized_mixed_norm(f, MultiIndex::uniform(2, stable_p), perm, loc));
      growing.push_back(localized_mixed_norm(f, MultiIndex::uniform(2, growing_p), perm, loc));
      const auto N = static_cast<std::size_t>(std::llround(1.0 / dx));
      add_row(out, id, N, fmt::format("localized_norm_p{}", stable_p), stable.back());
      add_row(out, id, N, fmt::format("localized_norm_p{}", growing_p), growing.back());
    }
    double worst_ratio = 0.0;
    bool grows = true;
    for (std::size_t k = 1; k < dxs.size(); ++k) {
      worst_ratio = std::max(worst_ratio, stable[k] / stable[k - 1]);
      grows = grows && growing[k] > growing[k - 1];
    }
    const double total = growing.back() / growing.front();
    add_check(out, fmt::format("p = {}: ratio across dx halvings < 1.05", stable_p), worst_ratio < 1.05,
              fmt::format("max ratio {:.5f}", worst_ratio));
    add_check(out, fmt::format("p = {}: norm grows under refinement, total ratio > 1.2", growing_p),
              grows && total > 1.2, fmt::format("ratios {}, total {:.4f}", detail::join_values([&] {
                                                  std::vector<double> r;
                                                  for (std::size_t k = 1; k < growing.size(); ++k)
                                                    r.push_back(growing[k] / growing[k - 1]);
                                                  return r;
                                                }()),
                                                total));
  }

  // (d) Heat semigroup decay: sup over Gaussian bumps of ||P_t f||_inf /
  // ||f||_p behaves like t^{-1/(2p)} in d = 1.
  {
    const auto ps = c.list("decay_p", {2.0, 4.0});
    const double L = c.param("decay_half_width", 24.0), h = c.param("decay_dx", 0.02);
    const auto cells = static_cast<std::size_t>(std::llround(2.0 * L / h));
    std::vector<double> ts, widths;
    for (int k = 0; k < 7; ++k) ts.push_back(0.02 * std::pow(2.0, k));
    for (int j = 0; j < 15; ++j) widths.push_back(0.05 * std::pow(2.0, j / 2.0));
    for (double p : ps) {
      std::vector<double> lx, ly;
      for (double t : ts) {
        double best = 0.0;
        for (double w : widths) {
          GridField f = GridField::sample(-L, L, cells, [&](double x) { return std::exp(-0.5 * x * x / (w * w)); });
          const double norm = mixed_norm(f, MultiIndex::uniform(1, p), PermOrder::identity(1));
          best = std::max(best, heat_semigroup_apply(f, t).sup_abs() / norm);
        }
        lx.push_back(std::log(t));
        ly.push_back(std::log(best));
      }
      const double slope = ols_slope(lx, ly), target = -0.5 / p;
      add_row(out, id, 0, fmt::format("decay_exponent_p{}", p), slope);
      add_check(out, fmt::format("p = {}: decay exponent within 0.1 of {}", p, target),
                std::abs(slope - target) <= 0.1, fmt::format("fitted {:.4f}", slope));
    }
  }
  return out;
}

}  // namespace chaoslab::harness
