#include "chaoslab/chaosmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/parallel.hpp"
#include "chaoslab/random.hpp"

namespace chaoslab {

EmpiricalSample::EmpiricalSample(std::vector<double> pts, std::size_t d) : points(std::move(pts)), dim(d) {
  if (dim == 0) throw InvalidArgument("EmpiricalSample: dimension must be >= 1");
  if (points.empty()) throw InvalidArgument("EmpiricalSample: empty sample");
  if (points.size() % dim != 0) throw InvalidArgument("EmpiricalSample: size is not a multiple of dim");
  for (double v : points)
    if (!std::isfinite(v)) throw InvalidArgument("EmpiricalSample: non-finite point");
}

double wasserstein1_1d(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.dim != 1 || b.dim != 1) throw InvalidArgument("wasserstein1_1d: one-dimensional samples only");
  if (a.points.empty() || b.points.empty()) throw InvalidArgument("wasserstein1_1d: empty sample");
  std::vector<double> x = a.points, y = b.points;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  if (x.size() == y.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
    return s / static_cast<double>(x.size());
  }
  // int |F_a - F_b| over the merged breakpoints.
  const double na = static_cast<double>(x.size()), nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(x[0], y[0]), total = 0.0;
  while (i < x.size() || j < y.size()) {
    const double next = j >= y.size() || (i < x.size() && x[i] <= y[j]) ? x[i] : y[j];
    total += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (next - prev);
    while (i < x.size() && x[i] == next) ++i;
    while (j < y.size() && y[j] == next) ++j;
    prev = next;
  }
  return total;
}

double ks_distance_to_cdf(const EmpiricalSample& a, const GridField& cdf) {
  if (a.dim != 1 || cdf.dims() != 1) throw InvalidArgument("ks_distance_to_cdf: one dimension only");
  std::vector<double> x = a.points;
  std::sort(x.begin(), x.end());
  auto V = [&](double v) {
    if (v < cdf.lower(0)) return 0.0;
    if (v > cdf.upper(0)) return 1.0;
    return cdf.interpolate(v);
  };
  const double n = static_cast<double>(x.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = V(x[i]);
    sup = std::max({sup, std::abs(static_cast<double>(i + 1) / n - v), std::abs(static_cast<double>(i) / n - v)});
  }
  return sup;
}

std::vector<double> Binning::masses(std::span<const double> sample) const {
  if (sample.empty()) throw InvalidArgument("Binning::masses: empty sample");
  std::vector<double> m(bins + 2, 0.0);
  const double w = width();
  for (double x : sample) {
    std::size_t k;
    if (x < lo) {
      k = 0;
    } else if (x > hi) {
      k = bins + 1;
    } else {
      k = 1 + std::min(bins - 1, static_cast<std::size_t>((x - lo) / w));
    }
    m[k] += 1.0;
  }
  for (double& v : m) v /= static_cast<double>(sample.size());
  return m;
}

std::vector<double> Binning::masses(const GridField& density) const {
  if (density.dims() != 1) throw InvalidArgument("Binning::masses: one-dimensional density only");
  std::vector<double> m(bins + 2, 0.0);
  const double w = width(), h = density.spacing()[0];
  auto edge = [&](std::size_t k) { return k == 0 ? -std::numeric_limits<double>::infinity() : k == bins + 2 ? std::numeric_limits<double>::infinity() : lo + static_cast<double>(k - 1) * w; };
  for (std::size_t c = 0; c < density.size(); ++c) {
    const double a = density.lower(0) + static_cast<double>(c) * h, b = a + h;
    // Distribute cell c over the bins it overlaps.
    std::size_t k0 = a < lo ? 0 : a >= hi ? bins + 1 : 1 + std::min(bins - 1, static_cast<std::size_t>((a - lo) / w));
    for (std::size_t k = k0; k < bins + 2; ++k) {
      const double lo_k = edge(k), hi_k = edge(k + 1);
      if (lo_k >= b) break;
      const double overlap = std::min(b, hi_k) - std::max(a, lo_k);
      if (overlap > 0.0) m[k] += density[c] * overlap;
    }
  }
  return m;
}

std::size_t freedman_diaconis_bins(double iqr, double range, std::size_t n, std::size_t cap) {
  if (n == 0 || cap == 0) throw InvalidArgument("freedman_diaconis_bins: need n > 0 and cap > 0");
  if (!(range > 0.0)) return 1;
  if (!(iqr > 0.0))
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))), 1, cap);
  const double h = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(range / h)), 1, cap);
}

namespace {

double quantile_sorted(const std::vector<double>& s, double q) {
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  if (k + 1 >= s.size()) return s.back();
  return s[k] + (pos - static_cast<double>(k)) * (s[k + 1] - s[k]);
}

}  // namespace

Binning freedman_diaconis_binning(std::span<const double> sample, std::size_t cap) {
  if (sample.empty()) throw InvalidArgument("freedman_diaconis_binning: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  Binning b;
  b.lo = s.front();
  b.hi = s.back();
  if (!(b.hi > b.lo)) b.hi = b.lo + 1.0;
  b.bins = freedman_diaconis_bins(quantile_sorted(s, 0.75) - quantile_sorted(s, 0.25), b.hi - b.lo,
                                  s.size(), cap);
  return b;
}

double tv_masses(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw InvalidArgument("tv_masses: mass vectors differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return std::min(2.0, s);
}

double tv_histogram(const EmpiricalSample& a, const EmpiricalSample& b, const Binning& binning) {
  if (a.dim != 1 || b.dim != 1) throw InvalidArgument("tv_histogram: one-dimensional samples only");
  return tv_masses(binning.masses(a.points), binning.masses(b.points));
}

double tv_histogram(const EmpiricalSample& a, const GridField& density, const Binning& binning) {
  if (a.dim != 1) throw InvalidArgument("tv_histogram: one-dimensional samples only");
  return tv_masses(binning.masses(a.points), binning.masses(density));
}

double tv_sampling_floor(std::span<const double> masses, double n) {
  if (!(n > 0.0)) throw InvalidArgument("tv_sampling_floor: n must be positive");
  double s = 0.0;
  for (double p : masses) s += std::sqrt(2.0 * std::max(0.0, p * (1.0 - p)) / (std::numbers::pi * n));
  return s;
}

KacStatistic kac_chaos_statistic(const std::vector<ParticleEnsemble>& terminal,
                                 const GridField& reference, std::size_t bins_per_axis) {
  if (terminal.size() < 100)
    throw InvalidArgument("kac_chaos_statistic: need at least 100 replicas, got " +
                          std::to_string(terminal.size()));
  if (reference.dims() != 1) throw InvalidArgument("kac_chaos_statistic: one-dimensional reference only");
  std::vector<double> first, second;
  for (const auto& e : terminal) {
    if (e.dim() != 1) throw InvalidArgument("kac_chaos_statistic: one-dimensional ensembles only");
    if (e.size() < 2) throw InvalidArgument("kac_chaos_statistic: ensembles need at least 2 particles");
    for (std::size_t k = 0; k + 1 < e.size(); k += 2) {
      first.push_back(e.position(k)[0]);
      second.push_back(e.position(k + 1)[0]);
    }
  }
  Binning b = freedman_diaconis_binning(first, 128);
  if (bins_per_axis > 0) b.bins = bins_per_axis;
  const std::size_t B = b.bins + 2;
  const auto ref = b.masses(reference);
  std::vector<double> joint(B * B, 0.0);
  auto bin_of = [&](double x) -> std::size_t {
    if (x < b.lo) return 0;
    if (x > b.hi) return b.bins + 1;
    return 1 + std::min(b.bins - 1, static_cast<std::size_t>((x - b.lo) / b.width()));
  };
  const double M = static_cast<double>(first.size());
  for (std::size_t k = 0; k < first.size(); ++k) joint[bin_of(first[k]) * B + bin_of(second[k])] += 1.0 / M;
  KacStatistic out;
  out.pairs = first.size();
  out.bins_per_axis = b.bins;
  std::vector<double> product(B * B);
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = 0; j < B; ++j) product[i * B + j] = ref[i] * ref[j];
  out.tv = tv_masses(joint, product);
  out.noise_floor = tv_sampling_floor(product, M);
  return out;
}

double exp_moment_lambda_threshold(double sup_norm) {
  if (!(sup_norm > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / (16.0 * std::exp(2.0) * sup_norm * sup_norm);
}

MonteCarloEstimate centred_exp_moment(const InteractionKernel& kernel, const DensitySpec& mu,
                                      const GridField& mu_grid, std::size_t N, double lambda,
                                      std::size_t reps, std::uint64_t seed, unsigned threads) {
  if (!kernel.is_bounded() || !kernel.sup_norm())
    throw InvalidArgument("centred_exp_moment: kernel must be bounded with a known sup norm");
  if (kernel.dim() != 1 || mu.dim() != 1) throw InvalidArgument("centred_exp_moment: one dimension only");
  if (N == 0 || reps < 2) throw InvalidArgument("centred_exp_moment: need N >= 1 and reps >= 2");
  if (!(lambda >= 0.0)) throw InvalidArgument("centred_exp_moment: lambda must be >= 0");
  mu_grid.require_density(1e-6, "centred_exp_moment");
  std::vector<double> values(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const CounterRng rng(seed, static_cast<std::uint32_t>(r));
    std::vector<double> xi(N);
    for (std::size_t i = 0; i < N; ++i)
      mu.draw(rng, static_cast<std::uint32_t>(i), 0, StreamTag::kMonteCarlo, std::span<double>(&xi[i], 1));
    const double x = xi[0];
    const double centre = measure_convolve(kernel, 0.0, ConstPoint(&x, 1), mu_grid)[0];
    double s = 0.0;
    for (std::size_t j = 0; j < N; ++j) s += kernel.eval_scalar(0.0, x, xi[j]) - centre;
    s /= static_cast<double>(N);
    values[r] = std::exp(lambda * static_cast<double>(N) * s * s);
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(reps);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(reps - 1);
  MonteCarloEstimate out;
  out.estimate = mean;
  out.std_error = std::sqrt(var / static_cast<double>(reps));
  out.above_threshold = lambda > exp_moment_lambda_threshold(*kernel.sup_norm());
  return out;
}

double strong_error_path(std::span<const double> particle, std::span<const double> limit,
                         std::size_t d, double gamma) {
  if (d == 0 || particle.size() != limit.size() || particle.size() % d != 0)
    throw InvalidArgument("strong_error_path: paths are not on a common time grid");
  if (!(gamma > 0.0)) throw InvalidArgument("strong_error_path: gamma must be positive");
  double sup = 0.0;
  for (std::size_t k = 0; k < particle.size(); k += d) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) r2 += (particle[k + a] - limit[k + a]) * (particle[k + a] - limit[k + a]);
    sup = std::max(sup, std::sqrt(r2));
  }
  return sup == 0.0 ? 0.0 : std::pow(sup, 2.0 * gamma);
}

ConvergenceReport rate_fit(const std::vector<RatePoint>& input) {
  std::vector<RatePoint> pts = input;
  std::sort(pts.begin(), pts.end(), [](const RatePoint& a, const RatePoint& b) { return a.N < b.N; });
  std::set<double> distinct;
  for (const auto& p : pts) {
    if (!(p.N > 0.0) || !(p.mean > 0.0) || !(p.std_error >= 0.0))
      throw InvalidArgument("rate_fit: need N > 0, mean error > 0 and std error >= 0");
    distinct.insert(p.N);
  }
  if (distinct.size() < 4) throw InvalidArgument("rate_fit: need at least 4 distinct N values");
  if (distinct.size() != pts.size()) throw InvalidArgument("rate_fit: N values must be distinct");

  const bool weighted = std::all_of(pts.begin(), pts.end(), [](const RatePoint& p) { return p.std_error > 0.0; });
  const std::size_t n = pts.size();
  std::vector<double> x(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(pts[i].N);
    y[i] = std::log(pts[i].mean);
    w[i] = weighted ? std::pow(pts[i].mean / pts[i].std_error, 2.0) : 1.0;
  }
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) sw += w[i], sx += w[i] * x[i], sy += w[i] * y[i];
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
  }
  ConvergenceReport r;
  r.weighted = weighted;
  r.slope = sxy / sxx;
  r.intercept = ym - r.slope * xm;
  if (weighted) {
    // Weights are inverse variances of log(mean), so the covariance is absolute.
    r.slope_se = std::sqrt(1.0 / sxx);
  } else {
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = y[i] - r.intercept - r.slope * x[i];
      rss += e * e;
    }
    r.slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  r.slope_ci_lo = r.slope - 1.96 * r.slope_se;
  r.slope_ci_hi = r.slope + 1.96 * r.slope_se;
  for (const auto& p : pts) {
    r.Ns.push_back(p.N);
    r.errors.push_back(p.mean);
    r.std_errors.push_back(p.std_error);
  }
  return r;
}

}  // namespace chaoslab
