#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/grid_field.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/particles.hpp"

namespace chaoslab {

// Probability vector on labelled atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  // Labels default to 0..n-1. Weights must be nonnegative and sum to 1 within
  // 1e-12; labels must be distinct.
  explicit DiscreteMeasure(std::vector<double> weights, std::vector<std::int64_t> atoms = {});

  static DiscreteMeasure uniform(std::size_t n);
  static DiscreteMeasure dirac(std::size_t n, std::size_t at);

  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<std::int64_t>& atoms() const { return atoms_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
  std::vector<std::int64_t> atoms_;
};

// Equal-weight point cloud in R^d.
struct EmpiricalSample {
  std::vector<double> points;
  std::size_t dim = 1;

  EmpiricalSample() = default;
  EmpiricalSample(std::vector<double> pts, std::size_t d = 1);
  std::size_t size() const { return dim == 0 ? 0 : points.size() / dim; }
};

struct ConvergenceReport {
  std::vector<double> Ns;
  std::vector<double> errors;
  std::vector<double> std_errors;
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;
  double slope_ci_lo = 0.0;
  double slope_ci_hi = 0.0;
  bool weighted = false;
};

// Exact W1 between two 1D empirical measures, int |F_a - F_b| dx. Equal
// counts reduce to the mean absolute difference of sorted samples.
double wasserstein1_1d(const EmpiricalSample& a, const EmpiricalSample& b);

// sup_x |F_a(x) - V(x)| between the empirical CDF of a 1D sample and a CDF
// given on a grid (linear interpolation between centres, 0 / 1 beyond).
double ks_distance_to_cdf(const EmpiricalSample& a, const GridField& cdf);

// Uniform binning of [lo, hi] plus two tail bins for mass outside it.
struct Binning {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t bins = 1;

  double width() const { return (hi - lo) / static_cast<double>(bins); }
  // Masses: index 0 = below lo, 1..bins interior, bins+1 = above hi.
  std::vector<double> masses(std::span<const double> sample) const;
  std::vector<double> masses(const GridField& density) const;
};

// Freedman-Diaconis bin count for a sample of size n with the given
// interquartile range, capped at `cap`.
std::size_t freedman_diaconis_bins(double iqr, double range, std::size_t n, std::size_t cap = 128);
Binning freedman_diaconis_binning(std::span<const double> sample, std::size_t cap = 128);

// Full variation sum_i |p_i - q_i| in [0, 2].
double tv_masses(std::span<const double> p, std::span<const double> q);
double tv_histogram(const EmpiricalSample& a, const EmpiricalSample& b, const Binning& binning);
double tv_histogram(const EmpiricalSample& a, const GridField& density, const Binning& binning);

// Expected TV between the histogram of n iid draws and the exact bin masses,
// sum_i sqrt(2 p_i (1 - p_i) / (pi n)) (normal approximation).
double tv_sampling_floor(std::span<const double> masses, double n);

// H(mu | nu); +inf when mu is not absolutely continuous w.r.t. nu.
double relative_entropy_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct EntropyCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

// ||mu - nu||_var^2 <= 2 H(mu | nu).
EntropyCheck pinsker_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double slack = 1e-12);
// |<mu - nu, f>|^2 <= 2 (1 + log int e^{f^2} dnu) H(mu | nu).
EntropyCheck weighted_pinsker_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    std::span<const double> f, double slack = 1e-12);

// Law on E^N stored as |E|^N weights, index = sum_i x_i |E|^(N-1-i).
struct ProductSpaceMeasure {
  std::size_t alphabet = 2;
  std::size_t particles = 2;
  std::vector<double> weights;

  std::size_t states() const { return weights.size(); }
  static ProductSpaceMeasure tensor_power(const DiscreteMeasure& mu, std::size_t n);
  // First-k marginal.
  ProductSpaceMeasure marginal(std::size_t k) const;
  // Invariance under every adjacent transposition, within tol.
  bool is_symmetric(double tol = 1e-12) const;
};

double relative_entropy_discrete(const ProductSpaceMeasure& mu, const ProductSpaceMeasure& nu);

// H(mu^{N,k} | mu^{(x)k}) <= (2k/N) H(mu^N | mu^{(x)N}) by exhaustive
// summation; |E| <= 4, N <= 5. Rejects asymmetric mu^N.
EntropyCheck marginal_entropy_bound_check(const ProductSpaceMeasure& muN,
                                          const DiscreteMeasure& mu, std::size_t k,
                                          double slack = 1e-10);

struct KacStatistic {
  double tv = 0.0;
  double noise_floor = 0.0;
  std::size_t pairs = 0;
  std::size_t bins_per_axis = 0;
};

// TV between the 2D histogram of particle pairs (X^{2k-1}_T, X^{2k}_T), pooled
// over disjoint pairs and replicas, and rho_T (x) rho_T binned alike.
// Requires >= 100 replicas of 1D ensembles.
KacStatistic kac_chaos_statistic(const std::vector<ParticleEnsemble>& terminal,
                                 const GridField& reference, std::size_t bins_per_axis = 0);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  bool above_threshold = false;  // lambda exceeded 1/(16 e^2 ||phi||^2)
};

// E exp(lambda N |(phibar * eta_xi)(xi_1)|^2) with phibar(x,y) =
// phi(x,y) - (phi * mu)(x) and xi iid from mu; the centring uses
// measure_convolve against `mu_grid`.
MonteCarloEstimate centred_exp_moment(const InteractionKernel& kernel, const DensitySpec& mu,
                                      const GridField& mu_grid, std::size_t N, double lambda,
                                      std::size_t reps, std::uint64_t seed, unsigned threads = 1);

double exp_moment_lambda_threshold(double sup_norm);

// (sup_k |a_k - b_k|)^{2 gamma} over a shared time grid of d-vectors.
double strong_error_path(std::span<const double> particle, std::span<const double> limit,
                         std::size_t d, double gamma);

struct RatePoint {
  double N;
  double mean;
  double std_error;
};

// Weighted least squares of log(mean) on log(N), weights (mean / se)^2; with
// any se == 0 falls back to ordinary least squares. 95% band = +-1.96 se.
ConvergenceReport rate_fit(const std::vector<RatePoint>& points);

}  // namespace chaoslab
