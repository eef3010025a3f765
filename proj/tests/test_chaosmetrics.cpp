#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chaoslab/chaosmetrics.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/random.hpp"

using namespace chaoslab;

TEST(Wasserstein1, Examples) {
  EXPECT_EQ(wasserstein1_1d(EmpiricalSample({0.3, -1.0}), EmpiricalSample({-1.0, 0.3})), 0.0);
  EXPECT_DOUBLE_EQ(wasserstein1_1d(EmpiricalSample({0.0}), EmpiricalSample({1.0})), 1.0);
  EXPECT_DOUBLE_EQ(wasserstein1_1d(EmpiricalSample({0.0, 2.0}), EmpiricalSample({1.0, 3.0})), 1.0);
}

TEST(Wasserstein1, UnequalCountsUseCdfArea) {
  // F_a jumps 0 -> 1 at 0; F_b is 1/2 on [0, 2).
  EXPECT_DOUBLE_EQ(wasserstein1_1d(EmpiricalSample({0.0}), EmpiricalSample({0.0, 2.0})), 1.0);
}

TEST(KsDistance, AgainstUniformCdf) {
  const auto cdf = GridField::sample(0.0, 1.0, 1000, [](double x) { return x; });
  EXPECT_NEAR(ks_distance_to_cdf(EmpiricalSample({0.5}), cdf), 0.5, 1e-3);
  EXPECT_NEAR(ks_distance_to_cdf(EmpiricalSample({0.25, 0.75}), cdf), 0.25, 1e-3);
}

TEST(TotalVariation, Examples) {
  const Binning bins{0.0, 1.0, 4};
  const EmpiricalSample a({0.1, 0.3, 0.6});
  EXPECT_EQ(tv_histogram(a, a, bins), 0.0);
  EXPECT_DOUBLE_EQ(tv_histogram(EmpiricalSample({0.1, 0.2}), EmpiricalSample({0.8, 0.9}), bins), 2.0);
  const std::vector<double> p{0.75, 0.25}, q{0.5, 0.5};
  EXPECT_DOUBLE_EQ(tv_masses(p, q), 0.5);
}

TEST(TotalVariation, TailBinsCatchOutsideMass) {
  const Binning bins{0.0, 1.0, 2};
  const std::vector<double> s{-1.0, 0.2, 5.0, 0.7};
  const auto m = bins.masses(s);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_DOUBLE_EQ(m[0], 0.25);
  EXPECT_DOUBLE_EQ(m[1], 0.25);
  EXPECT_DOUBLE_EQ(m[2], 0.25);
  EXPECT_DOUBLE_EQ(m[3], 0.25);
}

TEST(TotalVariation, SamplingFloorMatchesSimulation) {
  const std::vector<double> masses{0.25, 0.25, 0.5};
  const double n = 400.0;
  const CounterRng rng(3, 0);
  double mean_tv = 0.0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> h(3, 0.0);
    for (int i = 0; i < 400; ++i) {
      const double u = rng.uniform2(static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(i),
                                    StreamTag::kTrial)[0];
      h[u <= 0.25 ? 0 : u <= 0.5 ? 1 : 2] += 1.0 / n;
    }
    mean_tv += tv_masses(h, masses) / trials;
  }
  EXPECT_NEAR(mean_tv, tv_sampling_floor(masses, n), 0.05 * mean_tv);
}

TEST(FreedmanDiaconis, BinCount) {
  // width = 2 * IQR / n^(1/3) = 2 * 1 / 10 = 0.2 over range 4 -> 20 bins.
  EXPECT_EQ(freedman_diaconis_bins(1.0, 4.0, 1000), 20u);
  EXPECT_EQ(freedman_diaconis_bins(1.0, 400.0, 1000, 128), 128u);
}

TEST(RelativeEntropy, Examples) {
  const DiscreteMeasure u({0.5, 0.5});
  EXPECT_EQ(relative_entropy_discrete(u, u), 0.0);
  EXPECT_DOUBLE_EQ(relative_entropy_discrete(DiscreteMeasure::dirac(2, 0), u), std::log(2.0));
  EXPECT_NEAR(relative_entropy_discrete(DiscreteMeasure({0.75, 0.25}), u),
              0.75 * std::log(1.5) + 0.25 * std::log(0.5), 1e-15);
  EXPECT_NEAR(relative_entropy_discrete(DiscreteMeasure({0.75, 0.25}), u), 0.13081, 1e-5);
  EXPECT_TRUE(std::isinf(relative_entropy_discrete(u, DiscreteMeasure::dirac(2, 0))));
}

TEST(DiscreteMeasure, Validation) {
  EXPECT_THROW(DiscreteMeasure({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(DiscreteMeasure({1.2, -0.2}), InvalidArgument);
  EXPECT_THROW(DiscreteMeasure({0.5, 0.5}, {3, 3}), InvalidArgument);
}

TEST(Pinsker, Examples) {
  const DiscreteMeasure u({0.5, 0.5}), m({0.75, 0.25});
  const auto same = pinsker_check(u, u);
  EXPECT_EQ(same.lhs, 0.0);
  EXPECT_EQ(same.rhs, 0.0);
  EXPECT_TRUE(same.pass);
  const auto c = pinsker_check(m, u);
  EXPECT_DOUBLE_EQ(c.lhs, 0.25);
  EXPECT_NEAR(c.rhs, 0.26162, 1e-5);
  EXPECT_TRUE(c.pass);
}

TEST(WeightedPinsker, ZeroFunctionAndEqualMeasures) {
  const DiscreteMeasure u({0.5, 0.5}), m({0.75, 0.25});
  const std::vector<double> zero{0.0, 0.0}, f{2.0, -1.0};
  const auto c0 = weighted_pinsker_check(m, u, zero);
  EXPECT_EQ(c0.lhs, 0.0);
  EXPECT_NEAR(c0.rhs, 2.0 * relative_entropy_discrete(m, u), 1e-15);
  EXPECT_TRUE(c0.pass);
  const auto c1 = weighted_pinsker_check(u, u, f);
  EXPECT_EQ(c1.lhs, 0.0);
  EXPECT_TRUE(c1.pass);
}

TEST(ProductSpace, TensorPowerMarginalAndSymmetry) {
  const DiscreteMeasure mu({0.2, 0.3, 0.5});
  const auto p = ProductSpaceMeasure::tensor_power(mu, 3);
  EXPECT_EQ(p.states(), 27u);
  EXPECT_TRUE(p.is_symmetric());
  const auto m1 = p.marginal(1);
  for (std::size_t a = 0; a < 3; ++a) EXPECT_NEAR(m1.weights[a], mu[a], 1e-15);
  ProductSpaceMeasure asym{2, 2, {0.1, 0.4, 0.2, 0.3}};
  EXPECT_FALSE(asym.is_symmetric());
}

TEST(MarginalEntropyBound, ProductMixtureAndFullMarginal) {
  const DiscreteMeasure mu({0.5, 0.5});
  const auto prod = ProductSpaceMeasure::tensor_power(mu, 4);
  const auto c0 = marginal_entropy_bound_check(prod, mu, 2);
  EXPECT_NEAR(c0.lhs, 0.0, 1e-15);
  EXPECT_NEAR(c0.rhs, 0.0, 1e-15);
  EXPECT_TRUE(c0.pass);

  const auto a = ProductSpaceMeasure::tensor_power(DiscreteMeasure({0.2, 0.8}), 4);
  const auto b = ProductSpaceMeasure::tensor_power(DiscreteMeasure({0.8, 0.2}), 4);
  ProductSpaceMeasure mix{2, 4, std::vector<double>(16)};
  for (std::size_t s = 0; s < 16; ++s) mix.weights[s] = 0.5 * a.weights[s] + 0.5 * b.weights[s];
  const auto c2 = marginal_entropy_bound_check(mix, mu, 2);
  EXPECT_TRUE(c2.pass);
  EXPECT_GT(c2.lhs, 0.0);
  const auto c4 = marginal_entropy_bound_check(mix, mu, 4);
  EXPECT_TRUE(c4.pass);
  EXPECT_LE(c4.lhs, c4.rhs);
}

TEST(MarginalEntropyBound, RejectsAsymmetric) {
  ProductSpaceMeasure asym{2, 2, {0.1, 0.4, 0.2, 0.3}};
  EXPECT_THROW(marginal_entropy_bound_check(asym, DiscreteMeasure({0.5, 0.5}), 1), InvalidArgument);
}

TEST(KacStatistic, IndependentSamplesSitAtNoiseLevel) {
  const auto spec = DensitySpec::gaussian(0.0, 1.0);
  const auto reference = spec.to_grid(-8.0, 8.0, 800);
  std::vector<ParticleEnsemble> terminal;
  for (std::uint32_t r = 0; r < 200; ++r) terminal.push_back(sample_initial({spec}, 64, 31, r));
  const auto k = kac_chaos_statistic(terminal, reference);
  EXPECT_EQ(k.pairs, 200u * 32u);
  EXPECT_LT(k.tv, 1.5 * k.noise_floor);
}

TEST(KacStatistic, RequiresEnoughReplicas) {
  const auto spec = DensitySpec::gaussian(0.0, 1.0);
  std::vector<ParticleEnsemble> terminal{sample_initial({spec}, 8, 1)};
  EXPECT_THROW(kac_chaos_statistic(terminal, spec.to_grid(-8, 8, 100)), InvalidArgument);
}

TEST(ExpMoment, ZeroKernelGivesOne) {
  const auto mu = DensitySpec::uniform(0.0, 1.0);
  const auto r = centred_exp_moment(make_zero_kernel(), mu, mu.to_grid(0.0, 1.0, 128), 50, 0.01, 100, 1);
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.std_error, 0.0);
  EXPECT_FALSE(r.above_threshold);
}

TEST(ExpMoment, ThresholdFlag) {
  const double thr = exp_moment_lambda_threshold(1.0);
  EXPECT_DOUBLE_EQ(thr, 1.0 / (16.0 * std::exp(2.0)));
  const auto mu = DensitySpec::uniform(0.0, 1.0);
  const auto r = centred_exp_moment(make_rank_kernel(), mu, mu.to_grid(0.0, 1.0, 256), 10, 2.0 * thr, 50, 2);
  EXPECT_TRUE(r.above_threshold);
}

TEST(StrongError, Examples) {
  const std::vector<double> a{0.0, 1.0, 2.0}, b{0.5, 1.5, 2.5};
  EXPECT_EQ(strong_error_path(a, a, 1, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(strong_error_path(a, b, 1, 1.0), 0.25);
}

TEST(RateFit, ExactPowerLaws) {
  std::vector<RatePoint> inv, isqrt;
  for (double n : {64.0, 128.0, 256.0, 512.0, 1024.0}) {
    inv.push_back({n, 3.0 / n, 0.1 * 3.0 / n});
    isqrt.push_back({n, 2.0 / std::sqrt(n), 0.0});
  }
  EXPECT_NEAR(rate_fit(inv).slope, -1.0, 1e-12);
  EXPECT_TRUE(rate_fit(inv).weighted);
  EXPECT_NEAR(rate_fit(isqrt).slope, -0.5, 1e-12);
  EXPECT_FALSE(rate_fit(isqrt).weighted);
}

TEST(RateFit, NoisyDataAgainstDirectRegression) {
  const CounterRng rng(8, 0);
  std::vector<RatePoint> pts;
  std::vector<double> lx, ly;
  for (int k = 0; k < 7; ++k) {
    const double n = 64.0 * std::pow(2.0, k);
    const double z = rng.normal2(0, static_cast<std::uint32_t>(k), StreamTag::kTrial)[0];
    const double m = (1.0 / n) * (1.0 + 0.1 * z);
    pts.push_back({n, m, 0.1 * m});
    lx.push_back(std::log(n));
    ly.push_back(std::log(m));
  }
  // Equal relative SE means equal weights: plain least squares applies.
  double mx = 0.0, my = 0.0;
  for (int k = 0; k < 7; ++k) {
    mx += lx[k] / 7;
    my += ly[k] / 7;
  }
  double sxy = 0.0, sxx = 0.0;
  for (int k = 0; k < 7; ++k) {
    sxy += (lx[k] - mx) * (ly[k] - my);
    sxx += (lx[k] - mx) * (lx[k] - mx);
  }
  const auto r = rate_fit(pts);
  EXPECT_NEAR(r.slope, sxy / sxx, 1e-12);
  EXPECT_LE(r.slope_ci_lo, -1.0);
  EXPECT_GE(r.slope_ci_hi, -1.0);
  EXPECT_NEAR(r.slope_ci_hi - r.slope, 1.96 * r.slope_se, 1e-12);
}
