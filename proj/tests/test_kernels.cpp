#include <gtest/gtest.h>

#include <cmath>

#include "chaoslab/errors.hpp"
#include "chaoslab/kernels.hpp"
#include "chaoslab/particles.hpp"

using namespace chaoslab;

namespace {

ParticleEnsemble line_ensemble(std::vector<double> xs) {
  const std::size_t n = xs.size();
  return ParticleEnsemble(n, 1, std::move(xs));
}

ScalarCoefficient constant_c(double c) {
  return [c](double, ConstPoint, ConstPoint) { return c; };
}

}  // namespace

TEST(RankKernel, Values) {
  const auto k = make_rank_kernel();
  EXPECT_EQ(k.eval_scalar(0.0, 1.0, 0.5), 1.0);
  EXPECT_EQ(k.eval_scalar(0.0, 0.3, 0.3), 0.0);
  EXPECT_EQ(k.eval_scalar(0.0, -1.0, 2.0), 0.0);
  EXPECT_TRUE(k.is_bounded());
  EXPECT_FALSE(k.is_singular());
}

TEST(PowerKernel, Values) {
  const auto k1 = make_power_kernel(constant_c(1.0), 1.0, 0.5, 2);
  const std::vector<double> x{1, 0}, o{0, 0}, x4{4, 0};
  EXPECT_DOUBLE_EQ(k1.eval_scalar(0.0, x, o), 1.0);
  EXPECT_EQ(k1.eval_scalar(0.0, o, o), 0.0);
  const auto k2 = make_power_kernel(constant_c(2.0), 2.0, 0.5, 2);
  EXPECT_DOUBLE_EQ(k2.eval_scalar(0.0, x4, o), 1.0);
  EXPECT_TRUE(k1.is_singular());
}

TEST(PowerKernel, RejectsExponentOutsideUnitInterval) {
  EXPECT_THROW(make_power_kernel(constant_c(1.0), 1.0, 1.0, 2), InvalidArgument);
  EXPECT_THROW(make_power_kernel(constant_c(1.0), 1.0, 0.0, 2), InvalidArgument);
}

TEST(AxisKernel, Values) {
  const auto k = make_axis_kernel({0.25, 0.25}, constant_c(1.0), 1.0);
  const std::vector<double> o{0, 0}, a{1, 1}, b{1, 0.5}, b0{1, 0}, c{16, 1};
  EXPECT_DOUBLE_EQ(k.eval_scalar(0.0, a, o), 1.0);
  EXPECT_EQ(k.eval_scalar(0.0, b, b0), 0.0);
  EXPECT_DOUBLE_EQ(k.eval_scalar(0.0, c, o), 0.5);
}

TEST(AxisKernel, RejectsExponentSumAtLeastOne) {
  EXPECT_THROW(make_axis_kernel({0.5, 0.5}, constant_c(1.0), 1.0), InvalidArgument);
}

TEST(BoxMollifier, Values) {
  const auto m = make_box_mollifier();
  EXPECT_DOUBLE_EQ(m.eval_at_eps(0.5, 0.0), 1.0);
  EXPECT_EQ(m.eval_at_eps(0.5, 0.6), 0.0);
  EXPECT_DOUBLE_EQ(m.eval_at_eps(0.1, -0.1), 5.0);
  EXPECT_DOUBLE_EQ(m.sup_at_eps(0.25), 2.0);
}

TEST(EmpiricalConvolve, RankEnumeration) {
  const auto k = make_rank_kernel();
  const auto e = line_ensemble({0, 1, 2});
  EXPECT_DOUBLE_EQ(empirical_convolve(k, 0.0, std::vector<double>{1.0}, e)[0], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(empirical_convolve(k, 0.0, std::vector<double>{2.0}, e)[0], 2.0 / 3.0);
  const auto single = line_ensemble({0.7});
  EXPECT_EQ(empirical_convolve(make_smooth_sin_kernel(), 0.0, std::vector<double>{0.7}, single)[0],
            0.0);
}

TEST(EmpiricalConvolve, NonFiniteParticleReported) {
  const auto e = line_ensemble({0.0, std::nan("")});
  try {
    empirical_convolve(make_rank_kernel(), 0.0, std::vector<double>{0.0}, e);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& err) {
    EXPECT_NE(std::string(err.what()).find('1'), std::string::npos);
  }
}

TEST(MeasureConvolve, RankAgainstUniform) {
  const auto k = make_rank_kernel();
  const auto rho = GridField::sample(0.0, 1.0, 1000, [](double) { return 1.0; });
  EXPECT_NEAR(measure_convolve(k, 0.0, std::vector<double>{1.0}, rho)[0], 1.0, 1e-3);
  EXPECT_NEAR(measure_convolve(k, 0.0, std::vector<double>{0.5}, rho)[0], 0.5, 1e-3);
  EXPECT_EQ(measure_convolve(make_zero_kernel(), 0.0, std::vector<double>{0.3}, rho)[0], 0.0);
}

TEST(MeasureConvolve, RejectsNonUnitMass) {
  const auto rho = GridField::sample(0.0, 1.0, 100, [](double) { return 1.01; });
  EXPECT_THROW(measure_convolve(make_rank_kernel(), 0.0, std::vector<double>{0.5}, rho),
               InvalidArgument);
}

TEST(AssembleDrift, Compositions) {
  const auto e = line_ensemble({0, 1, 2});
  EXPECT_DOUBLE_EQ(
      assemble_drift(make_identity_drift(), make_rank_kernel(), 0.0, std::vector<double>{2.0}, e)[0],
      2.0 / 3.0);
  EXPECT_EQ(
      assemble_drift(make_zero_drift(), make_rank_kernel(), 0.0, std::vector<double>{2.0}, e)[0],
      0.0);
  const auto mk = make_mollified_kernel(make_box_mollifier(), 0.5);
  const auto e2 = line_ensemble({0, 0.4, 2});
  EXPECT_DOUBLE_EQ(assemble_drift(make_identity_drift(), mk, 0.0, std::vector<double>{0.0}, e2)[0],
                   1.0 / 3.0);
}

TEST(Drifts, Envelopes) {
  EXPECT_DOUBLE_EQ(make_linear_drift(2.0).eval_scalar(0.0, 0.0, 0.25), 0.5);
  EXPECT_DOUBLE_EQ(make_tanh_drift(0.5).eval_scalar(0.0, 0.0, 1.0), 0.5 * std::tanh(1.0));
  EXPECT_DOUBLE_EQ(make_tanh_drift(0.5).lipschitz_r(), 0.5);
  EXPECT_DOUBLE_EQ(make_constant_drift({3.0}).eval_scalar(0.0, 1.0, 7.0), 3.0);
}

// Fast paths must reproduce the pairwise definition, ties included.
class FastPathTest : public ::testing::TestWithParam<int> {};

TEST_P(FastPathTest, EnsembleMatchesPairwise) {
  InteractionKernel k = GetParam() == 0   ? make_rank_kernel()
                        : GetParam() == 1 ? make_smooth_sin_kernel()
                                          : make_mollified_kernel(make_box_mollifier(), 0.3);
  ASSERT_TRUE(k.has_ensemble_path());
  const CounterRng rng(99, 0);
  std::vector<double> xs(301);
  for (std::size_t i = 0; i < xs.size(); ++i)
    xs[i] = rng.normal2(0, static_cast<std::uint32_t>(i), StreamTag::kTrial)[0];
  xs[10] = xs[20];  // exact tie
  xs[30] = xs[40] + 0.3;  // box boundary
  const auto e = line_ensemble(xs);
  std::vector<double> fast(xs.size()), slow(xs.size());
  empirical_convolve_all(k, 0.1, e, fast);
  empirical_convolve_all_pairwise(k, 0.1, e, slow);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-12) << i;
}

class GridPathTest : public ::testing::TestWithParam<int> {};

TEST_P(GridPathTest, GridMatchesPairwise) {
  InteractionKernel k = GetParam() == 0   ? make_rank_kernel()
                        : GetParam() == 1 ? make_smooth_sin_kernel()
                                          : make_mollified_kernel(make_box_mollifier(), 0.3);
  ASSERT_TRUE(k.has_grid_path());
  auto rho = GridField::sample(-4.0, 4.0, 160, [](double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  });
  const double mass = rho.integral();
  for (double& v : rho.values()) v /= mass;
  std::vector<double> fast(rho.size()), slow(rho.size());
  measure_convolve_grid(k, 0.1, rho, fast);
  measure_convolve_grid_pairwise(k, 0.1, rho, slow);
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(fast[i], slow[i], 1e-10) << i;
}

INSTANTIATE_TEST_SUITE_P(Kernels, FastPathTest, ::testing::Values(0, 1, 2));
INSTANTIATE_TEST_SUITE_P(Kernels, GridPathTest, ::testing::Values(0, 1));

TEST(EmpiricalConvolve, ConsistentWithMeasureConvolve) {
  const auto k = make_smooth_sin_kernel();
  const std::size_t n = 100000;
  const auto law = InitialLaw{DensitySpec::gaussian(0.0, 1.0)};
  const auto e = sample_initial(law, n, 2024);
  const auto rho = DensitySpec::gaussian(0.0, 1.0).to_grid(-8.0, 8.0, 1600);
  for (double x : {-1.0, 0.0, 0.7}) {
    const double emp = empirical_convolve(k, 0.0, std::vector<double>{x}, e)[0];
    const double mea = measure_convolve(k, 0.0, std::vector<double>{x}, rho)[0];
    EXPECT_LT(std::abs(emp - mea), 3.0 / std::sqrt(static_cast<double>(n))) << x;
  }
}
