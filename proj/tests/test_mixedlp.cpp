#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chaoslab/errors.hpp"
#include "chaoslab/mixedlp.hpp"

using namespace chaoslab;

namespace {

template <class F>
GridField grid2(double lo, double hi, std::size_t n, F&& f) {
  const double h = (hi - lo) / n;
  GridField g({lo, lo}, {h, h}, {n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g[i * n + j] = f(lo + (i + 0.5) * h, lo + (j + 0.5) * h);
  return g;
}

double lp_1d(double lo, double hi, std::size_t n, double p, double (*f)(double)) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(f(lo + (i + 0.5) * h)), p) * h;
  return std::pow(s, 1.0 / p);
}

double g1(double x) { return std::exp(-x * x); }
double h1(double y) { return 1.0 / (1.0 + y * y); }

}  // namespace

TEST(MultiIndex, ReciprocalSumAndValidation) {
  EXPECT_DOUBLE_EQ((MultiIndex{{2.0, kInf}}).reciprocal_sum(), 0.5);
  EXPECT_THROW((MultiIndex{{0.0, 1.0}}).validate(), InvalidArgument);
  EXPECT_THROW((PermOrder{{0, 0}}).validate(2), InvalidArgument);
}

TEST(MixedNorm, UnitBoxIsOne) {
  const auto f = grid2(-1, 2, 60, [](double x, double y) {
    return x >= 0 && x <= 1 && y >= 0 && y <= 1 ? 1.0 : 0.0;
  });
  for (double p1 : {1.0, 2.5, kInf})
    for (double p2 : {1.0, 3.0})
      for (auto perm : {PermOrder{{0, 1}}, PermOrder{{1, 0}}})
        EXPECT_NEAR(mixed_norm(f, {{p1, p2}}, perm), 1.0, 1e-12) << p1 << ' ' << p2;
}

TEST(MixedNorm, SeparableFactorises) {
  const auto f = grid2(-4, 4, 200, [](double x, double y) { return g1(x) * h1(y); });
  // axes[0] (x) carries p_1, axes[1] (y) carries p_2.
  const double v = mixed_norm(f, {{3.0, 1.5}}, PermOrder::identity(2));
  EXPECT_NEAR(v, lp_1d(-4, 4, 200, 3.0, g1) * lp_1d(-4, 4, 200, 1.5, h1), 1e-10);
}

TEST(MixedNorm, GaussianL2AgainstDirectQuadrature) {
  const auto f = grid2(-6, 6, 240, [](double x, double y) {
    return std::exp(-0.5 * (x * x + y * y)) / (2.0 * std::numbers::pi);
  });
  double direct = 0.0;
  for (double v : f.values()) direct += v * v * f.cell_volume();
  direct = std::sqrt(direct);
  EXPECT_NEAR(mixed_norm(f, {{2.0, 2.0}}, PermOrder::identity(2)), direct, 1e-12);
  EXPECT_NEAR(direct, 1.0 / std::sqrt(4.0 * std::numbers::pi), 1e-6);
}

TEST(MixedNorm, HugeExponentStaysFinite) {
  const auto f = grid2(-1, 1, 20, [](double x, double y) { return 50.0 + x + y; });
  const double v = mixed_norm(f, {{1e6, 1e6}}, PermOrder::identity(2));
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, mixed_norm(f, {{kInf, kInf}}, PermOrder::identity(2)), 0.1);
}

TEST(LocalizedNorm, SingleBallAndZero) {
  const auto f = grid2(-3, 3, 60, [](double x, double y) {
    return x * x + y * y < 0.25 ? 1.0 + x : 0.0;
  });
  LocalizationConfig loc{1.0, {{0.0, 0.0}}};
  const MultiIndex p{{2.0, 3.0}};
  EXPECT_NEAR(localized_mixed_norm(f, p, PermOrder::identity(2), loc),
              mixed_norm(f, p, PermOrder::identity(2)), 1e-12);
  const auto zero = grid2(-3, 3, 60, [](double, double) { return 0.0; });
  const auto lat = LocalizationConfig::lattice(zero, 1.0);
  EXPECT_EQ(localized_mixed_norm(zero, p, PermOrder::identity(2), lat), 0.0);
}

TEST(LocalizedNorm, RejectsUncoveredSupport) {
  const auto f = grid2(-3, 3, 60, [](double, double) { return 1.0; });
  LocalizationConfig loc{1.0, {{0.0, 0.0}}};
  EXPECT_THROW(localized_mixed_norm(f, {{2.0, 2.0}}, PermOrder::identity(2), loc), InvalidArgument);
}

TEST(LocalizedNorm, SingularProfileRefinement) {
  const auto profile = [](double x, double y) {
    const double r = std::hypot(x, y);
    return r < 1.0 ? 1.0 / std::sqrt(r) : 0.0;
  };
  std::vector<double> v3, v6;
  for (std::size_t n : {64u, 128u, 256u}) {
    const auto f = grid2(-2, 2, n, profile);
    const auto loc = LocalizationConfig::lattice(f, 1.0);
    v3.push_back(localized_mixed_norm(f, {{3.0, 3.0}}, PermOrder::identity(2), loc));
    v6.push_back(localized_mixed_norm(f, {{6.0, 6.0}}, PermOrder::identity(2), loc));
  }
  EXPECT_LT(v3.back() / v3.front(), 1.05);
  EXPECT_GT(v6[1], v6[0]);
  EXPECT_GT(v6[2], v6[1]);
  EXPECT_GT(v6.back() / v6.front(), 1.2);
}

TEST(IndexCheck, Examples) {
  EXPECT_TRUE(index_check(8.0, {{8.0, 8.0}}, IndexSet::kIo));
  EXPECT_FALSE(index_check(4.0, {{4.0, 4.0}}, IndexSet::kIo));
  EXPECT_TRUE(index_check(4.0, {{4.0, 4.0}}, IndexSet::kI2));
  EXPECT_FALSE(index_check(2.0, {{100.0, 100.0}}, IndexSet::kIo));
  EXPECT_EQ(parse_index_set("I1"), IndexSet::kI1);
  EXPECT_THROW(parse_index_set("I3"), InvalidArgument);
}

TEST(Holder, ConstantFactorEquality) {
  const auto f = grid2(-2, 2, 40, [](double x, double y) { return std::exp(-x * x - y); });
  const auto one = grid2(-2, 2, 40, [](double, double) { return 1.0; });
  const MultiIndex p{{2.0, 3.0}}, r{{kInf, kInf}};
  const auto c = holder_check(f, one, p, r, p, PermOrder::identity(2));
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-12 * c.rhs);
}

TEST(Holder, CauchySchwarzInstance) {
  const auto f = grid2(-2, 2, 40, [](double x, double y) { return 1.0 + std::sin(3 * x) * std::cos(y); });
  const auto c = holder_check(f, f, {{4.0, 4.0}}, {{4.0, 4.0}}, {{2.0, 2.0}}, PermOrder::identity(2));
  EXPECT_TRUE(c.pass);
}

TEST(Holder, RejectsBadExponents) {
  const auto f = grid2(-1, 1, 10, [](double, double) { return 1.0; });
  EXPECT_THROW(holder_check(f, f, {{2.0, 2.0}}, {{2.0, 2.0}}, {{2.0, 2.0}}, PermOrder::identity(2)),
               InvalidArgument);
}

TEST(Young, DeltaIsIdentity) {
  const std::size_t n = 32;
  const auto f = grid2(0, 1, n, [](double x, double y) { return 1.0 + x * y; });
  auto delta = grid2(0, 1, n, [](double, double) { return 0.0; });
  delta[0] = 1.0 / delta.cell_volume();
  const MultiIndex p{{2.0, 3.0}}, r{{1.0, 1.0}};
  const auto conv = periodic_convolve(f, delta);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(conv[i], f[i], 1e-12);
  const auto c = young_check(f, delta, p, r, p, PermOrder::identity(2));
  EXPECT_TRUE(c.pass);
  EXPECT_NEAR(c.lhs, c.rhs, 1e-10 * c.rhs);
}

TEST(Young, GaussianPeakBound) {
  const auto gauss = [](double x, double y) {
    return std::exp(-0.5 * (x * x + y * y)) / (2.0 * std::numbers::pi);
  };
  const auto f = grid2(-8, 8, 128, gauss);
  const auto c = young_check(f, f, {{2.0, 2.0}}, {{2.0, 2.0}}, {{kInf, kInf}}, PermOrder::identity(2));
  EXPECT_TRUE(c.pass);
  // Peak of N(0, 2I) is 1/(4 pi) and ||f||_2^2 = 1/(4 pi): Young is sharp here.
  // The discrete peak may sit half a cell off centre in each axis.
  const double h = 16.0 / 128.0;
  EXPECT_NEAR(c.lhs, 1.0 / (4.0 * std::numbers::pi), (1.0 - std::exp(-0.25 * h * h)) / (2.0 * std::numbers::pi));
  EXPECT_NEAR(c.rhs, 1.0 / (4.0 * std::numbers::pi), 1e-6);
}
