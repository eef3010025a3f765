#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/particles.hpp"
#include "chaoslab/pde.hpp"

using namespace chaoslab;

namespace {

ParticleEnsemble line_ensemble(std::vector<double> xs) {
  const std::size_t n = xs.size();
  return ParticleEnsemble(n, 1, std::move(xs));
}

DriftField constant_field(double c) {
  return [c](double, const ParticleEnsemble& e, std::span<double> out) {
    for (std::size_t i = 0; i < e.size(); ++i) out[i] = c;
  };
}

DensityPath constant_path(const GridField& rho, double T) {
  DensityPath p;
  p.push(0.0, rho);
  p.push(T, rho);
  return p;
}

}  // namespace

TEST(EmStep, DeterministicEuler) {
  const auto e = line_ensemble({0.0, 1.0, -2.0});
  const BrownianDriver w(1, 0, 0.25);
  const auto next = em_step(e, constant_field(2.0), Diffusion::constant_value(0.0), 0.25, w);
  EXPECT_DOUBLE_EQ(next.position(0)[0], 0.5);
  EXPECT_DOUBLE_EQ(next.position(1)[0], 1.5);
  EXPECT_DOUBLE_EQ(next.position(2)[0], -1.5);
  EXPECT_EQ(next.step(), 1u);
  EXPECT_DOUBLE_EQ(next.time(), 0.25);
}

TEST(EmStep, PureNoiseUsesStreamIncrements) {
  const auto e = line_ensemble({0.0, 1.0});
  const BrownianDriver w(3, 0, 0.01);
  const auto next = em_step(e, constant_field(0.0), Diffusion::constant_value(1.0), 0.01, w);
  for (std::uint32_t i = 0; i < 2; ++i) {
    std::vector<double> dw(1);
    w.increment(i, 0, dw);
    EXPECT_DOUBLE_EQ(next.position(i)[0], e.position(i)[0] + dw[0]);
  }
}

TEST(EmStep, HandEulerStep) {
  const auto e = line_ensemble({0.0});
  const DriftField f = [](double, const ParticleEnsemble& en, std::span<double> out) {
    out[0] = en.position(0)[0] + 1.0;
  };
  const auto next = em_step(e, f, Diffusion::constant_value(0.0), 0.5, BrownianDriver(1, 0, 0.5));
  EXPECT_DOUBLE_EQ(next.position(0)[0], 0.5);
}

TEST(EmStep, NonFiniteUpdateFails) {
  const auto e = line_ensemble({0.0, 1.0});
  const DriftField f = [](double, const ParticleEnsemble&, std::span<double> out) {
    out[0] = 0.0;
    out[1] = INFINITY;
  };
  EXPECT_THROW(em_step(e, f, Diffusion::constant_value(0.0), 0.5, BrownianDriver(1, 0, 0.5)),
               NumericalError);
}

TEST(SimulateParticleSystem, RankOneStep) {
  SimConfig c;
  c.N = 3;
  c.T = 1.0;
  c.dt = 1.0;
  c.sigma = Diffusion::constant_value(0.0);
  const auto path = simulate_particle_system(c, make_rank_kernel(), make_identity_drift(),
                                             line_ensemble({0, 1, 2}));
  const auto& last = path.snapshots.back();
  EXPECT_DOUBLE_EQ(last.position(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(last.position(1)[0], 4.0 / 3.0);
  EXPECT_DOUBLE_EQ(last.position(2)[0], 8.0 / 3.0);
}

TEST(SimulateParticleSystem, SingleParticleSeesNoInteraction) {
  SimConfig c;
  c.N = 1;
  c.T = 0.1;
  c.dt = 0.01;
  c.seed = 4;
  const auto F = make_constant_drift({1.0});
  const auto a = simulate_particle_system(c, make_smooth_sin_kernel(), F, line_ensemble({0.2}));
  const auto b = simulate_particle_system(c, make_zero_kernel(), F, line_ensemble({0.2}));
  EXPECT_DOUBLE_EQ(a.snapshots.back().position(0)[0], b.snapshots.back().position(0)[0]);
}

TEST(SimulateParticleSystem, ZeroKernelIsPureDiffusion) {
  SimConfig c;
  c.N = 4;
  c.T = 0.05;
  c.dt = 0.01;
  c.seed = 8;
  const auto path = simulate_particle_system(c, make_zero_kernel(), make_identity_drift(),
                                             line_ensemble({0, 0, 0, 0}));
  const BrownianDriver w(c.seed, 0, c.dt);
  for (std::uint32_t i = 0; i < 4; ++i) {
    double x = 0.0;
    for (std::uint32_t k = 0; k < c.steps(); ++k) {
      std::vector<double> dw(1);
      w.increment(i, k, dw);
      x += dw[0];
    }
    EXPECT_NEAR(path.snapshots.back().position(i)[0], x, 1e-14);
  }
}

TEST(SimulateParticleSystem, BudgetGuardRejectsBeforeWork) {
  SimConfig c;
  c.N = 100000;
  c.T = 1.0;
  c.dt = 1e-3;
  c.d = 2;
  c.pair_budget = 1e9;
  const auto k = make_power_kernel([](double, ConstPoint, ConstPoint) { return 1.0; }, 1.0, 0.5, 2);
  const auto F = make_constant_drift({0.0, 0.0});
  ParticleEnsemble e(c.N, 2, std::vector<double>(2 * c.N, 0.0));
  EXPECT_THROW(simulate_particle_system(c, k, F, e), BudgetExceeded);
}

TEST(SimConfig, Validation) {
  SimConfig c;
  c.replicas = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.replicas = 1;
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.dt = 0.3;
  c.T = 1.0;
  EXPECT_EQ(c.steps(), 4u);
  c.sigma = Diffusion::holder(1.0, 0.5, 0.5);
  c.sigma.kappa0 = 1.2;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(ModerateSystem, EpsScheduleAndNeighbourCount) {
  const auto eps = log_eps_schedule(1.0, 2.0);
  EXPECT_NEAR(eps(static_cast<std::size_t>(std::round(std::exp(4.0)))), 0.5, 2e-3);
  const auto m = make_box_mollifier();
  const auto k1 = make_mollified_kernel(m, 1.0);
  EXPECT_EQ(empirical_convolve(k1, 0.0, std::vector<double>{3.0}, line_ensemble({0, 3}))[0], 0.0);
  EXPECT_DOUBLE_EQ(empirical_convolve(k1, 0.0, std::vector<double>{0.5}, line_ensemble({0, 0.5}))[0],
                   0.25);
}

TEST(CoupledLimit, ZeroNoiseZeroDrift) {
  SimConfig c;
  c.N = 8;
  c.T = 0.1;
  c.dt = 0.01;
  c.sigma = Diffusion::constant_value(0.0);
  const auto rho = DensitySpec::gaussian(0.0, 1.0).to_grid(-6, 6, 120);
  const auto path = constant_path(rho, c.T);
  const auto out = simulate_coupled_limit(c, make_rank_kernel(), make_zero_drift(),
                                          {LimitMode::kMeasure, &path},
                                          sample_initial({DensitySpec::gaussian(0, 1)}, 8, 1));
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    EXPECT_EQ(out.particle[k], out.particle[0]);
    EXPECT_EQ(out.limit[k], out.particle[k]);
  }
}

TEST(CoupledLimit, ZeroKernelPathwiseIdentical) {
  SimConfig c;
  c.N = 16;
  c.T = 0.2;
  c.dt = 0.01;
  c.seed = 77;
  const auto rho = DensitySpec::gaussian(0.0, 1.0).to_grid(-6, 6, 120);
  const auto path = constant_path(rho, c.T);
  const auto out = simulate_coupled_limit(c, make_zero_kernel(), make_identity_drift(),
                                          {LimitMode::kMeasure, &path},
                                          sample_initial({DensitySpec::gaussian(0, 1)}, 16, 2));
  ASSERT_EQ(out.particle.size(), out.limit.size());
  for (std::size_t k = 0; k < out.particle.size(); ++k) EXPECT_EQ(out.particle[k], out.limit[k]);
}

TEST(CoupledLimit, CacheReuseMatchesFreshRun) {
  SimConfig c;
  c.N = 32;
  c.T = 0.1;
  c.dt = 0.01;
  c.seed = 5;
  const auto rho = DensitySpec::gaussian(0.0, 1.0).to_grid(-6, 6, 120);
  const auto path = constant_path(rho, c.T);
  const auto init = sample_initial({DensitySpec::gaussian(0, 1)}, 32, 3);
  std::vector<double> cache;
  LimitSpec spec{LimitMode::kMeasure, &path};
  spec.cache = &cache;
  const auto first = simulate_coupled_limit(c, make_smooth_sin_kernel(), make_identity_drift(), spec, init);
  EXPECT_EQ(cache.size(), c.steps() + 1);
  const auto second = simulate_coupled_limit(c, make_smooth_sin_kernel(), make_identity_drift(), spec, init);
  const auto fresh = simulate_coupled_limit(c, make_smooth_sin_kernel(), make_identity_drift(),
                                            {LimitMode::kMeasure, &path}, init);
  EXPECT_EQ(first.limit, fresh.limit);
  EXPECT_EQ(second.limit, fresh.limit);
}

TEST(CoupledLimit, MissingSnapshotsFail) {
  SimConfig c;
  c.N = 4;
  c.T = 1.0;
  c.dt = 0.1;
  const auto rho = DensitySpec::gaussian(0.0, 1.0).to_grid(-6, 6, 60);
  const auto path = constant_path(rho, 0.5);
  EXPECT_THROW(simulate_coupled_limit(c, make_rank_kernel(), make_identity_drift(),
                                      {LimitMode::kMeasure, &path},
                                      sample_initial({DensitySpec::gaussian(0, 1)}, 4, 1)),
               NumericalError);
}

TEST(SampleInitial, IidMomentsAndReplay) {
  const InitialLaw law{DensitySpec::gaussian(1.0, 2.0)};
  const auto a = sample_initial(law, 50000, 17);
  const auto b = sample_initial(law, 50000, 17);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.position(i)[0], b.position(i)[0]);
    s1 += a.position(i)[0];
    s2 += a.position(i)[0] * a.position(i)[0];
  }
  const double m = s1 / 50000.0;
  EXPECT_NEAR(m, 1.0, 0.05);
  EXPECT_NEAR(s2 / 50000.0 - m * m, 4.0, 0.15);
}

TEST(SampleInitial, MixtureWithFullWeightIsIid) {
  InitialLaw mix{DensitySpec::gaussian(0.0, 1.0), InitialCorrelation::kExchangeableMixture,
                 DensitySpec::gaussian(3.0, 1.0), 1.0};
  const auto a = sample_initial(mix, 200, 9);
  const auto b = sample_initial({DensitySpec::gaussian(0.0, 1.0)}, 200, 9);
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < 200; ++i) {
    ma += a.position(i)[0];
    mb += b.position(i)[0];
  }
  EXPECT_LT(std::abs(ma / 200.0), 0.3);
  EXPECT_LT(std::abs(mb / 200.0), 0.3);
}

TEST(InitialEntropy, IidIsZero) {
  EXPECT_EQ(initial_relative_entropy({DensitySpec::uniform(0, 1)}, 3), 0.0);
}

TEST(InitialEntropy, MixtureMatchesBruteForceQuadrature) {
  const auto c0 = DensitySpec::gaussian(0.0, 1.0);
  const auto c1 = DensitySpec::gaussian(0.1, 1.0);
  const InitialLaw law{c0, InitialCorrelation::kExchangeableMixture, c1, 0.5};
  EXPECT_NEAR(initial_relative_entropy(law, 1), 0.0, 1e-10);
  const double h2 = initial_relative_entropy(law, 2);
  // Midpoint rule on [-10, 10]^2.
  const int n = 800;
  const double lo = -10.0, h = 20.0 / n;
  double brute = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      const double y = lo + (j + 0.5) * h;
      const double joint = 0.5 * c0.pdf(x) * c0.pdf(y) + 0.5 * c1.pdf(x) * c1.pdf(y);
      const double prod = law.marginal_pdf(x) * law.marginal_pdf(y);
      brute += joint * std::log(joint / prod) * h * h;
    }
  }
  EXPECT_TRUE(std::isfinite(h2));
  EXPECT_GE(h2, 0.0);
  EXPECT_NEAR(h2, brute, 1e-7 + 1e-3 * brute);
}

TEST(Snapshots, ColumnarRows) {
  std::ostringstream os;
  write_snapshot_header(os, 1);
  write_snapshot_rows(os, 2, 5, line_ensemble({0.5, -1.0}));
  EXPECT_EQ(os.str(), "replica,time_index,particle,x0\n2,5,0,0.5\n2,5,1,-1\n");
}
