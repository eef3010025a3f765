#include <gtest/gtest.h>

#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/grid_field.hpp"

using namespace chaoslab;

TEST(GridField, LineGeometry) {
  const auto g = GridField::line(-1.0, 1.0, 4);
  EXPECT_EQ(g.size(), 4u);
  EXPECT_DOUBLE_EQ(g.spacing()[0], 0.5);
  EXPECT_DOUBLE_EQ(g.center(0, 0), -0.75);
  EXPECT_DOUBLE_EQ(g.upper(0), 1.0);
}

TEST(GridField, MidpointIntegralAndSup) {
  auto g = GridField::sample(0.0, 1.0, 100, [](double x) { return 2.0 * x; });
  EXPECT_NEAR(g.integral(), 1.0, 1e-12);
  EXPECT_NEAR(g.sup_abs(), 2.0 * 0.995, 1e-12);
}

TEST(GridField, RowMajorTwoDimensional) {
  GridField g({0.0, 0.0}, {1.0, 0.5}, {2, 3});
  EXPECT_EQ(g.stride(0), 3u);
  EXPECT_EQ(g.stride(1), 1u);
  std::vector<double> c(2);
  g.center_of(4, c);
  EXPECT_DOUBLE_EQ(c[0], 1.5);
  EXPECT_DOUBLE_EQ(c[1], 0.75);
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.5);
}

TEST(GridField, Interpolation) {
  const auto g = GridField::sample(0.0, 4.0, 4, [](double x) { return x; });
  EXPECT_DOUBLE_EQ(g.interpolate(1.0), 1.0);
  EXPECT_DOUBLE_EQ(g.interpolate(0.2), 0.5);  // held below the first centre
  EXPECT_DOUBLE_EQ(g.interpolate(3.9), 3.5);
  EXPECT_DOUBLE_EQ(g.interpolate(5.0), 0.0);
}

TEST(GridField, RejectsMismatchedShape) {
  EXPECT_THROW(GridField({0.0}, {1.0}, {3}, {1.0, 2.0}), InvalidArgument);
  EXPECT_THROW(GridField::line(1.0, 0.0, 3), InvalidArgument);
}

TEST(GridField, DensityInvariant) {
  auto g = GridField::sample(0.0, 1.0, 10, [](double) { return 1.0; });
  EXPECT_NO_THROW(g.require_density(1e-9, "uniform"));
  g[3] = -0.1;
  EXPECT_THROW(g.require_density(1e-9, "broken"), std::exception);
}

TEST(GridField, CsvRoundTrip) {
  GridField g({-1.0, 0.5}, {0.25, 0.125}, {3, 2}, {1, 2, 3, 4, 5, 6.125}, 0.75);
  std::stringstream ss;
  write_grid_csv(ss, g);
  const auto back = read_grid_csv(ss);
  EXPECT_TRUE(back.same_grid(g));
  ASSERT_TRUE(back.time_label().has_value());
  EXPECT_DOUBLE_EQ(*back.time_label(), 0.75);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_DOUBLE_EQ(back[i], g[i]);
}

TEST(DensityPath, SpaceTimeInterpolation) {
  DensityPath path;
  path.push(0.0, GridField::sample(0.0, 1.0, 2, [](double) { return 1.0; }));
  path.push(1.0, GridField::sample(0.0, 1.0, 2, [](double) { return 3.0; }));
  const auto [k, theta] = path.bracket(0.25);
  EXPECT_EQ(k, 0u);
  EXPECT_DOUBLE_EQ(theta, 0.25);
  EXPECT_DOUBLE_EQ(path.value(0.5, 0.5), 2.0);
  EXPECT_DOUBLE_EQ(path.at(1.0)[1], 3.0);
  EXPECT_THROW(path.bracket(1.5), NumericalError);
}
