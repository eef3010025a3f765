#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/grid_field.hpp"

namespace chaoslab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Exponent vector p = (p_1..p_d), entries in (0, inf], and an optional time
// exponent q.
struct MultiIndex {
  std::vector<double> p;
  std::optional<double> q;

  static MultiIndex uniform(std::size_t d, double value);
  std::size_t dims() const { return p.size(); }
  // |1/p| with 1/inf = 0.
  double reciprocal_sum() const;
  void validate() const;
};

// Integration order x = (x_{i_1}, ..., x_{i_d}) listed outermost first:
// axes[0] is integrated last with exponent p_1, axes[d-1] first with p_d.
struct PermOrder {
  std::vector<std::size_t> axes;

  static PermOrder identity(std::size_t d);
  void validate(std::size_t d) const;
};

// Smooth radial cutoff: 1 on |x| <= 1, 0 on |x| >= 2.
double smooth_cutoff(double radius);

struct LocalizationConfig {
  double r = 1.0;
  std::vector<std::vector<double>> centers;

  // Lattice of spacing r covering the bounding box of the grid.
  static LocalizationConfig lattice(const GridField& f, double r);
};

double mixed_norm(const GridField& f, const MultiIndex& p, const PermOrder& perm);

// max_z ||chi^r_z f||. Rejects a lattice that leaves some cell where f != 0
// farther than r from every centre.
double localized_mixed_norm(const GridField& f, const MultiIndex& p, const PermOrder& perm,
                            const LocalizationConfig& loc);

enum class IndexSet { kIo, kI1, kI2 };

IndexSet parse_index_set(const std::string& name);

bool index_check(double q, const MultiIndex& p, IndexSet which);

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

GridField pointwise_product(const GridField& f, const GridField& g);
// Periodic discrete convolution (f * g)(x) = sum_y f(x - y) g(y) |cell|, with
// offsets taken relative to the grid origin.
GridField periodic_convolve(const GridField& f, const GridField& g);

// ||fg||_q <= ||f||_p ||g||_r for 1/p + 1/r = 1/q (componentwise, 1e-12).
InequalityCheck holder_check(const GridField& f, const GridField& g, const MultiIndex& p,
                             const MultiIndex& r, const MultiIndex& q, const PermOrder& perm);

// ||f * g||_q <= ||f||_p ||g||_r for 1/p + 1/r = 1 + 1/q, exponents in [1, inf].
InequalityCheck young_check(const GridField& f, const GridField& g, const MultiIndex& p,
                            const MultiIndex& r, const MultiIndex& q, const PermOrder& perm);

}  // namespace chaoslab
