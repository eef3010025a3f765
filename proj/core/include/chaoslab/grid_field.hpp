#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace chaoslab {

// Uniform cell-centred grid in 1..3 dimensions. `origin` is the lower corner
// of the first cell; cell k along an axis has centre origin + (k + 1/2) h.
// Values are row-major (last axis fastest).
class GridField {
 public:
  GridField() = default;
  GridField(std::vector<double> origin, std::vector<double> spacing,
            std::vector<std::size_t> shape, std::vector<double> values,
            std::optional<double> time_label = std::nullopt);

  // Zero-initialised field.
  GridField(std::vector<double> origin, std::vector<double> spacing,
            std::vector<std::size_t> shape);

  // 1D grid of `cells` cells covering [lo, hi].
  static GridField line(double lo, double hi, std::size_t cells);

  std::size_t dims() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& origin() const { return origin_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<std::size_t>& shape() const { return shape_; }
  std::optional<double> time_label() const { return time_label_; }
  void set_time_label(std::optional<double> t) { time_label_ = t; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double cell_volume() const;
  double lower(std::size_t axis) const { return origin_[axis]; }
  double upper(std::size_t axis) const {
    return origin_[axis] + spacing_[axis] * static_cast<double>(shape_[axis]);
  }
  double center(std::size_t axis, std::size_t k) const {
    return origin_[axis] + (static_cast<double>(k) + 0.5) * spacing_[axis];
  }
  // Centre of the flat cell index, written into `out` (size dims()).
  void center_of(std::size_t flat, std::span<double> out) const;
  std::size_t stride(std::size_t axis) const;

  // Midpoint-rule integral.
  double integral() const;
  double sup_abs() const;

  // Linear interpolation between cell centres (1D only). Between the grid
  // edge and the first/last centre the edge value is held; outside the grid
  // the result is 0.
  double interpolate(double x) const;

  bool same_grid(const GridField& other, double tol = 1e-12) const;

  // Checks the density invariant: nonnegative and unit mass within `tol`.
  void require_density(double tol, const char* what) const;

  template <class F>
  static GridField sample(double lo, double hi, std::size_t cells, F&& f) {
    GridField g = line(lo, hi, cells);
    for (std::size_t k = 0; k < cells; ++k) g.values_[k] = f(g.center(0, k));
    return g;
  }

 private:
  void validate() const;

  std::vector<double> origin_;
  std::vector<double> spacing_;
  std::vector<std::size_t> shape_;
  std::vector<double> values_;
  std::optional<double> time_label_;
};

// CSV layout:
//   time_label,ndim,origin,spacing,shape
//   <t or empty>,<d>,<o0;o1..>,<h0;h1..>,<n0;n1..>
//   flat_index,value
//   0,<v0>
//   ...
void write_grid_csv(std::ostream& os, const GridField& field);
GridField read_grid_csv(std::istream& is);

// Time-indexed sequence of 1D fields on a common grid.
class DensityPath {
 public:
  DensityPath() = default;
  void push(double t, GridField field);

  bool empty() const { return times_.empty(); }
  std::size_t size() const { return times_.size(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<GridField>& fields() const { return fields_; }
  const GridField& front() const { return fields_.front(); }
  const GridField& back() const { return fields_.back(); }
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  // Locates t between snapshots: returns (k, theta) with
  // field(t) = (1 - theta) fields[k] + theta fields[k + 1]. Throws
  // NumericalError when t lies outside the covered interval.
  std::pair<std::size_t, double> bracket(double t) const;

  // Space-time linear interpolation of the density value.
  double value(double t, double x) const;
  GridField at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<GridField> fields_;
};

}  // namespace chaoslab
