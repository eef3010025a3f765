#include "chaoslab/grid_field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) os << ';';
    os << v[i];
  }
  return os.str();
}

}  // namespace

GridField::GridField(std::vector<double> origin, std::vector<double> spacing,
                     std::vector<std::size_t> shape, std::vector<double> values,
                     std::optional<double> time_label)
    : origin_(std::move(origin)),
      spacing_(std::move(spacing)),
      shape_(std::move(shape)),
      values_(std::move(values)),
      time_label_(time_label) {
  validate();
}

GridField::GridField(std::vector<double> origin, std::vector<double> spacing,
                     std::vector<std::size_t> shape)
    : origin_(std::move(origin)), spacing_(std::move(spacing)), shape_(std::move(shape)) {
  std::size_t n = 1;
  for (auto s : shape_) n *= s;
  values_.assign(n, 0.0);
  validate();
}

GridField GridField::line(double lo, double hi, std::size_t cells) {
  if (!(hi > lo) || cells == 0) throw InvalidArgument("GridField::line: need lo < hi and cells > 0");
  return GridField({lo}, {(hi - lo) / static_cast<double>(cells)}, {cells});
}

void GridField::validate() const {
  const std::size_t d = shape_.size();
  if (d < 1 || d > 3) throw InvalidArgument("GridField: dimension must be 1..3");
  if (origin_.size() != d || spacing_.size() != d)
    throw InvalidArgument("GridField: origin/spacing/shape rank mismatch");
  std::size_t n = 1;
  for (std::size_t a = 0; a < d; ++a) {
    if (!(spacing_[a] > 0.0) || !std::isfinite(spacing_[a]))
      throw InvalidArgument("GridField: spacing must be positive");
    if (shape_[a] == 0) throw InvalidArgument("GridField: empty axis");
    if (!std::isfinite(origin_[a])) throw InvalidArgument("GridField: non-finite origin");
    n *= shape_[a];
  }
  if (values_.size() != n) throw InvalidArgument("GridField: values length does not match shape");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(values_[i]))
      throw InvalidArgument("GridField: non-finite value at index " + std::to_string(i));
}

double GridField::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

std::size_t GridField::stride(std::size_t axis) const {
  std::size_t s = 1;
  for (std::size_t a = axis + 1; a < shape_.size(); ++a) s *= shape_[a];
  return s;
}

void GridField::center_of(std::size_t flat, std::span<double> out) const {
  for (std::size_t a = shape_.size(); a-- > 0;) {
    const std::size_t k = flat % shape_[a];
    flat /= shape_[a];
    out[a] = center(a, k);
  }
}

double GridField::integral() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * cell_volume();
}

double GridField::sup_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double GridField::interpolate(double x) const {
  if (dims() != 1) throw InvalidArgument("GridField::interpolate: 1D only");
  const double lo = lower(0), hi = upper(0);
  if (x < lo || x > hi) return 0.0;
  const double s = (x - lo) / spacing_[0] - 0.5;
  const std::size_t n = shape_[0];
  if (s <= 0.0) return values_[0];
  if (s >= static_cast<double>(n - 1)) return values_[n - 1];
  const auto k = static_cast<std::size_t>(s);
  const double th = s - static_cast<double>(k);
  return (1.0 - th) * values_[k] + th * values_[k + 1];
}

bool GridField::same_grid(const GridField& o, double tol) const {
  if (shape_ != o.shape_) return false;
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    if (std::abs(origin_[a] - o.origin_[a]) > tol * std::max(1.0, std::abs(origin_[a])))
      return false;
    if (std::abs(spacing_[a] - o.spacing_[a]) > tol * spacing_[a]) return false;
  }
  return true;
}

void GridField::require_density(double tol, const char* what) const {
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] < 0.0)
      throw InvalidArgument(std::string(what) + ": negative density at cell " + std::to_string(i));
  const double m = integral();
  if (std::abs(m - 1.0) > tol) {
    std::ostringstream os;
    os << what << ": density mass " << m << " deviates from 1 by more than " << tol;
    throw InvalidArgument(os.str());
  }
}

void write_grid_csv(std::ostream& os, const GridField& f) {
  const auto prec = os.precision(17);
  os << "time_label,ndim,origin,spacing,shape\n";
  if (f.time_label()) os << *f.time_label();
  os << ',' << f.dims() << ',' << join(f.origin()) << ',' << join(f.spacing()) << ','
     << join(f.shape()) << '\n';
  os << "flat_index,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << i << ',' << f[i] << '\n';
  os.precision(prec);
}

GridField read_grid_csv(std::istream& is) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) throw InvalidArgument(std::string("grid csv: missing ") + what);
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next("header");
  if (line != "time_label,ndim,origin,spacing,shape")
    throw InvalidArgument("grid csv: unexpected header '" + line + "'");
  next("metadata row");
  const auto cols = split(line, ',');
  if (cols.size() != 5) throw InvalidArgument("grid csv: metadata row needs 5 columns");
  std::optional<double> t;
  if (!cols[0].empty()) t = std::stod(cols[0]);
  const auto d = static_cast<std::size_t>(std::stoul(cols[1]));
  std::vector<double> origin, spacing;
  std::vector<std::size_t> shape;
  for (const auto& s : split(cols[2], ';')) origin.push_back(std::stod(s));
  for (const auto& s : split(cols[3], ';')) spacing.push_back(std::stod(s));
  for (const auto& s : split(cols[4], ';')) shape.push_back(std::stoul(s));
  if (origin.size() != d) throw InvalidArgument("grid csv: ndim does not match origin");
  next("value header");
  if (line != "flat_index,value") throw InvalidArgument("grid csv: expected 'flat_index,value'");
  std::size_t n = 1;
  for (auto s : shape) n *= s;
  std::vector<double> values(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t seen = 0;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto pos = line.find(',');
    if (pos == std::string::npos) throw InvalidArgument("grid csv: malformed value row");
    const auto idx = std::stoul(line.substr(0, pos));
    if (idx >= n) throw InvalidArgument("grid csv: index out of range");
    values[idx] = std::stod(line.substr(pos + 1));
    ++seen;
  }
  if (seen != n) throw InvalidArgument("grid csv: expected " + std::to_string(n) + " values");
  return GridField(std::move(origin), std::move(spacing), std::move(shape), std::move(values), t);
}

void DensityPath::push(double t, GridField field) {
  if (!times_.empty()) {
    if (!(t > times_.back())) throw InvalidArgument("DensityPath: times must increase");
    if (!field.same_grid(fields_.front(), 1e-9))
      throw InvalidArgument("DensityPath: snapshot grid differs from the first one");
  }
  field.set_time_label(t);
  times_.push_back(t);
  fields_.push_back(std::move(field));
}

std::pair<std::size_t, double> DensityPath::bracket(double t) const {
  if (times_.empty()) throw NumericalError("DensityPath: no snapshots");
  const double slack = 1e-9 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - slack || t > times_.back() + slack) {
    std::ostringstream os;
    os << "DensityPath: no density snapshot covers t = " << t << " (have [" << times_.front()
       << ", " << times_.back() << "])";
    throw NumericalError(os.str());
  }
  if (times_.size() == 1) return {0, 0.0};
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t k = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  if (k >= times_.size() - 1) return {times_.size() - 2, 1.0};
  const double th = (t - times_[k]) / (times_[k + 1] - times_[k]);
  return {k, std::clamp(th, 0.0, 1.0)};
}

double DensityPath::value(double t, double x) const {
  const auto [k, th] = bracket(t);
  const double v0 = fields_[k].interpolate(x);
  if (th == 0.0 || times_.size() == 1) return v0;
  return (1.0 - th) * v0 + th * fields_[k + 1].interpolate(x);
}

GridField DensityPath::at(double t) const {
  const auto [k, th] = bracket(t);
  GridField out = fields_[k];
  if (times_.size() > 1 && th > 0.0) {
    const auto& next = fields_[k + 1];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - th) * out[i] + th * next[i];
  }
  out.set_time_label(t);
  return out;
}

}  // namespace chaoslab
