#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "chaoslab/chaosmetrics.hpp"

namespace chaoslab::harness {

struct MetricRow {
  std::string experiment;
  std::size_t N = 0;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
};

// Header: experiment,N,metric,value,std_error. Values use %.12g, which
// switches to scientific notation below 1e-4.
std::string format_value(double v);
void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows);
std::vector<MetricRow> read_metrics_csv(std::istream& is);

std::string convergence_report_json(const ConvergenceReport& report, const std::string& metric);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Log-log plot with one polyline per series.
std::string loglog_svg(const std::string& title, const std::string& x_label,
                       const std::string& y_label, const std::vector<SvgSeries>& series);

std::string sha256_hex(const std::string& data);

struct RunManifest {
  std::string config_hash;
  std::string config_source;
  std::string experiment;
  std::string version;
  double wall_seconds = 0.0;
  unsigned threads = 1;
  std::map<std::string, std::uint64_t> stage_seeds;
  std::vector<std::string> outputs;  // relative to output_dir
  std::string output_dir;

  std::string to_json() const;
  static RunManifest from_json(const std::string& text);
};

}  // namespace chaoslab::harness
