#include "chaoslab/harness/report.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab::harness {

using nlohmann::json;

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", v);
}

void write_metrics_csv(std::ostream& os, const std::vector<MetricRow>& rows) {
  os << "experiment,N,metric,value,std_error\n";
  for (const auto& r : rows)
    os << r.experiment << ',' << r.N << ',' << r.metric << ',' << format_value(r.value) << ','
       << format_value(r.std_error) << '\n';
}

std::vector<MetricRow> read_metrics_csv(std::istream& is) {
  std::vector<MetricRow> rows;
  std::string line;
  if (!std::getline(is, line) || line != "experiment,N,metric,value,std_error")
    throw InvalidArgument("metrics csv: unexpected header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) throw InvalidArgument(fmt::format("metrics csv line {}: expected 5 fields", lineno));
    try {
      rows.push_back({cells[0], std::stoul(cells[1]), cells[2], std::stod(cells[3]), std::stod(cells[4])});
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("metrics csv line {}: bad number", lineno));
    }
  }
  return rows;
}

std::string convergence_report_json(const ConvergenceReport& r, const std::string& metric) {
  json j;
  j["metric"] = metric;
  j["Ns"] = r.Ns;
  j["errors"] = r.errors;
  j["std_errors"] = r.std_errors;
  j["slope"] = r.slope;
  j["intercept"] = r.intercept;
  j["slope_se"] = r.slope_se;
  j["slope_ci"] = {r.slope_ci_lo, r.slope_ci_hi};
  j["fit"] = r.weighted ? "weighted" : "ordinary";
  return j.dump(2) + "\n";
}

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<SvgSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (std::log10(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (std::log10(v) - y0) / (y1 - y0) * (H - T - B); };

  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  out += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", W / 2, title);
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", L, T,
                     W - L - R, H - T - B);
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{} (log10 {:.2f} .. {:.2f})</text>\n",
                     (L + W - R) / 2, H - 20, x_label, x0, x1);
  out += fmt::format(
      "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{} (log10 {:.2f} .. "
      "{:.2f})</text>\n",
      (T + H - B) / 2, (T + H - B) / 2, y_label, y0, y1);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* col = colours[k % 5];
    std::string pts;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0)) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
      out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", px(s.x[i]), py(s.y[i]), col);
    }
    out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\"/>\n", pts, col);
    out += fmt::format("<text x=\"{}\" y=\"{}\" fill=\"{}\">{}</text>\n", L + 10, T + 16 + 16 * k, col, s.label);
  }
  out += "</svg>\n";
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw NumericalError("sha256 digest failed");
  std::string hex;
  for (unsigned i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["config_source"] = config_source;
  j["experiment"] = experiment;
  j["version"] = version;
  j["wall_seconds"] = wall_seconds;
  j["threads"] = threads;
  j["stage_seeds"] = stage_seeds;
  j["outputs"] = outputs;
  j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(const std::string& text) {
  RunManifest m;
  try {
    const auto j = json::parse(text);
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config_source = j.at("config_source").get<std::string>();
    m.experiment = j.at("experiment").get<std::string>();
    m.version = j.value("version", "");
    m.wall_seconds = j.value("wall_seconds", 0.0);
    m.threads = j.value("threads", 1u);
    m.stage_seeds = j.value("stage_seeds", std::map<std::string, std::uint64_t>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    m.output_dir = j.value("output_dir", "");
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  return m;
}

}  // namespace chaoslab::harness
