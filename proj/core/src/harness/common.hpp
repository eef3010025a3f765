#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "chaoslab/harness/experiments.hpp"

namespace chaoslab::harness::detail {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  for (double x : v) out.mean += x;
  out.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double var = 0.0;
  for (double x : v) var += (x - out.mean) * (x - out.mean);
  var /= static_cast<double>(v.size() - 1);
  out.se = std::sqrt(var / static_cast<double>(v.size()));
  return out;
}

// splitmix64 over the run seed and a stage label.
inline std::uint64_t stage_seed(std::uint64_t seed, std::string_view stage) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : stage) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ull;
  std::uint64_t z = seed + h + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t use_seed(ExperimentResult& r, std::uint64_t seed, const std::string& stage) {
  const auto s = stage_seed(seed, stage);
  r.stage_seeds[stage] = s;
  return s;
}

inline void add_check(ExperimentResult& r, std::string name, bool pass, std::string measured) {
  r.checks.push_back({std::move(name), pass, std::move(measured)});
}

inline void add_row(ExperimentResult& r, const std::string& experiment, std::size_t N,
                    std::string metric, double value, double se = 0.0) {
  r.rows.push_back({experiment, N, std::move(metric), value, se});
}

inline bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

inline std::string join_values(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt::format("{:.4g}", v[k]);
  return s;
}

// CDF on cell centres from a cell-averaged density (midpoint of each cell).
inline GridField cdf_from_density(const GridField& rho) {
  GridField V = rho;
  const double h = rho.spacing()[0];
  double acc = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    V[i] = acc + 0.5 * rho[i] * h;
    acc += rho[i] * h;
  }
  return V;
}

}  // namespace chaoslab::harness::detail
