#include "chaoslab/harness/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace chaoslab::harness {

namespace {

const std::set<std::string> kSweepExperiments = {"strong_rate", "rank_burgers", "moderate", "tv_marginal"};
const std::set<std::string> kKernelExperiments = {"strong_rate", "rank_burgers", "moderate", "tv_marginal",
                                                  "exp_moment"};

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    std::ostringstream os;
    os << source_;
    if (at && at.Mark().line >= 0) os << ':' << at.Mark().line + 1;
    os << ": " << msg;
    throw ConfigError(os.str());
  }

  void expect_map(const YAML::Node& n, const std::string& what) const {
    if (!n.IsMap()) fail(n, "'" + what + "' must be a mapping");
  }

  void allow_keys(const YAML::Node& n, const std::string& section, std::initializer_list<const char*> keys) const {
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
        fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
    }
  }

  template <class T>
  T get(const YAML::Node& parent, const char* key, T fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    try {
      return n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, std::string("key '") + key + "' has the wrong type");
    }
  }

  template <class T>
  T require(const YAML::Node& parent, const char* key, const std::string& section) const {
    const YAML::Node n = parent[key];
    if (!n) fail(parent, "missing key '" + std::string(key) + "' in " + section);
    return get<T>(parent, key, T{});
  }

  std::vector<double> numbers(const YAML::Node& parent, const char* key, std::vector<double> fallback) const {
    const YAML::Node n = parent[key];
    if (!n) return fallback;
    if (n.IsScalar()) return {get<double>(parent, key, 0.0)};
    if (!n.IsSequence()) fail(n, std::string("key '") + key + "' must be a number or a list");
    std::vector<double> out;
    for (const auto& v : n) {
      try {
        out.push_back(v.as<double>());
      } catch (const YAML::Exception&) {
        fail(v, std::string("key '") + key + "' must hold numbers");
      }
    }
    return out;
  }

  const std::string& source() const { return source_; }

 private:
  std::string source_;
};

DensitySpec parse_density(const Reader& r, const YAML::Node& n, const std::string& section) {
  DensitySpec d;
  const auto kind = r.get<std::string>(n, "density", "gaussian");
  try {
    d.kind = DensitySpec::parse_kind(kind);
  } catch (const InvalidArgument& e) {
    r.fail(n["density"], e.what());
  }
  d.mean = r.numbers(n, "mean", {0.0});
  d.stddev = r.get<double>(n, "stddev", 1.0);
  d.lo = r.numbers(n, "lo", {0.0});
  d.hi = r.numbers(n, "hi", {1.0});
  d.separation = r.get<double>(n, "separation", 2.0);
  d.weight = r.get<double>(n, "mode_weight", 0.5);
  if (!(d.stddev > 0.0)) r.fail(n, section + ": stddev must be positive");
  if (d.lo.size() != d.hi.size()) r.fail(n, section + ": lo and hi differ in length");
  for (std::size_t a = 0; a < d.lo.size(); ++a)
    if (!(d.hi[a] > d.lo[a])) r.fail(n, section + ": need lo < hi");
  if (!(d.weight >= 0.0 && d.weight <= 1.0)) r.fail(n, section + ": mode_weight must lie in [0, 1]");
  return d;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"strong_rate", "rank_burgers", "moderate",
                                                 "exp_moment",     "entropy_suite", "mixedlp_suite",
                                                 "zvonkin",     "picard",        "tv_marginal",
                                                 "pde_invariants"};
  return names;
}

InteractionKernel KernelSpec::build() const {
  auto coef = [c = c](double, ConstPoint, ConstPoint) { return c; };
  if (name == "rank") return make_rank_kernel(dim);
  if (name == "power") return make_power_kernel(coef, std::abs(c), alpha, dim);
  if (name == "axis") return make_axis_kernel(alphas, coef, std::abs(c));
  if (name == "mollified") return make_mollified_kernel(make_box_mollifier(dim), eps);
  if (name == "smooth_sin") return make_smooth_sin_kernel();
  if (name == "zero") return make_zero_kernel(dim);
  throw ConfigError("unknown kernel '" + name + "'");
}

DriftEnvelope DriftSpec::build() const {
  if (name == "identity") return make_identity_drift();
  if (name == "linear") return make_linear_drift(scale);
  if (name == "tanh") return make_tanh_drift(scale);
  if (name == "zero") return make_zero_drift();
  if (name == "constant") return make_constant_drift(value.empty() ? std::vector<double>{scale} : value);
  throw ConfigError("unknown drift '" + name + "'");
}

GridField PdeSpec::grid() const { return GridField::line(lo, hi, cells); }

PdeScheme PdeSpec::scheme(double horizon) const {
  PdeScheme s;
  s.dt_pde = dt;
  s.horizon = horizon;
  s.boundary = boundary;
  s.limiter_on = limiter;
  return s;
}

double ExperimentConfig::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<double> ExperimentConfig::list(const std::string& key, std::vector<double> fallback) const {
  const auto it = lists.find(key);
  if (it != lists.end()) return it->second;
  const auto jt = params.find(key);
  if (jt != params.end()) return {jt->second};
  return fallback;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  const Reader r(source_name);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << source_name << ':' << e.mark.line + 1 << ": " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root || !root.IsMap()) throw ConfigError(source_name + ": top level must be a mapping");
  r.allow_keys(root, "top level",
               {"experiment", "seed", "output_dir", "kernel", "drift", "initial", "sim", "sweep", "pde", "params"});

  ExperimentConfig c;
  c.source_name = source_name;
  c.source_text = text;
  c.experiment = r.require<std::string>(root, "experiment", "the top level");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    r.fail(root["experiment"], "unknown experiment '" + c.experiment + "'");
  c.seed = r.get<std::uint64_t>(root, "seed", 1);
  c.output_dir = r.get<std::string>(root, "output_dir", "out/" + c.experiment);

  if (const auto k = root["kernel"]) {
    r.expect_map(k, "kernel");
    r.allow_keys(k, "kernel", {"name", "dim", "alpha", "alphas", "eps", "c", "eps_c", "eps_k"});
    KernelSpec ks;
    ks.name = r.require<std::string>(k, "name", "section 'kernel'");
    ks.dim = r.get<int>(k, "dim", 1);
    ks.alpha = r.get<double>(k, "alpha", 0.5);
    ks.alphas = r.numbers(k, "alphas", {});
    ks.eps = r.get<double>(k, "eps", 0.5);
    ks.c = r.get<double>(k, "c", 1.0);
    ks.eps_c = r.get<double>(k, "eps_c", 1.0);
    ks.eps_k = r.get<double>(k, "eps_k", 2.0);
    try {
      (void)ks.build();
    } catch (const InvalidArgument& e) {
      r.fail(k, std::string("kernel: ") + e.what());
    }
    c.kernel = ks;
  } else if (kKernelExperiments.count(c.experiment)) {
    r.fail(root, "missing key 'kernel' (required by experiment '" + c.experiment + "')");
  }

  if (const auto d = root["drift"]) {
    r.expect_map(d, "drift");
    r.allow_keys(d, "drift", {"name", "scale", "value"});
    c.drift.name = r.require<std::string>(d, "name", "section 'drift'");
    c.drift.scale = r.get<double>(d, "scale", 1.0);
    c.drift.value = r.numbers(d, "value", {});
    try {
      (void)c.drift.build();
    } catch (const InvalidArgument& e) {
      r.fail(d, std::string("drift: ") + e.what());
    }
  }

  if (const auto i = root["initial"]) {
    r.expect_map(i, "initial");
    r.allow_keys(i, "initial",
                 {"density", "mean", "stddev", "lo", "hi", "separation", "mode_weight", "correlation",
                  "alternate", "mixture_weight"});
    c.initial.component = parse_density(r, i, "initial");
    const auto corr = r.get<std::string>(i, "correlation", "iid");
    if (corr == "iid") {
      c.initial.correlation = InitialCorrelation::kIid;
    } else if (corr == "exchangeable_mixture") {
      c.initial.correlation = InitialCorrelation::kExchangeableMixture;
      const auto alt = i["alternate"];
      if (!alt) r.fail(i, "missing key 'alternate' for an exchangeable mixture");
      r.expect_map(alt, "alternate");
      c.initial.alternate = parse_density(r, alt, "alternate");
      c.initial.weight = r.get<double>(i, "mixture_weight", 0.5);
      if (!(c.initial.weight >= 0.0 && c.initial.weight <= 1.0)) r.fail(i, "mixture_weight must lie in [0, 1]");
    } else {
      r.fail(i["correlation"], "unknown correlation '" + corr + "' (expected iid or exchangeable_mixture)");
    }
  } else {
    c.initial.component = DensitySpec::gaussian(0.0, 1.0);
  }

  if (const auto s = root["sim"]) {
    r.expect_map(s, "sim");
    r.allow_keys(s, "sim", {"T", "dt", "sigma", "replicas", "pair_budget", "snapshot_every", "N"});
    c.sim.T = r.get<double>(s, "T", 1.0);
    c.sim.dt = r.get<double>(s, "dt", 1e-3);
    c.sigma = r.get<double>(s, "sigma", 1.0);
    const auto reps = r.get<long long>(s, "replicas", 1);
    if (reps <= 0) r.fail(s["replicas"] ? s["replicas"] : s, "replicas must be >= 1");
    c.sim.replicas = static_cast<std::size_t>(reps);
    c.sim.pair_budget = r.get<double>(s, "pair_budget", 1e11);
    c.sim.snapshot_every = r.get<std::size_t>(s, "snapshot_every", 0);
    c.sim.N = r.get<std::size_t>(s, "N", 1);
    try {
      c.sim.sigma = Diffusion::constant_value(c.sigma);
      c.sim.validate();
    } catch (const InvalidArgument& e) {
      r.fail(s, e.what());
    }
  }
  c.sim.seed = c.seed;
  c.sim.d = 1;

  if (const auto w = root["sweep"]) {
    r.expect_map(w, "sweep");
    r.allow_keys(w, "sweep", {"Ns"});
    for (double v : r.numbers(w, "Ns", {})) {
      if (!(v >= 1.0) || v != std::floor(v)) r.fail(w["Ns"], "Ns must hold positive integers");
      c.Ns.push_back(static_cast<std::size_t>(v));
    }
    for (std::size_t k = 1; k < c.Ns.size(); ++k)
      if (c.Ns[k] <= c.Ns[k - 1]) r.fail(w["Ns"], "Ns must be strictly increasing");
  }
  if (kSweepExperiments.count(c.experiment) && c.Ns.empty())
    r.fail(root, "missing key 'sweep.Ns' (required by experiment '" + c.experiment + "')");

  if (const auto p = root["pde"]) {
    r.expect_map(p, "pde");
    r.allow_keys(p, "pde", {"lo", "hi", "cells", "dt", "boundary", "limiter"});
    c.pde.has_section = true;
    c.pde.lo = r.get<double>(p, "lo", c.pde.lo);
    c.pde.hi = r.get<double>(p, "hi", c.pde.hi);
    c.pde.cells = r.get<std::size_t>(p, "cells", c.pde.cells);
    c.pde.dt = r.get<double>(p, "dt", 0.0);
    c.pde.limiter = r.get<bool>(p, "limiter", true);
    if (!(c.pde.hi > c.pde.lo) || c.pde.cells < 3) r.fail(p, "pde: need lo < hi and at least 3 cells");
    try {
      c.pde.boundary = parse_boundary(r.get<std::string>(p, "boundary", "periodic"));
    } catch (const InvalidArgument& e) {
      r.fail(p["boundary"], e.what());
    }
  }

  if (const auto p = root["params"]) {
    r.expect_map(p, "params");
    for (const auto& kv : p) {
      const auto key = kv.first.as<std::string>();
      if (kv.second.IsSequence())
        c.lists[key] = r.numbers(p, key.c_str(), {});
      else
        c.params[key] = r.get<double>(p, key.c_str(), 0.0);
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace chaoslab::harness
