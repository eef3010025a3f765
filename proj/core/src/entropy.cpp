#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "chaoslab/chaosmetrics.hpp"
#include "chaoslab/errors.hpp"

namespace chaoslab {

DiscreteMeasure::DiscreteMeasure(std::vector<double> weights, std::vector<std::int64_t> atoms)
    : weights_(std::move(weights)), atoms_(std::move(atoms)) {
  if (weights_.empty()) throw InvalidArgument("DiscreteMeasure: no atoms");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("DiscreteMeasure: weights must be finite and >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "DiscreteMeasure: weights sum to " << sum << ", not 1";
    throw InvalidArgument(os.str());
  }
  if (atoms_.empty()) {
    atoms_.resize(weights_.size());
    std::iota(atoms_.begin(), atoms_.end(), 0);
  }
  if (atoms_.size() != weights_.size()) throw InvalidArgument("DiscreteMeasure: one label per weight");
  if (std::set<std::int64_t>(atoms_.begin(), atoms_.end()).size() != atoms_.size())
    throw InvalidArgument("DiscreteMeasure: duplicate atoms");
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t n) {
  return DiscreteMeasure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

DiscreteMeasure DiscreteMeasure::dirac(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidArgument("DiscreteMeasure::dirac: atom out of range");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return DiscreteMeasure(std::move(w));
}

namespace {

void require_common_atoms(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.atoms() != nu.atoms()) throw InvalidArgument("discrete measures live on different atom sets");
}

double entropy_sum(std::span<const double> mu, std::span<const double> nu) {
  double h = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] <= 0.0) continue;
    if (nu[i] <= 0.0) return std::numeric_limits<double>::infinity();
    h += mu[i] * std::log(mu[i] / nu[i]);
  }
  return std::max(0.0, h);
}

}  // namespace

double relative_entropy_discrete(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_common_atoms(mu, nu);
  return entropy_sum(mu.weights(), nu.weights());
}

EntropyCheck pinsker_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double slack) {
  require_common_atoms(mu, nu);
  EntropyCheck c;
  const double tv = tv_masses(mu.weights(), nu.weights());
  c.lhs = tv * tv;
  c.rhs = 2.0 * relative_entropy_discrete(mu, nu);
  c.pass = c.lhs <= c.rhs + slack;
  return c;
}

EntropyCheck weighted_pinsker_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                    std::span<const double> f, double slack) {
  require_common_atoms(mu, nu);
  if (f.size() != mu.size()) throw InvalidArgument("weighted_pinsker_check: one f value per atom");
  double pairing = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw InvalidArgument("weighted_pinsker_check: f must be bounded");
    pairing += (mu[i] - nu[i]) * f[i];
    moment += std::exp(f[i] * f[i]) * nu[i];
  }
  EntropyCheck c;
  c.lhs = pairing * pairing;
  c.rhs = 2.0 * (1.0 + std::log(moment)) * relative_entropy_discrete(mu, nu);
  c.pass = c.lhs <= c.rhs + slack;
  return c;
}

ProductSpaceMeasure ProductSpaceMeasure::tensor_power(const DiscreteMeasure& mu, std::size_t n) {
  if (n == 0) throw InvalidArgument("tensor_power: n must be >= 1");
  ProductSpaceMeasure out;
  out.alphabet = mu.size();
  out.particles = n;
  out.weights = {1.0};
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> next(out.weights.size() * mu.size());
    for (std::size_t i = 0; i < out.weights.size(); ++i)
      for (std::size_t e = 0; e < mu.size(); ++e) next[i * mu.size() + e] = out.weights[i] * mu[e];
    out.weights = std::move(next);
  }
  return out;
}

ProductSpaceMeasure ProductSpaceMeasure::marginal(std::size_t k) const {
  if (k == 0 || k > particles) throw InvalidArgument("marginal: k must lie in 1..N");
  std::size_t tail = 1;
  for (std::size_t i = k; i < particles; ++i) tail *= alphabet;
  ProductSpaceMeasure out;
  out.alphabet = alphabet;
  out.particles = k;
  out.weights.assign(weights.size() / tail, 0.0);
  for (std::size_t s = 0; s < weights.size(); ++s) out.weights[s / tail] += weights[s];
  return out;
}

bool ProductSpaceMeasure::is_symmetric(double tol) const {
  std::vector<std::size_t> digits(particles);
  for (std::size_t s = 0; s < weights.size(); ++s) {
    std::size_t r = s;
    for (std::size_t i = particles; i-- > 0;) {
      digits[i] = r % alphabet;
      r /= alphabet;
    }
    for (std::size_t i = 0; i + 1 < particles; ++i) {
      std::swap(digits[i], digits[i + 1]);
      std::size_t t = 0;
      for (auto dgt : digits) t = t * alphabet + dgt;
      std::swap(digits[i], digits[i + 1]);
      if (std::abs(weights[s] - weights[t]) > tol) return false;
    }
  }
  return true;
}

double relative_entropy_discrete(const ProductSpaceMeasure& mu, const ProductSpaceMeasure& nu) {
  if (mu.alphabet != nu.alphabet || mu.particles != nu.particles || mu.states() != nu.states())
    throw InvalidArgument("relative_entropy_discrete: product spaces differ");
  return entropy_sum(mu.weights, nu.weights);
}

EntropyCheck marginal_entropy_bound_check(const ProductSpaceMeasure& muN, const DiscreteMeasure& mu,
                                          std::size_t k, double slack) {
  if (muN.alphabet > 4 || muN.particles > 5)
    throw InvalidArgument("marginal_entropy_bound_check: exhaustive regime needs |E| <= 4 and N <= 5");
  if (mu.size() != muN.alphabet) throw InvalidArgument("marginal_entropy_bound_check: alphabet mismatch");
  std::size_t states = 1;
  for (std::size_t i = 0; i < muN.particles; ++i) states *= muN.alphabet;
  if (muN.states() != states) throw InvalidArgument("marginal_entropy_bound_check: wrong number of states");
  if (!muN.is_symmetric(1e-12))
    throw InvalidArgument("marginal_entropy_bound_check: mu^N is not symmetric");
  EntropyCheck c;
  c.lhs = relative_entropy_discrete(muN.marginal(k), ProductSpaceMeasure::tensor_power(mu, k));
  c.rhs = 2.0 * static_cast<double>(k) / static_cast<double>(muN.particles) *
          relative_entropy_discrete(muN, ProductSpaceMeasure::tensor_power(mu, muN.particles));
  c.pass = c.lhs <= c.rhs + slack;
  return c;
}

}  // namespace chaoslab
