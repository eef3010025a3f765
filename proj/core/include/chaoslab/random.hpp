#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace chaoslab {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (key, counter), so streams can be replayed or split
// across workers without shared state.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static constexpr Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
            static_cast<std::uint32_t>(p0)};
  }

  Key key_;
};

// Purpose tags keep independent uses of one seed in disjoint counter space.
enum class StreamTag : std::uint8_t {
  kBrownian = 1,
  kInitial = 2,
  kMixture = 3,
  kMonteCarlo = 4,
  kTrial = 5,
};

// Draws addressed by (replica, stream, index, tag, block).
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint32_t replica)
      : philox_(seed), replica_(replica) {}

  Philox4x32::Counter raw(std::uint32_t stream, std::uint32_t index,
                          StreamTag tag, std::uint32_t block = 0) const {
    return philox_({index, stream, replica_,
                    (std::uint32_t{static_cast<std::uint8_t>(tag)} << 24) |
                        (block & 0xFFFFFFu)});
  }

  // Two uniforms in (0, 1] with 53-bit resolution.
  std::array<double, 2> uniform2(std::uint32_t stream, std::uint32_t index,
                                 StreamTag tag, std::uint32_t block = 0) const {
    const auto r = raw(stream, index, tag, block);
    return {to_unit(r[0], r[1]), to_unit(r[2], r[3])};
  }

  // Two independent standard normals (Box-Muller).
  std::array<double, 2> normal2(std::uint32_t stream, std::uint32_t index,
                                StreamTag tag, std::uint32_t block = 0) const {
    const auto u = uniform2(stream, index, tag, block);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  // Fills `out` with standard normals for one (stream, index, tag).
  void normals(std::uint32_t stream, std::uint32_t index, StreamTag tag,
               std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); k += 2) {
      const auto z = normal2(stream, index, tag, static_cast<std::uint32_t>(k / 2));
      out[k] = z[0];
      if (k + 1 < out.size()) out[k + 1] = z[1];
    }
  }

  std::uint32_t replica() const { return replica_; }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        ((std::uint64_t{hi} << 32) | lo) >> 11;  // 53 bits
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  Philox4x32 philox_;
  std::uint32_t replica_;
};

// Brownian increments W^i_{(k+1)dt} - W^i_{k dt} for stream i and step k.
class BrownianDriver {
 public:
  BrownianDriver(std::uint64_t seed, std::uint32_t replica, double dt);

  void increment(std::uint32_t stream, std::uint32_t step,
                 std::span<double> out) const {
    rng_.normals(stream, step, StreamTag::kBrownian, out);
    for (double& v : out) v *= sqrt_dt_;
  }

  double dt() const { return dt_; }
  std::uint64_t seed() const { return seed_; }
  std::uint32_t replica() const { return rng_.replica(); }

 private:
  std::uint64_t seed_;
  CounterRng rng_;
  double dt_;
  double sqrt_dt_;
};

}  // namespace chaoslab
