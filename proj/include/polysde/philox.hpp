#ifndef POLYSDE_PHILOX_HPP
#define POLYSDE_PHILOX_HPP

#include <array>
#include <cmath>
#include <cstdint>

namespace polysde {

// Philox4x32-10 keyed counter generator (Salmon et al., SC'11 constants).
// Every draw is a pure function of (key, counter), so noise streams and
// weight initialization are order-independent and reproducible across
// platforms and thread schedules.
namespace philox {

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

using Counter = std::array<std::uint32_t, 4>;

inline Counter block(std::uint64_t key, Counter ctr) {
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

// Maps a 32-bit word to (0, 1); the half-ulp offset keeps log() finite.
inline double to_unit(std::uint32_t x) {
  return (static_cast<double>(x) + 0.5) * 0x1p-32;
}

}  // namespace philox

// One Philox block expands to two independent standard normals (Box-Muller)
// plus the raw words, enough for every consumer in this project.
struct NormalPair {
  double z0;
  double z1;
};

inline NormalPair normal_pair(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                              std::uint32_t c2, std::uint32_t c3) {
  const philox::Counter r = philox::block(key, {c0, c1, c2, c3});
  const double u1 = philox::to_unit(r[0]);
  const double u2 = philox::to_unit(r[1]);
  const double mag = std::sqrt(-2.0 * std::log(u1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  return {mag * std::cos(two_pi * u2), mag * std::sin(two_pi * u2)};
}

inline double standard_normal(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                              std::uint32_t c2, std::uint32_t c3) {
  return normal_pair(key, c0, c1, c2, c3).z0;
}

inline double uniform_unit(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                           std::uint32_t c2, std::uint32_t c3) {
  return philox::to_unit(philox::block(key, {c0, c1, c2, c3})[0]);
}

// Domain tags keep the independent consumers of one seed from colliding on
// counter values.
namespace rng_domain {
constexpr std::uint32_t kBrownian = 0;
constexpr std::uint32_t kKlCoefficients = 1;
constexpr std::uint32_t kMlpInit = 2;
constexpr std::uint32_t kSampling = 3;
}  // namespace rng_domain

}  // namespace polysde

#endif  // POLYSDE_PHILOX_HPP
