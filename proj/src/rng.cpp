#include "riscf/rng.hpp"

#include <cmath>

namespace riscf {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t absorb(std::uint64_t key, std::uint64_t word) {
  return mix64(key + kGolden + word);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, StreamKind kind, std::uint32_t a,
                       std::uint32_t b, std::uint32_t block) {
  std::uint64_t k = mix64(seed + kGolden);
  k = absorb(k, static_cast<std::uint64_t>(kind));
  k = absorb(k, (static_cast<std::uint64_t>(a) << 32) | b);
  k = absorb(k, block);
  key_ = k;
}

std::uint64_t CounterRng::next_u64() {
  counter_ += 1;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform01() {
  // 53 random bits mapped to (0, 1]; never returns 0 so log() is safe.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::uniform_phase() {
  return 2.0 * M_PI * (static_cast<double>(next_u64() >> 11) * 0x1.0p-53);
}

double CounterRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * M_PI * u2;
  spare_ = r * std::sin(t);
  have_spare_ = true;
  return r * std::cos(t);
}

std::complex<double> CounterRng::cnormal() {
  constexpr double inv_sqrt2 = 0.70710678118654752440;
  const double re = normal();
  const double im = normal();
  return {re * inv_sqrt2, im * inv_sqrt2};
}

}  // namespace riscf
