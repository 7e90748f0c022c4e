#pragma once

#include <complex>
#include <cstdint>

namespace riscf {

// Stream identifiers for channel and solver draws. Each (kind, a, b, block)
// tuple owns an independent substream, so adding or skipping one link class
// never perturbs the draws of another.
enum class StreamKind : std::uint32_t {
  direct_user = 1,  // a = BS index,  b = user index
  direct_eve = 2,   // a = BS index
  bs_ris = 3,       // a = BS index,  b = RIS index
  ris_user = 4,     // a = RIS index, b = user index
  ris_eve = 5,      // a = RIS index, b = user index (0 when shared)
  phase_init = 6,   // solver initialization
  generic = 7,
};

// Counter-based generator: draw i of a stream is a pure function of
// (key, i). The key is derived from the seed and the stream identifiers
// with a SplitMix64-style mixing chain.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamKind kind, std::uint32_t a = 0,
             std::uint32_t b = 0, std::uint32_t block = 0);
  explicit CounterRng(std::uint64_t raw_key) : key_(raw_key) {}

  std::uint64_t next_u64();
  double uniform01();              // (0, 1]
  double uniform_phase();          // [0, 2*pi)
  double normal();                 // N(0, 1), Box-Muller
  std::complex<double> cnormal();  // CN(0, 1): re, im ~ N(0, 1/2)

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace riscf
