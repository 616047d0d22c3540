#include "niss/rng.hpp"

#include <cmath>

#include "niss/errors.hpp"

namespace niss {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed ^ (0xD1B54A32D192ED03ull * (stream_id + 1));
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                    static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
  eng_.seed(seq);
}

void Rng::enable_von_neumann(double raw_bias) {
  if (!(raw_bias > 0 && raw_bias < 1)) {
    throw InvalidInput("Rng: von Neumann raw bias must lie strictly inside (0,1)");
  }
  vn_ = true;
  raw_bias_ = raw_bias;
}

int Rng::fair_bit() {
  if (!vn_) return static_cast<int>(eng_() >> 63);
  const auto raw = [&] {
    ++raw_bits_;
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53 < raw_bias_ ? 1 : 0;
  };
  for (;;) {
    const int a = raw(), b = raw();
    if (a != b) return a;
  }
}

double Rng::uniform() {
  if (!vn_) return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  std::uint64_t bits = 0;
  for (int i = 0; i < 53; ++i) bits = (bits << 1) | static_cast<std::uint64_t>(fair_bit());
  return static_cast<double>(bits) * 0x1.0p-53;
}

bool Rng::coin(double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  if (!vn_) return uniform() < p;
  // Compare a fair binary expansion against the expansion of p, bit by bit.
  double rest = p;
  for (int i = 0; i < 64; ++i) {
    rest *= 2;
    const int pb = rest >= 1 ? 1 : 0;
    rest -= pb;
    const int b = fair_bit();
    if (b != pb) return b < pb;
  }
  return false;
}

}  // namespace niss
