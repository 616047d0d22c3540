#pragma once

#include <cstdint>
#include <random>

namespace niss {

std::uint64_t splitmix64(std::uint64_t& state);

// Random stream for one agent/coin role. Streams derived from the same seed
// with different ids are independent in practice and reproducible bit for bit.
//
// In von Neumann mode every random bit is extracted from pairs of raw biased
// bits (standing in for unused source samples with P(+1) = raw_bias), and
// biased coins compare those fair bits against the binary expansion of p.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id);

  void enable_von_neumann(double raw_bias);
  bool von_neumann() const { return vn_; }

  double uniform();            // [0, 1) with 53 random bits
  bool coin(double p);         // true with probability p
  int fair_bit();
  std::uint64_t raw_bits_used() const { return raw_bits_; }

 private:
  std::mt19937_64 eng_;
  bool vn_ = false;
  double raw_bias_ = 0.5;
  std::uint64_t raw_bits_ = 0;
};

}  // namespace niss
