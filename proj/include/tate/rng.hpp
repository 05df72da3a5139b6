#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tate {

// Name of the sampling scheme, recorded in output metadata so runs can be
// replayed bit for bit on any platform. std::mt19937_64 is specified exactly
// by the standard; the uniform/normal mappings below are our own, because the
// std::*_distribution classes are implementation defined.
inline constexpr const char* kRngVersion = "mt19937_64/canon53/boxmuller-v1";

uint64_t splitmix64(uint64_t x);

// Seed for an independent derived stream, e.g. derive_seed(master, 3, unit).
uint64_t derive_seed(uint64_t master, uint64_t tag, uint64_t index = 0);

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(splitmix64(seed)) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via the trigonometric Box-Muller transform; consumes
  // exactly two uniforms per pair and caches the second value.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, n), n >= 1.
  uint64_t below(uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tate
