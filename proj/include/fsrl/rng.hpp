#pragma once

#include <cstdint>
#include <random>

namespace fsrl {

// Seeded RNG stream. Conversions to uniform doubles / bounded ints are
// spelled out explicitly so event logs are bit-identical across runs of
// the same build (no reliance on std::uniform_*_distribution internals).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // Derives an independent child stream, e.g. per (run seed, agent index).
  Rng derive(std::uint64_t index) const {
    std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  // Uniform on (0,1), never exactly 0 or 1.
  double uniform() {
    double u = (next() >> 11) * 0x1.0p-53;
    if (u <= 0.0) u = 0x1.0p-53;
    return u;
  }

  // Uniform integer in {0, ..., n-1}.
  int uniform_int(int n) {
    return static_cast<int>(next() % static_cast<std::uint64_t>(n));
  }

  // Uniform on [-a, a].
  double uniform_sym(double a) { return a * (2.0 * uniform() - 1.0); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fsrl
