#pragma once

#include <cmath>
#include <cstdint>

namespace dtnlab {

// One splitmix64 step; used for seeding and for deriving stream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a root seed and a stream index.
// Used for run seeds (root = base seed, index = run number) and for
// per-node streams inside a run (root = run seed, index = node id + 1).
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t s = root;
  std::uint64_t h = splitmix64(s);
  s ^= 0xff51afd7ed558ccdull * (index + 0x632be59bd9b4e019ull);
  return h ^ splitmix64(s);
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-identical across platforms and standard libraries; the std::
// distributions are implementation-defined and unusable for that purpose.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform on (lo, hi]: hi - (hi-lo)*U with U in [0,1) never returns lo
  // and returns hi exactly at U = 0.
  double uniform_open_closed(double lo, double hi) {
    return hi - (hi - lo) * next_double();
  }

  // Exponential with the given mean; log1p keeps the argument in (0, 1].
  double exponential(double mean) { return -mean * std::log1p(-next_double()); }

  // Uniform integer in [0, n). Lemire multiply-shift; the residual bias is
  // n / 2^64 and irrelevant at the index ranges used here.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return next_double() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace dtnlab
