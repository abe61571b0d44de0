#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace kronmle {

// Seeded generator whose output stream is fixed by the seed alone, on every
// platform: mt19937_64 (fully specified by the standard) with hand-written
// conversions, since std distributions are implementation-defined.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Uniform integer in [lo, hi], by rejection.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::optional<double> spare_;
};

}  // namespace kronmle
