#pragma once

#include <cstdint>
#include <random>

namespace ladapt::harness {

// Reproducible randomness for environments.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Floating-point conversions are written out here instead of
// using <random> distributions, whose algorithms differ between standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // 53 random bits scaled to [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  double sign() { return (next() >> 63) != 0 ? 1.0 : -1.0; }
  // Box-Muller; the second variate of each pair is kept for the next call.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ladapt::harness
