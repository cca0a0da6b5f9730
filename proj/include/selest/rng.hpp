#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace selest {

// Seeded random source with a pinned draw protocol: every primitive below
// consumes exactly one engine output, so generated artifacts are bit-identical
// across runs and platforms for the same seed.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Index in [0, weights.size()) with probability proportional to weight.
  // Entries marked as used (weight < 0) are skipped. Falls back to the first
  // unused index when all remaining weights are zero.
  size_t weighted_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights)
      if (w > 0.0) total += w;
    const double u = uniform();
    if (total <= 0.0) {
      size_t fallback = weights.size();
      size_t seen = 0, wanted = 0;
      for (size_t i = 0; i < weights.size(); ++i)
        if (weights[i] >= 0.0) ++seen;
      wanted = static_cast<size_t>(u * static_cast<double>(seen));
      for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) continue;
        if (fallback == weights.size()) fallback = i;
        if (wanted-- == 0) return i;
      }
      return fallback;
    }
    double acc = 0.0;
    size_t last = weights.size();
    for (size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last = i;
      if (u * total < acc) return i;
    }
    return last;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace selest
