#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "confboost/geometry.hpp"
#include "confboost/tracklet.hpp"

namespace confboost::testing {

// Seeded generator for property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  bool coin(double p = 0.5) { return uniform() < p; }

  BBox box(double extent = 200.0, double min_size = 1.0, double max_size = 80.0) {
    return BBox{uniform(-extent, extent), uniform(-extent, extent), uniform(min_size, max_size),
                uniform(min_size, max_size)};
  }
  // A second box overlapping `b` more often than an independent draw would.
  BBox near(const BBox& b, double spread = 0.3) {
    return BBox{b.x + uniform(-spread, spread) * b.w, b.y + uniform(-spread, spread) * b.h,
                b.w * uniform(1.0 - spread, 1.0 + spread), b.h * uniform(1.0 - spread, 1.0 + spread)};
  }
  Detection detection(double conf_lo = 0.0, double conf_hi = 1.0) {
    return Detection{box(), uniform(conf_lo, conf_hi), 1};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace confboost::testing
