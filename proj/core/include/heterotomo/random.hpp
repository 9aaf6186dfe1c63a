#pragma once

#include <cstdint>
#include <random>

namespace heterotomo {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t value);

/// Stream purposes. Each (seed, purpose, index) triple names a distinct,
/// reproducible generator, so workers never share RNG state.
enum class StreamPurpose : std::uint64_t {
  field_coefficients = 1,
  angles = 2,
  locations = 3,
  noise = 4,
  generic = 5,
};

/// mt19937_64 seeded from a mixed (seed, purpose, index) triple.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index = 0);

  double uniform(double lo, double hi);
  double normal();

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace heterotomo
