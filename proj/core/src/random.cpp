#include "heterotomo/random.hpp"

namespace heterotomo {

std::uint64_t mix_seed(std::uint64_t value) {
  std::uint64_t z = value + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
    : engine_(mix_seed(mix_seed(mix_seed(seed) ^ static_cast<std::uint64_t>(purpose)) ^ index)) {}

double RandomStream::uniform(double lo, double hi) {
  // 53 random bits -> [0, 1)
  const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double RandomStream::normal() { return normal_(engine_); }

}  // namespace heterotomo
