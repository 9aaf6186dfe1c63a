#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "heterotomo/observe.hpp"

namespace fixture {

inline heterotomo::DesignConfig design(int n, int r, int s, double sigma = 0.1) {
  heterotomo::DesignConfig d;
  d.n = n;
  d.r = r;
  d.s = s;
  d.sigma = sigma;
  return d;
}

/// Dataset with uniform random angles, locations in [-0.9, 0.9] and
/// standard normal values, built without a phantom.
inline heterotomo::Dataset random_dataset(const std::vector<int>& tilts, int s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 3.14159), loc(-0.9, 0.9);
  std::normal_distribution<double> normal;
  heterotomo::DesignConfig d = design(static_cast<int>(tilts.size()), 0, s);
  d.tilts = tilts;
  std::vector<int> locs;
  std::vector<double> angles, xs, zs;
  for (int r : tilts)
    for (int j = 0; j < r; ++j) {
      locs.push_back(s);
      angles.push_back(angle(rng));
      for (int k = 0; k < s; ++k) {
        xs.push_back(loc(rng));
        zs.push_back(normal(rng));
      }
    }
  return heterotomo::Dataset(d, tilts, locs, angles, xs, zs);
}

inline std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("heterotomo_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace fixture
