#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heterotomo/geometry.hpp"
#include "heterotomo/phantom.hpp"

namespace heterotomo {

/// Noise variance as a function of the tilt count r:
/// constant sigma^2, linear sigma^2 r, power sigma^2 r^kappa.
enum class NoiseLaw { constant, linear, power };
enum class LocationDist { uniform, arcsine };

const char* to_string(NoiseLaw law);
const char* to_string(LocationDist dist);
/// Throws ParameterError on an unknown name.
NoiseLaw parse_noise_law(const std::string& name);
LocationDist parse_location_dist(const std::string& name);

struct DesignConfig {
  int n = 100;
  /// Constant tilt count, used when `tilts` is empty.
  int r = 5;
  /// Optional per-field tilt counts r_i (length n).
  std::vector<int> tilts;
  /// Locations per tilt.
  int s = 10;
  double sigma = 0.1;
  NoiseLaw noise_law = NoiseLaw::constant;
  double kappa = 1.0;
  LocationDist location_dist = LocationDist::uniform;
  std::uint64_t seed = 0;

  int tilts_of(int i) const { return tilts.empty() ? r : tilts[static_cast<std::size_t>(i)]; }
  /// sigma_r^2 under the configured law.
  double noise_variance(int tilt_count) const;
  /// Throws ParameterError naming the offending field.
  void validate() const;
};

/// Observations in canonical flat order: field i, then tilt j, then location k.
/// Tilts are numbered globally across fields ("tilt id").
class Dataset {
 public:
  Dataset() = default;
  /// Builds the index tables. `tilt_counts[i]` = r_i, `location_counts[t]` =
  /// s of global tilt t, `angles[t]` the tilt angle; locations/values are
  /// flat. Throws ParameterError on inconsistent sizes or |x| > 1.
  Dataset(DesignConfig design, std::vector<int> tilt_counts, std::vector<int> location_counts,
          std::vector<double> angles, std::vector<double> locations, std::vector<double> values);

  const DesignConfig& design() const noexcept { return design_; }
  int n() const noexcept { return static_cast<int>(tilt_counts_.size()); }
  int side() const noexcept { return static_cast<int>(values_.size()); }
  int tilt_count(int i) const { return tilt_counts_[static_cast<std::size_t>(i)]; }
  int total_tilts() const noexcept { return static_cast<int>(angles_.size()); }

  /// First global tilt id of field i; tilt (i, j) has id first_tilt(i) + j.
  int first_tilt(int i) const { return tilt_offset_[static_cast<std::size_t>(i)]; }
  int location_count(int tilt) const { return location_counts_[static_cast<std::size_t>(tilt)]; }
  /// Flat position of the first observation of a tilt.
  int tilt_start(int tilt) const { return obs_offset_[static_cast<std::size_t>(tilt)]; }

  /// Observation block of field i: [block_offset(i), block_offset(i) + block_size(i)).
  int block_offset(int i) const { return obs_offset_[static_cast<std::size_t>(first_tilt(i))]; }
  int block_size(int i) const { return block_offset(i + 1) - block_offset(i); }
  /// n + 1 block boundaries.
  std::vector<int> block_offsets() const;

  int flatten(int i, int j, int k) const;
  struct Triple {
    int i, j, k;
  };
  Triple unflatten(int flat) const;
  int tilt_of(int flat) const { return obs_tilt_[static_cast<std::size_t>(flat)]; }

  double angle(int tilt) const { return angles_[static_cast<std::size_t>(tilt)]; }
  double location(int flat) const { return locations_[static_cast<std::size_t>(flat)]; }
  double value(int flat) const { return values_[static_cast<std::size_t>(flat)]; }
  ProjectionIndex index(int flat) const { return Chord(angle(tilt_of(flat)), location(flat)); }

  const std::vector<double>& angles() const noexcept { return angles_; }
  const std::vector<double>& locations() const noexcept { return locations_; }
  const std::vector<double>& values() const noexcept { return values_; }

  /// Ground-truth intensities, kept when the dataset was simulated.
  std::vector<Eigen::VectorXd> xi;
  std::string phantom_digest;

  /// Same observations with replaced tilt angles (length total_tilts()).
  Dataset with_angles(std::vector<double> angles) const;

  /// FNV-1a over the canonical CSV text.
  std::string digest() const;

 private:
  DesignConfig design_;
  std::vector<int> tilt_counts_;
  std::vector<int> tilt_offset_;
  std::vector<int> location_counts_;
  std::vector<int> obs_offset_;
  std::vector<int> obs_tilt_;
  std::vector<double> angles_;
  std::vector<double> locations_;
  std::vector<double> values_;
};

/// Z_ijk = P Y_i(phi_ij, X_ijk) + eps_ijk. Angles Uniform[0, pi), locations
/// per design, noise N(0, sigma_{r_i}^2). Each field i draws from its own
/// streams derived from `seed`, so the result does not depend on threading.
Dataset generate_dataset(const PhantomModel& phantom, const DesignConfig& design, std::uint64_t seed);

struct EffectiveTiltNumbers {
  double r_bar;
  double r_sigma2;
  double r_sigma4;
};

/// Harmonic-mean tilt number and its noise-weighted variants, with the
/// single-tilt variance sigma_1^2 as reference. With sigma = 0 the weighted
/// variants fall back to r_bar.
EffectiveTiltNumbers effective_tilt_numbers(const DesignConfig& design);

/// observations.csv (i, j, k, phi, x, z), dataset.json and, when present, xi.csv.
void write_dataset(const std::filesystem::path& dir, const Dataset& data);
/// Reads what write_dataset wrote. Throws std::runtime_error on missing or
/// malformed files.
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace heterotomo
