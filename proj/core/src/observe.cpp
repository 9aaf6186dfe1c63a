#include "heterotomo/observe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/random.hpp"

namespace heterotomo {

const char* to_string(NoiseLaw law) {
  switch (law) {
    case NoiseLaw::constant: return "constant";
    case NoiseLaw::linear: return "linear";
    case NoiseLaw::power: return "power";
  }
  return "constant";
}

const char* to_string(LocationDist dist) {
  return dist == LocationDist::uniform ? "uniform" : "arcsine";
}

NoiseLaw parse_noise_law(const std::string& name) {
  if (name == "constant") return NoiseLaw::constant;
  if (name == "linear") return NoiseLaw::linear;
  if (name == "power") return NoiseLaw::power;
  throw ParameterError("unknown noise law '" + name + "' (constant|linear|power)");
}

LocationDist parse_location_dist(const std::string& name) {
  if (name == "uniform") return LocationDist::uniform;
  if (name == "arcsine") return LocationDist::arcsine;
  throw ParameterError("unknown location distribution '" + name + "' (uniform|arcsine)");
}

double DesignConfig::noise_variance(int tilt_count) const {
  const double base = sigma * sigma;
  switch (noise_law) {
    case NoiseLaw::constant: return base;
    case NoiseLaw::linear: return base * tilt_count;
    case NoiseLaw::power: return base * std::pow(static_cast<double>(tilt_count), kappa);
  }
  return base;
}

void DesignConfig::validate() const {
  if (n < 1) throw ParameterError("design.n must be >= 1");
  if (tilts.empty()) {
    if (r < 1) throw ParameterError("design.r must be >= 1");
  } else {
    if (static_cast<int>(tilts.size()) != n) throw ParameterError("design.r must list n tilt counts");
    for (int t : tilts)
      if (t < 1) throw ParameterError("design.r entries must be >= 1");
  }
  if (s < 1) throw ParameterError("design.s must be >= 1");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("design.sigma must be >= 0");
  if (noise_law == NoiseLaw::power && !(kappa > 0.0 && kappa <= 2.0)) {
    throw ParameterError("design.kappa must lie in (0, 2]");
  }
}

Dataset::Dataset(DesignConfig design, std::vector<int> tilt_counts, std::vector<int> location_counts,
                 std::vector<double> angles, std::vector<double> locations, std::vector<double> values)
    : design_(std::move(design)),
      tilt_counts_(std::move(tilt_counts)),
      location_counts_(std::move(location_counts)),
      angles_(std::move(angles)),
      locations_(std::move(locations)),
      values_(std::move(values)) {
  if (tilt_counts_.empty()) throw ParameterError("Dataset: no fields");
  tilt_offset_.assign(1, 0);
  for (int r : tilt_counts_) {
    if (r < 1) throw ParameterError("Dataset: every field needs at least one tilt");
    tilt_offset_.push_back(tilt_offset_.back() + r);
  }
  if (static_cast<int>(location_counts_.size()) != tilt_offset_.back() ||
      angles_.size() != location_counts_.size()) {
    throw ParameterError("Dataset: tilt table sizes disagree");
  }
  obs_offset_.assign(1, 0);
  for (std::size_t t = 0; t < location_counts_.size(); ++t) {
    if (location_counts_[t] < 1) throw ParameterError("Dataset: every tilt needs a location");
    obs_offset_.push_back(obs_offset_.back() + location_counts_[t]);
    for (int k = 0; k < location_counts_[t]; ++k) obs_tilt_.push_back(static_cast<int>(t));
  }
  if (static_cast<int>(locations_.size()) != obs_offset_.back() || values_.size() != locations_.size()) {
    throw ParameterError("Dataset: observation arrays disagree with the tilt table");
  }
  for (double x : locations_) {
    if (!(std::abs(x) <= 1.0 + kDiskSlack)) throw ParameterError("Dataset: detector location outside [-1, 1]");
  }
}

std::vector<int> Dataset::block_offsets() const {
  std::vector<int> out;
  out.reserve(tilt_counts_.size() + 1);
  for (int i = 0; i <= n(); ++i) out.push_back(block_offset(i));
  return out;
}

int Dataset::flatten(int i, int j, int k) const {
  if (i < 0 || i >= n() || j < 0 || j >= tilt_count(i)) throw DomainError("Dataset::flatten: index out of range");
  const int tilt = first_tilt(i) + j;
  if (k < 0 || k >= location_count(tilt)) throw DomainError("Dataset::flatten: index out of range");
  return tilt_start(tilt) + k;
}

Dataset::Triple Dataset::unflatten(int flat) const {
  if (flat < 0 || flat >= side()) throw DomainError("Dataset::unflatten: index out of range");
  const int tilt = tilt_of(flat);
  const auto it = std::upper_bound(tilt_offset_.begin(), tilt_offset_.end(), tilt);
  const int i = static_cast<int>(it - tilt_offset_.begin()) - 1;
  return {i, tilt - first_tilt(i), flat - tilt_start(tilt)};
}

Dataset Dataset::with_angles(std::vector<double> angles) const {
  Dataset out(design_, tilt_counts_, location_counts_, std::move(angles), locations_, values_);
  out.xi = xi;
  out.phantom_digest = phantom_digest;
  return out;
}

namespace {

std::string observations_csv(const Dataset& d) {
  std::string out = "i,j,k,phi,x,z\n";
  for (int i = 0; i < d.n(); ++i) {
    for (int j = 0; j < d.tilt_count(i); ++j) {
      const int tilt = d.first_tilt(i) + j;
      for (int k = 0; k < d.location_count(tilt); ++k) {
        const int f = d.tilt_start(tilt) + k;
        out += std::to_string(i) + ',' + std::to_string(j) + ',' + std::to_string(k) + ',' +
               format_double(d.angle(tilt)) + ',' + format_double(d.location(f)) + ',' +
               format_double(d.value(f)) + '\n';
      }
    }
  }
  return out;
}

}  // namespace

std::string Dataset::digest() const { return fnv1a_hex(observations_csv(*this)); }

Dataset generate_dataset(const PhantomModel& phantom, const DesignConfig& design, std::uint64_t seed) {
  design.validate();
  const int n = design.n;
  std::vector<int> tilt_counts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) tilt_counts[static_cast<std::size_t>(i)] = design.tilts_of(i);

  std::vector<int> tilt_offset(1, 0);
  for (int r : tilt_counts) tilt_offset.push_back(tilt_offset.back() + r);
  const int tilts = tilt_offset.back();
  const int side = tilts * design.s;

  std::vector<int> location_counts(static_cast<std::size_t>(tilts), design.s);
  std::vector<double> angles(static_cast<std::size_t>(tilts));
  std::vector<double> locations(static_cast<std::size_t>(side));
  std::vector<double> values(static_cast<std::size_t>(side));
  std::vector<Eigen::VectorXd> xi(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    const FieldSample field = sample_field(phantom, seed, static_cast<std::uint64_t>(i));
    xi[static_cast<std::size_t>(i)] = field.xi;
    RandomStream angle_rng(seed, StreamPurpose::angles, static_cast<std::uint64_t>(i));
    RandomStream location_rng(seed, StreamPurpose::locations, static_cast<std::uint64_t>(i));
    RandomStream noise_rng(seed, StreamPurpose::noise, static_cast<std::uint64_t>(i));
    const int r = tilt_counts[static_cast<std::size_t>(i)];
    const double noise_sd = std::sqrt(design.noise_variance(r));
    for (int j = 0; j < r; ++j) {
      const int tilt = tilt_offset[static_cast<std::size_t>(i)] + j;
      const double phi = angle_rng.uniform(0.0, std::numbers::pi);
      angles[static_cast<std::size_t>(tilt)] = phi;
      for (int k = 0; k < design.s; ++k) {
        const std::size_t f = static_cast<std::size_t>(tilt * design.s + k);
        double x = location_rng.uniform(-1.0, 1.0);
        if (design.location_dist == LocationDist::arcsine) x = -std::cos(0.5 * std::numbers::pi * (x + 1.0));
        locations[f] = x;
        values[f] = field_projection(phantom, field, Chord(phi, x)) + noise_sd * noise_rng.normal();
      }
    }
  }

  DesignConfig recorded = design;
  recorded.seed = seed;
  Dataset out(recorded, std::move(tilt_counts), std::move(location_counts), std::move(angles),
              std::move(locations), std::move(values));
  out.xi = std::move(xi);
  out.phantom_digest = phantom.digest();
  return out;
}

EffectiveTiltNumbers effective_tilt_numbers(const DesignConfig& design) {
  design.validate();
  const double ref = design.noise_variance(1);
  double inv = 0.0, inv2 = 0.0, inv4 = 0.0;
  for (int i = 0; i < design.n; ++i) {
    const int r = design.tilts_of(i);
    inv += 1.0 / r;
    if (ref > 0.0) {
      const double w = design.noise_variance(r) / ref;
      inv2 += w / r;
      inv4 += w * w / r;
    }
  }
  const double n = design.n;
  const double r_bar = n / inv;
  if (ref == 0.0) return {r_bar, r_bar, r_bar};
  return {r_bar, n / inv2, n / inv4};
}

void write_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::filesystem::create_directories(dir);
  write_text(dir / "observations.csv", observations_csv(data));

  const DesignConfig& d = data.design();
  nlohmann::ordered_json meta;
  meta["n"] = data.n();
  bool constant_r = true;
  for (int i = 1; i < data.n(); ++i) constant_r = constant_r && data.tilt_count(i) == data.tilt_count(0);
  if (constant_r) {
    meta["r"] = data.tilt_count(0);
  } else {
    std::vector<int> rs;
    for (int i = 0; i < data.n(); ++i) rs.push_back(data.tilt_count(i));
    meta["r"] = rs;
  }
  meta["s"] = d.s;
  meta["sigma"] = d.sigma;
  meta["noise_law"] = to_string(d.noise_law);
  meta["kappa"] = d.kappa;
  meta["angle_dist"] = "uniform";
  meta["location_dist"] = to_string(d.location_dist);
  meta["seed"] = d.seed;
  meta["phantom_digest"] = data.phantom_digest;
  meta["observations_digest"] = data.digest();
  write_text(dir / "dataset.json", meta.dump(2) + "\n");

  if (!data.xi.empty()) {
    std::string out = "i";
    for (Eigen::Index q = 0; q < data.xi[0].size(); ++q) out += ",xi_" + std::to_string(q + 1);
    out += '\n';
    for (std::size_t i = 0; i < data.xi.size(); ++i) {
      out += std::to_string(i);
      for (Eigen::Index q = 0; q < data.xi[i].size(); ++q) out += ',' + format_double(data.xi[i][q]);
      out += '\n';
    }
    write_text(dir / "xi.csv", out);
  }
}

namespace {

int to_int(const std::string& cell, const char* what) {
  std::size_t used = 0;
  const int v = std::stoi(cell, &used);
  if (used != cell.size()) throw std::runtime_error(std::string("bad ") + what + " cell '" + cell + "'");
  return v;
}

double to_double(const std::string& cell) {
  std::size_t used = 0;
  const double v = std::stod(cell, &used);
  if (used != cell.size()) throw std::runtime_error("bad numeric cell '" + cell + "'");
  return v;
}

}  // namespace

Dataset read_dataset(const std::filesystem::path& dir) {
  const CsvTable table = read_csv(dir / "observations.csv");
  if (table.rows.empty()) throw std::runtime_error(dir.string() + ": dataset has no observations");
  const std::size_t ci = table.column("i"), cj = table.column("j"), ck = table.column("k"),
                    cphi = table.column("phi"), cx = table.column("x"), cz = table.column("z");

  std::vector<int> tilt_counts, location_counts;
  std::vector<double> angles, locations, values;
  int last_i = -1, last_j = -1, expect_k = 0;
  for (const auto& row : table.rows) {
    const int i = to_int(row[ci], "i"), j = to_int(row[cj], "j"), k = to_int(row[ck], "k");
    const double phi = to_double(row[cphi]);
    if (i != last_i) {
      if (i != last_i + 1 || j != 0 || k != 0) throw std::runtime_error("observations.csv is not in canonical order");
      tilt_counts.push_back(0);
      last_i = i;
      last_j = -1;
    }
    if (j != last_j) {
      if (j != last_j + 1 || k != 0) throw std::runtime_error("observations.csv is not in canonical order");
      ++tilt_counts.back();
      location_counts.push_back(0);
      angles.push_back(phi);
      last_j = j;
      expect_k = 0;
    }
    if (k != expect_k) throw std::runtime_error("observations.csv is not in canonical order");
    if (phi != angles.back()) throw std::runtime_error("observations.csv: angle varies within a tilt");
    ++expect_k;
    ++location_counts.back();
    locations.push_back(to_double(row[cx]));
    values.push_back(to_double(row[cz]));
  }

  DesignConfig design;
  design.n = static_cast<int>(tilt_counts.size());
  std::string phantom_digest;
  const auto meta_path = dir / "dataset.json";
  if (std::filesystem::exists(meta_path)) {
    const auto meta = nlohmann::json::parse(read_text(meta_path));
    if (meta.contains("r")) {
      if (meta["r"].is_array()) design.tilts = meta["r"].get<std::vector<int>>();
      else design.r = meta["r"].get<int>();
    }
    design.s = meta.value("s", design.s);
    design.sigma = meta.value("sigma", design.sigma);
    design.noise_law = parse_noise_law(meta.value("noise_law", std::string("constant")));
    design.kappa = meta.value("kappa", design.kappa);
    design.location_dist = parse_location_dist(meta.value("location_dist", std::string("uniform")));
    design.seed = meta.value("seed", std::uint64_t{0});
    phantom_digest = meta.value("phantom_digest", std::string());
  } else {
    design.tilts = tilt_counts;
    design.s = location_counts.front();
  }

  Dataset out(design, std::move(tilt_counts), std::move(location_counts), std::move(angles),
              std::move(locations), std::move(values));
  out.phantom_digest = phantom_digest;

  const auto xi_path = dir / "xi.csv";
  if (std::filesystem::exists(xi_path)) {
    const CsvTable xt = read_csv(xi_path);
    for (const auto& row : xt.rows) {
      Eigen::VectorXd v(static_cast<Eigen::Index>(row.size() - 1));
      for (std::size_t q = 1; q < row.size(); ++q) v[static_cast<Eigen::Index>(q - 1)] = to_double(row[q]);
      out.xi.push_back(v);
    }
  }
  return out;
}

}  // namespace heterotomo
