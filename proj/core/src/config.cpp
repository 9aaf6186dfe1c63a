#include "heterotomo/config.hpp"

#include <cctype>

#include <json.hpp>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"

namespace heterotomo {

using nlohmann::json;

PhantomModel PhantomConfig::build() const {
  if (preset == "default") return PhantomModel::default_model();
  return PhantomModel(bumps, mean, cov);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (!in_string && (c == '#' || c == ';')) return line.substr(0, i);
  }
  return line;
}

json parse_key_value(const std::string& text) {
  json root = json::object();
  std::string section;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = trim(strip_comment(text.substr(start, end - start)));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!root.contains(section)) root[section] = json::object();
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(key, "key outside of a [section]");
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::parse_error&) {
      value = raw;
    }
    root[section][key] = value;
  }
  return root;
}

template <class T>
T get_as(const json& node, const std::string& path) {
  try {
    return node.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path, std::string("wrong type: ") + e.what());
  }
}

double get_number(const json& node, const std::string& path) {
  if (!node.is_number()) throw ConfigError(path, "expected a number");
  return node.get<double>();
}

int get_int(const json& node, const std::string& path) {
  if (!node.is_number_integer()) throw ConfigError(path, "expected an integer");
  return node.get<int>();
}

bool get_bool(const json& node, const std::string& path) {
  if (!node.is_boolean()) throw ConfigError(path, "expected true or false");
  return node.get<bool>();
}

std::string get_string(const json& node, const std::string& path) {
  if (!node.is_string()) throw ConfigError(path, "expected a string");
  return node.get<std::string>();
}

Eigen::VectorXd get_vector(const json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(node.size()));
  for (std::size_t i = 0; i < node.size(); ++i) v[static_cast<Eigen::Index>(i)] = get_number(node[i], path);
  return v;
}

Eigen::MatrixXd get_matrix(const json& node, const std::string& path) {
  if (!node.is_array() || node.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  const std::size_t rows = node.size();
  const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!node[i].is_array() || node[i].size() != cols) throw ConfigError(path, "rows must have equal length");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = get_number(node[i][j], path);
  }
  return m;
}

template <class Fn>
void for_keys(const json& root, const std::string& section, Fn&& fn) {
  if (!root.contains(section)) return;
  const json& node = root.at(section);
  if (!node.is_object()) throw ConfigError(section, "expected a section");
  for (auto it = node.begin(); it != node.end(); ++it) fn(it.key(), it.value(), section + "." + it.key());
}

[[noreturn]] void unknown(const std::string& path) { throw ConfigError(path, "unknown key"); }

void require_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(path, "must be positive");
}

RunConfig from_json(const json& root) {
  if (!root.is_object()) throw ConfigError("", "configuration must be an object");
  static const char* sections[] = {"phantom", "design", "kernel", "solver", "grid", "invariant", "output"};
  for (auto it = root.begin(); it != root.end(); ++it) {
    bool known = false;
    for (const char* s : sections) known = known || it.key() == s;
    if (!known) throw ConfigError(it.key(), "unknown section");
  }

  RunConfig cfg;
  bool has_bumps = false, has_mean = false, has_cov = false;
  for_keys(root, "phantom", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "preset") {
      cfg.phantom.preset = get_string(v, path);
      if (cfg.phantom.preset != "default" && cfg.phantom.preset != "custom") {
        throw ConfigError(path, "expected default or custom");
      }
    } else if (key == "bumps") {
      if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of bumps");
      for (std::size_t b = 0; b < v.size(); ++b) {
        const std::string bp = path + "[" + std::to_string(b) + "]";
        if (!v[b].is_object() || !v[b].contains("center") || !v[b].contains("dispersion")) {
          throw ConfigError(bp, "bump needs center and dispersion");
        }
        const Eigen::VectorXd center = get_vector(v[b]["center"], bp + ".center");
        const Eigen::MatrixXd disp = get_matrix(v[b]["dispersion"], bp + ".dispersion");
        if (center.size() != 2 || disp.rows() != 2 || disp.cols() != 2) throw ConfigError(bp, "expected 2-D center and 2x2 dispersion");
        cfg.phantom.bumps.push_back({Point2(center[0], center[1]), disp});
      }
      has_bumps = true;
    } else if (key == "mean") {
      cfg.phantom.mean = get_vector(v, path);
      has_mean = true;
    } else if (key == "cov") {
      cfg.phantom.cov = get_matrix(v, path);
      has_cov = true;
    } else {
      unknown(path);
    }
  });
  if (has_bumps || has_mean || has_cov) {
    if (!(has_bumps && has_mean && has_cov)) throw ConfigError("phantom", "bumps, mean and cov must be given together");
    cfg.phantom.preset = "custom";
  } else if (cfg.phantom.preset == "custom") {
    throw ConfigError("phantom.preset", "custom phantom needs bumps, mean and cov");
  }

  for_keys(root, "design", [&](const std::string& key, const json& v, const std::string& path) {
    DesignConfig& d = cfg.design;
    if (key == "n") d.n = get_int(v, path);
    else if (key == "r") {
      if (v.is_array()) {
        d.tilts.clear();
        for (const auto& e : v) d.tilts.push_back(get_int(e, path));
      } else {
        d.r = get_int(v, path);
      }
    } else if (key == "s") d.s = get_int(v, path);
    else if (key == "sigma") d.sigma = get_number(v, path);
    else if (key == "noise_law") {
      try {
        d.noise_law = parse_noise_law(get_string(v, path));
      } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
      }
    } else if (key == "kappa") d.kappa = get_number(v, path);
    else if (key == "angle_dist") {
      if (get_string(v, path) != "uniform") throw ConfigError(path, "only uniform angles are supported");
    } else if (key == "location_dist") {
      try {
        d.location_dist = parse_location_dist(get_string(v, path));
      } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
      }
    } else if (key == "seed") {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
        throw ConfigError(path, "expected a non-negative integer");
      }
      d.seed = v.get<std::uint64_t>();
    } else unknown(path);
  });
  try {
    cfg.design.validate();
  } catch (const ParameterError& e) {
    const std::string msg = e.what();
    throw ConfigError(msg.substr(0, msg.find(' ')), msg);
  }

  for_keys(root, "kernel", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "gamma") {
      cfg.kernel.gamma = get_number(v, path);
      require_positive(cfg.kernel.gamma, path);
    } else unknown(path);
  });

  for_keys(root, "solver", [&](const std::string& key, const json& v, const std::string& path) {
    SolverConfig& s = cfg.solver;
    if (key == "nu") {
      s.nu = get_number(v, path);
      require_positive(s.nu, path);
    } else if (key == "eta") {
      s.eta = get_number(v, path);
      require_positive(s.eta, path);
    } else if (key == "tol") {
      s.tol = get_number(v, path);
      require_positive(s.tol, path);
    } else if (key == "max_iter") {
      s.max_iter = get_int(v, path);
      if (s.max_iter < 1) throw ConfigError(path, "must be >= 1");
    } else if (key == "eig_method") {
      try {
        s.eig_method = parse_eig_method(get_string(v, path));
      } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
      }
    } else if (key == "k_components") {
      s.k_components = get_int(v, path);
      if (s.k_components < 1) throw ConfigError(path, "must be >= 1");
    } else if (key == "precond") {
      s.precond = get_bool(v, path);
    } else if (key == "covariance") {
      s.covariance = get_bool(v, path);
    } else unknown(path);
  });

  for_keys(root, "grid", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "resolution") cfg.grid.resolution = get_int(v, path);
    else if (key == "cov_resolution") cfg.grid.cov_resolution = get_int(v, path);
    else unknown(path);
    if ((key == "resolution" ? cfg.grid.resolution : cfg.grid.cov_resolution) < 2) throw ConfigError(path, "must be >= 2");
  });

  for_keys(root, "invariant", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "angular_nodes") {
      cfg.invariant.angular_nodes = get_int(v, path);
      if (cfg.invariant.angular_nodes < 4) throw ConfigError(path, "must be >= 4");
    } else if (key == "radial_points") {
      cfg.invariant.radial_points = get_int(v, path);
      if (cfg.invariant.radial_points < 2) throw ConfigError(path, "must be >= 2");
    } else unknown(path);
  });

  for_keys(root, "output", [&](const std::string& key, const json& v, const std::string& path) {
    if (key == "write_gram") cfg.output.write_gram = get_bool(v, path);
    else unknown(path);
  });

  if (cfg.phantom.preset == "custom") {
    try {
      (void)cfg.phantom.build();
    } catch (const ParameterError& e) {
      throw ConfigError("phantom", e.what());
    }
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  std::size_t first = 0;
  while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  if (first < text.size() && text[first] == '{') {
    json root;
    try {
      root = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return from_json(root);
  }
  return from_json(parse_key_value(text));
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const std::exception& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(text);
}

std::string config_to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["phantom"]["preset"] = c.phantom.preset;
  if (c.phantom.preset == "custom") {
    for (const auto& b : c.phantom.bumps) {
      j["phantom"]["bumps"].push_back({{"center", {b.center.x(), b.center.y()}},
                                       {"dispersion", {{b.dispersion(0, 0), b.dispersion(0, 1)},
                                                       {b.dispersion(1, 0), b.dispersion(1, 1)}}}});
    }
    j["phantom"]["mean"] = std::vector<double>(c.phantom.mean.data(), c.phantom.mean.data() + c.phantom.mean.size());
    for (Eigen::Index r = 0; r < c.phantom.cov.rows(); ++r) {
      std::vector<double> row;
      for (Eigen::Index s = 0; s < c.phantom.cov.cols(); ++s) row.push_back(c.phantom.cov(r, s));
      j["phantom"]["cov"].push_back(row);
    }
  }
  const DesignConfig& d = c.design;
  j["design"]["n"] = d.n;
  if (d.tilts.empty()) j["design"]["r"] = d.r;
  else j["design"]["r"] = d.tilts;
  j["design"]["s"] = d.s;
  j["design"]["sigma"] = d.sigma;
  j["design"]["noise_law"] = to_string(d.noise_law);
  j["design"]["kappa"] = d.kappa;
  j["design"]["location_dist"] = to_string(d.location_dist);
  j["design"]["seed"] = d.seed;
  j["kernel"]["gamma"] = c.kernel.gamma;
  j["solver"]["nu"] = c.solver.nu;
  j["solver"]["eta"] = c.solver.eta;
  j["solver"]["tol"] = c.solver.tol;
  j["solver"]["max_iter"] = c.solver.max_iter;
  j["solver"]["eig_method"] = to_string(c.solver.eig_method);
  j["solver"]["k_components"] = c.solver.k_components;
  j["solver"]["precond"] = c.solver.precond;
  j["solver"]["covariance"] = c.solver.covariance;
  j["grid"]["resolution"] = c.grid.resolution;
  j["grid"]["cov_resolution"] = c.grid.cov_resolution;
  j["invariant"]["angular_nodes"] = c.invariant.angular_nodes;
  j["invariant"]["radial_points"] = c.invariant.radial_points;
  j["output"]["write_gram"] = c.output.write_gram;
  return j.dump(2) + "\n";
}

}  // namespace heterotomo
