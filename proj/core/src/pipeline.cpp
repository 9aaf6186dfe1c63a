#include "heterotomo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>

#include <json.hpp>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/symmetric_eigen.hpp"

namespace heterotomo {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void copy_if_present(const fs::path& from_dir, const fs::path& to_dir, const std::string& name) {
  if (fs::exists(from_dir / name) && !fs::equivalent(from_dir, to_dir)) {
    fs::copy_file(from_dir / name, to_dir / name, fs::copy_options::overwrite_existing);
  }
}

}  // namespace

DiskGrid make_disk_grid(int resolution) {
  if (resolution < 2) throw ParameterError("grid resolution must be >= 2");
  DiskGrid g;
  g.resolution = resolution;
  const double h = 2.0 / resolution;
  for (int a = 0; a < resolution; ++a) {
    for (int b = 0; b < resolution; ++b) {
      const Point2 z(-1.0 + (b + 0.5) * h, -1.0 + (a + 0.5) * h);
      if (z.squaredNorm() <= 1.0) {
        g.points.push_back(z);
        g.cells.push_back(a * resolution + b);
      }
    }
  }
  return g;
}

std::string grid_csv(const DiskGrid& grid, const std::vector<std::string>& names,
                     const std::vector<Eigen::VectorXd>& columns) {
  std::string out = "z1,z2";
  for (const auto& n : names) out += ',' + n;
  out += '\n';
  const int t = grid.resolution;
  const double h = 2.0 / t;
  std::size_t next = 0;
  for (int a = 0; a < t; ++a) {
    for (int b = 0; b < t; ++b) {
      out += format_double(-1.0 + (b + 0.5) * h) + ',' + format_double(-1.0 + (a + 0.5) * h);
      const bool inside = next < grid.cells.size() && grid.cells[next] == a * t + b;
      for (const auto& c : columns) {
        out += ',';
        if (inside) out += format_double(c[static_cast<Eigen::Index>(next)]);
      }
      if (inside) ++next;
      out += '\n';
    }
  }
  return out;
}

Eigen::VectorXd read_grid_column(const fs::path& path, const DiskGrid& grid, const std::string& name) {
  const CsvTable table = read_csv(path);
  const std::size_t col = table.column(name);
  const std::size_t cells = static_cast<std::size_t>(grid.resolution) * static_cast<std::size_t>(grid.resolution);
  if (table.rows.size() != cells) throw std::runtime_error(path.string() + ": grid resolution differs");
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.points.size()));
  for (std::size_t p = 0; p < grid.cells.size(); ++p) {
    const std::string& cell = table.rows[static_cast<std::size_t>(grid.cells[p])][col];
    if (cell.empty()) throw std::runtime_error(path.string() + ": missing value inside the disk");
    v[static_cast<Eigen::Index>(p)] = std::stod(cell);
  }
  return v;
}

double rms(const Eigen::VectorXd& v) { return v.size() ? std::sqrt(v.squaredNorm() / v.size()) : 0.0; }

double rmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
  if (estimate.size() != truth.size()) throw ParameterError("rmse: sizes differ");
  return rms(estimate - truth);
}

double correlation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw ParameterError("correlation: sizes differ");
  const Eigen::ArrayXd ca = a.array() - a.mean();
  const Eigen::ArrayXd cb = b.array() - b.mean();
  const double den = std::sqrt((ca * ca).sum() * (cb * cb).sum());
  return den > 0.0 ? (ca * cb).sum() / den : 0.0;
}

TruthGrids truth_on_grid(const PhantomModel& model, const DiskGrid& grid) {
  const Eigen::Index t = static_cast<Eigen::Index>(grid.points.size());
  TruthGrids out{Eigen::VectorXd(t), Eigen::VectorXd(t), Eigen::VectorXd(t)};
  for (Eigen::Index p = 0; p < t; ++p) {
    const Eigen::VectorXd psi = model.bump_values(grid.points[static_cast<std::size_t>(p)]);
    out.mean[p] = model.mean().dot(psi);
    out.cov_diag[p] = psi.dot(model.cov() * psi);
    out.secmom_diag[p] = out.cov_diag[p] + out.mean[p] * out.mean[p];
  }
  return out;
}

Eigen::VectorXd true_leading_component(const PhantomModel& model, const DiskGrid& grid) {
  const Eigen::Index t = static_cast<Eigen::Index>(grid.points.size());
  Eigen::MatrixXd basis(t, model.size());
  for (Eigen::Index p = 0; p < t; ++p) basis.row(p) = model.bump_values(grid.points[static_cast<std::size_t>(p)]).transpose();
  const Eigen::MatrixXd g = basis.transpose() * basis;
  // C G v = lambda v  <=>  (G^{1/2} C G^{1/2}) u = lambda u, v = G^{-1/2} u
  const SymmetricEigen ge = symmetric_eigen(g);
  const Eigen::VectorXd root = ge.values.cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd half = ge.vectors * root.asDiagonal() * ge.vectors.transpose();
  Eigen::VectorXd inv_root = root;
  for (Eigen::Index q = 0; q < root.size(); ++q) inv_root[q] = root[q] > 0.0 ? 1.0 / root[q] : 0.0;
  const Eigen::MatrixXd inv_half = ge.vectors * inv_root.asDiagonal() * ge.vectors.transpose();
  const SymmetricEigen se = symmetric_eigen(half * model.cov() * half);
  Eigen::Index top = 0;
  se.values.maxCoeff(&top);
  return basis * (inv_half * se.vectors.col(top));
}

EstimateResult run_estimate(const RunConfig& config, const Dataset& data, const BlockedGramMatrix* gram,
                            bool throw_on_cg_failure) {
  if (data.side() == 0) throw ParameterError("estimate: dataset is empty");
  const GaussianKernel kernel(config.kernel.gamma);
  EstimateResult out;
  if (config.solver.covariance) {
    for (int i = 0; i < data.n(); ++i) {
      if (data.tilt_count(i) < 2) {
        throw DesignError("covariance estimation needs at least two projections per field (field " +
                          std::to_string(i) + " has one); set solver.covariance = false for mean only");
      }
    }
  }

  auto clock = std::chrono::steady_clock::now();
  if (gram != nullptr) {
    if (!(gram->layout() == layout_of(data))) throw ParameterError("estimate: supplied Gram does not match the dataset");
    out.gram = *gram;
  } else {
    out.gram = assemble_gram(data, kernel);
  }
  out.gram_seconds = seconds_since(clock);

  const Eigen::VectorXd w = observation_vector(data);
  clock = std::chrono::steady_clock::now();
  out.mean = solve_mean(out.gram, w, config.solver.nu);
  out.mean_seconds = seconds_since(clock);

  if (config.solver.covariance) {
    CgOptions opt;
    opt.tol = config.solver.tol;
    opt.max_iter = config.solver.max_iter;
    opt.jacobi = config.solver.precond;
    opt.throw_on_failure = throw_on_cg_failure;
    clock = std::chrono::steady_clock::now();
    out.cov = solve_cov_cg(out.gram, data, w, config.solver.eta, opt);
    out.cov_seconds = seconds_since(clock);
  }

  clock = std::chrono::steady_clock::now();
  out.grid = make_disk_grid(config.grid.resolution);
  out.frame = frame_matrix(kernel, data, out.grid.points);
  out.mean_grid = evaluate_mean(out.frame, out.mean.alpha);
  if (out.cov) {
    out.secmom_diag = evaluate_secmom_diag(out.frame, out.cov->a_hat);
    out.cov_diag = out.secmom_diag - out.mean_grid.cwiseProduct(out.mean_grid);
  }
  out.eval_seconds = seconds_since(clock);
  return out;
}

InvariantMeanResult run_invariant_mean(const RunConfig& config, const Dataset& data) {
  const GaussianKernel kernel(config.kernel.gamma);
  const int nodes = config.invariant.angular_nodes;
  InvariantMeanResult out;
  const BlockedGramMatrix gram = assemble_invariant_gram(data, kernel, nodes);
  out.mean = solve_mean(gram, observation_vector(data), config.solver.nu);

  const Eigen::VectorXd& alpha = out.mean.alpha;
  auto evaluate = [&](const Point2& z) {
    double s = 0.0;
    for (int a = 0; a < data.side(); ++a) {
      if (alpha[a] != 0.0) s += alpha[a] * averaged_feature_eval(kernel, data.location(a), z, nodes);
    }
    return s;
  };

  const int m = config.invariant.radial_points;
  out.radii.resize(m);
  out.profile.resize(m);
  constexpr int kProbeAngles = 8;
  double spread = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : spread)
  for (int k = 0; k < m; ++k) {
    const double radius = static_cast<double>(k) / (m - 1);
    out.radii[k] = radius;
    out.profile[k] = evaluate(Point2(radius, 0.0));
    double lo = out.profile[k], hi = out.profile[k];
    for (int p = 1; p < kProbeAngles; ++p) {
      const double theta = 2.0 * std::numbers::pi * (p + 0.37) / kProbeAngles;
      const double v = evaluate(Point2(radius * std::cos(theta), radius * std::sin(theta)));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    spread = std::max(spread, hi - lo);
  }
  const double scale = out.profile.size() ? out.profile.cwiseAbs().maxCoeff() : 0.0;
  out.angular_variation = scale > 0.0 ? spread / scale : spread;

  out.grid = make_disk_grid(config.grid.resolution);
  out.mean_grid.resize(static_cast<Eigen::Index>(out.grid.points.size()));
#pragma omp parallel for schedule(dynamic)
  for (int p = 0; p < static_cast<int>(out.grid.points.size()); ++p) {
    out.mean_grid[p] = evaluate(out.grid.points[static_cast<std::size_t>(p)]);
  }
  return out;
}

void write_run_manifest(const fs::path& dir, const std::string& command, const RunConfig* config) {
  ojson m;
  m["command"] = command;
  m["version"] = "0.1.0";
  m["config_digest"] = config ? ojson(fnv1a_hex(config_to_json(*config))) : ojson(nullptr);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "run_manifest.json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  m["files"] = ojson::array();
  for (const auto& f : files) {
    m["files"].push_back({{"name", f.filename().string()}, {"bytes", fs::file_size(f)}, {"fnv1a", fnv1a_file(f)}});
  }
  write_text(dir / "run_manifest.json", m.dump(2) + "\n");
}

void cmd_simulate(const RunConfig& config, const fs::path& out) {
  const PhantomModel model = config.phantom.build();
  const Dataset data = generate_dataset(model, config.design, config.design.seed);
  write_dataset(out, data);

  ojson ph = ojson::parse(config_to_json(config))["phantom"];
  ph["digest"] = model.digest();
  ph["size"] = model.size();
  write_text(out / "phantom.json", ph.dump(2) + "\n");
  write_text(out / "config.json", config_to_json(config));

  const DiskGrid grid = make_disk_grid(config.grid.resolution);
  const TruthGrids truth = truth_on_grid(model, grid);
  write_text(out / "truth_mean.csv", grid_csv(grid, {"mean"}, {truth.mean}));
  write_text(out / "truth_cov_diag.csv", grid_csv(grid, {"cov"}, {truth.cov_diag}));
  write_text(out / "truth_secmom_diag.csv", grid_csv(grid, {"secmom"}, {truth.secmom_diag}));
  write_run_manifest(out, "simulate", &config);
}

namespace {

void write_alpha(const fs::path& path, const Eigen::VectorXd& alpha) {
  std::string s = "a,alpha\n";
  for (Eigen::Index a = 0; a < alpha.size(); ++a) s += std::to_string(a) + ',' + format_double(alpha[a]) + '\n';
  write_text(path, s);
}

Eigen::VectorXd read_alpha(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const std::size_t c = t.column("alpha");
  Eigen::VectorXd v(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t a = 0; a < t.rows.size(); ++a) v[static_cast<Eigen::Index>(a)] = std::stod(t.rows[a][c]);
  return v;
}

void write_ahat(const fs::path& dir, const BlockDiagonal& a, double eta, double gamma, const std::string& digest) {
  std::vector<double> flat;
  std::vector<int> sizes;
  for (int i = 0; i < a.blocks(); ++i) {
    sizes.push_back(a.layout().size(i));
    flat.insert(flat.end(), a.block(i).data(), a.block(i).data() + a.block(i).size());
  }
  write_doubles(dir / "ahat.bin", flat.data(), flat.size());
  ojson m;
  m["block_sizes"] = sizes;
  m["eta"] = eta;
  m["kernel_gamma"] = gamma;
  m["dataset_digest"] = digest;
  write_text(dir / "ahat.json", m.dump(2) + "\n");
}

BlockDiagonal read_ahat(const fs::path& dir, const Dataset& data, double gamma) {
  if (!fs::exists(dir / "ahat.bin") || !fs::exists(dir / "ahat.json")) {
    throw std::runtime_error(dir.string() + ": missing second-moment coefficients (ahat.bin); run estimate with covariance");
  }
  const auto meta = nlohmann::json::parse(read_text(dir / "ahat.json"));
  if (meta.at("kernel_gamma").get<double>() != gamma) {
    throw std::runtime_error("coefficients were estimated with a different kernel.gamma");
  }
  const BlockLayout lay = layout_of(data);
  const auto sizes = meta.at("block_sizes").get<std::vector<int>>();
  if (static_cast<int>(sizes.size()) != lay.blocks()) throw std::runtime_error("ahat.json does not match the dataset");
  const std::vector<double> flat = read_doubles(dir / "ahat.bin");
  BlockDiagonal a(lay);
  std::size_t pos = 0;
  for (int i = 0; i < lay.blocks(); ++i) {
    if (sizes[static_cast<std::size_t>(i)] != lay.size(i)) throw std::runtime_error("ahat.json does not match the dataset");
    const std::size_t count = static_cast<std::size_t>(lay.size(i)) * static_cast<std::size_t>(lay.size(i));
    if (pos + count > flat.size()) throw std::runtime_error("ahat.bin is truncated");
    a.block(i) = Eigen::Map<const Eigen::MatrixXd>(flat.data() + pos, lay.size(i), lay.size(i));
    pos += count;
  }
  return a;
}

std::string cov_grid_csv(const DiskGrid& grid, const Eigen::MatrixXd& cov) {
  std::string s = "z1_a,z2_a,z1_b,z2_b,cov\n";
  for (std::size_t p = 0; p < grid.points.size(); ++p) {
    for (std::size_t q = 0; q < grid.points.size(); ++q) {
      s += format_double(grid.points[p].x()) + ',' + format_double(grid.points[p].y()) + ',' +
           format_double(grid.points[q].x()) + ',' + format_double(grid.points[q].y()) + ',' +
           format_double(cov(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q))) + '\n';
    }
  }
  return s;
}

}  // namespace

void cmd_estimate(const RunConfig& config, const fs::path& dataset_dir, const fs::path& out, bool trace) {
  if (!fs::exists(dataset_dir / "observations.csv")) {
    throw std::runtime_error(dataset_dir.string() + ": no observations.csv (run simulate first)");
  }
  const Dataset data = read_dataset(dataset_dir);
  fs::create_directories(out);
  const std::string digest = data.digest();

  BlockedGramMatrix cached;
  const bool have_cache = read_gram(dataset_dir, config.kernel.gamma, digest, cached);
  const EstimateResult est = run_estimate(config, data, have_cache ? &cached : nullptr);

  for (const char* name : {"observations.csv", "dataset.json", "xi.csv", "phantom.json", "truth_mean.csv",
                           "truth_cov_diag.csv", "truth_secmom_diag.csv"}) {
    copy_if_present(dataset_dir, out, name);
  }
  write_text(out / "config.json", config_to_json(config));
  if (config.output.write_gram) write_gram(out, est.gram, config.kernel.gamma, digest);
  write_alpha(out / "alpha.csv", est.mean.alpha);
  write_text(out / "mean_grid.csv", grid_csv(est.grid, {"mean"}, {est.mean_grid}));

  ojson metrics;
  metrics["n"] = data.n();
  metrics["side"] = data.side();
  metrics["gamma"] = config.kernel.gamma;
  metrics["nu"] = config.solver.nu;
  metrics["eta"] = config.solver.eta;
  metrics["grid_resolution"] = config.grid.resolution;
  const EffectiveTiltNumbers eff = effective_tilt_numbers(data.design());
  metrics["effective_tilt"] = {{"r_bar", eff.r_bar}, {"r_sigma2", eff.r_sigma2}, {"r_sigma4", eff.r_sigma4}};
  metrics["mean_solver"] = {{"iterations", est.mean.iterations}, {"relative_residual", est.mean.relative_residual}};

  std::vector<std::string> warnings;
  if (est.cov) {
    const CovarianceCoefficients& cov = *est.cov;
    write_ahat(out, cov.a_hat, cov.eta, config.kernel.gamma, digest);
    write_text(out / "secmom_diag.csv", grid_csv(est.grid, {"secmom", "cov"}, {est.secmom_diag, est.cov_diag}));
    const DiskGrid coarse = make_disk_grid(config.grid.cov_resolution);
    const Eigen::MatrixXd coarse_frame = frame_matrix(GaussianKernel(config.kernel.gamma), data, coarse.points);
    write_text(out / "cov_grid.csv", cov_grid_csv(coarse, evaluate_cov(coarse_frame, cov.a_hat, est.mean.alpha)));
    metrics["cov_solver"] = {{"iterations", cov.report.iterations},
                             {"relative_residual", cov.report.relative_residual},
                             {"converged", cov.report.converged},
                             {"trace_ratio", cov.a_hat.trace() / std::max(cov.a_hat.norm(), 1e-300)}};
    if (!cov.report.converged) {
      warnings.push_back("covariance CG stopped at max_iter with relative residual " +
                         format_double(cov.report.relative_residual));
    }
    if (trace) {
      std::string s = "iteration,relative_residual\n";
      for (std::size_t it = 0; it < cov.report.history.size(); ++it) {
        s += std::to_string(it) + ',' + format_double(cov.report.history[it]) + '\n';
      }
      write_text(out / "cg_trace.csv", s);
    }
  } else {
    metrics["cov_solver"] = nullptr;
  }

  // Scores against the simulation truth when it is available on the same grid.
  metrics["rmse_mean"] = nullptr;
  metrics["rmse_secmom_diag"] = nullptr;
  metrics["rmse_cov_diag"] = nullptr;
  try {
    if (fs::exists(dataset_dir / "truth_mean.csv")) {
      const Eigen::VectorXd tm = read_grid_column(dataset_dir / "truth_mean.csv", est.grid, "mean");
      metrics["rmse_mean"] = rmse(est.mean_grid, tm);
      metrics["rms_truth_mean"] = rms(tm);
    }
    if (est.cov && fs::exists(dataset_dir / "truth_secmom_diag.csv")) {
      const Eigen::VectorXd ts = read_grid_column(dataset_dir / "truth_secmom_diag.csv", est.grid, "secmom");
      const Eigen::VectorXd tc = read_grid_column(dataset_dir / "truth_cov_diag.csv", est.grid, "cov");
      metrics["rmse_secmom_diag"] = rmse(est.secmom_diag, ts);
      metrics["rms_truth_secmom_diag"] = rms(ts);
      metrics["rmse_cov_diag"] = rmse(est.cov_diag, tc);
      metrics["rms_truth_cov_diag"] = rms(tc);
    }
  } catch (const std::exception& e) {
    warnings.push_back(std::string("truth comparison skipped: ") + e.what());
  }
  metrics["timings_s"] = {{"gram", est.gram_seconds}, {"mean", est.mean_seconds},
                          {"covariance", est.cov_seconds}, {"evaluation", est.eval_seconds}};
  metrics["warnings"] = warnings;
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  write_text(out / "metrics.json", metrics.dump(2) + "\n");
  write_run_manifest(out, "estimate", &config);
}

void cmd_pca(const RunConfig& config, const fs::path& estimate_dir, const fs::path& out) {
  if (!fs::exists(estimate_dir / "alpha.csv")) {
    throw std::runtime_error(estimate_dir.string() + ": missing alpha.csv (run estimate first)");
  }
  const Dataset data = read_dataset(estimate_dir);
  const Eigen::VectorXd alpha = read_alpha(estimate_dir / "alpha.csv");
  if (alpha.size() != data.side()) throw std::runtime_error("alpha.csv does not match the dataset");
  const BlockDiagonal a_hat = read_ahat(estimate_dir, data, config.kernel.gamma);

  const GaussianKernel kernel(config.kernel.gamma);
  BlockedGramMatrix gram;
  if (!read_gram(estimate_dir, config.kernel.gamma, data.digest(), gram)) gram = assemble_gram(data, kernel);

  const Eigen::MatrixXd c = covariance_coefficients(a_hat, alpha);
  const SpectralResult full = generalized_eig(c, gram.matrix(), config.solver.k_components, config.solver.eig_method);
  const SpectralResult kept = spd_truncate(full);

  const DiskGrid grid = make_disk_grid(config.grid.resolution);
  const Eigen::MatrixXd frame = frame_matrix(kernel, data, grid.points);
  const Eigen::MatrixXd comps = eval_components(frame, kept);

  fs::create_directories(out);
  write_text(out / "scree.csv", scree_csv(full));
  std::vector<std::string> names;
  std::vector<Eigen::VectorXd> cols;
  for (Eigen::Index l = 0; l < comps.cols(); ++l) {
    names.push_back("psi_" + std::to_string(l + 1));
    cols.push_back(comps.col(l));
  }
  write_text(out / "components.csv", grid_csv(grid, names, cols));

  ojson info;
  info["k_requested"] = config.solver.k_components;
  info["returned"] = full.eigenvalues.size();
  info["negative_count"] = full.negative_count();
  info["kept_positive"] = kept.eigenvalues.size();
  info["eig_method"] = to_string(config.solver.eig_method);
  info["warnings"] = full.warnings;
  info["corr_true_psi1"] = nullptr;
  const PhantomModel model = config.phantom.build();
  if (comps.cols() > 0 && data.phantom_digest == model.digest()) {
    info["corr_true_psi1"] = std::abs(correlation(comps.col(0), true_leading_component(model, grid)));
  }
  for (const auto& w : full.warnings) std::cerr << "warning: " << w << '\n';
  write_text(out / "pca.json", info.dump(2) + "\n");
  write_text(out / "config.json", config_to_json(config));
  write_run_manifest(out, "pca", &config);
}

void cmd_invariant_mean(const RunConfig& config, const fs::path& dataset_dir, const fs::path& out) {
  if (!fs::exists(dataset_dir / "observations.csv")) {
    throw std::runtime_error(dataset_dir.string() + ": no observations.csv (run simulate first)");
  }
  const Dataset data = read_dataset(dataset_dir);
  const InvariantMeanResult res = run_invariant_mean(config, data);
  fs::create_directories(out);
  std::string s = "radius,mean\n";
  for (Eigen::Index k = 0; k < res.radii.size(); ++k) s += format_double(res.radii[k]) + ',' + format_double(res.profile[k]) + '\n';
  write_text(out / "radial_profile.csv", s);
  write_text(out / "invariant_mean_grid.csv", grid_csv(res.grid, {"mean"}, {res.mean_grid}));
  ojson info;
  info["angular_variation"] = res.angular_variation;
  info["angular_nodes"] = config.invariant.angular_nodes;
  info["mean_solver"] = {{"iterations", res.mean.iterations}, {"relative_residual", res.mean.relative_residual}};
  write_text(out / "invariant.json", info.dump(2) + "\n");
  write_text(out / "config.json", config_to_json(config));
  write_run_manifest(out, "invariant-mean", &config);
}

std::string cmd_report(const std::vector<fs::path>& run_dirs, const fs::path& out, std::vector<std::string>* warnings) {
  std::vector<std::string> notes;
  ojson report;
  report["runs"] = ojson::array();
  struct Point {
    double n;
    double rmse;
  };
  std::vector<Point> mean_points;
  static const char* fields[] = {"rmse_mean", "rmse_secmom_diag", "rmse_cov_diag"};
  for (const auto& dir : run_dirs) {
    ojson row;
    row["dir"] = dir.string();
    const fs::path path = dir / "metrics.json";
    if (!fs::exists(path)) {
      notes.push_back(dir.string() + ": metrics.json missing");
      for (const char* f : fields) row[f] = nullptr;
      row["n"] = nullptr;
      report["runs"].push_back(row);
      continue;
    }
    const auto m = nlohmann::json::parse(read_text(path));
    row["n"] = m.contains("n") ? ojson(m["n"]) : ojson(nullptr);
    for (const char* f : fields) {
      if (m.contains(f) && m[f].is_number()) {
        row[f] = m[f].get<double>();
      } else {
        row[f] = nullptr;
        notes.push_back(dir.string() + ": metric " + f + " missing");
      }
    }
    row["effective_tilt"] = m.contains("effective_tilt") ? ojson(m["effective_tilt"]) : ojson(nullptr);
    row["mean_solver"] = m.contains("mean_solver") ? ojson(m["mean_solver"]) : ojson(nullptr);
    row["cov_solver"] = m.contains("cov_solver") ? ojson(m["cov_solver"]) : ojson(nullptr);
    row["timings_s"] = m.contains("timings_s") ? ojson(m["timings_s"]) : ojson(nullptr);
    if (row["n"].is_number() && row["rmse_mean"].is_number()) {
      mean_points.push_back({row["n"].get<double>(), row["rmse_mean"].get<double>()});
    }
    report["runs"].push_back(row);
  }

  // Median RMSE per n, in increasing n.
  std::sort(mean_points.begin(), mean_points.end(), [](const Point& a, const Point& b) { return a.n < b.n; });
  ojson trend = ojson::array();
  std::vector<double> medians;
  for (std::size_t a = 0; a < mean_points.size();) {
    std::size_t b = a;
    std::vector<double> vals;
    while (b < mean_points.size() && mean_points[b].n == mean_points[a].n) vals.push_back(mean_points[b++].rmse);
    std::sort(vals.begin(), vals.end());
    const std::size_t h = vals.size() / 2;
    const double med = vals.size() % 2 ? vals[h] : 0.5 * (vals[h - 1] + vals[h]);
    trend.push_back({{"n", mean_points[a].n}, {"median_rmse_mean", med}, {"runs", vals.size()}});
    medians.push_back(med);
    a = b;
  }
  report["mean_trend"] = trend;
  if (medians.size() >= 2) {
    bool decreasing = true;
    for (std::size_t k = 1; k < medians.size(); ++k) decreasing = decreasing && medians[k] < medians[k - 1];
    report["rmse_mean_decreasing"] = decreasing;
  } else {
    report["rmse_mean_decreasing"] = nullptr;
    notes.push_back("trend needs runs at two or more distinct n");
  }
  report["warnings"] = notes;
  for (const auto& w : notes) std::cerr << "warning: " << w << '\n';
  if (warnings) *warnings = notes;
  const std::string text = report.dump(2) + "\n";
  if (!out.empty()) {
    write_text(out / "report.json", text);
    write_run_manifest(out, "report", nullptr);
  }
  return text;
}

}  // namespace heterotomo
