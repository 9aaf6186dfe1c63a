// Acceptance suite. Prints one PASS/FAIL line per criterion and a summary.
// Exits 0 unless HETEROTOMO_ACCEPTANCE_STRICT is set, in which case any
// FAIL makes the exit status 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/pipeline.hpp"
#include "oracles.hpp"

using namespace heterotomo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Outcome> outcomes;

void report(int id, bool pass, const std::string& detail) {
  outcomes.push_back({id, pass, detail});
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::mt19937_64 rng(20261016);

double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Point2 random_disk_point(double radius = 1.0) {
  const double r = radius * std::sqrt(uniform(0, 1)), a = uniform(0, 2 * std::numbers::pi);
  return Point2(r * std::cos(a), r * std::sin(a));
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const double gamma = trial % 2 ? 256.0 : 16.0;
    const GaussianKernel k(gamma);
    const double phi = uniform(0, 2 * std::numbers::pi), x = uniform(-1, 1);
    const Point2 z = random_disk_point();
    const double got = feature_eval(k, Chord(phi, x), z);
    const double want =
        oracle::xray([&](const Eigen::Vector2d& p) { return oracle::gaussian(gamma, p, z); }, phi, x, 1e-13);
    if (want > 0) worst = std::max(worst, std::abs(got - want) / want);
    else worst = std::max(worst, std::abs(got));
  }
  const double t = seconds_since(t0);
  report(1, worst <= 1e-8 && t < 60, fmt("max relative error %.3g over 200 samples, %.1f s", worst, t));
}

void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const GaussianKernel k(trial % 2 ? 256.0 : 16.0);
    const double p1 = uniform(0, std::numbers::pi), x1 = uniform(-1, 1);
    const double p2 = uniform(0, std::numbers::pi), x2 = uniform(-1, 1);
    const double base = induced_kernel(k, Chord(p1, x1), Chord(p2, x2));
    for (double psi : {0.1, 1.0, 2.5})
      worst = std::max(worst, std::abs(induced_kernel(k, Chord(p1 + psi, x1), Chord(p2 + psi, x2)) - base));
    worst = std::max(worst, std::abs(induced_kernel(k, Chord(p1 + std::numbers::pi, -x1), Chord(p2, x2)) - base));
    worst = std::max(worst, std::abs(induced_kernel(k, Chord(p1, x1), Chord(p2 + std::numbers::pi, -x2)) - base));
  }
  const double t = seconds_since(t0);
  report(2, worst <= 1e-10 && t < 60, fmt("max deviation %.3g over 100 pairs, %.1f s", worst, t));
}

void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  const GaussianKernel k(16.0);
  double worst = 0.0, worst_trace = 0.0, worst_pattern = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 4;
    std::vector<int> tilts;
    for (int i = 0; i < n; ++i) tilts.push_back(2 + (trial + i) % 2);
    const int s = 1 + trial % 2;
    const double eta = trial < 5 ? 1e-1 : 1e-3;
    const Dataset data = fixture::random_dataset(tilts, s, 100 + static_cast<std::uint64_t>(trial));
    const BlockedGramMatrix g = assemble_gram(data, k);
    const Eigen::VectorXd w = observation_vector(data);
    CgOptions opt;
    opt.tol = 1e-14;
    opt.max_iter = 20000;
    opt.throw_on_failure = false;
    const CovarianceCoefficients cg = solve_cov_cg(g, data, w, eta, opt);
    const CovarianceCoefficients dense = dense_cov_oracle(g, data, w, eta);
    worst = std::max(worst, (cg.a_hat.dense() - dense.a_hat.dense()).cwiseAbs().maxCoeff());
    worst_trace = std::max(worst_trace, std::abs(cg.a_hat.trace()) / cg.a_hat.norm());
    for (int a = 0; a < data.side(); ++a)
      for (int b = 0; b < data.side(); ++b)
        if (data.tilt_of(a) == data.tilt_of(b)) worst_pattern = std::max(worst_pattern, std::abs(cg.a_hat.dense()(a, b)));
  }
  const double t = seconds_since(t0);
  report(3, worst <= 1e-8 && worst_trace <= 1e-10 && worst_pattern == 0.0 && t < 120,
         fmt("max |CG - dense| %.3g, max |tr|/||A|| %.3g, same-tilt max %.3g, %.1f s", worst, worst_trace,
             worst_pattern, t));
}

void criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  double res = 0.0, orth = 0.0, agree = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int side = 10 + 50 * trial / 19;
    Eigen::MatrixXd phi;
    if (trial % 3 == 0) {
      phi = oracle::random_spd(side, rng, 1e-3);
    } else if (trial % 3 == 1) {
      // low rank metric
      const Eigen::MatrixXd g = Eigen::MatrixXd::Random(side, side / 2);
      phi = g * g.transpose();
    } else {
      std::vector<int> tilts(static_cast<std::size_t>(side / 5), 5);
      const Dataset data = fixture::random_dataset(tilts, 1, static_cast<std::uint64_t>(trial));
      phi = assemble_gram(data, GaussianKernel(256.0)).matrix();
    }
    const Eigen::Index p = phi.rows();
    const Eigen::MatrixXd c = oracle::random_symmetric(static_cast<int>(p), rng);
    const SpectralResult two = generalized_eig(c, phi, static_cast<int>(p));
    const SpectralResult lan = generalized_eig(c, phi, 3, EigMethod::lanczos);
    const SpectralResult top = generalized_eig(c, phi, 3, EigMethod::two_step);
    for (const SpectralResult* r : {&two, &lan}) {
      const Eigen::Index k = r->vectors.cols();
      const double scale = 1.0 + std::abs(r->eigenvalues.cwiseAbs().maxCoeff());
      res = std::max(res, (c * phi * r->vectors - r->vectors * r->eigenvalues.asDiagonal()).cwiseAbs().maxCoeff() / scale);
      orth = std::max(orth, (r->vectors.transpose() * phi * r->vectors - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff());
    }
    const double scale = 1.0 + top.eigenvalues.cwiseAbs().maxCoeff();
    for (int l = 0; l < 3; ++l) {
      agree = std::max(agree, std::abs(top.eigenvalues[l] - lan.eigenvalues[l]) / scale);
      const double overlap = std::abs(top.vectors.col(l).dot(phi * lan.vectors.col(l)));
      agree = std::max(agree, std::abs(1.0 - overlap));
    }
  }
  const double t = seconds_since(t0);
  report(4, res <= 1e-8 && orth <= 1e-8 && agree <= 1e-8 && t < 60,
         fmt("residual %.3g, orthonormality %.3g, two-step vs Lanczos top-3 %.3g, %.1f s", res, orth, agree, t));
}

RunConfig section9(int n, std::uint64_t seed) {
  RunConfig c;
  c.design.n = n;
  c.design.seed = seed;
  return c;
}

/// The n = 100 runs serve criteria 5, 6 and 8; smaller n serve 6 only.
void criteria_5_6_8() {
  const PhantomModel model = PhantomModel::default_model();
  const DiskGrid grid = make_disk_grid(64);
  const TruthGrids truth = truth_on_grid(model, grid);
  const Eigen::VectorXd psi_true = true_leading_component(model, grid);
  const double rms_mean = rms(truth.mean), rms_sec = rms(truth.secmom_diag);

  std::vector<double> mean_ratio, sec_ratio, corr, mean_time, cov_time;
  std::vector<std::vector<double>> trend(3);
  std::vector<int> cg_iters;
  const int sizes[] = {25, 50, 100};
  for (int s = 0; s < 3; ++s) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RunConfig cfg = section9(sizes[s], seed);
      const bool full = sizes[s] == 100;
      cfg.solver.covariance = full;
      const Dataset data = generate_dataset(model, cfg.design, seed);
      const EstimateResult est = run_estimate(cfg, data);
      trend[static_cast<std::size_t>(s)].push_back(rmse(est.mean_grid, truth.mean));
      if (!full) continue;
      mean_time.push_back(est.mean_seconds);
      cov_time.push_back(est.cov_seconds);
      cg_iters.push_back(est.cov->report.iterations);
      if (seed <= 3) {
        mean_ratio.push_back(rmse(est.mean_grid, truth.mean) / rms_mean);
        sec_ratio.push_back(rmse(est.secmom_diag, truth.secmom_diag) / rms_sec);
      }
      const Eigen::MatrixXd c = covariance_coefficients(est.cov->a_hat, est.mean.alpha);
      const SpectralResult kept = spd_truncate(generalized_eig(c, est.gram.matrix(), 5, EigMethod::lanczos));
      corr.push_back(kept.eigenvalues.size() ? std::abs(correlation(est.frame * kept.vectors.col(0), psi_true)) : 0.0);
      std::printf("  n=100 seed %d: mean ratio %.3f, secmom ratio %.3f, |corr psi1| %.3f, cg %d iters\n",
                  static_cast<int>(seed), trend[2].back() / rms_mean,
                  rmse(est.secmom_diag, truth.secmom_diag) / rms_sec, corr.back(), cg_iters.back());
      std::fflush(stdout);
    }
  }
  const double mr = median(mean_ratio), sr = median(sec_ratio);
  const double mt = *std::max_element(mean_time.begin(), mean_time.end());
  const double ct = *std::max_element(cov_time.begin(), cov_time.end());
  report(5, mr <= 0.25 && sr <= 0.5 && mt <= 120 && ct <= 1800,
         fmt("median RMSE(mu)/RMS(mu) %.3f (<= 0.25), median RMSE(Gamma diag)/RMS %.3f (<= 0.5); "
             "max mean solve %.1f s, max covariance CG %.1f s (%d iters)",
             mr, sr, mt, ct, *std::max_element(cg_iters.begin(), cg_iters.end())));
  const double m25 = median(trend[0]), m50 = median(trend[1]), m100 = median(trend[2]);
  report(6, m25 > m50 && m50 > m100, fmt("median RMSE(mu) n=25 %.4f, n=50 %.4f, n=100 %.4f", m25, m50, m100));
  const double mc = median(corr);
  report(8, mc >= 0.8, fmt("median |corr(psi1_hat, psi1)| %.3f over 5 seeds (min %.3f)", mc,
                           *std::min_element(corr.begin(), corr.end())));
}

void criterion_7() {
  const PhantomModel model = PhantomModel::default_model();
  const DiskGrid grid = make_disk_grid(64);
  const TruthGrids truth = truth_on_grid(model, grid);
  double med[2];
  const int rs[] = {2, 8};
  for (int v = 0; v < 2; ++v) {
    std::vector<double> err;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      RunConfig cfg = section9(50, seed);
      cfg.design.r = rs[v];
      cfg.design.noise_law = NoiseLaw::power;
      cfg.design.kappa = 1.5;
      const Dataset data = generate_dataset(model, cfg.design, seed);
      const EstimateResult est = run_estimate(cfg, data);
      err.push_back(rmse(est.secmom_diag, truth.secmom_diag));
    }
    med[v] = median(err);
  }
  report(7, med[1] >= med[0], fmt("median RMSE(Gamma diag) r=2 %.4f, r=8 %.4f", med[0], med[1]));
}

void criterion_9() {
  RunConfig cfg;
  cfg.design.n = 20;
  cfg.design.r = 2;
  cfg.design.s = 5;
  cfg.grid.resolution = 32;
  const auto root = fixture::scratch("acceptance9");
  const Dataset data = generate_dataset(cfg.phantom.build(), cfg.design, 9);
  std::vector<double> permuted = data.angles();
  std::shuffle(permuted.begin(), permuted.end(), rng);
  Dataset shuffled = data.with_angles(permuted);
  write_dataset(root / "a", data);
  write_dataset(root / "b", shuffled);
  cmd_invariant_mean(cfg, root / "a", root / "out_a");
  cmd_invariant_mean(cfg, root / "b", root / "out_b");
  bool same = true;
  for (const char* f : {"radial_profile.csv", "invariant_mean_grid.csv"})
    same = same && read_text(root / "out_a" / f) == read_text(root / "out_b" / f);
  const double variation = run_invariant_mean(cfg, data).angular_variation;
  fs::remove_all(root);
  report(9, same && variation <= 1e-8,
         fmt("outputs %s under angle permutation; angular variation %.3g", same ? "identical" : "differ", variation));
}

void criterion_10() {
  const PhantomModel model = PhantomModel::default_model();
  std::vector<Point2> probes{Point2(0.55, 0.0), Point2(0.275, 0.476), Point2(-0.5, 0.05), Point2(0.0, 0.0),
                             Point2(0.3, -0.4)};
  const int draws = 10000;
  const std::size_t p = probes.size();
  Eigen::MatrixXd y(draws, static_cast<Eigen::Index>(p));
  for (int d = 0; d < draws; ++d) {
    const FieldSample f = sample_field(model, 2026, static_cast<std::uint64_t>(d));
    for (std::size_t a = 0; a < p; ++a) y(d, static_cast<Eigen::Index>(a)) = field_eval(model, f, probes[a]);
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < p; ++a) {
    const Eigen::Index ia = static_cast<Eigen::Index>(a);
    const double mu = true_mean_eval(model, probes[a]);
    const Eigen::ArrayXd ca = y.col(ia).array() - mu;
    const double sd = std::sqrt(ca.square().mean());
    if (sd > 0) worst = std::max(worst, std::abs(ca.mean()) / (sd / std::sqrt(draws)));
    else worst = std::max(worst, std::abs(ca.mean()) > 0 ? 1e300 : 0.0);
    for (std::size_t b = a; b < p; ++b) {
      const Eigen::ArrayXd prod = ca * (y.col(static_cast<Eigen::Index>(b)).array() - true_mean_eval(model, probes[b]));
      const double cov = true_cov_eval(model, probes[a], probes[b]);
      const double se = std::sqrt((prod - prod.mean()).square().mean() / draws);
      if (se > 0) worst = std::max(worst, std::abs(prod.mean() - cov) / se);
      else worst = std::max(worst, std::abs(prod.mean() - cov) > 1e-12 ? 1e300 : 0.0);
    }
  }
  report(10, worst <= 4.0, fmt("max deviation %.2f standard errors over 5 means and 15 covariances", worst));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_9();
  criterion_10();
  criteria_5_6_8();
  criterion_7();
  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  int passed = 0;
  std::printf("\nsummary (%.0f s)\n", seconds_since(t0));
  for (const Outcome& o : outcomes) {
    std::printf("criterion %d: %s\n", o.id, o.pass ? "PASS" : "FAIL");
    passed += o.pass;
  }
  std::printf("%d/%zu criteria passed\n", passed, outcomes.size());
  const bool strict = std::getenv("HETEROTOMO_ACCEPTANCE_STRICT") != nullptr;
  return strict && passed != static_cast<int>(outcomes.size()) ? 1 : 0;
}
