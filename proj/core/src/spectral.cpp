#include "heterotomo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heterotomo/errors.hpp"
#include "heterotomo/io.hpp"
#include "heterotomo/random.hpp"
#include "heterotomo/symmetric_eigen.hpp"

namespace heterotomo {

const char* to_string(EigMethod method) { return method == EigMethod::two_step ? "two_step" : "lanczos"; }

EigMethod parse_eig_method(const std::string& name) {
  if (name == "two_step") return EigMethod::two_step;
  if (name == "lanczos") return EigMethod::lanczos;
  throw ParameterError("unknown eigen method '" + name + "' (two_step|lanczos)");
}

int SpectralResult::negative_count() const {
  return static_cast<int>((eigenvalues.array() < 0.0).count());
}

Eigen::MatrixXd covariance_coefficients(const BlockDiagonal& a_hat, const Eigen::VectorXd& alpha) {
  if (alpha.size() != a_hat.layout().side()) throw ParameterError("covariance_coefficients: sizes do not conform");
  Eigen::MatrixXd c = a_hat.dense();
  c.noalias() -= alpha * alpha.transpose();
  return 0.5 * (c + c.transpose());
}

namespace {

constexpr double kPhiFloor = 1e-12;
constexpr double kSmallEigen = 1e-8;

// Picks the k entries of largest magnitude and orders them non-increasing.
std::vector<int> select_top(const Eigen::VectorXd& theta, int k) {
  std::vector<int> order(static_cast<std::size_t>(theta.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(theta[a]) > std::abs(theta[b]); });
  order.resize(static_cast<std::size_t>(std::min<Eigen::Index>(k, theta.size())));
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] > theta[b]; });
  return order;
}

void fix_signs(Eigen::MatrixXd& v) {
  for (Eigen::Index l = 0; l < v.cols(); ++l) {
    const double big = v.col(l).cwiseAbs().maxCoeff();
    for (Eigen::Index a = 0; a < v.rows(); ++a) {
      if (std::abs(v(a, l)) > 1e-12 * big) {
        if (v(a, l) < 0.0) v.col(l) *= -1.0;
        break;
      }
    }
  }
}

void note_shortfall(SpectralResult& out, int k) {
  if (out.eigenvalues.size() < k) {
    out.warnings.push_back("requested " + std::to_string(k) + " components, only " +
                           std::to_string(out.eigenvalues.size()) + " available at the numerical rank of Phi");
  }
}

SpectralResult two_step(const Eigen::MatrixXd& c, const Eigen::MatrixXd& phi, int k) {
  const SymmetricEigen pe = symmetric_eigen(phi);
  const double top = pe.values.size() ? pe.values.maxCoeff() : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index a = 0; a < pe.values.size(); ++a)
    if (top > 0.0 && pe.values[a] > kPhiFloor * top) keep.push_back(a);
  const Eigen::Index rank = static_cast<Eigen::Index>(keep.size());

  SpectralResult out;
  if (rank == 0) {
    out.eigenvalues.resize(0);
    out.vectors.resize(phi.rows(), 0);
    note_shortfall(out, k);
    return out;
  }
  Eigen::MatrixXd q(phi.rows(), rank);
  Eigen::VectorXd d(rank);
  for (Eigen::Index r = 0; r < rank; ++r) {
    q.col(r) = pe.vectors.col(keep[static_cast<std::size_t>(r)]);
    d[r] = pe.values[keep[static_cast<std::size_t>(r)]];
  }
  const Eigen::MatrixXd b = q * d.cwiseSqrt().asDiagonal();
  const Eigen::MatrixXd cb = c * b;
  Eigen::MatrixXd s = b.transpose() * cb;
  s = 0.5 * (s + s.transpose()).eval();
  const SymmetricEigen se = symmetric_eigen(s);

  const std::vector<int> order = select_top(se.values, k);
  const Eigen::Index m = static_cast<Eigen::Index>(order.size());
  out.eigenvalues.resize(m);
  out.vectors.resize(phi.rows(), m);
  const double lead = se.values.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd q_scaled = q * d.cwiseSqrt().cwiseInverse().asDiagonal();
  for (Eigen::Index l = 0; l < m; ++l) {
    const int idx = order[static_cast<std::size_t>(l)];
    const double lambda = se.values[idx];
    out.eigenvalues[l] = lambda;
    if (std::abs(lambda) >= kSmallEigen * lead && lambda != 0.0) {
      out.vectors.col(l) = cb * se.vectors.col(idx) / lambda;
    } else {
      out.vectors.col(l) = q_scaled * se.vectors.col(idx);
    }
  }
  note_shortfall(out, k);
  return out;
}

SpectralResult lanczos(const Eigen::MatrixXd& c, const Eigen::MatrixXd& phi, int k, const LanczosOptions& opt) {
  const Eigen::Index side = phi.rows();
  const Eigen::Index cap = opt.max_steps > 0 ? std::min<Eigen::Index>(opt.max_steps, side) : side;

  RandomStream rng(opt.seed, StreamPurpose::generic, 0);
  Eigen::VectorXd start(side);
  for (Eigen::Index a = 0; a < side; ++a) start[a] = rng.normal();
  // Starting in range(C Phi) keeps the Krylov space out of null(Phi).
  Eigen::VectorXd v = c * (phi * start);

  Eigen::MatrixXd q(side, cap), phi_q(side, cap);
  std::vector<double> alpha, beta;
  SpectralResult out;
  Eigen::VectorXd theta;
  Eigen::MatrixXd u;

  Eigen::VectorXd pv = phi * v;
  double norm = std::sqrt(std::max(0.0, v.dot(pv)));
  Eigen::Index m = 0;
  double scale = 0.0;
  for (Eigen::Index j = 0; j < cap; ++j) {
    if (!(norm > 0.0) || (j > 0 && norm <= 1e-13 * scale)) break;
    q.col(j) = v / norm;
    phi_q.col(j) = pv / norm;
    if (j > 0) beta.push_back(norm);
    m = j + 1;

    Eigen::VectorXd wv = c * phi_q.col(j);
    const double a = phi_q.col(j).dot(wv);
    alpha.push_back(a);
    scale = std::max(scale, std::abs(a) + (beta.empty() ? 0.0 : beta.back()));
    // full reorthogonalization in the Phi inner product, done twice
    for (int pass = 0; pass < 2; ++pass) {
      const Eigen::VectorXd coef = phi_q.leftCols(m).transpose() * wv;
      wv.noalias() -= q.leftCols(m) * coef;
    }
    v = wv;
    pv = phi * v;
    norm = std::sqrt(std::max(0.0, v.dot(pv)));

    // Ritz check every few steps once enough vectors exist
    if (m >= k && (m % 5 == 0 || m == cap)) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
      for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
      const SymmetricEigen te = symmetric_eigen(t);
      const std::vector<int> order = select_top(te.values, k);
      const double lead = te.values.cwiseAbs().maxCoeff();
      bool done = true;
      for (int idx : order) {
        if (norm * std::abs(te.vectors(m - 1, idx)) > opt.tol * std::max(lead, 1e-300)) done = false;
      }
      if (done) break;
    }
  }
  if (m == 0) {
    out.eigenvalues.resize(0);
    out.vectors.resize(side, 0);
    note_shortfall(out, k);
    return out;
  }
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  const SymmetricEigen te = symmetric_eigen(t);
  const std::vector<int> order = select_top(te.values, k);
  const Eigen::Index count = static_cast<Eigen::Index>(order.size());
  out.eigenvalues.resize(count);
  out.vectors.resize(side, count);
  for (Eigen::Index l = 0; l < count; ++l) {
    out.eigenvalues[l] = te.values[order[static_cast<std::size_t>(l)]];
    out.vectors.col(l) = q.leftCols(m) * te.vectors.col(order[static_cast<std::size_t>(l)]);
  }
  note_shortfall(out, k);
  return out;
}

}  // namespace

SpectralResult generalized_eig(const Eigen::MatrixXd& c, const Eigen::MatrixXd& phi, int k, EigMethod method,
                               const LanczosOptions& lanczos_options) {
  if (k < 1) throw ParameterError("generalized_eig: k must be >= 1");
  if (c.rows() != c.cols() || phi.rows() != phi.cols() || c.rows() != phi.rows()) {
    throw ParameterError("generalized_eig: C and Phi must be square of equal size");
  }
  SpectralResult out = method == EigMethod::two_step ? two_step(c, phi, k) : lanczos(c, phi, k, lanczos_options);
  fix_signs(out.vectors);
  return out;
}

SpectralResult spd_truncate(const SpectralResult& result) {
  SpectralResult out;
  out.warnings = result.warnings;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index l = 0; l < result.eigenvalues.size(); ++l)
    if (result.eigenvalues[l] > 0.0) keep.push_back(l);
  const Eigen::Index m = static_cast<Eigen::Index>(keep.size());
  out.eigenvalues.resize(m);
  out.vectors.resize(result.vectors.rows(), m);
  for (Eigen::Index l = 0; l < m; ++l) {
    out.eigenvalues[l] = result.eigenvalues[keep[static_cast<std::size_t>(l)]];
    out.vectors.col(l) = result.vectors.col(keep[static_cast<std::size_t>(l)]);
  }
  return out;
}

Eigen::MatrixXd eval_components(const Eigen::MatrixXd& frame, const SpectralResult& result) {
  if (frame.cols() != result.vectors.rows()) throw ParameterError("eval_components: sizes do not conform");
  return frame * result.vectors;
}

std::string scree_csv(const SpectralResult& result) {
  std::string out = "l,lambda\n";
  for (Eigen::Index l = 0; l < result.eigenvalues.size(); ++l) {
    out += std::to_string(l + 1) + ',' + format_double(result.eigenvalues[l]) + '\n';
  }
  return out;
}

}  // namespace heterotomo
