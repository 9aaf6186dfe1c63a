#include "heterotomo/solve.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "heterotomo/errors.hpp"

namespace heterotomo {

MeanCoefficients solve_mean(const BlockedGramMatrix& phi, const Eigen::VectorXd& w, double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw ParameterError("solve_mean: nu must be positive");
  if (w.size() != phi.side()) throw ParameterError("solve_mean: w has the wrong length");
  MeanCoefficients out;
  out.nu = nu;
  const double wnorm = w.norm();
  if (wnorm == 0.0) {
    out.alpha = Eigen::VectorXd::Zero(w.size());
    return out;
  }
  const Eigen::MatrixXd& m = phi.matrix();
  if (phi.side() <= kDirectMeanLimit) {
    Eigen::MatrixXd sys = m;
    sys.diagonal().array() += nu;
    Eigen::LLT<Eigen::MatrixXd> llt(sys);
    if (llt.info() != Eigen::Success) throw ConvergenceError("solve_mean: Cholesky failed", 0, 1.0);
    out.alpha = llt.solve(w);
  } else {
    constexpr double tol = 1e-10;
    const int max_iter = 10 * phi.side();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(w.size());
    Eigen::VectorXd r = w, p = w, q;
    double rr = r.squaredNorm();
    int it = 0;
    while (std::sqrt(rr) > tol * wnorm) {
      if (it == max_iter) {
        throw ConvergenceError("solve_mean: conjugate gradients did not converge", it, std::sqrt(rr) / wnorm);
      }
      q.noalias() = m.selfadjointView<Eigen::Lower>() * p;
      q += nu * p;
      const double step = rr / p.dot(q);
      x += step * p;
      r -= step * q;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
      ++it;
    }
    out.alpha = std::move(x);
    out.iterations = it;
  }
  out.relative_residual = ((m * out.alpha + nu * out.alpha) - w).norm() / wnorm;
  return out;
}

namespace {

void check_layout(const BlockedGramMatrix& phi, const BlockDiagonal& a) {
  if (!(phi.layout() == a.layout())) throw ParameterError("block layouts do not conform");
}

// Workspace-reusing form of apply_block_outer.
void block_outer_into(const BlockedGramMatrix& phi, const BlockDiagonal& a, Eigen::MatrixXd& y,
                      BlockDiagonal& out) {
  const BlockLayout& lay = phi.layout();
  const Eigen::MatrixXd& m = phi.matrix();
  const int side = lay.side();
  y.resize(side, side);
  // Y = Phi blockdiag(A): column block i' is Phi[:, i'] A_{i'}.
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < lay.blocks(); ++i) {
    y.middleCols(lay.offset(i), lay.size(i)).noalias() = m.middleCols(lay.offset(i), lay.size(i)) * a.block(i);
  }
  // B_i = Y[rows i, :] Phi[:, cols i]
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < lay.blocks(); ++i) {
    out.block(i).noalias() = y.middleRows(lay.offset(i), lay.size(i)) * m.middleCols(lay.offset(i), lay.size(i));
  }
}

void eliminate_in_place(BlockDiagonal& a, const Dataset& data) {
  for (int i = 0; i < data.n(); ++i) {
    const int base = data.block_offset(i);
    for (int j = 0; j < data.tilt_count(i); ++j) {
      const int tilt = data.first_tilt(i) + j;
      a.block(i).block(data.tilt_start(tilt) - base, data.tilt_start(tilt) - base, data.location_count(tilt),
                       data.location_count(tilt)).setZero();
    }
  }
}

void symmetrize(BlockDiagonal& a) {
  for (int i = 0; i < a.blocks(); ++i) {
    Eigen::MatrixXd& b = a.block(i);
    b = (0.5 * (b + b.transpose())).eval();
  }
}

void check_tilts(const Dataset& data) {
  for (int i = 0; i < data.n(); ++i) {
    if (data.tilt_count(i) < 2) {
      throw DesignError("covariance estimation requires at least two tilts per field; field " +
                        std::to_string(i) + " has " + std::to_string(data.tilt_count(i)));
    }
  }
}

}  // namespace

BlockDiagonal apply_block_outer(const BlockedGramMatrix& phi, const BlockDiagonal& a) {
  check_layout(phi, a);
  BlockDiagonal out(phi.layout());
  Eigen::MatrixXd y;
  block_outer_into(phi, a, y, out);
  return out;
}

BlockDiagonal apply_elimination(const BlockDiagonal& a, const Dataset& data) {
  if (!(a.layout() == layout_of(data))) throw ParameterError("apply_elimination: layout does not match dataset");
  BlockDiagonal out = a;
  eliminate_in_place(out, data);
  return out;
}

BlockDiagonal apply_cov_operator(const BlockedGramMatrix& phi, double eta, const BlockDiagonal& a,
                                 const Dataset& data) {
  if (!(eta > 0.0)) throw ParameterError("apply_cov_operator: eta must be positive");
  BlockDiagonal out = apply_block_outer(phi, apply_elimination(a, data));
  eliminate_in_place(out, data);
  symmetrize(out);
  out.axpy(eta, a);
  return out;
}

CovarianceCoefficients solve_cov_cg(const BlockedGramMatrix& phi, const Dataset& data,
                                    const Eigen::VectorXd& w, double eta, const CgOptions& options) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ParameterError("solve_cov_cg: eta must be positive");
  if (!(options.tol > 0.0) || options.max_iter < 1) throw ParameterError("solve_cov_cg: bad tolerance or iteration cap");
  check_tilts(data);
  const BlockLayout lay = layout_of(data);
  if (!(phi.layout() == lay)) throw ParameterError("solve_cov_cg: Gram does not match dataset");

  CovarianceCoefficients out{BlockDiagonal(lay), eta, {}};
  BlockDiagonal rhs = block_outer_observations(w, data);
  eliminate_in_place(rhs, data);
  const double bnorm = rhs.norm();
  out.report.history.push_back(bnorm == 0.0 ? 0.0 : 1.0);
  if (bnorm == 0.0) return out;

  BlockDiagonal precond;
  if (options.jacobi) {
    precond = BlockDiagonal(lay);
    const Eigen::VectorXd d = phi.matrix().diagonal();
    for (int i = 0; i < lay.blocks(); ++i) {
      const auto di = d.segment(lay.offset(i), lay.size(i));
      precond.block(i) = ((di * di.transpose()).array() + eta).inverse().matrix();
    }
  }
  auto apply_precond = [&](const BlockDiagonal& r) {
    if (!options.jacobi) return r;
    BlockDiagonal z = r;
    for (int i = 0; i < lay.blocks(); ++i) z.block(i).array() *= precond.block(i).array();
    return z;
  };

  Eigen::MatrixXd workspace;
  BlockDiagonal q(lay);
  auto apply_op = [&](const BlockDiagonal& p) {
    // p already lies in range(J)
    block_outer_into(phi, p, workspace, q);
    eliminate_in_place(q, data);
    symmetrize(q);
    q.axpy(eta, p);
  };

  BlockDiagonal& x = out.a_hat;
  BlockDiagonal r = rhs;
  BlockDiagonal z = apply_precond(r);
  BlockDiagonal p = z;
  double rz = r.dot(z);
  double rel = 1.0;
  int it = 0;
  while (it < options.max_iter) {
    apply_op(p);
    const double step = rz / p.dot(q);
    x.axpy(step, p);
    r.axpy(-step, q);
    ++it;
    rel = r.norm() / bnorm;
    out.report.history.push_back(rel);
    if (rel <= options.tol) break;
    z = apply_precond(r);
    const double rz_next = r.dot(z);
    p.scale(rz_next / rz);
    p.axpy(1.0, z);
    rz = rz_next;
  }
  symmetrize(x);
  out.report.iterations = it;
  out.report.relative_residual = rel;
  out.report.converged = rel <= options.tol;
  if (!out.report.converged && options.throw_on_failure) {
    throw ConvergenceError("solve_cov_cg: no convergence after " + std::to_string(it) +
                               " iterations, relative residual " + std::to_string(rel),
                           it, rel);
  }
  return out;
}

CovarianceCoefficients dense_cov_oracle(const BlockedGramMatrix& phi, const Dataset& data,
                                        const Eigen::VectorXd& w, double eta) {
  if (!(eta > 0.0)) throw ParameterError("dense_cov_oracle: eta must be positive");
  check_tilts(data);
  const BlockLayout lay = layout_of(data);
  struct Unknown {
    int i, a, b;  // block, global rows
  };
  std::vector<Unknown> unknowns;
  for (int i = 0; i < data.n(); ++i) {
    const int lo = lay.offset(i), hi = lo + lay.size(i);
    for (int a = lo; a < hi; ++a)
      for (int b = lo; b < hi; ++b)
        if (data.tilt_of(a) != data.tilt_of(b)) unknowns.push_back({i, a, b});
  }
  const int m = static_cast<int>(unknowns.size());
  if (m > kDenseOracleLimit) throw ParameterError("dense_cov_oracle: " + std::to_string(m) + " unknowns exceed the limit");

  const Eigen::MatrixXd& g = phi.matrix();
  Eigen::MatrixXd sys(m, m);
  Eigen::VectorXd rhs(m);
  for (int u = 0; u < m; ++u) {
    const Unknown& p = unknowns[static_cast<std::size_t>(u)];
    rhs[u] = w[p.a] * w[p.b];
    for (int v = 0; v < m; ++v) {
      const Unknown& q = unknowns[static_cast<std::size_t>(v)];
      sys(u, v) = g(p.a, q.a) * g(q.b, p.b);
    }
    sys(u, u) += eta;
  }
  const Eigen::VectorXd sol = sys.ldlt().solve(rhs);

  CovarianceCoefficients out{BlockDiagonal(lay), eta, {}};
  for (int u = 0; u < m; ++u) {
    const Unknown& p = unknowns[static_cast<std::size_t>(u)];
    out.a_hat.block(p.i)(p.a - lay.offset(p.i), p.b - lay.offset(p.i)) = sol[u];
  }
  out.report.relative_residual = rhs.norm() == 0.0 ? 0.0 : (sys * sol - rhs).norm() / rhs.norm();
  return out;
}

namespace {

Eigen::MatrixXd frame_times(const Eigen::MatrixXd& frame, const BlockDiagonal& a) {
  const BlockLayout& lay = a.layout();
  if (frame.cols() != lay.side()) throw ParameterError("frame matrix does not match coefficients");
  Eigen::MatrixXd g(frame.rows(), frame.cols());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < lay.blocks(); ++i) {
    g.middleCols(lay.offset(i), lay.size(i)).noalias() = frame.middleCols(lay.offset(i), lay.size(i)) * a.block(i);
  }
  return g;
}

}  // namespace

Eigen::VectorXd evaluate_mean(const Eigen::MatrixXd& frame, const Eigen::VectorXd& alpha) {
  if (frame.cols() != alpha.size()) throw ParameterError("evaluate_mean: sizes do not conform");
  return frame * alpha;
}

Eigen::MatrixXd evaluate_secmom(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat) {
  Eigen::MatrixXd out = frame_times(frame, a_hat) * frame.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd evaluate_cov(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat,
                             const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd mu = evaluate_mean(frame, alpha);
  Eigen::MatrixXd out = evaluate_secmom(frame, a_hat);
  out.noalias() -= mu * mu.transpose();
  return out;
}

Eigen::VectorXd evaluate_secmom_diag(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat) {
  return frame_times(frame, a_hat).cwiseProduct(frame).rowwise().sum();
}

Eigen::VectorXd evaluate_cov_diag(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat,
                                  const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd mu = evaluate_mean(frame, alpha);
  return evaluate_secmom_diag(frame, a_hat) - mu.cwiseProduct(mu);
}

}  // namespace heterotomo
