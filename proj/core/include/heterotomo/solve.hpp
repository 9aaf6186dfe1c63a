#pragma once

#include <vector>

#include <Eigen/Core>

#include "heterotomo/gram.hpp"

namespace heterotomo {

/// Above this side the mean system is solved by conjugate gradients.
inline constexpr int kDirectMeanLimit = 4096;

struct MeanCoefficients {
  Eigen::VectorXd alpha;
  double nu = 0.0;
  /// 0 for the direct path.
  int iterations = 0;
  /// ||(Phi + nu I) alpha - w|| / ||w|| (0 when w = 0).
  double relative_residual = 0.0;
};

/// alpha = (Phi + nu I)^{-1} w. Cholesky up to kDirectMeanLimit, conjugate
/// gradients to 1e-10 beyond. Throws ParameterError unless nu > 0.
MeanCoefficients solve_mean(const BlockedGramMatrix& phi, const Eigen::VectorXd& w, double nu);

/// B_i = sum_{i'} Phi_{i i'} A_{i'} Phi_{i' i}.
BlockDiagonal apply_block_outer(const BlockedGramMatrix& phi, const BlockDiagonal& a);

/// Zeroes every same-tilt sub-block of each A_i (pairs with j = j').
BlockDiagonal apply_elimination(const BlockDiagonal& a, const Dataset& data);

/// J (Phi (.) Phi) J A + eta A.
BlockDiagonal apply_cov_operator(const BlockedGramMatrix& phi, double eta, const BlockDiagonal& a,
                                 const Dataset& data);

struct CgOptions {
  double tol = 1e-8;
  int max_iter = 2000;
  /// Diagonal preconditioner Phi_aa Phi_bb + eta.
  bool jacobi = false;
  /// Throw ConvergenceError when max_iter is hit; otherwise report it.
  bool throw_on_failure = true;
};

struct CgReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = true;
  /// Relative residual after each iteration (entry 0 is the start).
  std::vector<double> history;
};

struct CovarianceCoefficients {
  BlockDiagonal a_hat;
  double eta = 0.0;
  CgReport report;
};

/// Solves [J (Phi (.) Phi) J + eta I] A = J (w (.) w) by conjugate gradients
/// from A = 0. Throws DesignError when some field has fewer than two tilts.
CovarianceCoefficients solve_cov_cg(const BlockedGramMatrix& phi, const Dataset& data,
                                    const Eigen::VectorXd& w, double eta, const CgOptions& options = {});

/// Same system, materialized over the admissible pairs and factorized.
/// Test oracle; throws ParameterError beyond kDenseOracleLimit unknowns.
inline constexpr int kDenseOracleLimit = 5000;
CovarianceCoefficients dense_cov_oracle(const BlockedGramMatrix& phi, const Dataset& data,
                                        const Eigen::VectorXd& w, double eta);

/// Grid values of the mean estimate: F alpha.
Eigen::VectorXd evaluate_mean(const Eigen::MatrixXd& frame, const Eigen::VectorXd& alpha);
/// F A F^T.
Eigen::MatrixXd evaluate_secmom(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat);
/// F (A - alpha alpha^T) F^T.
Eigen::MatrixXd evaluate_cov(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat,
                             const Eigen::VectorXd& alpha);
/// Diagonals of the two grid matrices without forming them.
Eigen::VectorXd evaluate_secmom_diag(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat);
Eigen::VectorXd evaluate_cov_diag(const Eigen::MatrixXd& frame, const BlockDiagonal& a_hat,
                                  const Eigen::VectorXd& alpha);

}  // namespace heterotomo
