#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "heterotomo/gram.hpp"

namespace heterotomo {

enum class EigMethod { two_step, lanczos };

const char* to_string(EigMethod method);
/// "two_step" or "lanczos"; throws ParameterError otherwise.
EigMethod parse_eig_method(const std::string& name);

/// Eigenpairs of C Phi V = V Lambda with V^T Phi V = I.
struct SpectralResult {
  /// Non-increasing; may contain negatives.
  Eigen::VectorXd eigenvalues;
  /// side x k, Phi-orthonormal columns. The first coefficient of each column
  /// exceeding 1e-12 of its largest magnitude is positive.
  Eigen::MatrixXd vectors;
  /// Set when fewer than the requested components exist.
  std::vector<std::string> warnings;
  /// Negative eigenvalues among those returned.
  int negative_count() const;
};

/// C = A - alpha alpha^T, dense symmetric.
Eigen::MatrixXd covariance_coefficients(const BlockDiagonal& a_hat, const Eigen::VectorXd& alpha);

struct LanczosOptions {
  /// Krylov dimension cap; 0 means the side of Phi.
  int max_steps = 0;
  /// Ritz residual target relative to the largest |theta|.
  double tol = 1e-11;
  std::uint64_t seed = 1;
};

/// The k eigenpairs of largest magnitude, returned in non-increasing order.
/// two_step: eigendecomposition of Phi (eigenvalues below 1e-12 lambda_max
/// dropped), then of B^T C B with Phi ~ B B^T. lanczos: Phi-symmetric Lanczos
/// on C Phi with full reorthogonalization.
SpectralResult generalized_eig(const Eigen::MatrixXd& c, const Eigen::MatrixXd& phi, int k,
                               EigMethod method = EigMethod::two_step, const LanczosOptions& lanczos = {});

/// Keeps only the strictly positive eigenvalues.
SpectralResult spd_truncate(const SpectralResult& result);

/// Grid values of the components: F V (one column per component).
Eigen::MatrixXd eval_components(const Eigen::MatrixXd& frame, const SpectralResult& result);

/// "l,lambda" rows, l starting at 1.
std::string scree_csv(const SpectralResult& result);

}  // namespace heterotomo
