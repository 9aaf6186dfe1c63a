#pragma once

#include <Eigen/Core>

namespace heterotomo {

/// Eigenvalues ascending, eigenvectors as columns (empty when not requested).
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Dense symmetric eigendecomposition (LAPACK divide and conquer). Only the
/// lower triangle is read. Throws ConvergenceError if LAPACK reports failure.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m, bool vectors = true);

}  // namespace heterotomo
