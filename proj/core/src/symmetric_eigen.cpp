#include "heterotomo/symmetric_eigen.hpp"

#include <lapacke.h>

#include "heterotomo/errors.hpp"

namespace heterotomo {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m, bool vectors) {
  if (m.rows() != m.cols()) throw ParameterError("symmetric_eigen: matrix is not square");
  SymmetricEigen out;
  const lapack_int n = static_cast<lapack_int>(m.rows());
  out.values.resize(n);
  if (n == 0) return out;
  Eigen::MatrixXd a = m;
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'L', n, a.data(), n, out.values.data());
  if (info != 0) throw ConvergenceError("symmetric_eigen: dsyevd failed", static_cast<int>(info), 1.0);
  if (vectors) out.vectors = std::move(a);
  return out;
}

}  // namespace heterotomo
