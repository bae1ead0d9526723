#pragma once

#include <Eigen/Dense>

#include "rsm/core.hpp"

namespace rsm::detail {

// Least-squares fit of one matrix row against the basis restricted to that
// row's observed columns. Minimum-norm solution on rank deficiency. Returns
// false when the row is underdetermined (|J| < r, deficient basis, or empty).
inline bool solve_row(const MaskedMatrix& M, const std::vector<double>& vhat, index_t r,
                      index_t i, double* u_row) {
  index_t nj = 0;
  for (index_t j = 0; j < M.n; ++j)
    if (M.known(i, j)) ++nj;
  if (nj == 0) {
    for (index_t k = 0; k < r; ++k) u_row[k] = 0.0;
    return false;
  }

  Eigen::MatrixXd A(nj, r);
  Eigen::VectorXd y(nj);
  index_t t = 0;
  for (index_t j = 0; j < M.n; ++j) {
    if (!M.known(i, j)) continue;
    for (index_t k = 0; k < r; ++k) A(t, k) = vhat[static_cast<std::size_t>(j * r + k)];
    y(t) = M(i, j);
    ++t;
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  Eigen::VectorXd u = cod.solve(y);
  for (index_t k = 0; k < r; ++k) u_row[k] = u(k);
  return nj >= r && cod.rank() == r;
}

} // namespace rsm::detail
