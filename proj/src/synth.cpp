#include "rsm/synth.hpp"

#include <Eigen/Dense>

#include "rsm/rng.hpp"

namespace rsm {

// Variates are drawn from per-row counter-indexed streams, so any row block
// can be generated independently and the instance is a pure function of the
// seed regardless of generation order.
SyntheticInstance generate(const SyntheticSpec& spec) {
  if (spec.m < 1 || spec.n < 1) fail(errc::invalid_config, "synthetic spec: dimensions must be positive");
  if (spec.r < 1 || spec.r >= std::min(spec.m, spec.n))
    fail(errc::invalid_config, "synthetic spec: rank must lie in [1, min(m,n))");
  if (!(spec.rho > 0.0 && spec.rho <= 1.0))
    fail(errc::invalid_config, "synthetic spec: density must lie in (0,1]");
  if (spec.sigma < 0.0) fail(errc::invalid_config, "synthetic spec: sigma must be nonnegative");

  const index_t m = spec.m, n = spec.n, r = spec.r;

  Eigen::MatrixXd A(m, r);
  for (index_t i = 0; i < m; ++i) {
    Rng rng(spec.seed, stream::FACTOR_A, static_cast<std::uint64_t>(i));
    for (index_t k = 0; k < r; ++k) A(i, k) = rng.next_normal();
  }
  Eigen::MatrixXd B(r, n);
  for (index_t k = 0; k < r; ++k) {
    Rng rng(spec.seed, stream::FACTOR_B, static_cast<std::uint64_t>(k));
    for (index_t j = 0; j < n; ++j) B(k, j) = rng.next_normal();
  }

  SyntheticInstance out;
  out.ground_truth.resize(static_cast<std::size_t>(m * n));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Ybar(
      out.ground_truth.data(), m, n);
  Ybar.noalias() = A * B;

  out.noise.assign(static_cast<std::size_t>(m * n), 0.0);
  if (spec.sigma > 0.0) {
    for (index_t i = 0; i < m; ++i) {
      Rng rng(spec.seed, stream::NOISE, static_cast<std::uint64_t>(i));
      double* row = out.noise.data() + i * n;
      for (index_t j = 0; j < n; ++j) row[j] = spec.sigma * rng.next_normal();
    }
  }

  out.observed = MaskedMatrix(m, n);
  for (index_t i = 0; i < m; ++i) {
    Rng rng(spec.seed, stream::MASK, static_cast<std::uint64_t>(i));
    for (index_t j = 0; j < n; ++j) {
      const bool known = rng.next_unit() <= spec.rho;
      if (known)
        out.observed.set(i, j, out.ground_truth[static_cast<std::size_t>(i * n + j)] +
                                   out.noise[static_cast<std::size_t>(i * n + j)]);
    }
  }

  // Right singular vectors of Ybar without an m*n SVD: QR of A reduces the
  // problem to the r x n matrix R*B.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::MatrixXd R =
      qr.matrixQR().topRows(r).template triangularView<Eigen::Upper>();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R * B, Eigen::ComputeThinV);
  const Eigen::MatrixXd& V = svd.matrixV();

  out.truth_basis.resize(static_cast<std::size_t>(n * r));
  for (index_t i = 0; i < n; ++i)
    for (index_t k = 0; k < r; ++k) out.truth_basis[static_cast<std::size_t>(i * r + k)] = V(i, k);
  return out;
}

} // namespace rsm
