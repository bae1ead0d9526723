#include "rsm/core.hpp"

namespace rsm {

double density(const MaskedMatrix& M) {
  return static_cast<double>(M.known_count()) / (static_cast<double>(M.m) * static_cast<double>(M.n));
}

namespace {

void check_dims(const MaskedMatrix& M, const Factorization& F) {
  if (F.m != M.m || F.n != M.n) fail(errc::invalid_config, "factorization shape does not match matrix");
}

double masked_frobenius(const MaskedMatrix& M, const Factorization& F) {
  check_dims(M, F);
  const index_t r = F.r;
  double ss = 0.0;
  for (index_t i = 0; i < M.m; ++i) {
    const double* ui = F.u.data() + i * r;
    for (index_t j = 0; j < M.n; ++j) {
      if (!M.known(i, j)) continue;
      const double* vj = F.v.data() + j * r;
      double p = 0.0;
      for (index_t k = 0; k < r; ++k) p += ui[k] * vj[k];
      const double d = M(i, j) - p;
      ss += d * d;
    }
  }
  return std::sqrt(ss);
}

} // namespace

double masked_residual_norm(const MaskedMatrix& M, const Factorization& F) {
  const index_t w = M.known_count();
  if (w == 0) fail(errc::invalid_config, "empty mask: no known entries");
  return masked_frobenius(M, F) / std::sqrt(static_cast<double>(w));
}

double masked_objective(const MaskedMatrix& M, const Factorization& F, norm_tag tag) {
  if (tag != norm_tag::frobenius) fail(errc::invalid_config, "unsupported norm: only frobenius is implemented");
  return masked_frobenius(M, F);
}

} // namespace rsm
