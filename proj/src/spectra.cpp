#include "rsm/spectra.hpp"

#include <Eigen/Dense>

namespace rsm {

void GramAccumulator::accumulate(const ConstraintVector& cv) {
  const index_t q = static_cast<index_t>(cv.col_indices.size());
  if (q != static_cast<index_t>(cv.zeta.size()))
    fail(errc::invalid_config, "accumulate: index/coefficient length mismatch");
  for (index_t a = 0; a < q; ++a) {
    const index_t ca = cv.col_indices[static_cast<std::size_t>(a)];
    if (ca < 0 || ca >= n_) fail(errc::invalid_config, "accumulate: column index out of range");
  }
  for (index_t a = 0; a < q; ++a) {
    const index_t ca = cv.col_indices[static_cast<std::size_t>(a)];
    const double va = cv.zeta[static_cast<std::size_t>(a)];
    double* row = g_.data() + ca * n_;
    for (index_t b = 0; b < q; ++b)
      row[cv.col_indices[static_cast<std::size_t>(b)]] += va * cv.zeta[static_cast<std::size_t>(b)];
  }
  ++z_;
}

void GramAccumulator::accumulate_dense(const std::vector<double>& xi) {
  if (static_cast<index_t>(xi.size()) != n_) fail(errc::invalid_config, "accumulate: dimension mismatch");
  for (index_t i = 0; i < n_; ++i) {
    const double vi = xi[static_cast<std::size_t>(i)];
    if (vi == 0.0) continue;
    double* row = g_.data() + i * n_;
    for (index_t j = 0; j < n_; ++j) row[j] += vi * xi[static_cast<std::size_t>(j)];
  }
  ++z_;
}

void GramAccumulator::merge(const GramAccumulator& other) {
  if (other.n_ != n_) fail(errc::invalid_config, "merge: dimension mismatch");
  for (std::size_t p = 0; p < g_.size(); ++p) g_[p] += other.g_[p];
  z_ += other.z_;
}

GramAccumulator merge(const GramAccumulator& a, const GramAccumulator& b) {
  GramAccumulator out = a;
  out.merge(b);
  return out;
}

std::vector<ConstraintVector> small_singular_vectors(const Submatrix& S, index_t r, index_t ell) {
  const index_t p = S.rows();
  const index_t q = S.cols();
  if (q - r < 1) fail(errc::invalid_config, "degenerate submatrix: needs more than r columns");
  if (p < r + 1) fail(errc::invalid_config, "degenerate submatrix: needs more than r rows");
  if (ell < 1 || ell > q - r) fail(errc::invalid_config, "vector count must lie in [1, cols-r]");

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(
      S.values.data(), p, q);
  // Full V: columns past min(p,q) span the kernel and carry singular value 0.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const Eigen::MatrixXd& V = svd.matrixV();
  const auto& sv = svd.singularValues();

  std::vector<ConstraintVector> out;
  out.reserve(static_cast<std::size_t>(ell));
  for (index_t t = 0; t < ell; ++t) {
    const index_t c = q - 1 - t; // ascending singular value
    ConstraintVector cv;
    cv.col_indices = S.col_indices;
    cv.singular_value = c < static_cast<index_t>(sv.size()) ? sv(c) : 0.0;
    cv.zeta.resize(static_cast<std::size_t>(q));

    index_t arg = 0;
    double best = -1.0;
    for (index_t i = 0; i < q; ++i) {
      const double a = std::abs(V(i, c));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    const double flip = V(arg, c) < 0.0 ? -1.0 : 1.0;
    for (index_t i = 0; i < q; ++i) cv.zeta[static_cast<std::size_t>(i)] = flip * V(i, c);
    cv.track();
    out.push_back(std::move(cv));
  }
  return out;
}

std::vector<double> embed(const ConstraintVector& cv, index_t n) {
  std::vector<double> xi(static_cast<std::size_t>(n), 0.0);
  for (std::size_t t = 0; t < cv.col_indices.size(); ++t) {
    const index_t c = cv.col_indices[t];
    if (c < 0 || c >= n) fail(errc::invalid_config, "embed: column index out of range");
    xi[static_cast<std::size_t>(c)] = cv.zeta[t];
  }
  return xi;
}

} // namespace rsm
