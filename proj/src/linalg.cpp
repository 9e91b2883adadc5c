#include "gradpoly/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace gradpoly {

double herm_residual(const Mat& a) { return (a - a.adjoint()).norm(); }

double skew_residual(const Mat& a) { return (a + a.adjoint()).norm(); }

double comm_norm(const Mat& a, const Mat& b) { return (a * b - b * a).norm(); }

double trace_ip(const Mat& x, const Mat& y, double scale) {
  return scale * (x.cwiseProduct(y.conjugate())).sum().real();
}

Mat expm_hermitian(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec lam = es.eigenvalues();
  Vec d(lam.size());
  for (int i = 0; i < lam.size(); ++i) d[i] = std::exp(t * lam[i]);
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

Vec exp_apply_projective(const Mat& h, double t, const Vec& v) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const RVec lam = es.eigenvalues();
  const Vec w = es.eigenvectors().adjoint() * v;
  // Shift by the top eigenvalue among components actually present, so the
  // dominant coordinate stays O(1).
  double shift = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < lam.size(); ++i) {
    if (std::abs(w[i]) > 1e-300) shift = std::max(shift, t * lam[i]);
  }
  if (!std::isfinite(shift)) fail(Errc::zero_vector, "exp_apply_projective: zero vector");
  Vec scaled(w.size());
  for (int i = 0; i < w.size(); ++i) scaled[i] = w[i] * std::exp(t * lam[i] - shift);
  Vec out = es.eigenvectors() * scaled;
  const double n = out.norm();
  if (n < 1e-300) fail(Errc::zero_vector, "exp_apply_projective: collapsed");
  return out / n;
}

void gram_schmidt_ops(std::vector<Mat>& ops, double scale, double tol) {
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (int pass = 0; pass < 2; ++pass) {  // re-orthogonalization pass
      for (std::size_t j = 0; j < i; ++j) {
        const double c = trace_ip(ops[i], ops[j], scale);
        ops[i] -= cxd(c, 0.0) * ops[j];
      }
    }
    const double n = std::sqrt(std::max(0.0, trace_ip(ops[i], ops[i], scale)));
    if (n < tol) fail(Errc::degenerate_spec, "gram_schmidt_ops: dependent operator basis");
    ops[i] /= cxd(n, 0.0);
  }
}

Mat kron(const Mat& a, const Mat& b) {
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

Vec kron_vec(const Vec& a, const Vec& b) {
  Vec r(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) r.segment(i * b.size(), b.size()) = a[i] * b;
  return r;
}

}  // namespace gradpoly
