#pragma once

#include <vector>

#include "gradpoly/common.hpp"

namespace gradpoly {

double herm_residual(const Mat& a);  // ||A - A^H||_F
double skew_residual(const Mat& a);  // ||A + A^H||_F
double comm_norm(const Mat& a, const Mat& b);

// Trace-form inner product on operators: scale * Re tr(X Y^H).
double trace_ip(const Mat& x, const Mat& y, double scale);

// exp(t H) for Hermitian H, via eigendecomposition.
Mat expm_hermitian(const Mat& h, double t = 1.0);

// [exp(t H) v] as a unit representative: the top eigenvalue is factored out
// before exponentiation, so large t never overflows.
Vec exp_apply_projective(const Mat& h, double t, const Vec& v);

// Stabilized modified Gram-Schmidt under the trace form.  Drops nothing:
// throws DegenerateSpec when an operator is dependent within tol.
void gram_schmidt_ops(std::vector<Mat>& ops, double scale, double tol = 1e-9);

Mat kron(const Mat& a, const Mat& b);
Vec kron_vec(const Vec& a, const Vec& b);

}  // namespace gradpoly
