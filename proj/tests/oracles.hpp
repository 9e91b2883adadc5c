// Independent test oracles.  These deliberately avoid the library's own
// computational paths: the eigensolver is a hand-rolled cyclic Jacobi, the
// hull oracle is direction-sweep gift wrapping, membership oracles are dense
// grids.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "gradpoly/common.hpp"

namespace oracles {

using gradpoly::RMat;
using gradpoly::RVec;

// Cyclic Jacobi eigenvalues of a real symmetric matrix, descending.
inline std::vector<double> jacobi_eigenvalues(RMat a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (off < 1e-26) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-18) continue;
        const double theta = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        const double c = std::cos(theta), s = std::sin(theta);
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// Gift-wrapping 2-D hull area by direction sweep: area of the polygon whose
// support function is sampled on a fine angle grid.
inline double hull_area_sweep(const RMat& pts, int directions = 4096) {
  std::vector<double> hx, hy;
  for (int t = 0; t < directions; ++t) {
    const double ang = 2.0 * M_PI * t / directions;
    const double cx = std::cos(ang), cy = std::sin(ang);
    int best = 0;
    double bv = -1e300;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double v = pts(i, 0) * cx + pts(i, 1) * cy;
      if (v > bv) {
        bv = v;
        best = static_cast<int>(i);
      }
    }
    if (hx.empty() || hx.back() != pts(best, 0) || hy.back() != pts(best, 1)) {
      hx.push_back(pts(best, 0));
      hy.push_back(pts(best, 1));
    }
  }
  double area = 0.0;
  for (std::size_t i = 0; i < hx.size(); ++i) {
    const std::size_t j = (i + 1) % hx.size();
    area += hx[i] * hy[j] - hx[j] * hy[i];
  }
  return std::abs(area) / 2.0;
}

// Sutherland-Hodgman polygon clip against one halfplane n.x >= c.
inline std::vector<RVec> clip_polygon(const std::vector<RVec>& poly, const RVec& n, double c) {
  std::vector<RVec> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const RVec& a = poly[i];
    const RVec& b = poly[(i + 1) % m];
    const double da = n.dot(a) - c;
    const double db = n.dot(b) - c;
    if (da >= 0) out.push_back(a);
    if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace oracles
