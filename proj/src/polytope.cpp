#include "gradpoly/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/SVD>

#include "gradpoly/rng.hpp"

namespace gradpoly {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool lex_less(const RVec& a, const RVec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-15) return true;
    if (a[i] > b[i] + 1e-15) return false;
  }
  return false;
}

struct SpanInfo {
  RVec point;
  RMat basis;  // k x d, orthonormal rows
};

SpanInfo detect_span(const RMat& pts, double tol) {
  SpanInfo s;
  const Eigen::Index d = pts.cols();
  s.point = pts.colwise().mean();
  RMat centered = pts.rowwise() - s.point.transpose();
  Eigen::JacobiSVD<RMat> svd(centered, Eigen::ComputeThinV);
  const RVec sv = svd.singularValues();
  const double scale = sv.size() ? std::max(1.0, sv[0]) : 1.0;
  int k = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > std::max(tol, 1e-13) * scale) ++k;
  s.basis = RMat(k, d);
  for (int i = 0; i < k; ++i) s.basis.row(i) = svd.matrixV().col(i).transpose();
  return s;
}

// Andrew monotone chain; returns hull vertex indices, counterclockwise.
std::vector<int> monotone_chain(const RMat& y, double eps) {
  const int m = static_cast<int>(y.rows());
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (y(a, 0) != y(b, 0)) return y(a, 0) < y(b, 0);
    return y(a, 1) < y(b, 1);
  });
  auto cross = [&](int o, int a, int b) {
    return (y(a, 0) - y(o, 0)) * (y(b, 1) - y(o, 1)) - (y(a, 1) - y(o, 1)) * (y(b, 0) - y(o, 0));
  };
  std::vector<int> h(2 * static_cast<std::size_t>(m));
  int k = 0;
  for (int ii = 0; ii < m; ++ii) {
    const int i = order[static_cast<std::size_t>(ii)];
    while (k >= 2 && cross(h[static_cast<std::size_t>(k - 2)], h[static_cast<std::size_t>(k - 1)], i) <= eps) --k;
    h[static_cast<std::size_t>(k++)] = i;
  }
  const int lower = k + 1;
  for (int ii = m - 2; ii >= 0; --ii) {
    const int i = order[static_cast<std::size_t>(ii)];
    while (k >= lower && cross(h[static_cast<std::size_t>(k - 2)], h[static_cast<std::size_t>(k - 1)], i) <= eps) --k;
    h[static_cast<std::size_t>(k++)] = i;
  }
  h.resize(static_cast<std::size_t>(k - 1));
  return h;
}

geom::RatMat rationalize(const RMat& pts) {
  geom::RatMat out;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    geom::RatVec row;
    for (Eigen::Index j = 0; j < pts.cols(); ++j) row.push_back(exact::rat_of_double(pts(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

RMat reduce_by_support(const RMat& pts, int target) {
  const int d = static_cast<int>(pts.cols());
  std::vector<int> keep;
  auto add_extreme = [&](const RVec& dir) {
    int best = 0;
    double bv = -kInf;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
      const double v = pts.row(i).dot(dir);
      if (v > bv + 1e-15) {
        bv = v;
        best = static_cast<int>(i);
      }
    }
    if (std::find(keep.begin(), keep.end(), best) == keep.end()) keep.push_back(best);
  };
  for (int j = 0; j < d; ++j) {
    RVec e = RVec::Zero(d);
    e[j] = 1.0;
    add_extreme(e);
    add_extreme(-e);
  }
  Rng rng(0xC0FFEEULL);
  int i = 0;
  while (static_cast<int>(keep.size()) < target && i < 40 * target) {
    add_extreme(rng.unit_vec(d));
    ++i;
  }
  RMat out(static_cast<Eigen::Index>(keep.size()), pts.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = pts.row(keep[r]);
  return out;
}

void order_vertices(Polytope& p) {
  if (p.dim() == 1 && p.vertices.rows() == 2) {
    const RVec dir = p.span_basis.row(0);
    if (p.vertices.row(0).dot(dir) > p.vertices.row(1).dot(dir)) {
      p.vertices.row(0).swap(p.vertices.row(1));
    }
  } else if (p.dim() == 2 && p.vertices.rows() > 2) {
    const RVec c = p.vertices.colwise().mean();
    std::vector<int> order(static_cast<std::size_t>(p.vertices.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> ang(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      const RVec z = p.vertices.row(static_cast<Eigen::Index>(i)).transpose() - c;
      ang[i] = std::atan2(p.span_basis.row(1).dot(z), p.span_basis.row(0).dot(z));
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ang[static_cast<std::size_t>(a)] < ang[static_cast<std::size_t>(b)]; });
    RMat sorted(p.vertices.rows(), p.vertices.cols());
    for (std::size_t i = 0; i < order.size(); ++i) sorted.row(static_cast<Eigen::Index>(i)) = p.vertices.row(order[i]);
    p.vertices = sorted;
  }
}

}  // namespace

Polytope from_exact(const geom::ExactPoly& ep, double tol) {
  Polytope p;
  p.tol = tol;
  p.ambient = ep.ambient;
  if (ep.empty()) {
    p.empty_flag = true;
    return p;
  }
  p.vertices = RMat(static_cast<Eigen::Index>(ep.vertices.size()), ep.ambient);
  for (std::size_t i = 0; i < ep.vertices.size(); ++i)
    for (int j = 0; j < ep.ambient; ++j)
      p.vertices(static_cast<Eigen::Index>(i), j) = exact::to_double(ep.vertices[i][static_cast<std::size_t>(j)]);
  p.span_point = RVec(ep.ambient);
  for (int j = 0; j < ep.ambient; ++j) p.span_point[j] = exact::to_double(ep.span_point[static_cast<std::size_t>(j)]);
  // Orthonormalize the span directions.
  RMat dirs(static_cast<Eigen::Index>(ep.span_dirs.size()), ep.ambient);
  for (std::size_t i = 0; i < ep.span_dirs.size(); ++i)
    for (int j = 0; j < ep.ambient; ++j)
      dirs(static_cast<Eigen::Index>(i), j) = exact::to_double(ep.span_dirs[i][static_cast<std::size_t>(j)]);
  for (Eigen::Index i = 0; i < dirs.rows(); ++i) {
    for (Eigen::Index l = 0; l < i; ++l) dirs.row(i) -= dirs.row(i).dot(dirs.row(l)) * dirs.row(l);
    dirs.row(i).normalize();
  }
  p.span_basis = dirs;
  for (std::size_t f = 0; f < ep.facets_n.size(); ++f) {
    RVec n(ep.ambient);
    for (int j = 0; j < ep.ambient; ++j) n[j] = exact::to_double(ep.facets_n[f][static_cast<std::size_t>(j)]);
    double off = exact::to_double(ep.facets_c[f]);
    const double scale = (p.span_basis * n).norm();
    if (scale < 1e-14) continue;
    p.halfspaces.push_back({n / scale, off / scale});
  }
  order_vertices(p);
  return p;
}

geom::ExactPoly to_exact(const Polytope& p) {
  if (p.empty()) return geom::empty_poly(p.ambient);
  return geom::hull_exact(rationalize(p.vertices));
}

Polytope hull(const RMat& points, double tol) {
  if (points.rows() < 1) fail(Errc::param_error, "hull: at least one point required");
  Polytope p;
  p.tol = tol;
  p.ambient = static_cast<int>(points.cols());
  const SpanInfo span = detect_span(points, tol);
  const int k = static_cast<int>(span.basis.rows());

  if (k == 0) {
    p.vertices = RMat(1, p.ambient);
    p.vertices.row(0) = span.point.transpose();
    p.span_point = span.point;
    p.span_basis = RMat(0, p.ambient);
    return p;
  }

  RMat y = (points.rowwise() - span.point.transpose()) * span.basis.transpose();

  if (k == 1) {
    Eigen::Index imin = 0, imax = 0;
    y.col(0).minCoeff(&imin);
    y.col(0).maxCoeff(&imax);
    p.span_point = span.point;
    p.span_basis = span.basis;
    p.vertices = RMat(imin == imax ? 1 : 2, p.ambient);
    p.vertices.row(0) = points.row(imin);
    if (imin != imax) p.vertices.row(1) = points.row(imax);
    const RVec b = span.basis.row(0);
    p.halfspaces.push_back({b, b.dot(points.row(imin))});
    p.halfspaces.push_back({-b, -b.dot(points.row(imax))});
    order_vertices(p);
    return p;
  }

  if (k == 2 && points.rows() > 120) {
    const double scale = (y.colwise().maxCoeff() - y.colwise().minCoeff()).norm();
    const std::vector<int> idx = monotone_chain(y, 1e-12 * scale * scale);
    p.span_point = span.point;
    p.span_basis = span.basis;
    p.vertices = RMat(static_cast<Eigen::Index>(idx.size()), p.ambient);
    for (std::size_t i = 0; i < idx.size(); ++i) p.vertices.row(static_cast<Eigen::Index>(i)) = points.row(idx[i]);
    // Inward edge normals (vertices are counterclockwise in span coords).
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const std::size_t j = (i + 1) % idx.size();
      const RVec a2 = y.row(idx[i]);
      const RVec b2 = y.row(idx[j]);
      RVec n2(2);
      n2 << -(b2[1] - a2[1]), b2[0] - a2[0];
      const double nn = n2.norm();
      if (nn < 1e-14) continue;
      n2 /= nn;
      const RVec n = span.basis.transpose() * n2;
      p.halfspaces.push_back({n, n.dot(span.point) + n2.dot(a2)});
    }
    return p;
  }

  // Exact route for small sets and dims 3..4 (after support reduction).
  RMat work = points;
  if (points.rows() > 120) work = reduce_by_support(points, 110);
  if (k > 4) fail(Errc::dimension_cap, "hull: exact mode limited to dimension 4");
  geom::ExactPoly ep = geom::hull_exact(rationalize(work));
  Polytope out = from_exact(ep, tol);
  return out;
}

bool membership(const Polytope& p, const RVec& x, double tol) {
  if (x.size() != p.ambient) fail(Errc::dim_mismatch, "membership: dimension mismatch");
  if (p.empty()) return false;
  const RVec z = x - p.span_point;
  const RVec y = p.span_basis * z;
  if ((z - p.span_basis.transpose() * y).norm() > tol) return false;
  for (const auto& h : p.halfspaces)
    if (h.normal.dot(x) < h.offset - tol) return false;
  return true;
}

Polytope intersect_chamber(const Polytope& p, const std::vector<Halfspace>& chamber) {
  if (p.empty()) return p;
  geom::ExactPoly ep = to_exact(p);
  for (const auto& h : chamber) {
    geom::RatVec n;
    for (int j = 0; j < p.ambient; ++j) n.push_back(exact::rat_of_double(h.normal[j]));
    ep = geom::clip(ep, n, exact::rat_of_double(h.offset));
    if (ep.empty()) break;
  }
  return from_exact(ep, p.tol);
}

double cross_validation_residual(const Polytope& p) {
  if (p.empty()) return 0.0;
  double res = 0.0;
  for (Eigen::Index i = 0; i < p.vertices.rows(); ++i) {
    const RVec v = p.vertices.row(i);
    const RVec z = v - p.span_point;
    res = std::max(res, (z - p.span_basis.transpose() * (p.span_basis * z)).norm());
    for (const auto& h : p.halfspaces) res = std::max(res, std::max(0.0, h.offset - h.normal.dot(v)));
  }
  for (const auto& h : p.halfspaces) {
    double tight = kInf;
    for (Eigen::Index i = 0; i < p.vertices.rows(); ++i)
      tight = std::min(tight, std::abs(h.normal.dot(p.vertices.row(i).transpose()) - h.offset));
    res = std::max(res, tight);
  }
  return res;
}

namespace {

std::pair<RVec, double> project_impl(const Polytope& p, const RVec& x, int depth) {
  const RVec z = x - p.span_point;
  const RVec y = p.span_basis * z;
  const RVec foot = p.span_point + p.span_basis.transpose() * y;
  bool inside = true;
  for (const auto& h : p.halfspaces)
    if (h.normal.dot(foot) < h.offset - 1e-14) {
      inside = false;
      break;
    }
  if (inside || p.dim() == 0 || depth > 8) {
    const RVec q = p.dim() == 0 ? RVec(p.vertices.row(0)) : foot;
    return {q, (x - q).norm()};
  }
  std::pair<RVec, double> best{RVec(), kInf};
  for (const auto& h : p.halfspaces) {
    RMat tight(p.vertices.rows(), p.ambient);
    Eigen::Index cnt = 0;
    for (Eigen::Index i = 0; i < p.vertices.rows(); ++i) {
      if (std::abs(h.normal.dot(p.vertices.row(i).transpose()) - h.offset) <=
          p.tol * (1.0 + std::abs(h.offset)) + 1e-12)
        tight.row(cnt++) = p.vertices.row(i);
    }
    if (cnt == 0) continue;
    Polytope face = hull(tight.topRows(cnt), p.tol);
    if (face.dim() >= p.dim()) continue;
    auto cand = project_impl(face, x, depth + 1);
    if (cand.second < best.second - 1e-15 ||
        (std::abs(cand.second - best.second) <= 1e-15 && best.first.size() && lex_less(cand.first, best.first)))
      best = cand;
  }
  if (!std::isfinite(best.second)) {
    // No facet data (degenerate); fall back to vertex scan.
    for (Eigen::Index i = 0; i < p.vertices.rows(); ++i) {
      const RVec v = p.vertices.row(i);
      const double d = (x - v).norm();
      if (d < best.second - 1e-15) best = {v, d};
    }
  }
  return best;
}

}  // namespace

std::pair<RVec, double> project_point(const Polytope& p, const RVec& x) {
  if (p.empty()) return {RVec(), kInf};
  return project_impl(p, x, 0);
}

double dist_point(const Polytope& p, const RVec& x) { return project_point(p, x).second; }

double hausdorff(const Polytope& a, const Polytope& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return kInf;
  double h = 0.0;
  for (Eigen::Index i = 0; i < a.vertices.rows(); ++i)
    h = std::max(h, dist_point(b, a.vertices.row(i)));
  for (Eigen::Index i = 0; i < b.vertices.rows(); ++i)
    h = std::max(h, dist_point(a, b.vertices.row(i)));
  return h;
}

namespace {

// Two nearest distinct set points (distinct beyond tol).
struct NearestTwo {
  RVec p1, p2;
  double d1 = kInf, d2 = kInf;
};

using SetQuery = std::function<NearestTwo(const RVec&)>;

NearestTwo scan_cloud(const RMat& cloud, const RVec& x, double tol) {
  NearestTwo nt;
  for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
    const RVec pt = cloud.row(i);
    const double d = (pt - x).norm();
    if (d < nt.d1 - 1e-15 || (std::abs(d - nt.d1) <= 1e-15 && nt.p1.size() && lex_less(pt, nt.p1))) {
      if (nt.p1.size() && (nt.p1 - pt).norm() > tol && nt.d1 < nt.d2) {
        nt.p2 = nt.p1;
        nt.d2 = nt.d1;
      }
      nt.p1 = pt;
      nt.d1 = d;
    } else if (!nt.p1.size() || (pt - nt.p1).norm() > tol) {
      if (d < nt.d2) {
        nt.p2 = pt;
        nt.d2 = d;
      }
    }
  }
  return nt;
}

NearestTwo scan_polys(const std::vector<Polytope>& polys, const RVec& x, double tol) {
  NearestTwo nt;
  for (const auto& poly : polys) {
    if (poly.empty()) continue;
    auto [pt, d] = project_point(poly, x);
    if (d < nt.d1 - 1e-15 || (std::abs(d - nt.d1) <= 1e-15 && nt.p1.size() && lex_less(pt, nt.p1))) {
      if (nt.p1.size() && (nt.p1 - pt).norm() > tol && nt.d1 < nt.d2) {
        nt.p2 = nt.p1;
        nt.d2 = nt.d1;
      }
      nt.p1 = pt;
      nt.d1 = d;
    } else if (!nt.p1.size() || (pt - nt.p1).norm() > tol) {
      if (d < nt.d2) {
        nt.p2 = pt;
        nt.d2 = d;
      }
    }
  }
  return nt;
}

RMat probe_points(const Polytope& hull_poly, int probes) {
  std::vector<RVec> pts;
  const int k = hull_poly.dim();
  const RVec centroid = hull_poly.vertices.colwise().mean();
  pts.push_back(centroid);
  const Eigen::Index nv = hull_poly.vertices.rows();
  if (nv <= 26) {
    for (Eigen::Index i = 0; i < nv; ++i)
      for (Eigen::Index j = i + 1; j < nv; ++j)
        pts.push_back(0.5 * (hull_poly.vertices.row(i) + hull_poly.vertices.row(j)).transpose());
  }
  if (k >= 1) {
    RMat y = (hull_poly.vertices.rowwise() - hull_poly.span_point.transpose()) *
             hull_poly.span_basis.transpose();
    RVec lo = y.colwise().minCoeff();
    RVec hi = y.colwise().maxCoeff();
    int res = std::max(2, static_cast<int>(std::round(std::pow(static_cast<double>(probes), 1.0 / k))));
    long long total = 1;
    for (int j = 0; j < k; ++j) total *= res;
    while (total > 4LL * probes && res > 2) {
      --res;
      total = 1;
      for (int j = 0; j < k; ++j) total *= res;
    }
    std::vector<int> idx(static_cast<std::size_t>(k), 0);
    for (long long t = 0; t < total; ++t) {
      long long rest = t;
      RVec y0(k);
      for (int j = 0; j < k; ++j) {
        const int ij = static_cast<int>(rest % res);
        rest /= res;
        y0[j] = lo[j] + (hi[j] - lo[j]) * (res == 1 ? 0.5 : static_cast<double>(ij) / (res - 1));
      }
      const RVec pt = hull_poly.span_point + hull_poly.span_basis.transpose() * y0;
      bool inside = true;
      for (const auto& h : hull_poly.halfspaces)
        if (h.normal.dot(pt) < h.offset - hull_poly.tol) {
          inside = false;
          break;
        }
      if (inside) pts.push_back(pt);
    }
  }
  RMat out(static_cast<Eigen::Index>(pts.size()), hull_poly.ambient);
  for (std::size_t i = 0; i < pts.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

RVec clamp_into(const Polytope& hull_poly, const RVec& anchor, const RVec& x) {
  auto inside = [&](const RVec& pt) {
    for (const auto& h : hull_poly.halfspaces)
      if (h.normal.dot(pt) < h.offset - 1e-14) return false;
    return true;
  };
  if (inside(x)) return x;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 50; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (inside(anchor + mid * (x - anchor)))
      lo = mid;
    else
      hi = mid;
  }
  return anchor + lo * (x - anchor);
}

ConvexityVerdict convexity_core(const Polytope& hull_poly, const SetQuery& query, double tol,
                                int probes, ExecMode mode, bool heuristic) {
  ConvexityVerdict verdict;
  verdict.tol = tol;
  verdict.heuristic = heuristic;
  const RMat pp = probe_points(hull_poly, probes);
  verdict.probes = static_cast<int>(pp.rows());
  std::vector<double> dist(static_cast<std::size_t>(pp.rows()));
  for_each_index(static_cast<std::size_t>(pp.rows()), mode,
                 [&](std::size_t i) { dist[i] = query(pp.row(static_cast<Eigen::Index>(i))).d1; });
  int arg = 0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] > dist[static_cast<std::size_t>(arg)] + 1e-15) arg = static_cast<int>(i);
  verdict.max_gap = dist.empty() ? 0.0 : dist[static_cast<std::size_t>(arg)];
  if (verdict.max_gap <= tol) return verdict;

  verdict.is_convex = false;
  RVec beta = pp.row(arg);
  NearestTwo nt = query(beta);
  for (int iter = 0; iter < 100; ++iter) {
    if (!nt.p1.size()) break;
    // Two contacts at (nearly) equal distance: done.
    if (nt.p2.size() && nt.d2 - nt.d1 <= std::max(tol, 1e-9) &&
        (nt.p1 - nt.p2).norm() > tol)
      break;
    RVec dir = beta - nt.p1;
    const double dn = dir.norm();
    if (dn < 1e-15) break;
    dir /= dn;
    double step = std::max(nt.d1, tol);
    bool moved = false;
    while (step > 1e-12) {
      const RVec cand = clamp_into(hull_poly, beta, beta + step * dir);
      const NearestTwo cnt = query(cand);
      if (cnt.d1 > nt.d1 + 1e-15) {
        beta = cand;
        nt = cnt;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  Witness w;
  w.center = beta;
  w.radius = nt.d1;
  w.contact1 = nt.p1;
  w.contact2 = nt.p2.size() ? nt.p2 : nt.p1;
  verdict.witness = std::move(w);
  return verdict;
}

}  // namespace

ConvexityVerdict union_convexity(const RMat& cloud, double tol, int probes, ExecMode mode) {
  if (cloud.rows() < 1) fail(Errc::param_error, "union_convexity: empty input");
  const Polytope h = hull(cloud, tol);
  return convexity_core(
      h, [&](const RVec& x) { return scan_cloud(cloud, x, tol); }, tol, probes, mode, true);
}

ConvexityVerdict union_convexity(const std::vector<Polytope>& polys, double tol, int probes,
                                 ExecMode mode) {
  if (polys.empty()) fail(Errc::param_error, "union_convexity: empty input");
  RMat all;
  for (const auto& p : polys) {
    if (p.empty()) continue;
    RMat merged(all.rows() + p.vertices.rows(), p.vertices.cols());
    if (all.rows() > 0) merged.topRows(all.rows()) = all;
    merged.bottomRows(p.vertices.rows()) = p.vertices;
    all = merged;
  }
  if (all.rows() < 1) fail(Errc::param_error, "union_convexity: all polytopes empty");
  const Polytope h = hull(all, tol);
  return convexity_core(
      h, [&](const RVec& x) { return scan_polys(polys, x, tol); }, tol, probes, mode, false);
}

std::pair<RVec, double> nearest_point(const RMat& cloud, const RVec& p0) {
  if (cloud.rows() < 1) fail(Errc::empty_cloud, "nearest_point: empty cloud");
  const NearestTwo nt = scan_cloud(cloud, p0, 0.0);
  return {nt.p1, nt.d1};
}

std::pair<RVec, double> nearest_point(const std::vector<Polytope>& polys, const RVec& p0) {
  bool any = false;
  for (const auto& p : polys) any = any || !p.empty();
  if (!any) fail(Errc::empty_cloud, "nearest_point: empty polytope union");
  const NearestTwo nt = scan_polys(polys, p0, 0.0);
  return {nt.p1, nt.d1};
}

}  // namespace gradpoly
