#include "gradpoly/geometry.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gradpoly::geom {

namespace {

using boost::multiprecision::cpp_int;

RatVec canonical_covector(RatVec v) {
  cpp_int l(1);
  for (const auto& x : v)
    if (x != 0) l = boost::multiprecision::lcm(l, denominator(x));
  cpp_int g(0);
  for (auto& x : v) {
    x *= Rat(l);
    if (x != 0) g = boost::multiprecision::gcd(g, boost::multiprecision::abs(numerator(x)));
  }
  if (g != 0)
    for (auto& x : v) x /= Rat(g);
  return v;
}

RatMat dedup_points(const RatMat& pts) {
  RatMat out;
  std::set<std::string> seen;
  for (const auto& p : pts) {
    const std::string k = exact::key_of(p);
    if (seen.insert(k).second) out.push_back(p);
  }
  return out;
}

// Coordinates of x within the affine span (solves dirs^T y = x - point).
RatVec span_coords(const ExactPoly& p, const RatVec& x) {
  auto sol = exact::solve(exact::transpose(p.span_dirs), exact::sub(x, p.span_point));
  if (!sol) fail(Errc::dim_mismatch, "span_coords: point not in affine hull");
  return *sol;
}

bool in_span(const ExactPoly& p, const RatVec& x) {
  RatMat probe = p.span_dirs;
  probe.push_back(exact::sub(x, p.span_point));
  return exact::rank(std::move(probe)) == p.dim;
}

// Enumerate k-subsets of {0..n-1}.
void subsets(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      fn(idx);
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  if (k == 0) {
    fn({});
    return;
  }
  rec(0, 0);
}

// Minimal vertex set of a point cloud: p is a vertex iff it is not a convex
// combination of the others.
RatMat minimal_vertices(const RatMat& pts) {
  const std::size_t m = pts.size();
  if (m <= 2) return pts;
  const std::size_t d = pts[0].size();
  RatMat verts;
  for (std::size_t i = 0; i < m; ++i) {
    RatMat a = exact::zero_mat(d + 1, m - 1);
    std::size_t col = 0;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t r = 0; r < d; ++r) a[r][col] = pts[j][r];
      a[d][col] = 1;
      ++col;
    }
    RatVec b = pts[i];
    b.push_back(Rat(1));
    if (!exact::lp_feasible(a, b)) verts.push_back(pts[i]);
  }
  return verts;
}

constexpr long long kSubsetBudget = 400000;

long long choose_ll(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long i = 0; i < k; ++i) {
    r = r * (n - i) / (i + 1);
    if (r > kSubsetBudget) return r;
  }
  return r;
}

}  // namespace

ExactPoly empty_poly(int ambient) {
  ExactPoly p;
  p.ambient = ambient;
  return p;
}

ExactPoly hull_exact(const RatMat& raw_points) {
  if (raw_points.empty()) fail(Errc::param_error, "hull_exact: no points");
  RatMat pts = dedup_points(raw_points);
  ExactPoly p;
  p.ambient = static_cast<int>(pts[0].size());
  p.span_point = pts[0];
  {
    RatMat diffs;
    for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(exact::sub(pts[i], pts[0]));
    p.span_dirs = exact::row_space(std::move(diffs));
  }
  p.dim = static_cast<int>(p.span_dirs.size());
  if (p.dim == 0) {
    p.vertices = {pts[0]};
    return p;
  }
  p.vertices = minimal_vertices(pts);

  // Facets within the span, by brute force over (dim)-subsets of vertices.
  const int k = p.dim;
  const long long n_sub = choose_ll(static_cast<long long>(p.vertices.size()), k);
  if (n_sub > kSubsetBudget)
    fail(Errc::dimension_cap, "hull_exact: too many candidate facets at this dimension");

  RatMat coords;
  for (const auto& v : p.vertices) coords.push_back(span_coords(p, v));

  std::set<std::string> seen;
  subsets(static_cast<int>(p.vertices.size()), k, [&](const std::vector<int>& idx) {
    // Hyperplane through the chosen vertices (in span coordinates).
    RatMat diffs;
    for (int i = 1; i < k; ++i)
      diffs.push_back(exact::sub(coords[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])],
                                 coords[static_cast<std::size_t>(idx[0])]));
    RatMat norms = exact::kernel(diffs, static_cast<std::size_t>(k));
    if (norms.size() != 1) return;  // degenerate subset
    RatVec n = canonical_covector(norms[0]);
    Rat c = exact::dot(n, coords[static_cast<std::size_t>(idx[0])]);
    bool any_pos = false, any_neg = false;
    for (const auto& y : coords) {
      const Rat s = exact::dot(n, y) - c;
      if (s > 0) any_pos = true;
      if (s < 0) any_neg = true;
      if (any_pos && any_neg) return;
    }
    if (any_neg) {
      n = exact::scale(n, Rat(-1));
      c = -c;
    }
    const std::string key = exact::key_of(n) + "|" + exact::key_of(RatVec{c});
    if (!seen.insert(key).second) return;
    // Lift to ambient: a with span_dirs . a = n.
    auto a = exact::solve(p.span_dirs, n);
    if (!a) return;
    const Rat c_amb = c + exact::dot(*a, p.span_point);
    p.facets_n.push_back(*a);
    p.facets_c.push_back(c_amb);
  });
  return p;
}

bool contains(const ExactPoly& p, const RatVec& x) {
  if (p.empty()) return false;
  if (p.dim == 0) return exact::is_zero(exact::sub(x, p.vertices[0]));
  if (!in_span(p, x)) return false;
  for (std::size_t f = 0; f < p.facets_n.size(); ++f)
    if (exact::dot(p.facets_n[f], x) < p.facets_c[f]) return false;
  return true;
}

bool rel_interior_contains(const ExactPoly& p, const RatVec& x) {
  if (p.empty()) return false;
  if (p.dim == 0) return contains(p, x);
  if (!in_span(p, x)) return false;
  for (std::size_t f = 0; f < p.facets_n.size(); ++f)
    if (exact::dot(p.facets_n[f], x) <= p.facets_c[f]) return false;
  return true;
}

std::string vertex_key(const ExactPoly& p) {
  std::vector<std::string> keys;
  for (const auto& v : p.vertices) keys.push_back(exact::key_of(v));
  std::sort(keys.begin(), keys.end());
  std::ostringstream os;
  for (const auto& k : keys) os << k << '#';
  return os.str();
}

bool same_vertices(const ExactPoly& a, const ExactPoly& b) {
  return vertex_key(a) == vertex_key(b);
}

std::vector<ExactPoly> faces_of(const ExactPoly& p) {
  std::vector<ExactPoly> out;
  if (p.empty()) return out;
  std::set<std::string> seen;
  std::function<void(const ExactPoly&)> rec = [&](const ExactPoly& q) {
    if (!seen.insert(vertex_key(q)).second) return;
    out.push_back(q);
    if (q.dim == 0) return;
    for (std::size_t f = 0; f < q.facets_n.size(); ++f) {
      RatMat tight;
      for (const auto& v : q.vertices)
        if (exact::dot(q.facets_n[f], v) == q.facets_c[f]) tight.push_back(v);
      if (tight.empty()) continue;
      rec(hull_exact(tight));
    }
  };
  rec(p);
  return out;
}

void span_equalities(const ExactPoly& p, RatMat& normals, RatVec& offsets) {
  normals = exact::kernel(p.span_dirs, static_cast<std::size_t>(p.ambient));
  offsets.clear();
  for (const auto& n : normals) offsets.push_back(exact::dot(n, p.span_point));
}

namespace {

// Vertex enumeration for {x : eq_n.x = eq_c, in_n.x >= in_c}, assumed
// bounded.  Brute force over subsets of inequalities made tight.
RatMat enumerate_vertices(int ambient, const RatMat& eq_n, const RatVec& eq_c, const RatMat& in_n,
                          const RatVec& in_c) {
  const int amb_rank = exact::rank(eq_n);
  const int k = ambient - amb_rank;  // dimension of the solution flat
  if (k < 0) return {};
  if (!eq_n.empty() && !exact::solve(eq_n, eq_c)) return {};

  const int ni = static_cast<int>(in_n.size());
  if (choose_ll(ni, k) > kSubsetBudget)
    fail(Errc::dimension_cap, "vertex enumeration: too many subsets");
  RatMat found;
  std::set<std::string> seen;
  subsets(ni, k, [&](const std::vector<int>& idx) {
    RatMat a = eq_n;
    RatVec b = eq_c;
    for (int i : idx) {
      a.push_back(in_n[static_cast<std::size_t>(i)]);
      b.push_back(in_c[static_cast<std::size_t>(i)]);
    }
    if (exact::rank(a) != ambient) return;
    auto x = exact::solve(a, b);
    if (!x) return;
    for (int f = 0; f < ni; ++f)
      if (exact::dot(in_n[static_cast<std::size_t>(f)], *x) < in_c[static_cast<std::size_t>(f)]) return;
    const std::string key = exact::key_of(*x);
    if (seen.insert(key).second) found.push_back(*x);
  });
  return found;
}

}  // namespace

std::vector<ExactPoly> split_by_hyperplane(const ExactPoly& p, const RatVec& n, const Rat& c) {
  std::vector<ExactPoly> out;
  if (p.empty()) return out;
  RatMat eq_n;
  RatVec eq_c;
  span_equalities(p, eq_n, eq_c);
  for (int side = 0; side < 2; ++side) {
    RatMat in_n = p.facets_n;
    RatVec in_c = p.facets_c;
    in_n.push_back(side == 0 ? n : exact::scale(n, Rat(-1)));
    in_c.push_back(side == 0 ? c : -c);
    RatMat verts = enumerate_vertices(p.ambient, eq_n, eq_c, in_n, in_c);
    if (verts.empty()) continue;
    ExactPoly piece = hull_exact(verts);
    if (piece.dim == p.dim) out.push_back(std::move(piece));
  }
  return out;
}

ExactPoly clip(const ExactPoly& p, const RatVec& n, const Rat& c) {
  if (p.empty()) return p;
  RatMat eq_n;
  RatVec eq_c;
  span_equalities(p, eq_n, eq_c);
  RatMat in_n = p.facets_n;
  RatVec in_c = p.facets_c;
  in_n.push_back(n);
  in_c.push_back(c);
  RatMat verts = enumerate_vertices(p.ambient, eq_n, eq_c, in_n, in_c);
  if (verts.empty()) return empty_poly(p.ambient);
  return hull_exact(verts);
}

ExactPoly intersect(const ExactPoly& a, const ExactPoly& b) {
  if (a.empty() || b.empty()) return empty_poly(a.ambient);
  if (a.ambient != b.ambient) fail(Errc::dim_mismatch, "intersect: ambient mismatch");
  RatMat eq_n, eq_nb;
  RatVec eq_c, eq_cb;
  span_equalities(a, eq_n, eq_c);
  span_equalities(b, eq_nb, eq_cb);
  for (std::size_t i = 0; i < eq_nb.size(); ++i) {
    eq_n.push_back(eq_nb[i]);
    eq_c.push_back(eq_cb[i]);
  }
  RatMat in_n = a.facets_n;
  RatVec in_c = a.facets_c;
  for (std::size_t i = 0; i < b.facets_n.size(); ++i) {
    in_n.push_back(b.facets_n[i]);
    in_c.push_back(b.facets_c[i]);
  }
  RatMat verts = enumerate_vertices(a.ambient, eq_n, eq_c, in_n, in_c);
  if (verts.empty()) return empty_poly(a.ambient);
  return hull_exact(verts);
}

RatVec centroid(const ExactPoly& p) {
  if (p.empty()) fail(Errc::param_error, "centroid of empty polytope");
  RatVec c = exact::zero_vec(static_cast<std::size_t>(p.ambient));
  for (const auto& v : p.vertices) c = exact::add(c, v);
  return exact::scale(c, Rat(1) / Rat(static_cast<long long>(p.vertices.size())));
}

}  // namespace gradpoly::geom
