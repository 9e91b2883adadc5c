#include "gradpoly/strata.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gradpoly/rng.hpp"

namespace gradpoly {

using exact::Rat;
using exact::RatMat;
using exact::RatVec;

std::vector<int> support(const Model& m, const Vec& v) {
  const double n = v.norm();
  if (n < 1e-14) fail(Errc::zero_vector, "support: zero vector");
  std::vector<int> supp;
  for (int c = 0; c < static_cast<int>(m.classes.size()); ++c) {
    double mass = 0.0;
    for (int b : m.classes[static_cast<std::size_t>(c)].block_ids)
      mass += (m.blocks[static_cast<std::size_t>(b)].basis.adjoint() * v).squaredNorm();
    if (std::sqrt(mass) > tols::support * n) supp.push_back(c);
  }
  return supp;
}

exact::RatMat isotropy_a(const Model& m, const std::vector<int>& supp) {
  if (supp.empty()) fail(Errc::param_error, "isotropy_a: empty support");
  RatMat rows = m.frame.constraints;
  const auto& chi0 = m.classes[static_cast<std::size_t>(supp[0])].chi;
  for (std::size_t i = 1; i < supp.size(); ++i)
    rows.push_back(exact::sub(m.classes[static_cast<std::size_t>(supp[i])].chi, chi0));
  return exact::kernel(rows, static_cast<std::size_t>(m.frame.dim));
}

exact::RatVec weight_point(const Model& m, const RatVec& chi) {
  const std::size_t d = static_cast<std::size_t>(m.frame.dim);
  RatMat basis = m.frame.constraints.empty()
                     ? exact::identity(d)
                     : exact::kernel(m.frame.constraints, d);
  // Solve (B G B^T) u = B chi, point = B^T u.
  RatMat bg = exact::mat_mul(basis, m.frame.gram);
  RatMat bgb = exact::mat_mul(bg, exact::transpose(basis));
  RatVec rhs = exact::mat_vec(basis, chi);
  auto u = exact::solve(bgb, rhs);
  if (!u) fail(Errc::degenerate_spec, "weight_point: singular Gram restriction");
  return exact::mat_vec(exact::transpose(basis), *u);
}

namespace {

// Canonical affine-span data for a set of points: RREF direction basis plus
// the Gram-orthogonal projection of the origin onto the span.
void affine_span(const Model& m, const std::vector<RatVec>& pts, RatVec& point, RatMat& dirs) {
  RatMat diffs;
  for (std::size_t i = 1; i < pts.size(); ++i) diffs.push_back(exact::sub(pts[i], pts[0]));
  dirs = exact::row_space(std::move(diffs));
  if (dirs.empty()) {
    point = pts[0];
    return;
  }
  // Minimize (p0 + D^T t)^T G (p0 + D^T t).
  RatMat dg = exact::mat_mul(dirs, m.frame.gram);
  RatMat dgd = exact::mat_mul(dg, exact::transpose(dirs));
  RatVec rhs = exact::scale(exact::mat_vec(dg, pts[0]), Rat(-1));
  auto t = exact::solve(dgd, rhs);
  if (!t) {
    point = pts[0];
    return;
  }
  point = exact::add(pts[0], exact::mat_vec(exact::transpose(dirs), *t));
}

std::vector<RatVec> class_weight_points(const Model& m) {
  std::vector<RatVec> pts;
  for (const auto& cls : m.classes) pts.push_back(weight_point(m, cls.chi));
  return pts;
}

}  // namespace

std::vector<exact::RatVec> fixed_point_images(const Model& m) { return class_weight_points(m); }

std::vector<StratumType> enumerate_strata(const Model& m) {
  const int k = static_cast<int>(m.classes.size());
  if (k > 16) fail(Errc::dimension_cap, "enumerate_strata: too many weight classes");
  const auto pts = class_weight_points(m);
  std::vector<StratumType> out;
  std::map<std::string, std::size_t> seen;
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> supp;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) supp.push_back(i);
    StratumType st;
    st.support = supp;
    st.isotropy = isotropy_a(m, supp);
    st.codim = static_cast<int>(st.isotropy.size());
    std::vector<RatVec> sp;
    for (int i : supp) sp.push_back(pts[static_cast<std::size_t>(i)]);
    affine_span(m, sp, st.span_point, st.span_dirs);
    const std::string key =
        exact::key_of(st.isotropy) + "!" + exact::key_of(st.span_dirs) + "!" + exact::key_of(st.span_point);
    auto it = seen.find(key);
    if (it == seen.end()) {
      st.n_supports = 1;
      seen.emplace(key, out.size());
      out.push_back(std::move(st));
    } else {
      ++out[it->second].n_supports;
    }
  }
  return out;
}

Decomposition decompose_P0(const Model& m) {
  Decomposition d;
  const std::size_t fd = static_cast<std::size_t>(m.frame.dim);
  d.a_basis = m.frame.constraints.empty() ? exact::identity(fd)
                                          : exact::kernel(m.frame.constraints, fd);
  const int r = static_cast<int>(d.a_basis.size());
  if (r > 4) fail(Errc::dimension_cap, "decompose_P0: exact arrangement limited to rank 4");

  const auto pts_amb = class_weight_points(m);
  auto to_reduced = [&](const RatVec& x) {
    auto u = exact::solve(exact::transpose(d.a_basis), x);
    if (!u) fail(Errc::dim_mismatch, "decompose_P0: point outside the slice");
    return *u;
  };
  auto to_ambient_poly = [&](const geom::ExactPoly& p) {
    RatMat verts;
    for (const auto& v : p.vertices) verts.push_back(exact::mat_vec(exact::transpose(d.a_basis), v));
    return geom::hull_exact(verts);
  };

  RatMat pts_red;
  for (const auto& p : pts_amb) pts_red.push_back(to_reduced(p));
  geom::ExactPoly p_red = geom::hull_exact(pts_red);

  const auto strata = enumerate_strata(m);
  std::vector<std::pair<RatVec, Rat>> hyperplanes;
  for (const auto& st : strata) {
    if (st.codim != 1) continue;
    d.sigma1.push_back(st);
    RatMat dirs_red;
    for (const auto& row : st.span_dirs) dirs_red.push_back(to_reduced(row));
    RatMat normals = exact::kernel(dirs_red, static_cast<std::size_t>(r));
    if (normals.size() != 1) continue;  // consistency guard
    const RatVec n = normals[0];
    hyperplanes.emplace_back(n, exact::dot(n, to_reduced(st.span_point)));
  }

  std::vector<geom::ExactPoly> cells = {p_red};
  for (const auto& [n, c] : hyperplanes) {
    std::vector<geom::ExactPoly> next;
    for (const auto& cell : cells) {
      auto pieces = geom::split_by_hyperplane(cell, n, c);
      for (auto& piece : pieces) next.push_back(std::move(piece));
    }
    cells = std::move(next);
  }

  std::set<std::string> face_keys;
  for (const auto& cell : cells) {
    d.chambers.push_back(to_ambient_poly(cell));
    for (const auto& f : geom::faces_of(cell)) {
      geom::ExactPoly fa = to_ambient_poly(f);
      if (face_keys.insert(geom::vertex_key(fa)).second) d.faces.push_back(std::move(fa));
    }
  }
  d.P = to_ambient_poly(p_red);
  return d;
}

FaceCheckReport face_isotropy_check(const Model& m, const Decomposition& d, int samples,
                                    std::uint64_t seed) {
  FaceCheckReport report;
  if (d.faces.empty()) fail(Errc::param_error, "face_isotropy_check: empty decomposition");
  const auto pts = class_weight_points(m);
  const int k = static_cast<int>(pts.size());
  const std::size_t fd = static_cast<std::size_t>(m.frame.dim);

  auto to_reduced = [&](const RatVec& x) {
    auto u = exact::solve(exact::transpose(d.a_basis), x);
    if (!u) fail(Errc::dim_mismatch, "face_isotropy_check: point outside the slice");
    return *u;
  };
  const int r = static_cast<int>(d.a_basis.size());

  for (int s = 0; s < samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const auto& face = d.faces[static_cast<std::size_t>(s) % d.faces.size()];

    // Strictly positive rational combination of the vertices: a point of the
    // relative interior.
    RatVec q = exact::zero_vec(fd);
    Rat total(0);
    std::vector<Rat> coefs;
    for (std::size_t i = 0; i < face.vertices.size(); ++i) {
      Rat c(1 + static_cast<long long>(rng.next_u64() % 9));
      coefs.push_back(c);
      total += c;
    }
    for (std::size_t i = 0; i < face.vertices.size(); ++i)
      q = exact::add(q, exact::scale(face.vertices[i], coefs[i] / total));

    // Fiber mass program: t >= 0, sum t = 1, sum t_i w_i = q  (reduced coords).
    RatMat a = exact::zero_mat(static_cast<std::size_t>(r) + 1, static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      const RatVec wr = to_reduced(pts[static_cast<std::size_t>(i)]);
      for (int row = 0; row < r; ++row) a[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] = wr[static_cast<std::size_t>(row)];
      a[static_cast<std::size_t>(r)][static_cast<std::size_t>(i)] = 1;
    }
    RatVec b = to_reduced(q);
    b.push_back(Rat(1));
    RatVec cost;
    for (int i = 0; i < k; ++i) cost.emplace_back(static_cast<long long>(rng.next_u64() % 7));
    const auto lp = exact::lp_solve(a, b, cost);
    if (!lp.feasible)
      fail(Errc::infeasible_fiber, "face_isotropy_check: no mass vector over a face point");

    std::vector<int> supp;
    for (int i = 0; i < k; ++i)
      if (lp.x[static_cast<std::size_t>(i)] > 0) supp.push_back(i);

    // Explicit fiber point from the masses (sanity of the construction).
    Vec v = Vec::Zero(m.rep_dim);
    for (int i : supp) {
      const auto& cls = m.classes[static_cast<std::size_t>(i)];
      const auto& basis = m.blocks[static_cast<std::size_t>(cls.block_ids[0])].basis;
      v += std::sqrt(exact::to_double(lp.x[static_cast<std::size_t>(i)])) * basis.col(0);
    }
    const std::vector<int> supp_v = support(m, v);

    const RatMat iso = isotropy_a(m, supp_v);
    // a_F: Gram-perpendicular of the face span inside the slice.
    RatMat rows = m.frame.constraints;
    for (const auto& dir : face.span_dirs) rows.push_back(exact::mat_vec(m.frame.gram, dir));
    const RatMat a_f = exact::kernel(rows, fd);

    FaceCheckReport::Detail det;
    det.face = static_cast<int>(static_cast<std::size_t>(s) % d.faces.size());
    det.q = q;
    det.support = supp_v;
    det.ok = exact::space_contains(a_f, iso);
    if (!det.ok) ++report.violations;
    report.details.push_back(std::move(det));
    ++report.samples;
  }
  return report;
}

bool isotropy_sum_property(const Model& m) {
  const int k = static_cast<int>(m.classes.size());
  if (k > 16) fail(Errc::dimension_cap, "isotropy_sum_property: too many weight classes");
  std::vector<RatMat> iso(1u << k);
  std::vector<int> dim(1u << k, 0);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> supp;
    for (int i = 0; i < k; ++i)
      if (mask & (1u << i)) supp.push_back(i);
    iso[mask] = isotropy_a(m, supp);
    dim[mask] = static_cast<int>(iso[mask].size());
  }
  std::vector<unsigned> dim1;
  for (unsigned mask = 1; mask < (1u << k); ++mask)
    if (dim[mask] == 1) dim1.push_back(mask);
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    if (dim[mask] == 0) continue;
    RatMat sum;
    for (unsigned j : dim1) {
      if ((j & mask) != mask) continue;  // need support superset: J >= I
      for (const auto& row : iso[j]) sum.push_back(row);
    }
    if (!exact::same_space(exact::row_space(std::move(sum)), iso[mask])) return false;
  }
  return true;
}

}  // namespace gradpoly
