#include "gradpoly/gradmap.hpp"

#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "gradpoly/linalg.hpp"
#include "gradpoly/rng.hpp"

namespace gradpoly {

ProjPoint make_proj(const Model& m, Vec v) {
  const double n = v.norm();
  if (n < 1e-12) fail(Errc::zero_vector, "make_proj: zero representative");
  v /= n;
  ProjPoint z;
  z.v = std::move(v);
  for (int c = 0; c < static_cast<int>(m.classes.size()); ++c) {
    double mass = 0.0;
    for (int b : m.classes[static_cast<std::size_t>(c)].block_ids) {
      mass += (m.blocks[static_cast<std::size_t>(b)].basis.adjoint() * z.v).squaredNorm();
    }
    if (std::sqrt(mass) > tols::support) z.support.push_back(c);
  }
  return z;
}

PElement mu_V(const Model& m, const Vec& v) {
  PElement x;
  x.coeffs = RVec::Zero(m.dim_p());
  for (int b = 0; b < m.dim_p(); ++b)
    x.coeffs[b] = v.dot(m.p_ops[static_cast<std::size_t>(b)] * v).real();
  return x;
}

PElement mu_P(const Model& m, const ProjPoint& z) { return mu_V(m, z.v); }

AVector mu_a(const Model& m, const ProjPoint& z) { return a_part(m, mu_P(m, z)); }

namespace {

std::pair<int, int> su_sizes(const Model& m) {
  const Mat& a0 = m.p_ops_def[static_cast<std::size_t>(m.a_indices[0])];
  for (int j = 1; j < m.defining_dim; ++j)
    if (std::abs(a0(0, j)) > 0.5) return {j, m.defining_dim - j};
  fail(Errc::unsupported_kind, "su model: cannot infer block sizes");
}

}  // namespace

AVector chamber_rep(const Model& m, const PElement& x) {
  switch (m.kind) {
    case Kind::torus: {
      return a_part(m, x);
    }
    case Kind::sl_n_real: {
      const Mat realized = m.p_realize_def(x.coeffs);
      Eigen::SelfAdjointEigenSolver<Mat> es(realized);
      const RVec lam = es.eigenvalues();
      RVec frame(m.frame.dim);
      for (int i = 0; i < m.frame.dim; ++i) frame[i] = lam[m.frame.dim - 1 - i];
      return avec_of_frame(m, std::move(frame));
    }
    case Kind::su_p_q: {
      const auto [p, q] = su_sizes(m);
      const Mat realized = m.p_realize_def(x.coeffs);
      const Mat b = realized.block(0, p, p, q);
      Eigen::JacobiSVD<Mat> svd(b);
      const RVec sv = svd.singularValues();  // descending
      RVec frame(m.frame.dim);
      for (int i = 0; i < m.frame.dim; ++i) frame[i] = i < sv.size() ? sv[i] : 0.0;
      return avec_of_frame(m, std::move(frame));
    }
    case Kind::product: {
      RVec frame(m.frame.dim);
      for (std::size_t f = 0; f < m.factors.size(); ++f) {
        const auto [pb, pe] = m.factor_p_ranges[f];
        const auto [fb, fe] = m.factor_frame_ranges[f];
        PElement sub;
        sub.coeffs = x.coeffs.segment(pb, pe - pb);
        const AVector rep = chamber_rep(*m.factors[f], sub);
        frame.segment(fb, fe - fb) = rep.frame;
      }
      return avec_of_frame(m, std::move(frame));
    }
    case Kind::custom:
      fail(Errc::unsupported_kind, "custom model has no chamber-representative strategy");
  }
  return {};
}

AVector chamber_rep_point(const Model& m, const ProjPoint& z) {
  return chamber_rep(m, mu_P(m, z));
}

Vec xi_Z(const Model& m, const PElement& xi, const ProjPoint& z) {
  const Vec w = m.p_realize(xi.coeffs) * z.v;
  return w - z.v.dot(w) * z.v;
}

double tangent_g(const Vec& a, const Vec& b) { return 2.0 * a.dot(b).real(); }

double p_norm(const PElement& x) { return x.coeffs.norm(); }

PElement pelem_of_avec(const Model& m, const AVector& a) {
  const RVec acoeffs = m.frame.frame_to_a * a.frame;
  PElement x;
  x.coeffs = RVec::Zero(m.dim_p());
  for (int b = 0; b < m.dim_a(); ++b) x.coeffs[m.a_indices[static_cast<std::size_t>(b)]] = acoeffs[b];
  return x;
}

AVector avec_of_frame(const Model& m, RVec frame) {
  AVector a;
  a.chamber_flag = m.chamber_contains(frame);
  a.frame = std::move(frame);
  return a;
}

AVector a_part(const Model& m, const PElement& x) {
  RVec acoeffs(m.dim_a());
  for (int b = 0; b < m.dim_a(); ++b) acoeffs[b] = x.coeffs[m.a_indices[static_cast<std::size_t>(b)]];
  return avec_of_frame(m, m.frame.a_to_frame * acoeffs);
}

double a_dist(const Model& m, const RVec& x, const RVec& y) {
  const RVec d = x - y;
  return std::sqrt(std::max(0.0, d.dot(m.frame.gram_f * d)));
}

double a_norm(const Model& m, const RVec& x) {
  return std::sqrt(std::max(0.0, x.dot(m.frame.gram_f * x)));
}

GradReport grad_consistency(const Model& m, int n_samples, std::uint64_t seed) {
  if (n_samples < 1) fail(Errc::param_error, "grad_consistency: n_samples >= 1 required");
  GradReport report;
  report.samples = n_samples;
  const double h = 1e-5;

  auto mu_xi_at = [&](const Mat& xi_op, const Vec& w) {
    return w.dot(xi_op * w).real() / w.squaredNorm();
  };

  for (int s = 0; s < n_samples; ++s) {
    Rng rng(seed, static_cast<std::uint64_t>(s));
    const ProjPoint z = make_proj(m, rng.unit_cvec(m.rep_dim));
    PElement xi;
    xi.coeffs = rng.gaussian_vec(m.dim_p());
    const double xin = xi.coeffs.norm();
    if (xin < 1e-12) continue;
    xi.coeffs /= xin;
    Vec eta = rng.cgaussian_vec(m.rep_dim);
    eta -= z.v.dot(eta) * z.v;  // horizontal
    if (eta.norm() < 1e-10) continue;
    eta /= eta.norm();

    const Mat xi_op = m.p_realize(xi.coeffs);
    const double fd = (mu_xi_at(xi_op, z.v + h * eta) - mu_xi_at(xi_op, z.v - h * eta)) / (2.0 * h);
    const double an = tangent_g(xi_Z(m, xi, z), eta);
    report.max_grad_residual = std::max(report.max_grad_residual, std::abs(fd - an));

    // Tangent orthogonal to p.z: project eta off the real span of the basis
    // fields, then every directional derivative of mu_p must vanish.
    std::vector<Vec> onb;
    for (int b = 0; b < m.dim_p(); ++b) {
      PElement e;
      e.coeffs = RVec::Zero(m.dim_p());
      e.coeffs[b] = 1.0;
      Vec u = xi_Z(m, e, z);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& t : onb) u -= t * (tangent_g(t, u) / tangent_g(t, t));
      if (std::sqrt(std::max(0.0, tangent_g(u, u))) > 1e-8) onb.push_back(u);
    }
    Vec eta_perp = eta;
    for (const auto& e : onb) eta_perp -= e * (tangent_g(e, eta_perp) / tangent_g(e, e));
    const double pn = std::sqrt(std::max(0.0, tangent_g(eta_perp, eta_perp)));
    if (pn > 1e-8) {
      eta_perp /= pn;
      for (int b = 0; b < m.dim_p(); ++b) {
        const Mat& op = m.p_ops[static_cast<std::size_t>(b)];
        const double fdb =
            (mu_xi_at(op, z.v + h * eta_perp) - mu_xi_at(op, z.v - h * eta_perp)) / (2.0 * h);
        report.max_kernel_residual = std::max(report.max_kernel_residual, std::abs(fdb));
      }
    }
  }
  return report;
}

double realization_residual(const OrbitRealization& orb) {
  if (!orb.orbit_model) fail(Errc::param_error, "orbit realization: null model");
  const Model& om = *orb.orbit_model;
  PElement mu = mu_P(om, orb.base);
  if (orb.dual_sign) mu.coeffs = -mu.coeffs;
  const AVector rep = chamber_rep(om, mu);
  return a_dist(om, rep.frame, orb.target.frame);
}

void check_realization(const OrbitRealization& orb, double tol) {
  const double r = realization_residual(orb);
  if (r > tol)
    fail(Errc::realization_mismatch,
         "orbit realization: chamber representative misses target by " + std::to_string(r));
}

ProjPoint ShiftedModel::embed(const ProjPoint& y, const ProjPoint& w) const {
  Vec vy = Vec::Ones(1);
  for (int i = 0; i < q; ++i) vy = kron_vec(vy, y.v);
  Vec vw = Vec::Ones(1);
  for (int i = 0; i < p; ++i) vw = kron_vec(vw, w.v);
  return make_proj(*big, kron_vec(vy, vw));
}

ShiftedModel shifted_model(const ModelPtr& m, int p, int q, const AVector& direction,
                           const OrbitRealization& orb) {
  if (p < 1 || q < 1) fail(Errc::param_error, "shifted_model: p, q >= 1 required");
  if (std::gcd(p, q) != 1) fail(Errc::param_error, "shifted_model: p, q must be coprime");
  check_realization(orb);
  if (a_dist(*m, direction.frame, orb.target.frame) > tols::factorization)
    fail(Errc::realization_mismatch, "shifted_model: direction does not match orbit target");
  ShiftedModel s;
  s.p = p;
  s.q = q;
  s.direction = direction;
  s.base_q = q == 1 ? m : derived_model(m, RepFunctor::tensor(q));
  s.orbit_p = p == 1 ? orb.orbit_model : derived_model(orb.orbit_model, RepFunctor::tensor(p));
  s.big = tensor_model(s.base_q, s.orbit_p);
  return s;
}

}  // namespace gradpoly
