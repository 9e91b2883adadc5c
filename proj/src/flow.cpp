#include "gradpoly/flow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "gradpoly/kernels.hpp"
#include "gradpoly/linalg.hpp"
#include "gradpoly/rng.hpp"
#include "gradpoly/strata.hpp"

namespace gradpoly {

const char* flow_status_name(FlowStatus s) {
  switch (s) {
    case FlowStatus::converged_zero: return "converged_zero";
    case FlowStatus::converged_positive: return "converged_positive";
    case FlowStatus::budget_exhausted: return "budget_exhausted";
    case FlowStatus::norm_collapse: return "norm_collapse";
  }
  return "?";
}

const char* null_verdict_name(NullVerdict v) {
  switch (v) {
    case NullVerdict::null: return "null";
    case NullVerdict::minimal_vector: return "minimal_vector";
    case NullVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

void FlowParams::validate() const {
  if (step0 <= 0 || tol_ss <= 0 || tol_null <= 0 || grad_tol <= 0)
    fail(Errc::param_error, "flow params: steps and tolerances must be positive");
  if (shrink <= 0 || shrink >= 1 || grow <= 1)
    fail(Errc::param_error, "flow params: need 0 < shrink < 1 < grow");
  if (budget < 0 || restarts < 1 || restarts > 1000)
    fail(Errc::param_error, "flow params: budget >= 0 and 1 <= restarts <= 1000");
}

std::vector<Halfspace> chamber_halfspaces(const Model& m) {
  std::vector<Halfspace> hs;
  for (const auto& row : m.chamber) {
    RVec n(m.frame.dim);
    for (int j = 0; j < m.frame.dim; ++j) n[j] = exact::to_double(row[static_cast<std::size_t>(j)]);
    hs.push_back({n, 0.0});
  }
  return hs;
}

namespace {

Vec limit_probe(const Model& m, Rng& rng, const Vec& seed_v, double t_limit) {
  RVec dir = rng.unit_vec(m.dim_p());
  return exp_apply_projective(m.p_realize(dir), t_limit, seed_v);
}

}  // namespace

Cloud orbit_sample(const Model& m, const YSpec& spec, ExecMode mode) {
  if (spec.budget < 1) fail(Errc::param_error, "orbit_sample: budget >= 1 required");
  switch (spec.kind) {
    case YSpec::YKind::cloud: {
      Cloud out;
      for (const auto& v : spec.cloud_points) out.push_back(v / v.norm());
      if (out.empty()) fail(Errc::empty_cloud, "orbit_sample: empty cloud");
      return out;
    }
    case YSpec::YKind::union_spec: {
      Cloud out;
      for (const auto& part : spec.parts) {
        Cloud sub = orbit_sample(m, part, mode);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      if (out.empty()) fail(Errc::empty_cloud, "orbit_sample: empty union");
      return out;
    }
    case YSpec::YKind::whole_space: {
      const int n = spec.budget;
      const int n_probe = std::min(n / 5, std::max(2 * m.dim_p() * m.dim_p(), 8));
      const int n_uniform = n - n_probe;
      Cloud out(static_cast<std::size_t>(n));
      for_each_index(static_cast<std::size_t>(n), mode, [&](std::size_t i) {
        Rng rng(spec.seed, i);
        Vec v = rng.unit_cvec(m.rep_dim);
        if (static_cast<int>(i) >= n_uniform) v = limit_probe(m, rng, v, spec.t_limit);
        out[i] = std::move(v);
      });
      return out;
    }
    case YSpec::YKind::orbit_closure: {
      if (spec.seeds.empty()) fail(Errc::param_error, "orbit_sample: orbit closure needs a seed point");
      const int n = spec.budget;
      const int n_probe = std::min(n / 5, std::max(2 * m.dim_p() * m.dim_p(), 8));
      const int n_group = n - n_probe;
      Cloud out(static_cast<std::size_t>(n));
      for_each_index(static_cast<std::size_t>(n), mode, [&](std::size_t i) {
        Rng rng(spec.seed, i);
        const Vec& x = spec.seeds[i % spec.seeds.size()];
        if (static_cast<int>(i) < n_group) {
          const double frac = n_group > 1 ? static_cast<double>(i) / (n_group - 1) : 0.0;
          const double radius = std::pow(1.0 + spec.r_max, frac) - 1.0;
          const GroupElement g = sample_group(m, GroupPart::G, radius, spec.seed, i);
          Vec v = g.op * x;
          out[i] = v / v.norm();
        } else {
          out[i] = limit_probe(m, rng, x / x.norm(), spec.t_limit);
        }
      });
      return out;
    }
  }
  fail(Errc::param_error, "orbit_sample: unknown Y kind");
}

APlusResult compute_A_plus(const Model& m, const YSpec& spec, double hull_tol, double verdict_tol,
                           int probes, ExecMode mode) {
  const Cloud cloud = orbit_sample(m, spec, mode);
  const std::vector<AVector> avecs = map_chamber_batch(m, cloud, mode);
  APlusResult r;
  r.avecs = RMat(static_cast<Eigen::Index>(avecs.size()), m.frame.dim);
  for (std::size_t i = 0; i < avecs.size(); ++i) r.avecs.row(static_cast<Eigen::Index>(i)) = avecs[i].frame;
  const Polytope h = hull(r.avecs, hull_tol);
  r.a_plus = intersect_chamber(h, chamber_halfspaces(m));
  r.verdict = union_convexity(r.avecs, verdict_tol, probes, mode);
  return r;
}

namespace {

struct SingleFlow {
  Vec v;
  double value = 0.0;
  long long iterations = 0;
  FlowStatus status = FlowStatus::budget_exhausted;
  std::vector<std::pair<long long, double>> trail;
};

SingleFlow flow_from(const Model& m, Vec v, const RVec& target, const FlowParams& params) {
  SingleFlow res;
  auto mu_minus = [&](const Vec& w) {
    RVec c(m.dim_p());
    for (int b = 0; b < m.dim_p(); ++b) c[b] = w.dot(m.p_ops[static_cast<std::size_t>(b)] * w).real();
    return RVec(c - target);
  };
  double eta = params.step0;
  RVec gen = mu_minus(v);
  double f = gen.squaredNorm();
  const long long trail_stride = std::max<long long>(1, params.budget / 200);
  res.trail.emplace_back(0, f);
  long long it = 0;
  for (; it < params.budget; ++it) {
    if (f <= params.tol_ss * params.tol_ss) {
      res.status = FlowStatus::converged_zero;
      break;
    }
    const Mat gen_op = m.p_realize(gen);
    const Vec gv = gen_op * v;
    const Vec xz = gv - v.dot(gv) * v;
    const double gn2 = 2.0 * xz.squaredNorm();
    if (std::sqrt(gn2) < params.grad_tol) {
      res.status = f <= params.tol_ss * params.tol_ss ? FlowStatus::converged_zero
                                                      : FlowStatus::converged_positive;
      break;
    }
    bool accepted = false;
    while (eta > 1e-16) {
      Vec vn = expm_hermitian(gen_op, -eta) * v;
      vn /= vn.norm();
      const RVec gen_n = mu_minus(vn);
      const double fn = gen_n.squaredNorm();
      if (fn <= f - 0.1 * eta * gn2) {
        v = std::move(vn);
        gen = gen_n;
        f = fn;
        eta = std::min(eta * params.grow, 1e6);
        accepted = true;
        break;
      }
      eta *= params.shrink;
    }
    if (!accepted) {
      res.status = f <= params.tol_ss * params.tol_ss ? FlowStatus::converged_zero
                                                      : FlowStatus::converged_positive;
      break;
    }
    if ((it + 1) % trail_stride == 0) res.trail.emplace_back(it + 1, f);
  }
  if (it >= params.budget && res.status == FlowStatus::budget_exhausted &&
      f <= params.tol_ss * params.tol_ss)
    res.status = FlowStatus::converged_zero;
  res.v = std::move(v);
  res.value = f;
  res.iterations = it;
  if (res.trail.back().second != f) res.trail.emplace_back(it, f);
  return res;
}

}  // namespace

FlowResult norm_square_flow(const Model& m, const ProjPoint& z0, const AVector& alpha,
                            const FlowParams& params, std::uint64_t seed, std::uint64_t stream) {
  params.validate();
  const PElement target_p = pelem_of_avec(m, alpha);
  const RVec target = target_p.coeffs;

  FlowResult best;
  best.final_value = std::numeric_limits<double>::infinity();
  for (int r = 0; r < params.restarts; ++r) {
    Vec start = z0.v;
    if (r > 0) {
      const GroupElement k = sample_group(m, GroupPart::K, 0.0, seed, stream * 1024 + static_cast<std::uint64_t>(r));
      start = k.op * start;
      start /= start.norm();
    }
    SingleFlow run = flow_from(m, start, target, params);
    if (run.value < best.final_value) {
      best.final_value = run.value;
      best.final_vector = run.v;
      best.iterations = run.iterations;
      best.status = run.status;
      best.trail = run.trail;
    }
    if (best.final_value <= params.tol_ss * params.tol_ss) break;
  }
  return best;
}

SsVerdict semistable_test(const Model& m, const ProjPoint& z, const AVector& alpha,
                          const FlowParams& params, std::uint64_t seed, std::uint64_t stream,
                          const Shift* shift) {
  params.validate();
  SsVerdict v;
  if (shift == nullptr) {
    const FlowResult r = norm_square_flow(m, z, alpha, params, seed, stream);
    v.final_value = r.final_value;
    v.status = r.status;
    v.budget = r.iterations;
    v.semistable = r.final_value <= params.tol_ss * params.tol_ss;
    return v;
  }
  const ShiftedModel sm = shifted_model(std::make_shared<Model>(m), shift->p, shift->q,
                                        shift->orb.target, shift->orb);
  const ProjPoint big_z = sm.embed(z, shift->orb.base);
  AVector big_alpha = avec_of_frame(*sm.big, RVec(static_cast<double>(shift->q) * alpha.frame));
  const FlowResult r = norm_square_flow(*sm.big, big_z, big_alpha, params, seed, stream);
  v.final_value = r.final_value;
  v.status = r.status;
  v.budget = r.iterations;
  v.semistable = r.final_value <= params.tol_ss * params.tol_ss;
  return v;
}

NullResult nullcone_numeric(const Model& m, const Vec& v0, const FlowParams& params) {
  params.validate();
  if (v0.norm() < 1e-14) fail(Errc::zero_vector, "nullcone_numeric: zero vector");
  NullResult res;
  Vec v = v0;
  double eta = params.step0;
  auto mu_of = [&](const Vec& w) {
    RVec c(m.dim_p());
    for (int b = 0; b < m.dim_p(); ++b) c[b] = w.dot(m.p_ops[static_cast<std::size_t>(b)] * w).real();
    return c;
  };
  RVec mu = mu_of(v);
  double nsq = v.squaredNorm();
  long long it = 0;
  for (; it < params.budget; ++it) {
    if (std::sqrt(nsq) < params.tol_null) {
      res.verdict = NullVerdict::null;
      break;
    }
    const double mu_rel = mu.norm() / nsq;
    if (mu_rel < params.tol_ss && std::sqrt(nsq) >= 10.0 * params.tol_null) {
      res.verdict = NullVerdict::minimal_vector;
      break;
    }
    const double mu2 = mu.squaredNorm();
    bool accepted = false;
    while (eta > 1e-16) {
      const Vec vn = expm_hermitian(m.p_realize(mu), -eta) * v;
      const double nn = vn.squaredNorm();
      if (nn <= nsq - 0.1 * eta * 2.0 * mu2) {
        v = vn;
        nsq = nn;
        mu = mu_of(v);
        eta = std::min(eta * params.grow, 1e9);
        accepted = true;
        break;
      }
      eta *= params.shrink;
    }
    if (!accepted) {
      // Step collapse: classify by the current state.
      const double mu_rel2 = mu.norm() / nsq;
      if (std::sqrt(nsq) < params.tol_null)
        res.verdict = NullVerdict::null;
      else if (mu_rel2 < params.tol_ss)
        res.verdict = NullVerdict::minimal_vector;
      break;
    }
  }
  res.final_norm = std::sqrt(nsq);
  res.final_mu_norm = mu.norm() / nsq;
  res.iterations = it;
  return res;
}

bool nullcone_torus_exact(const Model& m, const Vec& v) {
  if (m.kind != Kind::torus) fail(Errc::not_torus, "nullcone_torus_exact: torus models only");
  const std::vector<int> supp = support(m, v);  // ZeroVector on v = 0
  const std::size_t k = supp.size();
  const std::size_t d = static_cast<std::size_t>(m.frame.dim);
  exact::RatMat a = exact::zero_mat(d + 1, k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& chi = m.classes[static_cast<std::size_t>(supp[i])].chi;
    for (std::size_t row = 0; row < d; ++row) a[row][i] = chi[row];
    a[d][i] = 1;
  }
  exact::RatVec b = exact::zero_vec(d);
  b.push_back(exact::Rat(1));
  return !exact::lp_feasible(a, b);
}

FixedDirReport fixed_direction_check(const Model& m, const YSpec& spec, const AVector& p0,
                                     double fiber_tol, ExecMode mode) {
  const Cloud cloud = orbit_sample(m, spec, mode);
  if (cloud.empty()) fail(Errc::empty_cloud, "fixed_direction_check: empty cloud");
  const std::vector<AVector> avecs = map_chamber_batch(m, cloud, mode);

  // Nearest chamber value in the Gram metric.
  FixedDirReport rep;
  double best = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (std::size_t i = 0; i < avecs.size(); ++i) {
    const double d = a_dist(m, avecs[i].frame, p0.frame);
    if (d < best - 1e-15) {
      best = d;
      best_i = static_cast<int>(i);
    }
  }
  rep.q0 = avecs[static_cast<std::size_t>(best_i)].frame;
  rep.distance = best;
  rep.xi_frame = rep.q0 - p0.frame;
  rep.vacuous = a_norm(m, rep.xi_frame) <= fiber_tol;

  // Fiber over q0 located through mu_a (mu_p equals q0 on it when q0 is in
  // the chamber).
  const PElement xi = pelem_of_avec(m, avec_of_frame(m, rep.xi_frame));
  std::vector<double> norms(avecs.size(), -1.0);
  for_each_index(avecs.size(), mode, [&](std::size_t i) {
    const ProjPoint z = make_proj(m, cloud[i]);
    const AVector ma = mu_a(m, z);
    if (a_dist(m, ma.frame, rep.q0) >= fiber_tol) return;
    const Vec t = xi_Z(m, xi, z);
    norms[i] = std::sqrt(std::max(0.0, tangent_g(t, t)));
  });
  for (double n : norms)
    if (n >= 0) {
      ++rep.fiber_count;
      rep.max_xi_z = std::max(rep.max_xi_z, n);
    }
  return rep;
}

}  // namespace gradpoly
