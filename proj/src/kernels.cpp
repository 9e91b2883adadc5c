#include "gradpoly/kernels.hpp"

#include "gradpoly/rng.hpp"

namespace gradpoly {

namespace {

AVector map_one(const Model& m, const Vec& v) {
  const ProjPoint z = make_proj(m, v);
  return chamber_rep(m, mu_P(m, z));
}

NullResult null_one(const Model& m, const Vec& v, const FlowParams& params) {
  return nullcone_numeric(m, v, params);
}

SsVerdict ss_one(const Model& m, const Vec& v, const AVector& alpha, const FlowParams& params,
                 std::uint64_t seed, std::uint64_t stream) {
  const ProjPoint z = make_proj(m, v);
  return semistable_test(m, z, alpha, params, seed, stream);
}

double kostant_one(const Model& m, std::uint64_t seed, std::uint64_t index) {
  Rng rng(seed, index << 1);
  PElement xq, xp;
  xq.coeffs = rng.gaussian_vec(m.dim_p());
  xp.coeffs = rng.gaussian_vec(m.dim_p());
  const AVector q = chamber_rep(m, xq);
  const AVector p = chamber_rep(m, xp);
  const PElement qp = pelem_of_avec(m, q);
  const PElement pp = pelem_of_avec(m, p);
  const GroupElement k = sample_group(m, GroupPart::K, 0.0, seed, (index << 1) | 1);
  // Ad_k(q) in p-coefficients, computed in the defining realization.
  const Mat adq = k.k_def * m.p_realize_def(qp.coeffs) * k.k_def.adjoint();
  RVec kq(m.dim_p());
  for (int b = 0; b < m.dim_p(); ++b) kq[b] = m.def_ip(adq, m.p_ops_def[static_cast<std::size_t>(b)]);
  return (kq - pp.coeffs).squaredNorm() - (qp.coeffs - pp.coeffs).squaredNorm();
}

}  // namespace

std::vector<AVector> map_chamber_serial(const Model& m, const Cloud& cloud) {
  std::vector<AVector> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = map_one(m, cloud[i]);
  return out;
}

std::vector<AVector> map_chamber_parallel(const Model& m, const Cloud& cloud, int workers) {
  std::vector<AVector> out(cloud.size());
  for_each_index(cloud.size(), ExecMode::parallel,
                 [&](std::size_t i) { out[i] = map_one(m, cloud[i]); }, workers);
  return out;
}

std::vector<AVector> map_chamber_batch(const Model& m, const Cloud& cloud, ExecMode mode,
                                       int workers) {
  return mode == ExecMode::serial ? map_chamber_serial(m, cloud)
                                  : map_chamber_parallel(m, cloud, workers);
}

std::vector<NullResult> nullcone_serial(const Model& m, const Cloud& vectors,
                                        const FlowParams& params) {
  std::vector<NullResult> out(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) out[i] = null_one(m, vectors[i], params);
  return out;
}

std::vector<NullResult> nullcone_parallel(const Model& m, const Cloud& vectors,
                                          const FlowParams& params, int workers) {
  std::vector<NullResult> out(vectors.size());
  for_each_index(vectors.size(), ExecMode::parallel,
                 [&](std::size_t i) { out[i] = null_one(m, vectors[i], params); }, workers);
  return out;
}

std::vector<NullResult> nullcone_batch(const Model& m, const Cloud& vectors,
                                       const FlowParams& params, ExecMode mode, int workers) {
  return mode == ExecMode::serial ? nullcone_serial(m, vectors, params)
                                  : nullcone_parallel(m, vectors, params, workers);
}

std::vector<SsVerdict> semistable_serial(const Model& m, const Cloud& points, const AVector& alpha,
                                         const FlowParams& params, std::uint64_t seed) {
  std::vector<SsVerdict> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = ss_one(m, points[i], alpha, params, seed, i);
  return out;
}

std::vector<SsVerdict> semistable_parallel(const Model& m, const Cloud& points, const AVector& alpha,
                                           const FlowParams& params, std::uint64_t seed,
                                           int workers) {
  std::vector<SsVerdict> out(points.size());
  for_each_index(points.size(), ExecMode::parallel,
                 [&](std::size_t i) { out[i] = ss_one(m, points[i], alpha, params, seed, i); },
                 workers);
  return out;
}

std::vector<SsVerdict> semistable_batch(const Model& m, const Cloud& points, const AVector& alpha,
                                        const FlowParams& params, std::uint64_t seed, ExecMode mode,
                                        int workers) {
  return mode == ExecMode::serial ? semistable_serial(m, points, alpha, params, seed)
                                  : semistable_parallel(m, points, alpha, params, seed, workers);
}

double kostant_min_gap_serial(const Model& m, int trials, std::uint64_t seed) {
  std::vector<double> gaps(static_cast<std::size_t>(trials));
  for (int i = 0; i < trials; ++i) gaps[static_cast<std::size_t>(i)] = kostant_one(m, seed, static_cast<std::uint64_t>(i));
  double mn = std::numeric_limits<double>::infinity();
  for (double g : gaps) mn = std::min(mn, g);
  return mn;
}

double kostant_min_gap_parallel(const Model& m, int trials, std::uint64_t seed, int workers) {
  std::vector<double> gaps(static_cast<std::size_t>(trials));
  for_each_index(static_cast<std::size_t>(trials), ExecMode::parallel,
                 [&](std::size_t i) { gaps[i] = kostant_one(m, seed, i); }, workers);
  double mn = std::numeric_limits<double>::infinity();
  for (double g : gaps) mn = std::min(mn, g);
  return mn;
}

double kostant_min_gap(const Model& m, int trials, std::uint64_t seed, ExecMode mode, int workers) {
  return mode == ExecMode::serial ? kostant_min_gap_serial(m, trials, seed)
                                  : kostant_min_gap_parallel(m, trials, seed, workers);
}

}  // namespace gradpoly
