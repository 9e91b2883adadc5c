#pragma once

#include "gradpoly/gradmap.hpp"
#include "gradpoly/parallel.hpp"
#include "gradpoly/polytope.hpp"

namespace gradpoly {

using Cloud = std::vector<Vec>;  // unit representatives in V

// Sampling description of the G-stable set Y.
struct YSpec {
  enum class YKind { whole_space, orbit_closure, union_spec, cloud };
  YKind kind = YKind::whole_space;
  std::vector<Vec> seeds;      // orbit_closure: orbit seed points
  std::vector<YSpec> parts;    // union_spec
  Cloud cloud_points;          // cloud
  int budget = 20000;
  double r_max = 20.0;         // radius schedule endpoint
  double t_limit = 40.0;       // one-parameter limit probe time
  std::uint64_t seed = 0;
};

struct FlowParams {
  double step0 = 0.5;
  double shrink = 0.5;
  double grow = 1.5;
  double tol_ss = tols::ss;
  double tol_null = tols::null;
  double grad_tol = tols::grad;
  long long budget = 100000;
  int restarts = 8;
  double restart_radius = 1.0;

  void validate() const;
};

enum class FlowStatus { converged_zero, converged_positive, budget_exhausted, norm_collapse };
const char* flow_status_name(FlowStatus s);

struct FlowResult {
  Vec final_vector;
  double final_value = 0.0;  // ||mu_p - alpha||^2 at the end
  long long iterations = 0;
  FlowStatus status = FlowStatus::budget_exhausted;
  std::vector<std::pair<long long, double>> trail;  // decimated monotone values
};

Cloud orbit_sample(const Model& m, const YSpec& spec, ExecMode mode = ExecMode::parallel);

struct APlusResult {
  RMat avecs;                // rows: chamber representatives (frame coords)
  Polytope a_plus;           // hull of the chamber cloud clipped to the chamber
  ConvexityVerdict verdict;  // union-convexity verdict on the chamber cloud
};

APlusResult compute_A_plus(const Model& m, const YSpec& spec, double hull_tol = tols::polytope,
                           double verdict_tol = 2e-3, int probes = 1000,
                           ExecMode mode = ExecMode::parallel);

// Norm-square gradient flow along the G-orbit of z0 toward alpha, with
// backtracking steps exp(-eta (mu - alpha)) and K-restarts; the best run is
// kept.
FlowResult norm_square_flow(const Model& m, const ProjPoint& z0, const AVector& alpha,
                            const FlowParams& params, std::uint64_t seed, std::uint64_t stream = 0);

struct Shift {
  int p = 1, q = 1;
  OrbitRealization orb;
};

struct SsVerdict {
  bool semistable = false;
  double final_value = 0.0;
  long long budget = 0;
  FlowStatus status = FlowStatus::budget_exhausted;
};

// Semistability at alpha: direct flow on ||mu - alpha||^2, or the shifted
// route through the weighted Segre product with target q * alpha.
SsVerdict semistable_test(const Model& m, const ProjPoint& z, const AVector& alpha,
                          const FlowParams& params, std::uint64_t seed, std::uint64_t stream = 0,
                          const Shift* shift = nullptr);

enum class NullVerdict { null, minimal_vector, inconclusive };
const char* null_verdict_name(NullVerdict v);

struct NullResult {
  NullVerdict verdict = NullVerdict::inconclusive;
  double final_norm = 0.0;
  double final_mu_norm = 0.0;  // ||mu_V||/||v||^2 at the end
  long long iterations = 0;
};

// Vector-space flow v <- exp(-eta mu_V(v)) v without renormalization.
NullResult nullcone_numeric(const Model& m, const Vec& v, const FlowParams& params);

// Exact torus criterion: null iff 0 is not a convex combination of the
// support weights (rational LP feasibility).
bool nullcone_torus_exact(const Model& m, const Vec& v);

struct FixedDirReport {
  RVec q0;
  double distance = 0.0;
  RVec xi_frame;
  int fiber_count = 0;
  double max_xi_z = 0.0;
  bool vacuous = false;
};

FixedDirReport fixed_direction_check(const Model& m, const YSpec& spec, const AVector& p0,
                                     double fiber_tol = 1e-10, ExecMode mode = ExecMode::parallel);

std::vector<Halfspace> chamber_halfspaces(const Model& m);

}  // namespace gradpoly
