#pragma once

#include <optional>
#include <vector>

#include "gradpoly/common.hpp"
#include "gradpoly/geometry.hpp"
#include "gradpoly/parallel.hpp"

namespace gradpoly {

struct Halfspace {
  RVec normal;     // ambient coordinates
  double offset;   // normal . x >= offset
};

// Dual-representation polytope with a shared tolerance.  Degenerate hulls
// carry their affine span explicitly (span_basis rows are orthonormal).
struct Polytope {
  int ambient = 0;
  double tol = tols::polytope;
  RMat vertices;  // rows, ordered for dims <= 2
  std::vector<Halfspace> halfspaces;
  RVec span_point;
  RMat span_basis;  // dim x ambient
  bool empty_flag = false;

  int dim() const { return static_cast<int>(span_basis.rows()); }
  bool empty() const { return empty_flag; }
};

Polytope hull(const RMat& points, double tol = tols::polytope);
Polytope from_exact(const geom::ExactPoly& p, double tol = tols::polytope);
geom::ExactPoly to_exact(const Polytope& p);

bool membership(const Polytope& p, const RVec& x, double tol);

Polytope intersect_chamber(const Polytope& p, const std::vector<Halfspace>& chamber);

// V/H cross-validation residual: max over (vertex-halfspace violations,
// non-tight halfspaces).
double cross_validation_residual(const Polytope& p);

std::pair<RVec, double> project_point(const Polytope& p, const RVec& x);
double dist_point(const Polytope& p, const RVec& x);

// Hausdorff distance between convex polytopes (max vertex-to-other over both
// sides).
double hausdorff(const Polytope& a, const Polytope& b);

struct Witness {
  RVec center;
  double radius = 0.0;
  RVec contact1, contact2;
};

struct ConvexityVerdict {
  bool is_convex = true;
  int probes = 0;
  double tol = 0.0;
  bool heuristic = false;  // sampled-cloud verdicts are heuristic by nature
  double max_gap = 0.0;    // largest distance from a hull probe to the set
  std::optional<Witness> witness;
};

ConvexityVerdict union_convexity(const RMat& cloud, double tol, int probes,
                                 ExecMode mode = ExecMode::parallel);
ConvexityVerdict union_convexity(const std::vector<Polytope>& polys, double tol, int probes,
                                 ExecMode mode = ExecMode::parallel);

std::pair<RVec, double> nearest_point(const RMat& cloud, const RVec& p0);
std::pair<RVec, double> nearest_point(const std::vector<Polytope>& polys, const RVec& p0);

}  // namespace gradpoly
