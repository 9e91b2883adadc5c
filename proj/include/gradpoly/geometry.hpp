#pragma once

#include <string>
#include <vector>

#include "gradpoly/exact.hpp"

namespace gradpoly::geom {

using exact::Rat;
using exact::RatMat;
using exact::RatVec;

// Bounded convex polytope with exact rational data.  Vertices and facet
// covectors live in ambient coordinates; the affine hull is carried
// explicitly so lower-dimensional polytopes are first-class.
struct ExactPoly {
  int ambient = 0;
  int dim = -1;  // -1 marks the empty polytope
  RatMat vertices;
  RatVec span_point;
  RatMat span_dirs;   // rows: canonical basis of the affine hull directions
  RatMat facets_n;    // facet covectors: n.x >= c within the affine hull
  RatVec facets_c;

  bool empty() const { return dim < 0; }
};

ExactPoly empty_poly(int ambient);
ExactPoly hull_exact(const RatMat& points);

bool contains(const ExactPoly& p, const RatVec& x);
bool rel_interior_contains(const ExactPoly& p, const RatVec& x);

// All nonempty faces, including the polytope itself; deduplicated.
std::vector<ExactPoly> faces_of(const ExactPoly& p);

// Pieces {n.x >= c} and {n.x <= c} of p that have the same dimension as p.
std::vector<ExactPoly> split_by_hyperplane(const ExactPoly& p, const RatVec& n, const Rat& c);

// The {n.x >= c} portion of p, whatever its dimension (possibly empty).
ExactPoly clip(const ExactPoly& p, const RatVec& n, const Rat& c);

ExactPoly intersect(const ExactPoly& a, const ExactPoly& b);

RatVec centroid(const ExactPoly& p);
std::string vertex_key(const ExactPoly& p);
bool same_vertices(const ExactPoly& a, const ExactPoly& b);

// Affine-hull equalities: rows n with n.x = c on the span.
void span_equalities(const ExactPoly& p, RatMat& normals, RatVec& offsets);

}  // namespace gradpoly::geom
