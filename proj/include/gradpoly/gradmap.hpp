#pragma once

#include "gradpoly/model.hpp"

namespace gradpoly {

// Element of p as coefficients over the orthonormal p-basis.
struct PElement {
  RVec coeffs;
};

// Element of the abelian slice in frame coordinates.
struct AVector {
  RVec frame;
  bool chamber_flag = false;
};

// Point of P(V) stored as a unit representative plus the cached set of
// distinct-weight classes carrying mass.
struct ProjPoint {
  Vec v;
  std::vector<int> support;
};

ProjPoint make_proj(const Model& m, Vec v);

PElement mu_V(const Model& m, const Vec& v);
PElement mu_P(const Model& m, const ProjPoint& z);
AVector mu_a(const Model& m, const ProjPoint& z);
AVector chamber_rep(const Model& m, const PElement& x);
AVector chamber_rep_point(const Model& m, const ProjPoint& z);

// Induced vector field at z (horizontal lift at the unit representative).
Vec xi_Z(const Model& m, const PElement& xi, const ProjPoint& z);

// Riemannian metric on horizontal lifts: g(a, b) = 2 Re<a, b>.  With this
// normalization the gradient of mu^xi is exactly xi_Z.
double tangent_g(const Vec& a, const Vec& b);

double p_norm(const PElement& x);
PElement pelem_of_avec(const Model& m, const AVector& a);
AVector avec_of_frame(const Model& m, RVec frame);
AVector a_part(const Model& m, const PElement& x);
double a_dist(const Model& m, const RVec& x, const RVec& y);
double a_norm(const Model& m, const RVec& x);

struct GradReport {
  int samples = 0;
  double max_grad_residual = 0.0;
  double max_kernel_residual = 0.0;
};

// Finite-difference consistency of the gradient identity and of
// ker(d mu) = (p.z)^perp, over random points, directions and tangents.
GradReport grad_consistency(const Model& m, int n_samples, std::uint64_t seed);

// A projective realization of a coadjoint-type orbit used for shifting.  The
// orbit factor carries the dual sign convention: its gradient map contributes
// -xi, so chamber_rep(-mu_P(base)) reproduces target.
struct OrbitRealization {
  ModelPtr orbit_model;
  ProjPoint base;
  AVector target;
  bool dual_sign = true;
};

double realization_residual(const OrbitRealization& orb);
void check_realization(const OrbitRealization& orb, double tol = tols::factorization);

// Weighted Segre product realizing the shifted gradient map
// q.mu(y) - p.xi on P(V^(x q) (x) W^(x p)).
struct ShiftedModel {
  ModelPtr big;
  ModelPtr base_q;
  ModelPtr orbit_p;
  int p = 1, q = 1;
  AVector direction;

  ProjPoint embed(const ProjPoint& y, const ProjPoint& w) const;
};

ShiftedModel shifted_model(const ModelPtr& m, int p, int q, const AVector& direction,
                           const OrbitRealization& orb);

}  // namespace gradpoly
