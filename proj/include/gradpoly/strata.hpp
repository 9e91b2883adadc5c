#pragma once

#include "gradpoly/geometry.hpp"
#include "gradpoly/gradmap.hpp"
#include "gradpoly/model.hpp"

namespace gradpoly {

// One orbit-type class of the abelian action: support pattern, isotropy
// subalgebra (exact), and the affine span of the image of the stratum.
// Coordinates are frame coordinates of the model.
struct StratumType {
  std::vector<int> support;  // representative support (weight-class indices)
  exact::RatMat isotropy;    // canonical basis rows of the isotropy subalgebra
  int codim = 0;             // = dim isotropy
  exact::RatVec span_point;  // canonical point of the affine span
  exact::RatMat span_dirs;   // canonical direction basis of the affine span
  int n_supports = 0;        // supports sharing this class
};

// Weight-class indices carrying mass above the support threshold.
std::vector<int> support(const Model& m, const Vec& v);

// Exact isotropy subalgebra {xi : (chi_i - chi_j)(xi) = 0} of a support.
exact::RatMat isotropy_a(const Model& m, const std::vector<int>& supp);

std::vector<StratumType> enumerate_strata(const Model& m);

// Distinct weight vectors as points of the abelian slice (frame coords).
std::vector<exact::RatVec> fixed_point_images(const Model& m);

struct Decomposition {
  geom::ExactPoly P;                      // hull of the weight points
  std::vector<StratumType> sigma1;        // codimension-one classes
  std::vector<geom::ExactPoly> chambers;  // closures of the components of P0
  std::vector<geom::ExactPoly> faces;     // face family F(P0), intersection-closed
  exact::RatMat a_basis;                  // rows: rational basis of the slice in frame coords
};

Decomposition decompose_P0(const Model& m);

struct FaceCheckReport {
  struct Detail {
    int face = 0;
    exact::RatVec q;
    std::vector<int> support;
    bool ok = true;
  };
  int samples = 0;
  int violations = 0;
  std::vector<Detail> details;
};

// Samples q in relative interiors of faces, solves the fiber mass program,
// and verifies isotropy(support) inside the face's perpendicular algebra.
FaceCheckReport face_isotropy_check(const Model& m, const Decomposition& d, int samples,
                                    std::uint64_t seed);

// Every nontrivial isotropy equals the sum of the one-dimensional isotropies
// of the strata adjacent by support inclusion.  Exhaustive exact check.
bool isotropy_sum_property(const Model& m);

// Weight point of one class: the element of the slice representing chi via
// the invariant inner product.
exact::RatVec weight_point(const Model& m, const exact::RatVec& chi);

}  // namespace gradpoly
