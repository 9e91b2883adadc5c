#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gradpoly/common.hpp"
#include "gradpoly/exact.hpp"

namespace gradpoly {

enum class Kind { torus, sl_n_real, su_p_q, product, custom };
const char* kind_name(Kind k);

enum class GroupPart { K, P, G };

// Representation functor applied on top of a model.
struct RepFunctor {
  enum class Tag { standard, dual, sym, ext, tensor };
  Tag tag = Tag::standard;
  int degree = 1;

  static RepFunctor standard() { return {Tag::standard, 1}; }
  static RepFunctor dual() { return {Tag::dual, 1}; }
  static RepFunctor sym(int k) { return {Tag::sym, k}; }
  static RepFunctor ext(int k) { return {Tag::ext, k}; }
  static RepFunctor tensor(int k) { return {Tag::tensor, k}; }
};

// A weight block: chi is a rational covector on the frame coordinates of the
// abelian slice; basis columns span the block inside V.
struct WeightBlock {
  exact::RatVec chi;
  Mat basis;
};

// Construction tree of the representation space over the defining one.  The
// tree is what pushes group elements forward through functors.
struct RepNode;
using RepNodePtr = std::shared_ptr<const RepNode>;
struct RepNode {
  enum class Op { leaf, dual, sym, ext, tensor_pow, pair };
  Op op = Op::leaf;
  int degree = 1;
  RepNodePtr child;
  RepNodePtr left, right;
  Mat embed;                // sym/ext: isometric embedding (n^k x D)
  bool product_pair = false;  // pair over independent groups (block-diagonal defining element)
  int left_def_dim = 0, right_def_dim = 0;
};

// One block of the defining-space trace form (products carry one scale per
// factor).
struct IpBlock {
  int offset = 0;
  int size = 0;
  double scale = 1.0;
};

// Rational coordinate system on the abelian slice.  Frame coordinates are the
// coordinates all weight data, chamber functionals and polytope output live
// in; the Gram matrix (exact) gives the restriction of the invariant inner
// product.  Constraint rows cut the slice out of R^dim when the frame is
// redundant (eigenvalue coordinates of sl(n) sum to zero).
struct Frame {
  int dim = 0;
  exact::RatMat gram;
  exact::RatMat constraints;
  std::vector<std::string> names;
  RMat frame_to_a;  // r x dim: frame coords -> orthonormal a-basis coefficients
  RMat a_to_frame;  // dim x r: pseudo-inverse of frame_to_a
  RMat gram_f;      // float copy of gram
};

struct Model {
  Kind kind = Kind::custom;
  std::string name;
  int rep_dim = 0;

  std::vector<Mat> p_ops;  // orthonormal abstract p-basis acting on V
  std::vector<Mat> k_ops;  // k-basis acting on V
  std::vector<int> a_indices;
  std::vector<WeightBlock> blocks;
  Frame frame;
  exact::RatMat chamber;  // rows l: the chamber is {x : l . x >= 0}
  double ip_scale = 1.0;
  int dim_cap = 2000;

  // Defining realization: the matrices of the same abstract basis in the
  // representation the invariant inner product is normalized on.
  int defining_dim = 0;
  std::vector<Mat> p_ops_def;
  std::vector<Mat> k_ops_def;
  std::vector<Mat> frame_ops_def;
  std::vector<IpBlock> ip_blocks;
  RepNodePtr rep;
  std::vector<std::vector<long long>> torus_weights;  // torus kind: raw integer weights

  // Product bookkeeping.
  std::vector<std::shared_ptr<const Model>> factors;
  std::vector<std::pair<int, int>> factor_p_ranges;
  std::vector<std::pair<int, int>> factor_frame_ranges;

  // Distinct-weight classes (equal chi merged), fixed at construction.
  struct WeightClass {
    exact::RatVec chi;
    std::vector<int> block_ids;
    int dim = 0;
  };
  std::vector<WeightClass> classes;

  int dim_p() const { return static_cast<int>(p_ops.size()); }
  int dim_a() const { return static_cast<int>(a_indices.size()); }

  double def_ip(const Mat& x, const Mat& y) const;
  Mat p_realize(const RVec& coeffs) const;
  Mat p_realize_def(const RVec& coeffs) const;
  Mat lift(const Mat& g_def) const;
  bool chamber_contains(const RVec& frame_coords, double tol = tols::chamber_flag) const;
};

using ModelPtr = std::shared_ptr<const Model>;

// Declarative model description (parsed from the JSON spec format).
struct ModelSpec {
  std::string kind;  // torus | sl_n_real | su_p_q | product | custom
  std::vector<std::vector<long long>> weights;  // torus
  int n = 0;                                    // sl_n_real
  int p = 0, q = 0;                             // su_p_q
  std::vector<RepFunctor> functors;
  std::optional<exact::RatMat> chamber_override;
  std::uint64_t seed = 0;
  int dim_cap = 2000;
  std::vector<ModelSpec> factors;  // product

  struct Custom {
    int rep_dim = 0;
    double ip_scale = 1.0;
    std::vector<Mat> p_ops;
    std::vector<Mat> k_ops;
    std::vector<int> a_indices;
    exact::RatMat chamber;
  };
  std::shared_ptr<Custom> custom;
};

ModelPtr build_model(const ModelSpec& spec);
ModelPtr derived_model(const ModelPtr& m, const RepFunctor& f);
ModelPtr tensor_model(const ModelPtr& a, const ModelPtr& b);   // same group
ModelPtr product_model(const ModelPtr& a, const ModelPtr& b);  // independent groups

// Validation report: one entry per model invariant with the measured
// residual.
struct Diagnostics {
  struct Entry {
    std::string name;
    double residual = 0.0;
    double tol = 0.0;
    bool pass = true;
  };
  std::vector<Entry> entries;
  bool pass = true;
  double max_residual = 0.0;

  const Entry* find(const std::string& name) const;
};

Diagnostics validate_model(const Model& m);

struct GroupElement {
  Mat op;       // action on V
  Mat op_def;   // defining realization
  bool has_parts = false;
  Mat k_def;       // K-part, defining realization
  RVec p_coeffs;   // xi with op_def = exp(realize(xi)) * k_def
};

GroupElement sample_group(const Model& m, GroupPart part, double radius, std::uint64_t seed,
                          std::uint64_t stream = 0);

// ||exp(p_part) * k_part - op||_F in the defining realization.
double factorization_residual(const Model& m, const GroupElement& g);

// Simultaneous eigenbasis of a family of commuting Hermitian operators;
// returns (eigenvalue tuple, orthonormal basis) per joint eigenspace.
std::vector<std::pair<RVec, Mat>> simultaneous_eigenbasis(const std::vector<Mat>& ops,
                                                          double tol = 1e-9);

}  // namespace gradpoly
