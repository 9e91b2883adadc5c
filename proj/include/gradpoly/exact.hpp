#pragma once

#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gradpoly/common.hpp"

namespace gradpoly::exact {

using Rat = boost::multiprecision::cpp_rational;
using RatVec = std::vector<Rat>;
using RatMat = std::vector<RatVec>;  // row major

Rat rat_of(long long num, long long den = 1);
// Exact conversion: every finite double is a dyadic rational.
Rat rat_of_double(double x);
double to_double(const Rat& r);

RatVec zero_vec(std::size_t n);
RatMat zero_mat(std::size_t rows, std::size_t cols);
RatMat identity(std::size_t n);

Rat dot(const RatVec& a, const RatVec& b);
RatVec add(const RatVec& a, const RatVec& b);
RatVec sub(const RatVec& a, const RatVec& b);
RatVec scale(const RatVec& a, const Rat& s);
RatVec mat_vec(const RatMat& m, const RatVec& x);
RatMat mat_mul(const RatMat& a, const RatMat& b);
RatMat transpose(const RatMat& m);
bool is_zero(const RatVec& v);

// In-place reduced row echelon form; returns the rank.  Zero rows are moved
// to the bottom.
int rref(RatMat& m);

// Canonical basis (RREF nonzero rows) of the row space.
RatMat row_space(RatMat rows);

// Basis of {x : rows * x = 0}, canonicalized.
RatMat kernel(const RatMat& rows, std::size_t ncols);

// Any solution of A x = b, or nullopt when inconsistent.
std::optional<RatVec> solve(const RatMat& a, const RatVec& b);

// Inverse of a square nonsingular matrix; nullopt when singular.
std::optional<RatMat> inverse(const RatMat& a);

int rank(RatMat m);

// True when every row of `rows` lies in the row space spanned by `space`.
bool space_contains(const RatMat& space, const RatMat& rows);
bool same_space(const RatMat& a, const RatMat& b);

// Stable text key for a canonicalized matrix (used for dedup maps).
std::string key_of(const RatMat& m);
std::string key_of(const RatVec& v);

// Exact linear program in standard form:
//   minimize c.x subject to A x = b, x >= 0.
// Two-phase simplex with Bland's rule.  Sizes here are desk scale.
struct LpResult {
  bool feasible = false;
  bool bounded = true;
  RatVec x;
  Rat value;
};

LpResult lp_solve(const RatMat& a, const RatVec& b, const RatVec& c);
bool lp_feasible(const RatMat& a, const RatVec& b);

}  // namespace gradpoly::exact
