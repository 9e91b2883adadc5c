#include <doctest.h>

#include "gradpoly/exact.hpp"

using namespace gradpoly;
using exact::Rat;
using exact::RatMat;
using exact::RatVec;

TEST_CASE("rational conversion is exact for dyadic doubles") {
  CHECK(exact::rat_of_double(0.5) == Rat(1, 2));
  CHECK(exact::rat_of_double(-3.25) == Rat(-13, 4));
  CHECK(exact::rat_of_double(0.0) == Rat(0));
  const double x = 0.1;
  CHECK(exact::to_double(exact::rat_of_double(x)) == x);
}

TEST_CASE("rref and kernel") {
  RatMat m = {{Rat(1), Rat(2), Rat(3)}, {Rat(2), Rat(4), Rat(6)}, {Rat(0), Rat(1), Rat(1)}};
  CHECK(exact::rank(m) == 2);
  RatMat k = exact::kernel({{Rat(1), Rat(2), Rat(3)}, {Rat(0), Rat(1), Rat(1)}}, 3);
  REQUIRE(k.size() == 1);
  // kernel vector x satisfies both functionals
  CHECK(exact::dot(k[0], {Rat(1), Rat(2), Rat(3)}) == 0);
  CHECK(exact::dot(k[0], {Rat(0), Rat(1), Rat(1)}) == 0);
}

TEST_CASE("solve consistent and inconsistent systems") {
  RatMat a = {{Rat(1), Rat(1)}, {Rat(1), Rat(-1)}};
  auto x = exact::solve(a, {Rat(3), Rat(1)});
  REQUIRE(x.has_value());
  CHECK((*x)[0] == Rat(2));
  CHECK((*x)[1] == Rat(1));
  RatMat b = {{Rat(1), Rat(1)}, {Rat(2), Rat(2)}};
  CHECK_FALSE(exact::solve(b, {Rat(1), Rat(3)}).has_value());
}

TEST_CASE("inverse") {
  RatMat a = {{Rat(2), Rat(1)}, {Rat(1), Rat(1)}};
  auto inv = exact::inverse(a);
  REQUIRE(inv.has_value());
  RatMat prod = exact::mat_mul(a, *inv);
  CHECK(prod == exact::identity(2));
}

TEST_CASE("subspace containment") {
  RatMat big = {{Rat(1), Rat(0), Rat(0)}, {Rat(0), Rat(1), Rat(0)}};
  RatMat small = {{Rat(2), Rat(3), Rat(0)}};
  CHECK(exact::space_contains(big, small));
  CHECK_FALSE(exact::space_contains(small, big));
  CHECK(exact::same_space(big, {{Rat(1), Rat(1), Rat(0)}, {Rat(1), Rat(-1), Rat(0)}}));
}

TEST_CASE("lp feasibility: 0 in convex hull") {
  // weights {1,-1}: 0 = (t0 - t1), t0 + t1 = 1 feasible
  RatMat a = {{Rat(1), Rat(-1)}, {Rat(1), Rat(1)}};
  CHECK(exact::lp_feasible(a, {Rat(0), Rat(1)}));
  // single weight {1}: infeasible
  RatMat b = {{Rat(1)}, {Rat(1)}};
  CHECK_FALSE(exact::lp_feasible(b, {Rat(0), Rat(1)}));
}

TEST_CASE("lp optimization") {
  // min x0 subject to x0 + x1 = 1, x >= 0  ->  0 at (0, 1)
  RatMat a = {{Rat(1), Rat(1)}};
  auto res = exact::lp_solve(a, {Rat(1)}, {Rat(1), Rat(0)});
  REQUIRE(res.feasible);
  CHECK(res.bounded);
  CHECK(res.value == Rat(0));
  CHECK(res.x[1] == Rat(1));
}

TEST_CASE("lp with negative rhs rows") {
  // -x0 = -2 with x0 <= 3 slack form: -x0 - 0 s = -2
  RatMat a = {{Rat(-1), Rat(0)}, {Rat(1), Rat(1)}};
  auto res = exact::lp_solve(a, {Rat(-2), Rat(3)}, {Rat(0), Rat(0)});
  REQUIRE(res.feasible);
  CHECK(res.x[0] == Rat(2));
  CHECK(res.x[1] == Rat(1));
}

TEST_CASE("lp detects infeasible equality systems") {
  RatMat a = {{Rat(1), Rat(1)}, {Rat(1), Rat(1)}};
  CHECK_FALSE(exact::lp_solve(a, {Rat(1), Rat(2)}, {Rat(0), Rat(0)}).feasible);
}

TEST_CASE("property: kernel vectors always annihilated") {
  // hand-rolled generator sweep
  for (int seed = 0; seed < 50; ++seed) {
    RatMat rows;
    const int ncols = 2 + seed % 3;
    const int nrows = 1 + seed % 2;
    unsigned state = static_cast<unsigned>(seed * 2654435761u + 1);
    auto next = [&]() {
      state = state * 1664525u + 1013904223u;
      return static_cast<long long>(state % 7) - 3;
    };
    for (int r = 0; r < nrows; ++r) {
      RatVec row;
      for (int c = 0; c < ncols; ++c) row.emplace_back(next());
      rows.push_back(std::move(row));
    }
    const RatMat k = exact::kernel(rows, static_cast<std::size_t>(ncols));
    for (const auto& v : k)
      for (const auto& row : rows) CHECK(exact::dot(row, v) == 0);
    CHECK(static_cast<int>(k.size()) == ncols - exact::rank(rows));
  }
}
