#include "gradpoly/exact.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gradpoly::exact {

Rat rat_of(long long num, long long den) { return Rat(num, den); }

Rat rat_of_double(double x) {
  if (!std::isfinite(x)) fail(Errc::param_error, "rat_of_double: non-finite input");
  if (x == 0.0) return Rat(0);
  int exp = 0;
  double m = std::frexp(x, &exp);  // x = m * 2^exp, |m| in [0.5, 1)
  // 53 doublings make the mantissa integral.
  long long mant = static_cast<long long>(std::ldexp(m, 53));
  exp -= 53;
  Rat r(mant);
  boost::multiprecision::cpp_int two(2);
  if (exp >= 0) {
    r *= Rat(boost::multiprecision::pow(two, exp));
  } else {
    r /= Rat(boost::multiprecision::pow(two, -exp));
  }
  return r;
}

double to_double(const Rat& r) { return r.convert_to<double>(); }

RatVec zero_vec(std::size_t n) { return RatVec(n, Rat(0)); }

RatMat zero_mat(std::size_t rows, std::size_t cols) { return RatMat(rows, zero_vec(cols)); }

RatMat identity(std::size_t n) {
  RatMat m = zero_mat(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

Rat dot(const RatVec& a, const RatVec& b) {
  Rat s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RatVec add(const RatVec& a, const RatVec& b) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

RatVec sub(const RatVec& a, const RatVec& b) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

RatVec scale(const RatVec& a, const Rat& s) {
  RatVec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}

RatVec mat_vec(const RatMat& m, const RatVec& x) {
  RatVec r(m.size(), Rat(0));
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], x);
  return r;
}

RatMat mat_mul(const RatMat& a, const RatMat& b) {
  const std::size_t n = a.size(), k = b.size(), m = k ? b[0].size() : 0;
  RatMat r = zero_mat(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) r[i][j] += a[i][l] * b[l][j];
    }
  return r;
}

RatMat transpose(const RatMat& m) {
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  RatMat t = zero_mat(cols, rows);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = m[i][j];
  return t;
}

bool is_zero(const RatVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& r) { return r == 0; });
}

int rref(RatMat& m) {
  const std::size_t rows = m.size();
  const std::size_t cols = rows ? m[0].size() : 0;
  std::size_t lead = 0;
  std::size_t r = 0;
  for (; r < rows && lead < cols; ++lead) {
    std::size_t piv = r;
    while (piv < rows && m[piv][lead] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    const Rat d = m[r][lead];
    for (std::size_t j = lead; j < cols; ++j) m[r][j] /= d;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][lead] == 0) continue;
      const Rat f = m[i][lead];
      for (std::size_t j = lead; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

RatMat row_space(RatMat rows) {
  const int rk = rref(rows);
  rows.resize(static_cast<std::size_t>(rk));
  return rows;
}

RatMat kernel(const RatMat& rows, std::size_t ncols) {
  RatMat m = rows;
  for (auto& row : m) row.resize(ncols, Rat(0));
  const int rk = rref(m);
  std::vector<int> pivot_col(static_cast<std::size_t>(rk), -1);
  std::vector<bool> is_pivot(ncols, false);
  for (int i = 0; i < rk; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      if (m[static_cast<std::size_t>(i)][j] != 0) {
        pivot_col[static_cast<std::size_t>(i)] = static_cast<int>(j);
        is_pivot[j] = true;
        break;
      }
    }
  }
  RatMat basis;
  for (std::size_t free_col = 0; free_col < ncols; ++free_col) {
    if (is_pivot[free_col]) continue;
    RatVec v = zero_vec(ncols);
    v[free_col] = 1;
    for (int i = 0; i < rk; ++i) {
      const auto pc = static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(i)]);
      v[pc] = -m[static_cast<std::size_t>(i)][free_col];
    }
    basis.push_back(std::move(v));
  }
  return row_space(std::move(basis));
}

std::optional<RatVec> solve(const RatMat& a, const RatVec& b) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a[0].size() : 0;
  RatMat aug = a;
  for (std::size_t i = 0; i < rows; ++i) aug[i].push_back(b[i]);
  rref(aug);
  RatVec x = zero_vec(cols);
  for (std::size_t i = 0; i < rows; ++i) {
    std::size_t lead = 0;
    while (lead < cols && aug[i][lead] == 0) ++lead;
    if (lead == cols) {
      if (aug[i][cols] != 0) return std::nullopt;  // 0 = nonzero
      continue;
    }
    x[lead] = aug[i][cols];
    // RREF: set the free columns of this row to zero, so back-substitution
    // is just reading off the pivot entries.
  }
  // x built from pivots with free variables zero satisfies the system only if
  // every non-pivot contribution vanished; verify.
  RatVec check = mat_vec(a, x);
  for (std::size_t i = 0; i < rows; ++i)
    if (check[i] != b[i]) return std::nullopt;
  return x;
}

std::optional<RatMat> inverse(const RatMat& a) {
  const std::size_t n = a.size();
  RatMat aug = a;
  for (std::size_t i = 0; i < n; ++i) {
    aug[i].resize(2 * n, Rat(0));
    aug[i][n + i] = 1;
  }
  const int rk = rref(aug);
  if (static_cast<std::size_t>(rk) != n) return std::nullopt;
  RatMat inv = zero_mat(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

int rank(RatMat m) { return rref(m); }

bool space_contains(const RatMat& space, const RatMat& rows) {
  RatMat all = space;
  for (const auto& r : rows) all.push_back(r);
  return rank(std::move(all)) == rank(space);
}

bool same_space(const RatMat& a, const RatMat& b) {
  return space_contains(a, b) && space_contains(b, a);
}

std::string key_of(const RatMat& m) {
  std::ostringstream os;
  for (const auto& row : m) {
    for (const auto& x : row) os << x << ',';
    os << ';';
  }
  return os.str();
}

std::string key_of(const RatVec& v) {
  std::ostringstream os;
  for (const auto& x : v) os << x << ',';
  return os.str();
}

namespace {

// Simplex on the tableau  [A | b] with basis tracking, Bland's rule.
// Returns false when unbounded.
bool simplex(RatMat& t, std::vector<int>& basis, const RatVec& cost, Rat& value) {
  const std::size_t rows = t.size();
  const std::size_t cols = t[0].size() - 1;
  // Reduced costs maintained implicitly: z_j = cost_j - cost_B . B^{-1} A_j.
  for (;;) {
    int enter = -1;
    for (std::size_t j = 0; j < cols; ++j) {
      Rat red = cost[j];
      for (std::size_t i = 0; i < rows; ++i) red -= cost[static_cast<std::size_t>(basis[i])] * t[i][j];
      if (red < 0) {
        enter = static_cast<int>(j);
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) break;
    int leave = -1;
    Rat best_ratio(0);
    for (std::size_t i = 0; i < rows; ++i) {
      if (t[i][static_cast<std::size_t>(enter)] <= 0) continue;
      Rat ratio = t[i][cols] / t[i][static_cast<std::size_t>(enter)];
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[i] < basis[static_cast<std::size_t>(leave)])) {
        leave = static_cast<int>(i);
        best_ratio = ratio;
      }
    }
    if (leave < 0) return false;  // unbounded
    const auto li = static_cast<std::size_t>(leave);
    const auto ej = static_cast<std::size_t>(enter);
    const Rat piv = t[li][ej];
    for (auto& x : t[li]) x /= piv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == li || t[i][ej] == 0) continue;
      const Rat f = t[i][ej];
      for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[li][j];
    }
    basis[li] = enter;
  }
  value = 0;
  for (std::size_t i = 0; i < rows; ++i) value += cost[static_cast<std::size_t>(basis[i])] * t[i][cols];
  return true;
}

}  // namespace

LpResult lp_solve(const RatMat& a, const RatVec& b, const RatVec& c) {
  LpResult res;
  const std::size_t rows = a.size();
  const std::size_t nvar = rows ? a[0].size() : c.size();
  // Phase 1 tableau: [A | I | b] with b >= 0.
  RatMat t(rows, RatVec(nvar + rows + 1, Rat(0)));
  for (std::size_t i = 0; i < rows; ++i) {
    const bool neg = b[i] < 0;
    for (std::size_t j = 0; j < nvar; ++j) t[i][j] = neg ? -a[i][j] : a[i][j];
    t[i][nvar + i] = 1;
    t[i][nvar + rows] = neg ? -b[i] : b[i];
  }
  std::vector<int> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = static_cast<int>(nvar + i);
  RatVec phase1_cost(nvar + rows, Rat(0));
  for (std::size_t j = nvar; j < nvar + rows; ++j) phase1_cost[j] = 1;
  Rat v1;
  simplex(t, basis, phase1_cost, v1);  // phase 1 is always bounded
  if (v1 != 0) return res;             // infeasible
  // Drive artificials out of the basis where possible; rows that cannot be
  // pivoted are redundant and are dropped.
  for (std::size_t i = 0; i < t.size();) {
    if (basis[i] < static_cast<int>(nvar)) {
      ++i;
      continue;
    }
    int piv_col = -1;
    for (std::size_t j = 0; j < nvar; ++j) {
      if (t[i][j] != 0) {
        piv_col = static_cast<int>(j);
        break;
      }
    }
    if (piv_col < 0) {
      t.erase(t.begin() + static_cast<long>(i));
      basis.erase(basis.begin() + static_cast<long>(i));
      continue;
    }
    const auto pj = static_cast<std::size_t>(piv_col);
    const Rat piv = t[i][pj];
    for (auto& x : t[i]) x /= piv;
    for (std::size_t r2 = 0; r2 < t.size(); ++r2) {
      if (r2 == i || t[r2][pj] == 0) continue;
      const Rat f = t[r2][pj];
      for (std::size_t j = 0; j < t[r2].size(); ++j) t[r2][j] -= f * t[i][j];
    }
    basis[i] = piv_col;
    ++i;
  }
  // Phase 2 on the original variables; artificial columns are dropped so
  // they cannot re-enter.
  RatMat t2(t.size(), RatVec(nvar + 1, Rat(0)));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = 0; j < nvar; ++j) t2[i][j] = t[i][j];
    t2[i][nvar] = t[i][nvar + rows];
  }
  RatVec cost2(nvar, Rat(0));
  for (std::size_t j = 0; j < nvar && j < c.size(); ++j) cost2[j] = c[j];
  Rat v2;
  if (!simplex(t2, basis, cost2, v2)) {
    res.feasible = true;
    res.bounded = false;
    return res;
  }
  res.feasible = true;
  res.value = v2;
  res.x = zero_vec(nvar);
  for (std::size_t i = 0; i < t2.size(); ++i) {
    if (basis[i] >= 0 && basis[i] < static_cast<int>(nvar))
      res.x[static_cast<std::size_t>(basis[i])] = t2[i][nvar];
  }
  return res;
}

bool lp_feasible(const RatMat& a, const RatVec& b) {
  const std::size_t nvar = a.empty() ? 0 : a[0].size();
  return lp_solve(a, b, zero_vec(nvar)).feasible;
}

const char* errc_name_impl(Errc code) {
  switch (code) {
    case Errc::non_compatible: return "NonCompatible";
    case Errc::non_commutative: return "NonCommutative";
    case Errc::degenerate_spec: return "DegenerateSpec";
    case Errc::dimension_overflow: return "DimensionOverflow";
    case Errc::dimension_cap: return "DimensionCap";
    case Errc::unsupported_kind: return "UnsupportedKind";
    case Errc::realization_mismatch: return "RealizationMismatch";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::not_torus: return "NotTorus";
    case Errc::param_error: return "ParamError";
    case Errc::empty_cloud: return "EmptyCloud";
    case Errc::dim_mismatch: return "DimMismatch";
    case Errc::infeasible_fiber: return "InfeasibleFiber";
    case Errc::plane_degenerate: return "PlaneDegenerate";
    case Errc::io_error: return "IoError";
    case Errc::usage_error: return "UsageError";
  }
  return "Unknown";
}

}  // namespace gradpoly::exact

namespace gradpoly {
const char* errc_name(Errc code) { return exact::errc_name_impl(code); }
}  // namespace gradpoly
