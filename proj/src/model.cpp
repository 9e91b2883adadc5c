#include "gradpoly/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "gradpoly/linalg.hpp"
#include "gradpoly/rng.hpp"

namespace gradpoly {

using exact::Rat;
using exact::RatMat;
using exact::RatVec;

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::torus: return "torus";
    case Kind::sl_n_real: return "sl_n_real";
    case Kind::su_p_q: return "su_p_q";
    case Kind::product: return "product";
    case Kind::custom: return "custom";
  }
  return "?";
}

double Model::def_ip(const Mat& x, const Mat& y) const {
  double s = 0.0;
  for (const auto& blk : ip_blocks) {
    s += trace_ip(x.block(blk.offset, blk.offset, blk.size, blk.size),
                  y.block(blk.offset, blk.offset, blk.size, blk.size), blk.scale);
  }
  return s;
}

Mat Model::p_realize(const RVec& coeffs) const {
  Mat x = Mat::Zero(rep_dim, rep_dim);
  for (int b = 0; b < dim_p(); ++b)
    if (coeffs[b] != 0.0) x += cxd(coeffs[b], 0.0) * p_ops[static_cast<std::size_t>(b)];
  return x;
}

Mat Model::p_realize_def(const RVec& coeffs) const {
  Mat x = Mat::Zero(defining_dim, defining_dim);
  for (int b = 0; b < dim_p(); ++b)
    if (coeffs[b] != 0.0) x += cxd(coeffs[b], 0.0) * p_ops_def[static_cast<std::size_t>(b)];
  return x;
}

namespace {

Mat lift_node(const RepNodePtr& nd, const Mat& g) {
  if (!nd || nd->op == RepNode::Op::leaf) return g;
  switch (nd->op) {
    case RepNode::Op::leaf:
      return g;
    case RepNode::Op::dual: {
      Mat h = lift_node(nd->child, g);
      return Mat(h.transpose()).inverse();
    }
    case RepNode::Op::sym:
    case RepNode::Op::ext: {
      Mat h = lift_node(nd->child, g);
      Mat t = Mat::Identity(1, 1);
      for (int i = 0; i < nd->degree; ++i) t = kron(t, h);
      return nd->embed.adjoint() * t * nd->embed;
    }
    case RepNode::Op::tensor_pow: {
      Mat h = lift_node(nd->child, g);
      Mat t = Mat::Identity(1, 1);
      for (int i = 0; i < nd->degree; ++i) t = kron(t, h);
      return t;
    }
    case RepNode::Op::pair: {
      if (nd->product_pair) {
        Mat gl = g.block(0, 0, nd->left_def_dim, nd->left_def_dim);
        Mat gr = g.block(nd->left_def_dim, nd->left_def_dim, nd->right_def_dim, nd->right_def_dim);
        return kron(lift_node(nd->left, gl), lift_node(nd->right, gr));
      }
      return kron(lift_node(nd->left, g), lift_node(nd->right, g));
    }
  }
  return g;
}

}  // namespace

Mat Model::lift(const Mat& g_def) const { return lift_node(rep, g_def); }

bool Model::chamber_contains(const RVec& frame_coords, double tol) const {
  for (const auto& row : chamber) {
    double v = 0.0;
    for (int d = 0; d < frame.dim; ++d) v += exact::to_double(row[static_cast<std::size_t>(d)]) * frame_coords[d];
    if (v < -tol) return false;
  }
  return true;
}

const Diagnostics::Entry* Diagnostics::find(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

namespace {

Mat unit(int n, int i, int j) {
  Mat m = Mat::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

void finalize_frame(Model& m) {
  const int r = m.dim_a();
  const int d = m.frame.dim;
  m.frame.frame_to_a = RMat::Zero(r, d);
  for (int b = 0; b < r; ++b)
    for (int dd = 0; dd < d; ++dd)
      m.frame.frame_to_a(b, dd) =
          m.def_ip(m.frame_ops_def[static_cast<std::size_t>(dd)],
                   m.p_ops_def[static_cast<std::size_t>(m.a_indices[static_cast<std::size_t>(b)])]);
  Eigen::CompleteOrthogonalDecomposition<RMat> cod(m.frame.frame_to_a);
  m.frame.a_to_frame = cod.pseudoInverse();
  m.frame.gram_f = RMat::Zero(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m.frame.gram_f(i, j) = exact::to_double(m.frame.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
}

void finalize_classes(Model& m) {
  m.classes.clear();
  std::map<std::string, int> index;
  for (int b = 0; b < static_cast<int>(m.blocks.size()); ++b) {
    const auto& blk = m.blocks[static_cast<std::size_t>(b)];
    const std::string key = exact::key_of(blk.chi);
    auto it = index.find(key);
    if (it == index.end()) {
      Model::WeightClass cls;
      cls.chi = blk.chi;
      cls.block_ids = {b};
      cls.dim = static_cast<int>(blk.basis.cols());
      index.emplace(key, static_cast<int>(m.classes.size()));
      m.classes.push_back(std::move(cls));
    } else {
      auto& cls = m.classes[static_cast<std::size_t>(it->second)];
      cls.block_ids.push_back(b);
      cls.dim += static_cast<int>(blk.basis.cols());
    }
  }
}

void finalize_model(Model& m) {
  finalize_frame(m);
  finalize_classes(m);
}

Model build_torus(const ModelSpec& spec) {
  const auto& w = spec.weights;
  if (w.empty()) fail(Errc::degenerate_spec, "torus: empty weight list");
  const std::size_t r = w[0].size();
  if (r == 0) fail(Errc::degenerate_spec, "torus: zero-rank weight vectors");
  for (const auto& row : w)
    if (row.size() != r) fail(Errc::degenerate_spec, "torus: ragged weight list");
  const int n = static_cast<int>(w.size());

  Model m;
  m.kind = Kind::torus;
  m.name = "torus";
  m.rep_dim = n;
  m.defining_dim = n;
  m.torus_weights = w;

  // Gram of the raw diagonal generators; scale so that the generators are
  // orthonormal when that is possible with a single scalar.
  RatMat gram0 = exact::zero_mat(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) {
      Rat s(0);
      for (const auto& row : w) s += Rat(row[i]) * Rat(row[j]);
      gram0[i][j] = s;
    }
  bool scalar = true;
  for (std::size_t i = 0; i < r && scalar; ++i)
    for (std::size_t j = 0; j < r && scalar; ++j)
      if (i != j ? gram0[i][j] != 0 : gram0[i][i] != gram0[0][0]) scalar = false;
  if (scalar && gram0[0][0] == 0) fail(Errc::degenerate_spec, "torus: trivial action");
  Rat s_exact = scalar ? Rat(1) / gram0[0][0] : Rat(1);
  m.ip_scale = exact::to_double(s_exact);
  m.frame.dim = static_cast<int>(r);
  m.frame.gram = exact::zero_mat(r, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < r; ++j) m.frame.gram[i][j] = s_exact * gram0[i][j];
  for (std::size_t j = 0; j < r; ++j) m.frame.names.push_back("a" + std::to_string(j + 1));

  for (std::size_t j = 0; j < r; ++j) {
    Mat a = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = static_cast<double>(w[static_cast<std::size_t>(i)][j]);
    m.frame_ops_def.push_back(a);
  }
  m.p_ops_def = m.frame_ops_def;
  m.ip_blocks = {{0, n, m.ip_scale}};
  gram_schmidt_ops(m.p_ops_def, m.ip_scale);
  for (const auto& p : m.p_ops_def) m.k_ops_def.push_back(cxd(0, 1) * p);
  m.p_ops = m.p_ops_def;
  m.k_ops = m.k_ops_def;
  m.a_indices.resize(r);
  std::iota(m.a_indices.begin(), m.a_indices.end(), 0);

  // One block per distinct weight.
  std::map<std::vector<long long>, std::vector<int>> groups;
  for (int i = 0; i < n; ++i) groups[w[static_cast<std::size_t>(i)]].push_back(i);
  for (const auto& [chi, ids] : groups) {
    WeightBlock blk;
    blk.chi.reserve(r);
    for (long long c : chi) blk.chi.emplace_back(c);
    blk.basis = Mat::Zero(n, static_cast<Eigen::Index>(ids.size()));
    for (std::size_t c = 0; c < ids.size(); ++c) blk.basis(ids[c], static_cast<Eigen::Index>(c)) = 1.0;
    m.blocks.push_back(std::move(blk));
  }
  m.rep = std::make_shared<RepNode>();
  return m;
}

Model build_sl(const ModelSpec& spec) {
  const int n = spec.n;
  if (n < 2) fail(Errc::degenerate_spec, "sl_n_real: n >= 2 required");
  Model m;
  m.kind = Kind::sl_n_real;
  m.name = "sl" + std::to_string(n) + "_real";
  m.rep_dim = n;
  m.defining_dim = n;
  m.ip_scale = 1.0;
  m.ip_blocks = {{0, n, 1.0}};

  for (int j = 0; j + 1 < n; ++j) m.p_ops_def.push_back(unit(n, j, j) - unit(n, j + 1, j + 1));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.p_ops_def.push_back(unit(n, i, j) + unit(n, j, i));
  gram_schmidt_ops(m.p_ops_def, m.ip_scale);
  m.a_indices.resize(static_cast<std::size_t>(n - 1));
  std::iota(m.a_indices.begin(), m.a_indices.end(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.k_ops_def.push_back(unit(n, i, j) - unit(n, j, i));
  gram_schmidt_ops(m.k_ops_def, m.ip_scale);
  m.p_ops = m.p_ops_def;
  m.k_ops = m.k_ops_def;

  m.frame.dim = n;
  m.frame.gram = exact::identity(static_cast<std::size_t>(n));
  m.frame.constraints = {RatVec(static_cast<std::size_t>(n), Rat(1))};
  for (int j = 0; j < n; ++j) m.frame.names.push_back("x" + std::to_string(j + 1));
  for (int d = 0; d < n; ++d) {
    Mat f = unit(n, d, d);
    f -= Mat::Identity(n, n) / static_cast<double>(n);
    m.frame_ops_def.push_back(f);
  }
  for (int j = 0; j + 1 < n; ++j) {
    RatVec row(static_cast<std::size_t>(n), Rat(0));
    row[static_cast<std::size_t>(j)] = 1;
    row[static_cast<std::size_t>(j + 1)] = -1;
    m.chamber.push_back(std::move(row));
  }
  for (int i = 0; i < n; ++i) {
    WeightBlock blk;
    blk.chi = exact::zero_vec(static_cast<std::size_t>(n));
    blk.chi[static_cast<std::size_t>(i)] = 1;
    blk.basis = Mat::Zero(n, 1);
    blk.basis(i, 0) = 1.0;
    m.blocks.push_back(std::move(blk));
  }
  m.rep = std::make_shared<RepNode>();
  return m;
}

struct SuDims {
  int p = 0, q = 0;
};

Model build_su(const ModelSpec& spec) {
  const int p = spec.p, q = spec.q;
  if (p < 1 || q < 1) fail(Errc::degenerate_spec, "su_p_q: p, q >= 1 required");
  const int n = p + q;
  const int r = std::min(p, q);
  Model m;
  m.kind = Kind::su_p_q;
  m.name = "su_" + std::to_string(p) + "_" + std::to_string(q);
  m.rep_dim = n;
  m.defining_dim = n;
  m.ip_scale = 0.5;
  m.ip_blocks = {{0, n, 0.5}};

  for (int l = 0; l < r; ++l) m.p_ops_def.push_back(unit(n, l, p + l) + unit(n, p + l, l));
  for (int j = 0; j < p; ++j)
    for (int l = 0; l < q; ++l) {
      if (j == l && l < r) {
        m.p_ops_def.push_back(cxd(0, 1) * (unit(n, j, p + l) - unit(n, p + l, j)));
        continue;
      }
      m.p_ops_def.push_back(unit(n, j, p + l) + unit(n, p + l, j));
      m.p_ops_def.push_back(cxd(0, 1) * (unit(n, j, p + l) - unit(n, p + l, j)));
    }
  gram_schmidt_ops(m.p_ops_def, m.ip_scale);
  m.a_indices.resize(static_cast<std::size_t>(r));
  std::iota(m.a_indices.begin(), m.a_indices.end(), 0);

  auto block_skews = [&](int off, int size) {
    for (int a = 0; a < size; ++a)
      for (int b = a + 1; b < size; ++b) {
        m.k_ops_def.push_back(unit(n, off + a, off + b) - unit(n, off + b, off + a));
        m.k_ops_def.push_back(cxd(0, 1) * (unit(n, off + a, off + b) + unit(n, off + b, off + a)));
      }
  };
  block_skews(0, p);
  block_skews(p, q);
  for (int a = 0; a + 1 < n; ++a)
    m.k_ops_def.push_back(cxd(0, 1) * (unit(n, a, a) - unit(n, a + 1, a + 1)));
  gram_schmidt_ops(m.k_ops_def, m.ip_scale);
  m.p_ops = m.p_ops_def;
  m.k_ops = m.k_ops_def;

  m.frame.dim = r;
  m.frame.gram = exact::identity(static_cast<std::size_t>(r));
  for (int l = 0; l < r; ++l) m.frame.names.push_back("s" + std::to_string(l + 1));
  for (int l = 0; l < r; ++l) m.frame_ops_def.push_back(unit(n, l, p + l) + unit(n, p + l, l));
  for (int l = 0; l + 1 < r; ++l) {
    RatVec row(static_cast<std::size_t>(r), Rat(0));
    row[static_cast<std::size_t>(l)] = 1;
    row[static_cast<std::size_t>(l + 1)] = -1;
    m.chamber.push_back(std::move(row));
  }
  {
    RatVec row(static_cast<std::size_t>(r), Rat(0));
    row[static_cast<std::size_t>(r - 1)] = 1;
    m.chamber.push_back(std::move(row));
  }

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int l = 0; l < r; ++l) {
    for (int sign = 0; sign < 2; ++sign) {
      WeightBlock blk;
      blk.chi = exact::zero_vec(static_cast<std::size_t>(r));
      blk.chi[static_cast<std::size_t>(l)] = sign == 0 ? 1 : -1;
      blk.basis = Mat::Zero(n, 1);
      blk.basis(l, 0) = inv_sqrt2;
      blk.basis(p + l, 0) = sign == 0 ? inv_sqrt2 : -inv_sqrt2;
      m.blocks.push_back(std::move(blk));
    }
  }
  if (n > 2 * r) {
    WeightBlock blk;
    blk.chi = exact::zero_vec(static_cast<std::size_t>(r));
    blk.basis = Mat::Zero(n, n - 2 * r);
    int c = 0;
    for (int j = r; j < p; ++j) blk.basis(j, c++) = 1.0;
    for (int j = r; j < q; ++j) blk.basis(p + j, c++) = 1.0;
    m.blocks.push_back(std::move(blk));
  }
  m.rep = std::make_shared<RepNode>();
  return m;
}

Model build_custom(const ModelSpec& spec) {
  if (!spec.custom) fail(Errc::degenerate_spec, "custom: missing operator data");
  const auto& c = *spec.custom;
  if (c.rep_dim < 1) fail(Errc::degenerate_spec, "custom: zero-dimensional space");
  Model m;
  m.kind = Kind::custom;
  m.name = "custom";
  m.rep_dim = c.rep_dim;
  m.defining_dim = c.rep_dim;
  m.ip_scale = c.ip_scale;
  m.ip_blocks = {{0, c.rep_dim, c.ip_scale}};

  for (const auto& x : c.p_ops)
    if (herm_residual(x) > tols::hermitian * 10)
      fail(Errc::non_compatible, "custom: p operator not Hermitian");
  for (const auto& x : c.k_ops)
    if (skew_residual(x) > tols::hermitian * 10)
      fail(Errc::non_compatible, "custom: k operator not skew-Hermitian");
  for (std::size_t i = 0; i < c.a_indices.size(); ++i)
    for (std::size_t j = i + 1; j < c.a_indices.size(); ++j)
      if (comm_norm(c.p_ops[static_cast<std::size_t>(c.a_indices[i])],
                    c.p_ops[static_cast<std::size_t>(c.a_indices[j])]) > tols::commute * 100)
        fail(Errc::non_commutative, "custom: declared abelian operators do not commute");

  // Reorder so the abelian generators come first; Gram-Schmidt then keeps
  // their span as the span of the leading orthonormal operators.
  std::vector<Mat> ordered;
  std::vector<bool> used(c.p_ops.size(), false);
  for (int idx : c.a_indices) {
    ordered.push_back(c.p_ops[static_cast<std::size_t>(idx)]);
    used[static_cast<std::size_t>(idx)] = true;
  }
  for (std::size_t i = 0; i < c.p_ops.size(); ++i)
    if (!used[i]) ordered.push_back(c.p_ops[i]);
  m.p_ops_def = std::move(ordered);
  gram_schmidt_ops(m.p_ops_def, m.ip_scale);
  m.k_ops_def = c.k_ops;
  if (!m.k_ops_def.empty()) gram_schmidt_ops(m.k_ops_def, m.ip_scale);
  m.p_ops = m.p_ops_def;
  m.k_ops = m.k_ops_def;
  m.a_indices.resize(c.a_indices.size());
  std::iota(m.a_indices.begin(), m.a_indices.end(), 0);

  // Cartan closure sanity on the supplied data.
  for (const auto& k : m.k_ops_def)
    for (const auto& pp : m.p_ops_def) {
      Mat comm = k * pp - pp * k;
      Mat proj = Mat::Zero(m.defining_dim, m.defining_dim);
      for (const auto& b : m.p_ops_def) proj += cxd(m.def_ip(comm, b), 0.0) * b;
      if ((comm - proj).norm() > 1e-8) fail(Errc::non_compatible, "custom: [k, p] leaves p");
    }

  const int r = m.dim_a();
  m.frame.dim = r;
  m.frame.gram = exact::identity(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) m.frame.names.push_back("a" + std::to_string(j + 1));
  for (int b = 0; b < r; ++b) m.frame_ops_def.push_back(m.p_ops_def[static_cast<std::size_t>(b)]);
  m.chamber = c.chamber;

  // Weights by simultaneous diagonalization of the orthonormal abelian
  // operators, rounded to rationals.
  std::vector<Mat> a_ops;
  for (int b = 0; b < r; ++b) a_ops.push_back(m.p_ops[static_cast<std::size_t>(b)]);
  auto eig = simultaneous_eigenbasis(a_ops);
  for (auto& [vals, basis] : eig) {
    WeightBlock blk;
    for (int d = 0; d < vals.size(); ++d) {
      // Continued-fraction rounding with a denominator cap.
      const double x = vals[d];
      long long best_num = 0, best_den = 1;
      double best_err = std::abs(x);
      for (long long den = 1; den <= 1000; ++den) {
        const long long num = std::llround(x * static_cast<double>(den));
        const double err = std::abs(x - static_cast<double>(num) / static_cast<double>(den));
        if (err < best_err - 1e-15) {
          best_err = err;
          best_num = num;
          best_den = den;
          if (err < 1e-12) break;
        }
      }
      if (best_err > 1e-8)
        fail(Errc::param_error, "custom: weight not rational in orthonormal coordinates");
      blk.chi.emplace_back(Rat(best_num, best_den));
    }
    blk.basis = basis;
    m.blocks.push_back(std::move(blk));
  }
  m.rep = std::make_shared<RepNode>();
  return m;
}

std::vector<std::pair<RatVec, Vec>> eigenlines(const Model& m) {
  std::vector<std::pair<RatVec, Vec>> lines;
  for (const auto& blk : m.blocks)
    for (Eigen::Index c = 0; c < blk.basis.cols(); ++c) lines.emplace_back(blk.chi, blk.basis.col(c));
  return lines;
}

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) {
    r *= b;
    if (r > 100000000LL) return r;
  }
  return r;
}

void check_cap(const Model& base, long long out_dim, long long tensor_dim) {
  if (out_dim > base.dim_cap || out_dim < 1)
    fail(Errc::dimension_overflow, "derived model dimension " + std::to_string(out_dim) +
                                       " exceeds cap " + std::to_string(base.dim_cap));
  if (tensor_dim > 4000)
    fail(Errc::dimension_overflow, "intermediate tensor dimension too large");
}

// Multisets (sym) or subsets (ext) of {0..n-1} of size k, lexicographic.
void enum_tuples(int n, int k, bool strict, std::vector<std::vector<int>>& out) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(strict ? i + 1 : i);
      cur.pop_back();
    }
  };
  rec(0);
}

Mat sym_ext_embed(int n, int k, bool ext) {
  std::vector<std::vector<int>> tuples;
  enum_tuples(n, k, ext, tuples);
  const long long nk = ipow(n, k);
  Mat e = Mat::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(tuples.size()));
  for (std::size_t col = 0; col < tuples.size(); ++col) {
    std::vector<int> idx = tuples[col];
    std::sort(idx.begin(), idx.end());
    int count = 0;
    std::vector<int> perm = idx;
    do {
      long long flat = 0;
      for (int t : perm) flat = flat * n + t;
      double sgn = 1.0;
      if (ext) {
        // Parity of the permutation taking idx to perm.
        std::vector<int> p = perm;
        int inv = 0;
        for (std::size_t a = 0; a < p.size(); ++a)
          for (std::size_t b = a + 1; b < p.size(); ++b)
            if (p[a] > p[b]) ++inv;
        sgn = inv % 2 == 0 ? 1.0 : -1.0;
      }
      e(static_cast<Eigen::Index>(flat), static_cast<Eigen::Index>(col)) += sgn;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    e.col(static_cast<Eigen::Index>(col)) /= std::sqrt(static_cast<double>(count));
  }
  return e;
}

Mat tensor_op_sum(const Mat& x, int n, int k) {
  // sum_j I^{(j)} (x) x (x) I^{(k-1-j)}
  const long long nk = ipow(n, k);
  Mat total = Mat::Zero(static_cast<Eigen::Index>(nk), static_cast<Eigen::Index>(nk));
  for (int j = 0; j < k; ++j) {
    Mat t = Mat::Identity(1, 1);
    for (int a = 0; a < k; ++a) t = kron(t, a == j ? x : Mat(Mat::Identity(n, n)));
    total += t;
  }
  return total;
}

Model derive_power(const Model& base, const RepFunctor& f) {
  const int n = base.rep_dim;
  const int k = f.degree;
  if (k < 1) fail(Errc::param_error, "functor degree must be positive");
  if (f.tag == RepFunctor::Tag::ext && k > n)
    fail(Errc::param_error, "ext(k) requires k <= rep_dim");
  const bool is_ext = f.tag == RepFunctor::Tag::ext;
  const bool is_tensor = f.tag == RepFunctor::Tag::tensor;
  const long long nk = ipow(n, k);
  {
    long long out_dim = nk;
    if (!is_tensor) {
      // C(n+k-1, k) for sym, C(n, k) for ext.
      out_dim = 1;
      const long long top = is_ext ? n : n + k - 1;
      for (long long i = 0; i < k; ++i) out_dim = out_dim * (top - i) / (i + 1);
    }
    check_cap(base, out_dim, nk);
  }

  std::vector<std::vector<int>> tuples;
  if (is_tensor) {
    // Ordered tuples.
    tuples.resize(static_cast<std::size_t>(nk));
    for (long long t = 0; t < nk; ++t) {
      std::vector<int> idx(static_cast<std::size_t>(k));
      long long rest = t;
      for (int a = k - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(rest % n);
        rest /= n;
      }
      tuples[static_cast<std::size_t>(t)] = idx;
    }
  } else {
    enum_tuples(n, k, is_ext, tuples);
  }

  Model m;
  m.kind = base.kind;
  m.name = base.name + (is_tensor ? ("^(x" + std::to_string(k) + ")")
                                  : ((is_ext ? "^ext" : "^sym") + std::to_string(k)));
  m.rep_dim = static_cast<int>(tuples.size());
  m.a_indices = base.a_indices;
  m.frame = base.frame;
  m.chamber = base.chamber;
  m.ip_scale = base.ip_scale;
  m.dim_cap = base.dim_cap;
  m.defining_dim = base.defining_dim;
  m.p_ops_def = base.p_ops_def;
  m.k_ops_def = base.k_ops_def;
  m.frame_ops_def = base.frame_ops_def;
  m.ip_blocks = base.ip_blocks;
  m.torus_weights = base.torus_weights;
  m.factors = base.factors;
  m.factor_p_ranges = base.factor_p_ranges;
  m.factor_frame_ranges = base.factor_frame_ranges;

  auto node = std::make_shared<RepNode>();
  node->degree = k;
  node->child = base.rep;
  if (is_tensor) {
    node->op = RepNode::Op::tensor_pow;
  } else {
    node->op = is_ext ? RepNode::Op::ext : RepNode::Op::sym;
    node->embed = sym_ext_embed(n, k, is_ext);
  }

  for (const auto& x : base.p_ops) {
    Mat big = tensor_op_sum(x, n, k);
    m.p_ops.push_back(is_tensor ? big : Mat(node->embed.adjoint() * big * node->embed));
  }
  for (const auto& x : base.k_ops) {
    Mat big = tensor_op_sum(x, n, k);
    m.k_ops.push_back(is_tensor ? big : Mat(node->embed.adjoint() * big * node->embed));
  }

  const auto lines = eigenlines(base);
  for (const auto& tuple : tuples) {
    RatVec chi = exact::zero_vec(static_cast<std::size_t>(base.frame.dim));
    Vec v = Vec::Ones(1);
    for (int t : tuple) {
      chi = exact::add(chi, lines[static_cast<std::size_t>(t)].first);
      v = kron_vec(v, lines[static_cast<std::size_t>(t)].second);
    }
    WeightBlock blk;
    blk.chi = std::move(chi);
    Vec w = is_tensor ? v : Vec(node->embed.adjoint() * v);
    const double nw = w.norm();
    if (nw < 1e-12) continue;  // annihilated by antisymmetrization
    blk.basis = Mat(w.size(), 1);
    blk.basis.col(0) = w / nw;
    m.blocks.push_back(std::move(blk));
  }
  m.rep = node;
  return m;
}

Model derive_dual(const Model& base) {
  Model m;
  m.kind = base.kind;
  m.name = base.name + "*";
  m.rep_dim = base.rep_dim;
  m.a_indices = base.a_indices;
  m.frame = base.frame;
  m.chamber = base.chamber;
  m.ip_scale = base.ip_scale;
  m.dim_cap = base.dim_cap;
  m.defining_dim = base.defining_dim;
  m.p_ops_def = base.p_ops_def;
  m.k_ops_def = base.k_ops_def;
  m.frame_ops_def = base.frame_ops_def;
  m.ip_blocks = base.ip_blocks;
  m.torus_weights = base.torus_weights;
  m.factors = base.factors;
  m.factor_p_ranges = base.factor_p_ranges;
  m.factor_frame_ranges = base.factor_frame_ranges;
  for (const auto& x : base.p_ops) m.p_ops.push_back(-x.transpose());
  for (const auto& x : base.k_ops) m.k_ops.push_back(-x.transpose());
  for (const auto& blk : base.blocks) {
    WeightBlock nb;
    nb.chi = exact::scale(blk.chi, Rat(-1));
    nb.basis = blk.basis.conjugate();
    m.blocks.push_back(std::move(nb));
  }
  auto node = std::make_shared<RepNode>();
  node->op = RepNode::Op::dual;
  node->child = base.rep;
  m.rep = node;
  return m;
}

}  // namespace

ModelPtr derived_model(const ModelPtr& m, const RepFunctor& f) {
  if (!m) fail(Errc::param_error, "derived_model: null model");
  Model out;
  switch (f.tag) {
    case RepFunctor::Tag::standard:
      return m;
    case RepFunctor::Tag::dual:
      out = derive_dual(*m);
      break;
    case RepFunctor::Tag::sym:
    case RepFunctor::Tag::ext:
    case RepFunctor::Tag::tensor:
      out = derive_power(*m, f);
      break;
  }
  finalize_model(out);
  return std::make_shared<Model>(std::move(out));
}

ModelPtr tensor_model(const ModelPtr& a, const ModelPtr& b) {
  if (!a || !b) fail(Errc::param_error, "tensor_model: null model");
  if (a->dim_p() != b->dim_p() || a->frame.dim != b->frame.dim ||
      a->defining_dim != b->defining_dim)
    fail(Errc::param_error, "tensor_model: factors are not over the same group");
  const long long dim = static_cast<long long>(a->rep_dim) * b->rep_dim;
  if (dim > a->dim_cap) fail(Errc::dimension_overflow, "tensor_model: dimension cap exceeded");
  Model m;
  m.kind = a->kind;
  m.name = a->name + "(x)" + b->name;
  m.rep_dim = static_cast<int>(dim);
  m.a_indices = a->a_indices;
  m.frame = a->frame;
  m.chamber = a->chamber;
  m.ip_scale = a->ip_scale;
  m.dim_cap = a->dim_cap;
  m.defining_dim = a->defining_dim;
  m.p_ops_def = a->p_ops_def;
  m.k_ops_def = a->k_ops_def;
  m.frame_ops_def = a->frame_ops_def;
  m.ip_blocks = a->ip_blocks;
  m.torus_weights = a->torus_weights;
  m.factors = a->factors;
  m.factor_p_ranges = a->factor_p_ranges;
  m.factor_frame_ranges = a->factor_frame_ranges;

  const Mat ia = Mat::Identity(a->rep_dim, a->rep_dim);
  const Mat ib = Mat::Identity(b->rep_dim, b->rep_dim);
  for (int i = 0; i < a->dim_p(); ++i)
    m.p_ops.push_back(kron(a->p_ops[static_cast<std::size_t>(i)], ib) +
                      kron(ia, b->p_ops[static_cast<std::size_t>(i)]));
  for (std::size_t i = 0; i < a->k_ops.size() && i < b->k_ops.size(); ++i)
    m.k_ops.push_back(kron(a->k_ops[i], ib) + kron(ia, b->k_ops[i]));
  for (const auto& ba : a->blocks)
    for (const auto& bb : b->blocks) {
      WeightBlock blk;
      blk.chi = exact::add(ba.chi, bb.chi);
      blk.basis = Mat(static_cast<Eigen::Index>(dim), ba.basis.cols() * bb.basis.cols());
      Eigen::Index c = 0;
      for (Eigen::Index i = 0; i < ba.basis.cols(); ++i)
        for (Eigen::Index j = 0; j < bb.basis.cols(); ++j)
          blk.basis.col(c++) = kron_vec(ba.basis.col(i), bb.basis.col(j));
      m.blocks.push_back(std::move(blk));
    }
  auto node = std::make_shared<RepNode>();
  node->op = RepNode::Op::pair;
  node->left = a->rep;
  node->right = b->rep;
  m.rep = node;
  finalize_model(m);
  return std::make_shared<Model>(std::move(m));
}

ModelPtr product_model(const ModelPtr& a, const ModelPtr& b) {
  if (!a || !b) fail(Errc::param_error, "product_model: null model");
  const long long dim = static_cast<long long>(a->rep_dim) * b->rep_dim;
  if (dim > std::max(a->dim_cap, b->dim_cap))
    fail(Errc::dimension_overflow, "product_model: dimension cap exceeded");
  Model m;
  m.kind = Kind::product;
  m.name = "product(" + a->name + "," + b->name + ")";
  m.rep_dim = static_cast<int>(dim);
  m.dim_cap = std::max(a->dim_cap, b->dim_cap);
  m.ip_scale = a->ip_scale;
  m.defining_dim = a->defining_dim + b->defining_dim;
  m.factors = {a, b};

  const Mat ia = Mat::Identity(a->rep_dim, a->rep_dim);
  const Mat ib = Mat::Identity(b->rep_dim, b->rep_dim);
  const int da = a->defining_dim, db = b->defining_dim;
  auto embed_def = [&](const Mat& x, bool first) {
    Mat big = Mat::Zero(da + db, da + db);
    if (first)
      big.block(0, 0, da, da) = x;
    else
      big.block(da, da, db, db) = x;
    return big;
  };

  for (int i = 0; i < a->dim_p(); ++i) {
    m.p_ops.push_back(kron(a->p_ops[static_cast<std::size_t>(i)], ib));
    m.p_ops_def.push_back(embed_def(a->p_ops_def[static_cast<std::size_t>(i)], true));
  }
  for (int i = 0; i < b->dim_p(); ++i) {
    m.p_ops.push_back(kron(ia, b->p_ops[static_cast<std::size_t>(i)]));
    m.p_ops_def.push_back(embed_def(b->p_ops_def[static_cast<std::size_t>(i)], false));
  }
  for (const auto& k : a->k_ops) m.k_ops.push_back(kron(k, ib));
  for (const auto& k : b->k_ops) m.k_ops.push_back(kron(ia, k));
  for (const auto& k : a->k_ops_def) m.k_ops_def.push_back(embed_def(k, true));
  for (const auto& k : b->k_ops_def) m.k_ops_def.push_back(embed_def(k, false));
  m.factor_p_ranges = {{0, a->dim_p()}, {a->dim_p(), a->dim_p() + b->dim_p()}};

  for (int idx : a->a_indices) m.a_indices.push_back(idx);
  for (int idx : b->a_indices) m.a_indices.push_back(a->dim_p() + idx);

  m.frame.dim = a->frame.dim + b->frame.dim;
  m.factor_frame_ranges = {{0, a->frame.dim}, {a->frame.dim, m.frame.dim}};
  m.frame.gram = exact::zero_mat(static_cast<std::size_t>(m.frame.dim),
                                 static_cast<std::size_t>(m.frame.dim));
  for (int i = 0; i < a->frame.dim; ++i)
    for (int j = 0; j < a->frame.dim; ++j)
      m.frame.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          a->frame.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  for (int i = 0; i < b->frame.dim; ++i)
    for (int j = 0; j < b->frame.dim; ++j)
      m.frame.gram[static_cast<std::size_t>(a->frame.dim + i)][static_cast<std::size_t>(a->frame.dim + j)] =
          b->frame.gram[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  auto extend = [&](const RatMat& rows, int offset, int total) {
    RatMat out;
    for (const auto& row : rows) {
      RatVec r(static_cast<std::size_t>(total), Rat(0));
      for (std::size_t j = 0; j < row.size(); ++j) r[static_cast<std::size_t>(offset) + j] = row[j];
      out.push_back(std::move(r));
    }
    return out;
  };
  for (auto& row : extend(a->frame.constraints, 0, m.frame.dim)) m.frame.constraints.push_back(row);
  for (auto& row : extend(b->frame.constraints, a->frame.dim, m.frame.dim))
    m.frame.constraints.push_back(row);
  for (auto& row : extend(a->chamber, 0, m.frame.dim)) m.chamber.push_back(row);
  for (auto& row : extend(b->chamber, a->frame.dim, m.frame.dim)) m.chamber.push_back(row);
  for (const auto& nm : a->frame.names) m.frame.names.push_back(nm + ".1");
  for (const auto& nm : b->frame.names) m.frame.names.push_back(nm + ".2");
  for (const auto& f : a->frame_ops_def) m.frame_ops_def.push_back(embed_def(f, true));
  for (const auto& f : b->frame_ops_def) m.frame_ops_def.push_back(embed_def(f, false));
  for (const auto& blk : a->ip_blocks) m.ip_blocks.push_back(blk);
  for (const auto& blk : b->ip_blocks) m.ip_blocks.push_back({blk.offset + da, blk.size, blk.scale});

  for (const auto& ba : a->blocks)
    for (const auto& bb : b->blocks) {
      WeightBlock blk;
      blk.chi = ba.chi;
      blk.chi.insert(blk.chi.end(), bb.chi.begin(), bb.chi.end());
      blk.basis = Mat(static_cast<Eigen::Index>(dim), ba.basis.cols() * bb.basis.cols());
      Eigen::Index c = 0;
      for (Eigen::Index i = 0; i < ba.basis.cols(); ++i)
        for (Eigen::Index j = 0; j < bb.basis.cols(); ++j)
          blk.basis.col(c++) = kron_vec(ba.basis.col(i), bb.basis.col(j));
      m.blocks.push_back(std::move(blk));
    }
  auto node = std::make_shared<RepNode>();
  node->op = RepNode::Op::pair;
  node->product_pair = true;
  node->left = a->rep;
  node->right = b->rep;
  node->left_def_dim = da;
  node->right_def_dim = db;
  m.rep = node;
  finalize_model(m);
  return std::make_shared<Model>(std::move(m));
}

ModelPtr build_model(const ModelSpec& spec) {
  Model base;
  if (spec.kind == "torus") {
    base = build_torus(spec);
  } else if (spec.kind == "sl_n_real") {
    base = build_sl(spec);
  } else if (spec.kind == "su_p_q") {
    base = build_su(spec);
  } else if (spec.kind == "custom") {
    base = build_custom(spec);
  } else if (spec.kind == "product") {
    if (spec.factors.size() < 2) fail(Errc::degenerate_spec, "product: needs >= 2 factors");
    ModelPtr acc = build_model(spec.factors[0]);
    for (std::size_t i = 1; i < spec.factors.size(); ++i)
      acc = product_model(acc, build_model(spec.factors[i]));
    Model copy = *acc;
    base = std::move(copy);
  } else {
    fail(Errc::degenerate_spec, "unknown model kind '" + spec.kind + "'");
  }
  base.dim_cap = spec.dim_cap;
  if (spec.chamber_override) base.chamber = *spec.chamber_override;
  finalize_model(base);
  ModelPtr m = std::make_shared<Model>(std::move(base));
  for (const auto& f : spec.functors) m = derived_model(m, f);
  return m;
}

Diagnostics validate_model(const Model& m) {
  Diagnostics d;
  auto push = [&](const std::string& name, double residual, double tol) {
    d.entries.push_back({name, residual, tol, residual <= tol});
    d.pass = d.pass && residual <= tol;
    d.max_residual = std::max(d.max_residual, residual);
  };

  double herm = 0.0;
  for (const auto& x : m.p_ops) herm = std::max(herm, herm_residual(x));
  push("HermitianResidual", herm, tols::hermitian);

  double skew = 0.0;
  for (const auto& x : m.k_ops) skew = std::max(skew, skew_residual(x));
  push("SkewHermitianResidual", skew, tols::hermitian);

  double comm = 0.0;
  for (std::size_t i = 0; i < m.a_indices.size(); ++i)
    for (std::size_t j = i + 1; j < m.a_indices.size(); ++j)
      comm = std::max(comm, comm_norm(m.p_ops[static_cast<std::size_t>(m.a_indices[i])],
                                      m.p_ops[static_cast<std::size_t>(m.a_indices[j])]));
  push("CommutingAResidual", comm, tols::commute);

  double gram = 0.0;
  for (std::size_t i = 0; i < m.p_ops_def.size(); ++i)
    for (std::size_t j = 0; j < m.p_ops_def.size(); ++j) {
      const double g = m.def_ip(m.p_ops_def[i], m.p_ops_def[j]);
      gram = std::max(gram, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  push("GramResidual", gram, tols::gram);

  // Weight blocks: the action of every frame generator on every block basis
  // vector is multiplication by the declared weight value.
  double wres = 0.0;
  std::vector<Mat> frame_on_v;
  for (const auto& f : m.frame_ops_def) {
    RVec coeffs(m.dim_p());
    for (int b = 0; b < m.dim_p(); ++b)
      coeffs[b] = m.def_ip(f, m.p_ops_def[static_cast<std::size_t>(b)]);
    frame_on_v.push_back(m.p_realize(coeffs));
  }
  for (const auto& blk : m.blocks) {
    for (int dcol = 0; dcol < m.frame.dim; ++dcol) {
      const double chi_val = exact::to_double(blk.chi[static_cast<std::size_t>(dcol)]);
      for (Eigen::Index c = 0; c < blk.basis.cols(); ++c) {
        const Vec u = blk.basis.col(c);
        wres = std::max(wres, (frame_on_v[static_cast<std::size_t>(dcol)] * u - cxd(chi_val, 0.0) * u).norm());
      }
    }
  }
  push("WeightBlockResidual", wres, tols::weight_block);

  double borth = 0.0;
  int dim_sum = 0;
  for (const auto& blk : m.blocks) {
    dim_sum += static_cast<int>(blk.basis.cols());
    Mat g = blk.basis.adjoint() * blk.basis;
    borth = std::max(borth, (g - Mat::Identity(g.rows(), g.cols())).norm());
  }
  push("BlockOrthonormalResidual", borth, tols::weight_block);
  push("BlockDimSumResidual", dim_sum == m.rep_dim ? 0.0 : 1.0, 0.5);

  double cartan = 0.0;
  auto proj_resid = [&](const Mat& c, const std::vector<Mat>& basis) {
    Mat proj = Mat::Zero(m.defining_dim, m.defining_dim);
    for (const auto& b : basis) proj += cxd(m.def_ip(c, b), 0.0) * b;
    return (c - proj).norm();
  };
  for (const auto& k : m.k_ops_def)
    for (const auto& p : m.p_ops_def)
      cartan = std::max(cartan, proj_resid(k * p - p * k, m.p_ops_def));
  for (std::size_t i = 0; i < m.p_ops_def.size(); ++i)
    for (std::size_t j = i + 1; j < m.p_ops_def.size(); ++j)
      cartan = std::max(cartan, proj_resid(m.p_ops_def[i] * m.p_ops_def[j] - m.p_ops_def[j] * m.p_ops_def[i],
                                           m.k_ops_def));
  push("CartanClosureResidual", cartan, tols::cartan);
  return d;
}

namespace {

Mat haar_so(int n, Rng& rng) {
  RMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<RMat> qr(g);
  RMat qmat = qr.householderQ();
  RMat rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (rmat(j, j) < 0) qmat.col(j) *= -1.0;
  if (qmat.determinant() < 0) qmat.col(n - 1) *= -1.0;
  return qmat.cast<cxd>();
}

Mat haar_u(int n, Rng& rng) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian();
  Eigen::HouseholderQR<Mat> qr(g);
  Mat qmat = qr.householderQ() * Mat::Identity(n, n);
  Mat rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    cxd d = rmat(j, j);
    const double a = std::abs(d);
    if (a > 1e-300) qmat.col(j) *= std::conj(d / a);
  }
  return qmat;
}

Mat sample_k_def(const Model& m, Rng& rng) {
  switch (m.kind) {
    case Kind::torus: {
      const int n = m.defining_dim;
      const std::size_t r = m.torus_weights.empty() ? 0 : m.torus_weights[0].size();
      std::vector<double> theta(r);
      for (auto& t : theta) t = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      Mat k = Mat::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        double phase = 0.0;
        for (std::size_t j = 0; j < r; ++j)
          phase += theta[j] * static_cast<double>(m.torus_weights[static_cast<std::size_t>(i)][j]);
        k(i, i) = std::polar(1.0, phase);
      }
      return k;
    }
    case Kind::sl_n_real:
      return haar_so(m.defining_dim, rng);
    case Kind::su_p_q: {
      // Infer block sizes from the defining k-basis layout: the first a-op
      // couples coordinate 0 with coordinate p.
      int p = 0;
      const Mat& a0 = m.p_ops_def[static_cast<std::size_t>(m.a_indices[0])];
      for (int j = 1; j < m.defining_dim; ++j)
        if (std::abs(a0(0, j)) > 0.5) {
          p = j;
          break;
        }
      const int q = m.defining_dim - p;
      Mat up = haar_u(p, rng);
      Mat uq = haar_u(q, rng);
      const cxd det = up.determinant() * uq.determinant();
      up.col(0) *= std::conj(det / std::abs(det));
      Mat k = Mat::Zero(m.defining_dim, m.defining_dim);
      k.block(0, 0, p, p) = up;
      k.block(p, p, q, q) = uq;
      return k;
    }
    case Kind::product: {
      Mat k = Mat::Zero(m.defining_dim, m.defining_dim);
      int off = 0;
      for (const auto& f : m.factors) {
        k.block(off, off, f->defining_dim, f->defining_dim) = sample_k_def(*f, rng);
        off += f->defining_dim;
      }
      return k;
    }
    case Kind::custom:
      fail(Errc::unsupported_kind, "custom model has no registered K-sampler");
  }
  return Mat();
}

}  // namespace

GroupElement sample_group(const Model& m, GroupPart part, double radius, std::uint64_t seed,
                          std::uint64_t stream) {
  if (radius < 0) fail(Errc::param_error, "sample_group: negative radius");
  Rng rng(seed, stream);
  GroupElement g;
  g.has_parts = true;
  Mat k = part == GroupPart::P ? Mat(Mat::Identity(m.defining_dim, m.defining_dim))
                               : sample_k_def(m, rng);
  RVec xi = RVec::Zero(m.dim_p());
  if (part != GroupPart::K && radius > 0) xi = rng.ball(m.dim_p(), radius);
  const Mat x = m.p_realize_def(xi);
  g.op_def = k * expm_hermitian(x);
  g.k_def = k;
  // op = k exp(xi) = exp(Ad_k xi) k, so the stored p-part is Ad_k(xi).
  const Mat ad = k * x * k.adjoint();
  g.p_coeffs = RVec::Zero(m.dim_p());
  for (int b = 0; b < m.dim_p(); ++b)
    g.p_coeffs[b] = m.def_ip(ad, m.p_ops_def[static_cast<std::size_t>(b)]);
  g.op = m.lift(g.op_def);
  return g;
}

double factorization_residual(const Model& m, const GroupElement& g) {
  if (!g.has_parts) return 0.0;
  const Mat rebuilt = expm_hermitian(m.p_realize_def(g.p_coeffs)) * g.k_def;
  return (rebuilt - g.op_def).norm();
}

std::vector<std::pair<RVec, Mat>> simultaneous_eigenbasis(const std::vector<Mat>& ops, double tol) {
  if (ops.empty()) return {};
  const Eigen::Index n = ops[0].rows();
  std::vector<std::pair<RVec, Mat>> spaces;
  spaces.emplace_back(RVec(0), Mat(Mat::Identity(n, n)));
  for (const auto& op : ops) {
    std::vector<std::pair<RVec, Mat>> next;
    for (auto& [vals, basis] : spaces) {
      Mat sub = basis.adjoint() * op * basis;
      Eigen::SelfAdjointEigenSolver<Mat> es(sub);
      const RVec lam = es.eigenvalues();
      Eigen::Index start = 0;
      while (start < lam.size()) {
        Eigen::Index end = start + 1;
        while (end < lam.size() && lam[end] - lam[start] < tol) ++end;
        RVec nv(vals.size() + 1);
        nv.head(vals.size()) = vals;
        nv[vals.size()] = lam.segment(start, end - start).mean();
        next.emplace_back(nv, Mat(basis * es.eigenvectors().middleCols(start, end - start)));
        start = end;
      }
    }
    spaces = std::move(next);
  }
  return spaces;
}

}  // namespace gradpoly
