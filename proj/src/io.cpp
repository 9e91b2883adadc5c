#include "gradpoly/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace gradpoly::io {

using exact::Rat;

json tolerances_json(const ToleranceSet& t) {
  return json{{"tol_ss", t.tol_ss},       {"tol_null", t.tol_null}, {"grad_tol", t.grad_tol},
              {"hull_tol", t.hull_tol},   {"verdict_tol", t.verdict_tol},
              {"budget", t.budget},       {"restarts", t.restarts}};
}

std::string fmt_double(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void atomic_write(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io_error, "cannot open " + tmp.string());
    out << content;
    if (!out) fail(Errc::io_error, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, "cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

std::string csv_header(std::uint64_t seed, const ToleranceSet& t) {
  std::ostringstream os;
  os << "# gradpoly " << kVersion << "\n";
  os << "# seed=" << seed << "\n";
  os << "# tol_ss=" << fmt_double(t.tol_ss) << " tol_null=" << fmt_double(t.tol_null)
     << " grad_tol=" << fmt_double(t.grad_tol) << " hull_tol=" << fmt_double(t.hull_tol)
     << " verdict_tol=" << fmt_double(t.verdict_tol) << " budget=" << t.budget
     << " restarts=" << t.restarts << "\n";
  return os.str();
}

json rat_json(const Rat& r) {
  std::ostringstream num, den;
  num << numerator(r);
  den << denominator(r);
  return json::array({num.str(), den.str()});
}

json ratvec_json(const exact::RatVec& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(rat_json(x));
  return a;
}

json ratmat_json(const exact::RatMat& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(ratvec_json(row));
  return a;
}

Rat rat_from_json(const json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_number_float()) return exact::rat_of_double(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos)
      return Rat(boost::multiprecision::cpp_int(s));
    return Rat(boost::multiprecision::cpp_int(s.substr(0, slash)),
               boost::multiprecision::cpp_int(s.substr(slash + 1)));
  }
  if (j.is_array() && j.size() == 2) {
    auto parse = [](const json& e) {
      return e.is_string() ? boost::multiprecision::cpp_int(e.get<std::string>())
                           : boost::multiprecision::cpp_int(e.get<long long>());
    };
    return Rat(parse(j[0]), parse(j[1]));
  }
  fail(Errc::io_error, "cannot parse rational from JSON");
}

exact::RatMat ratmat_from_json(const json& j) {
  exact::RatMat m;
  for (const auto& row : j) {
    exact::RatVec r;
    for (const auto& e : row) r.push_back(rat_from_json(e));
    m.push_back(std::move(r));
  }
  return m;
}

json rvec_json(const RVec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

RVec rvec_from_json(const json& j) {
  RVec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

json rmat_json(const RMat& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(rvec_json(m.row(i)));
  return a;
}

json cmat_json(const Mat& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      data.push_back(m(i, j).real());
      data.push_back(m(i, j).imag());
    }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat cmat_from_json(const json& j) {
  const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  Mat m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double re = data.at(k++).get<double>();
      const double im = data.at(k++).get<double>();
      m(i, c) = cxd(re, im);
    }
  return m;
}

}  // namespace

std::string cloud_csv(const Cloud& cloud, std::uint64_t seed, const ToleranceSet& t) {
  std::ostringstream os;
  os << csv_header(seed, t);
  if (!cloud.empty()) {
    const int n = static_cast<int>(cloud[0].size());
    for (int j = 0; j < n; ++j) os << (j ? "," : "") << "re" << j << ",im" << j;
    os << "\n";
    for (const auto& v : cloud) {
      for (int j = 0; j < n; ++j)
        os << (j ? "," : "") << fmt_double(v[j].real()) << "," << fmt_double(v[j].imag());
      os << "\n";
    }
  }
  return os.str();
}

Cloud cloud_from_csv(const std::string& text) {
  Cloud out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.find("re0") != std::string::npos) continue;  // column header
    std::vector<double> vals;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) {
      if (!tok.empty()) vals.push_back(std::stod(tok));
    }
    if (vals.empty() || vals.size() % 2 != 0) continue;
    Vec v(static_cast<Eigen::Index>(vals.size() / 2));
    for (std::size_t j = 0; j < vals.size() / 2; ++j)
      v[static_cast<Eigen::Index>(j)] = cxd(vals[2 * j], vals[2 * j + 1]);
    out.push_back(std::move(v));
  }
  return out;
}

std::string avec_csv(const RMat& rows, const std::vector<std::string>& names, std::uint64_t seed,
                     const ToleranceSet& t) {
  std::ostringstream os;
  os << csv_header(seed, t);
  for (std::size_t j = 0; j < names.size(); ++j) os << (j ? "," : "") << names[j];
  os << "\n";
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) os << (j ? "," : "") << fmt_double(rows(i, j));
    os << "\n";
  }
  return os.str();
}

std::string trail_csv(const FlowResult& r) {
  std::ostringstream os;
  os << "iteration,value\n";
  for (const auto& [it, f] : r.trail) os << it << "," << fmt_double(f) << "\n";
  return os.str();
}

json polytope_json(const Polytope& p) {
  json hs = json::array();
  for (const auto& h : p.halfspaces) hs.push_back(json{{"normal", rvec_json(h.normal)}, {"offset", h.offset}});
  return json{{"ambient", p.ambient},
              {"tol", p.tol},
              {"empty", p.empty()},
              {"vertices", rmat_json(p.vertices)},
              {"halfspaces", hs},
              {"span_point", p.empty() ? json::array() : rvec_json(p.span_point)},
              {"span_basis", p.empty() ? json::array() : rmat_json(p.span_basis)}};
}

Polytope polytope_from_json(const json& j) {
  Polytope p;
  p.ambient = j.at("ambient").get<int>();
  p.tol = j.at("tol").get<double>();
  p.empty_flag = j.at("empty").get<bool>();
  if (p.empty_flag) return p;
  const auto& verts = j.at("vertices");
  p.vertices = RMat(static_cast<Eigen::Index>(verts.size()), p.ambient);
  for (std::size_t i = 0; i < verts.size(); ++i)
    p.vertices.row(static_cast<Eigen::Index>(i)) = rvec_from_json(verts[i]).transpose();
  for (const auto& h : j.at("halfspaces"))
    p.halfspaces.push_back({rvec_from_json(h.at("normal")), h.at("offset").get<double>()});
  p.span_point = rvec_from_json(j.at("span_point"));
  const auto& sb = j.at("span_basis");
  p.span_basis = RMat(static_cast<Eigen::Index>(sb.size()), p.ambient);
  for (std::size_t i = 0; i < sb.size(); ++i)
    p.span_basis.row(static_cast<Eigen::Index>(i)) = rvec_from_json(sb[i]).transpose();
  return p;
}

json verdict_json(const ConvexityVerdict& v) {
  json j{{"is_convex", v.is_convex}, {"probes", v.probes},   {"tol", v.tol},
         {"heuristic", v.heuristic}, {"max_gap", v.max_gap}};
  if (v.witness) {
    j["witness"] = json{{"center", rvec_json(v.witness->center)},
                        {"radius", v.witness->radius},
                        {"contact1", rvec_json(v.witness->contact1)},
                        {"contact2", rvec_json(v.witness->contact2)}};
  }
  return j;
}

json flow_json(const FlowResult& r) {
  return json{{"final_value", r.final_value},
              {"iterations", r.iterations},
              {"status", flow_status_name(r.status)}};
}

json ss_json(const SsVerdict& v) {
  return json{{"semistable", v.semistable},
              {"final_value", v.final_value},
              {"budget_used", v.budget},
              {"status", flow_status_name(v.status)}};
}

json null_json(const NullResult& r) {
  return json{{"verdict", null_verdict_name(r.verdict)},
              {"final_norm", r.final_norm},
              {"final_mu_norm", r.final_mu_norm},
              {"iterations", r.iterations}};
}

json diagnostics_json(const Diagnostics& d) {
  json entries = json::array();
  for (const auto& e : d.entries)
    entries.push_back(json{{"name", e.name}, {"residual", e.residual}, {"tol", e.tol}, {"pass", e.pass}});
  return json{{"pass", d.pass}, {"max_residual", d.max_residual}, {"entries", entries}};
}

json stratum_json(const StratumType& s) {
  return json{{"support", s.support},
              {"isotropy", ratmat_json(s.isotropy)},
              {"codim", s.codim},
              {"span_point", ratvec_json(s.span_point)},
              {"span_dirs", ratmat_json(s.span_dirs)},
              {"n_supports", s.n_supports}};
}

json exact_poly_json(const geom::ExactPoly& p) {
  return json{{"ambient", p.ambient},
              {"dim", p.dim},
              {"vertices", ratmat_json(p.vertices)},
              {"span_point", p.empty() ? json::array() : ratvec_json(p.span_point)},
              {"span_dirs", ratmat_json(p.span_dirs)},
              {"facet_normals", ratmat_json(p.facets_n)},
              {"facet_offsets", ratvec_json(p.facets_c)}};
}

json decomposition_json(const Decomposition& d) {
  json sigma1 = json::array();
  for (const auto& s : d.sigma1) sigma1.push_back(stratum_json(s));
  json chambers = json::array();
  for (const auto& c : d.chambers) chambers.push_back(exact_poly_json(c));
  json faces = json::array();
  for (const auto& f : d.faces) faces.push_back(exact_poly_json(f));
  return json{{"P", exact_poly_json(d.P)},
              {"sigma1", sigma1},
              {"chambers", chambers},
              {"faces", faces},
              {"a_basis", ratmat_json(d.a_basis)}};
}

json facecheck_json(const FaceCheckReport& r) {
  json details = json::array();
  for (const auto& d : r.details)
    details.push_back(json{{"face", d.face}, {"q", ratvec_json(d.q)}, {"support", d.support}, {"ok", d.ok}});
  return json{{"samples", r.samples}, {"violations", r.violations}, {"details", details}};
}

json gradreport_json(const GradReport& r) {
  return json{{"samples", r.samples},
              {"max_grad_residual", r.max_grad_residual},
              {"max_kernel_residual", r.max_kernel_residual}};
}

json fixeddir_json(const FixedDirReport& r) {
  return json{{"q0", rvec_json(r.q0)},       {"distance", r.distance},
              {"xi", rvec_json(r.xi_frame)}, {"fiber_count", r.fiber_count},
              {"max_xi_z", r.max_xi_z},      {"vacuous", r.vacuous}};
}

namespace {

RepFunctor functor_from_json(const json& j) {
  const std::string tag = j.at("tag").get<std::string>();
  const int degree = j.value("degree", 1);
  if (tag == "standard") return RepFunctor::standard();
  if (tag == "dual") return RepFunctor::dual();
  if (tag == "sym") return RepFunctor::sym(degree);
  if (tag == "ext") return RepFunctor::ext(degree);
  if (tag == "tensor") return RepFunctor::tensor(degree);
  fail(Errc::io_error, "unknown functor tag '" + tag + "'");
}

json functor_to_json(const RepFunctor& f) {
  const char* tag = "standard";
  switch (f.tag) {
    case RepFunctor::Tag::standard: tag = "standard"; break;
    case RepFunctor::Tag::dual: tag = "dual"; break;
    case RepFunctor::Tag::sym: tag = "sym"; break;
    case RepFunctor::Tag::ext: tag = "ext"; break;
    case RepFunctor::Tag::tensor: tag = "tensor"; break;
  }
  return json{{"tag", tag}, {"degree", f.degree}};
}

}  // namespace

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.kind = j.at("kind").get<std::string>();
  const json params = j.value("params", json::object());
  if (spec.kind == "torus") {
    for (const auto& row : params.at("weights")) {
      std::vector<long long> w;
      for (const auto& e : row) w.push_back(e.get<long long>());
      spec.weights.push_back(std::move(w));
    }
  } else if (spec.kind == "sl_n_real") {
    spec.n = params.at("n").get<int>();
  } else if (spec.kind == "su_p_q") {
    spec.p = params.at("p").get<int>();
    spec.q = params.at("q").get<int>();
  } else if (spec.kind == "product") {
    for (const auto& f : params.at("factors")) spec.factors.push_back(spec_from_json(f));
  } else if (spec.kind == "custom") {
    auto c = std::make_shared<ModelSpec::Custom>();
    c->rep_dim = params.at("rep_dim").get<int>();
    c->ip_scale = params.value("ip_scale", 1.0);
    for (const auto& op : params.at("p_ops")) c->p_ops.push_back(cmat_from_json(op));
    for (const auto& op : params.value("k_ops", json::array())) c->k_ops.push_back(cmat_from_json(op));
    for (const auto& idx : params.at("a_indices")) c->a_indices.push_back(idx.get<int>());
    if (params.contains("chamber")) c->chamber = ratmat_from_json(params.at("chamber"));
    spec.custom = std::move(c);
  }
  if (j.contains("functors"))
    for (const auto& f : j.at("functors")) spec.functors.push_back(functor_from_json(f));
  if (j.contains("chamber")) spec.chamber_override = ratmat_from_json(j.at("chamber"));
  spec.seed = j.value("seed", 0ULL);
  spec.dim_cap = j.value("dim_cap", 2000);
  return spec;
}

json spec_to_json(const ModelSpec& spec) {
  json params = json::object();
  if (spec.kind == "torus") {
    json w = json::array();
    for (const auto& row : spec.weights) w.push_back(row);
    params["weights"] = w;
  } else if (spec.kind == "sl_n_real") {
    params["n"] = spec.n;
  } else if (spec.kind == "su_p_q") {
    params["p"] = spec.p;
    params["q"] = spec.q;
  } else if (spec.kind == "product") {
    json f = json::array();
    for (const auto& sub : spec.factors) f.push_back(spec_to_json(sub));
    params["factors"] = f;
  } else if (spec.kind == "custom" && spec.custom) {
    params["rep_dim"] = spec.custom->rep_dim;
    params["ip_scale"] = spec.custom->ip_scale;
    json pops = json::array();
    for (const auto& op : spec.custom->p_ops) pops.push_back(cmat_json(op));
    params["p_ops"] = pops;
    json kops = json::array();
    for (const auto& op : spec.custom->k_ops) kops.push_back(cmat_json(op));
    params["k_ops"] = kops;
    params["a_indices"] = spec.custom->a_indices;
    if (!spec.custom->chamber.empty()) params["chamber"] = ratmat_json(spec.custom->chamber);
  }
  json j{{"kind", spec.kind}, {"params", params}, {"seed", spec.seed}, {"dim_cap", spec.dim_cap}};
  if (!spec.functors.empty()) {
    json fs = json::array();
    for (const auto& f : spec.functors) fs.push_back(functor_to_json(f));
    j["functors"] = fs;
  }
  if (spec.chamber_override) j["chamber"] = ratmat_json(*spec.chamber_override);
  return j;
}

json model_to_json(const Model& m, const ModelSpec& origin) {
  json j = spec_to_json(origin);
  j["name"] = m.name;
  j["rep_dim"] = m.rep_dim;
  j["dim_p"] = m.dim_p();
  j["dim_a"] = m.dim_a();
  j["frame_names"] = m.frame.names;
  json pops = json::array();
  for (const auto& op : m.p_ops) pops.push_back(cmat_json(op));
  j["p_ops"] = pops;
  json kops = json::array();
  for (const auto& op : m.k_ops) kops.push_back(cmat_json(op));
  j["k_ops"] = kops;
  json blocks = json::array();
  for (const auto& blk : m.blocks)
    blocks.push_back(json{{"chi", ratvec_json(blk.chi)}, {"basis", cmat_json(blk.basis)}});
  j["weight_blocks"] = blocks;
  j["chamber_rows"] = ratmat_json(m.chamber);
  j["gram"] = ratmat_json(m.frame.gram);
  return j;
}

ModelSpec spec_from_file(const fs::path& path) {
  return spec_from_json(json::parse(read_file(path)));
}

json manifest(const std::string& command, const std::vector<std::string>& argv, std::uint64_t seed,
              const ToleranceSet& t, const std::vector<std::string>& outputs) {
  return json{{"command", command},
              {"argv", argv},
              {"seed", seed},
              {"versions", json{{"gradpoly", kVersion}, {"eigen", EIGEN_WORLD_VERSION * 10000 +
                                                                      EIGEN_MAJOR_VERSION * 100 +
                                                                      EIGEN_MINOR_VERSION}}},
              {"tolerances", tolerances_json(t)},
              {"outputs", outputs}};
}

Plot2D plot_2d(const std::vector<Polytope>& polys, const RMat& points,
               const std::vector<std::string>& point_labels, const std::vector<Halfspace>& walls,
               int axis_x, int axis_y) {
  if (axis_x == axis_y || axis_x < 0) fail(Errc::plane_degenerate, "plot: invalid plane axes");
  auto coord = [&](const RVec& v, int axis) {
    if (axis < 0) return 0.0;
    if (axis >= v.size()) fail(Errc::plane_degenerate, "plot: axis out of range");
    return v[axis];
  };
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  bool first = true;
  auto expand = [&](double x, double y) {
    if (first) {
      lo_x = hi_x = x;
      lo_y = hi_y = y;
      first = false;
    } else {
      lo_x = std::min(lo_x, x);
      hi_x = std::max(hi_x, x);
      lo_y = std::min(lo_y, y);
      hi_y = std::max(hi_y, y);
    }
  };
  for (const auto& p : polys)
    for (Eigen::Index i = 0; i < p.vertices.rows(); ++i)
      expand(coord(p.vertices.row(i), axis_x), coord(p.vertices.row(i), axis_y));
  for (Eigen::Index i = 0; i < points.rows(); ++i)
    expand(coord(points.row(i), axis_x), coord(points.row(i), axis_y));
  if (first) expand(0, 0);
  const double pad = std::max({(hi_x - lo_x) * 0.1, (hi_y - lo_y) * 0.1, 0.5});
  lo_x -= pad;
  hi_x += pad;
  lo_y -= pad;
  hi_y += pad;
  const double w = 480.0;
  const double sx = w / (hi_x - lo_x);
  const double sy = w / (hi_y - lo_y);
  const double s = std::min(sx, sy);
  auto px = [&](double x) { return (x - lo_x) * s; };
  auto py = [&](double y) { return (hi_y - y) * s; };

  std::ostringstream svg, csv;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt_double((hi_x - lo_x) * s)
      << " " << fmt_double((hi_y - lo_y) * s) << "\">\n";
  csv << "kind,label,x,y\n";

  for (const auto& h : walls) {
    // Boundary line of the wall within the bounding box.
    const double nx = coord(h.normal, axis_x);
    const double ny = coord(h.normal, axis_y);
    const double nn = std::hypot(nx, ny);
    if (nn < 1e-14) continue;
    const double cx = h.offset * nx / (nn * nn);
    const double cy = h.offset * ny / (nn * nn);
    const double dx = -ny / nn, dy = nx / nn;
    const double t = 2.0 * (hi_x - lo_x + hi_y - lo_y);
    svg << "  <line x1=\"" << fmt_double(px(cx - t * dx)) << "\" y1=\"" << fmt_double(py(cy - t * dy))
        << "\" x2=\"" << fmt_double(px(cx + t * dx)) << "\" y2=\"" << fmt_double(py(cy + t * dy))
        << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
    csv << "wall,," << fmt_double(cx) << "," << fmt_double(cy) << "\n";
  }
  std::size_t pi = 0;
  for (const auto& p : polys) {
    if (p.empty()) continue;
    if (p.vertices.rows() == 1) {
      const double x = coord(p.vertices.row(0), axis_x);
      const double y = coord(p.vertices.row(0), axis_y);
      svg << "  <circle cx=\"" << fmt_double(px(x)) << "\" cy=\"" << fmt_double(py(y))
          << "\" r=\"4\" fill=\"#1f77b4\"/>\n";
      csv << "polytope" << pi << ",," << fmt_double(x) << "," << fmt_double(y) << "\n";
    } else {
      svg << "  <polygon points=\"";
      for (Eigen::Index i = 0; i < p.vertices.rows(); ++i) {
        const double x = coord(p.vertices.row(i), axis_x);
        const double y = coord(p.vertices.row(i), axis_y);
        svg << fmt_double(px(x)) << "," << fmt_double(py(y)) << " ";
        csv << "polytope" << pi << ",v" << i << "," << fmt_double(x) << "," << fmt_double(y) << "\n";
      }
      svg << "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>\n";
    }
    ++pi;
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = coord(points.row(i), axis_x);
    const double y = coord(points.row(i), axis_y);
    const std::string label =
        static_cast<std::size_t>(i) < point_labels.size() ? point_labels[static_cast<std::size_t>(i)] : "";
    svg << "  <circle cx=\"" << fmt_double(px(x)) << "\" cy=\"" << fmt_double(py(y))
        << "\" r=\"3\" fill=\"#d62728\"/>\n";
    if (!label.empty())
      svg << "  <text x=\"" << fmt_double(px(x) + 5) << "\" y=\"" << fmt_double(py(y) - 5)
          << "\" font-size=\"11\">" << label << "</text>\n";
    csv << "point," << label << "," << fmt_double(x) << "," << fmt_double(y) << "\n";
  }
  svg << "</svg>\n";
  return {svg.str(), csv.str()};
}

}  // namespace gradpoly::io
