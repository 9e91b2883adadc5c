#include "gradpoly/cli.hpp"

#include <iostream>

#include <CLI11.hpp>

#include "gradpoly/io.hpp"
#include "gradpoly/kernels.hpp"
#include "gradpoly/linalg.hpp"
#include "gradpoly/rng.hpp"

namespace gradpoly::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr int kOk = 0;
constexpr int kValidationFailure = 2;
constexpr int kBudgetExhausted = 3;
constexpr int kUsageError = 4;

Vec parse_cvec(const std::string& text) {
  std::vector<cxd> vals;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.empty()) continue;
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      vals.emplace_back(std::stod(tok), 0.0);
    } else {
      vals.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
    }
  }
  if (vals.empty()) fail(Errc::usage_error, "empty vector literal");
  Vec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

RVec parse_rvec(const std::string& text) {
  std::vector<double> vals;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) vals.push_back(std::stod(tok));
  }
  if (vals.empty()) fail(Errc::usage_error, "empty coordinate literal");
  RVec v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

YSpec parse_yspec(const std::string& text, int samples, std::uint64_t seed) {
  YSpec spec;
  spec.budget = samples;
  spec.seed = seed;
  if (text == "whole") {
    spec.kind = YSpec::YKind::whole_space;
  } else if (text.rfind("orbit:", 0) == 0) {
    spec.kind = YSpec::YKind::orbit_closure;
    spec.seeds.push_back(parse_cvec(text.substr(6)));
  } else if (text.rfind("cloud:", 0) == 0) {
    spec.kind = YSpec::YKind::cloud;
    spec.cloud_points = io::cloud_from_csv(io::read_file(text.substr(6)));
  } else {
    fail(Errc::usage_error, "--y expects whole | orbit:<point> | cloud:<file>");
  }
  return spec;
}

struct BetaSpec {
  int p = 1, q = 1;
  RVec direction;
};

BetaSpec parse_beta(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) fail(Errc::usage_error, "--beta expects p/q:<direction>");
  const std::string ratio = text.substr(0, colon);
  const auto slash = ratio.find('/');
  BetaSpec b;
  if (slash == std::string::npos) {
    b.p = std::stoi(ratio);
    b.q = 1;
  } else {
    b.p = std::stoi(ratio.substr(0, slash));
    b.q = std::stoi(ratio.substr(slash + 1));
  }
  b.direction = parse_rvec(text.substr(colon + 1));
  return b;
}

ModelPtr load_model_file(const std::string& path) {
  return build_model(io::spec_from_file(path));
}

struct OutputSink {
  fs::path dir;
  std::vector<std::string> written;

  void write(const std::string& name, const std::string& content) {
    io::atomic_write(dir / name, content);
    written.push_back(name);
  }
  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
  void finish(const std::string& command, const std::vector<std::string>& argv, std::uint64_t seed,
              const io::ToleranceSet& t) {
    io::atomic_write(dir / "manifest.json",
                     io::manifest(command, argv, seed, t, written).dump(2) + "\n");
  }
};

int map_error_code(const Error& e) {
  switch (e.code()) {
    case Errc::usage_error:
    case Errc::io_error:
    case Errc::param_error:
    case Errc::plane_degenerate:
      return kUsageError;
    default:
      return kValidationFailure;
  }
}

}  // namespace

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"gradient-map polytopes toolkit"};
  app.require_subcommand(1);

  // Shared option storage.
  std::string model_path, spec_path, y_text = "whole", out_dir = "gradpoly-out";
  std::string point_text, alpha_text, vector_text, beta_text, orbit_model_path, orbit_base_text;
  std::string functor_text, cloud_path, in_path, plane_text = "0,1";
  int samples = 20000, probes = 1000, trials = 10000, workers = 0, restarts = 8;
  std::uint64_t seed = 1;
  long long budget = 100000;
  double tol_ss = tols::ss, tol_null = tols::null, hull_tol = tols::polytope, verdict_tol = 2e-3;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "deterministic seed");
    cmd->add_option("--workers", workers, "worker threads (0 = all)");
  };

  auto* model_cmd = app.add_subcommand("model", "build, validate, derive models");
  auto* model_build = model_cmd->add_subcommand("build", "build and persist a model");
  model_build->add_option("spec", spec_path, "model spec JSON")->required();
  add_common(model_build);
  auto* model_validate = model_cmd->add_subcommand("validate", "validate a model spec");
  model_validate->add_option("spec", spec_path, "model spec JSON")->required();
  add_common(model_validate);
  auto* model_derive = model_cmd->add_subcommand("derive", "apply a representation functor");
  model_derive->add_option("spec", spec_path)->required();
  model_derive->add_option("--functor", functor_text, "dual | sym:k | ext:k | tensor:k")->required();
  add_common(model_derive);

  auto* aplus = app.add_subcommand("aplus", "sampled chamber image and its polytope");
  aplus->add_option("--model", model_path)->required();
  aplus->add_option("--y", y_text);
  aplus->add_option("--samples", samples);
  aplus->add_option("--hull-tol", hull_tol);
  aplus->add_option("--verdict-tol", verdict_tol);
  aplus->add_option("--probes", probes);
  add_common(aplus);

  auto* strata_cmd = app.add_subcommand("strata", "exact orbit-type data");
  auto* strata_enum = strata_cmd->add_subcommand("enumerate", "strata classes");
  strata_enum->add_option("--model", model_path)->required();
  add_common(strata_enum);
  auto* strata_dec = strata_cmd->add_subcommand("decompose", "P0 decomposition");
  strata_dec->add_option("--model", model_path)->required();
  add_common(strata_dec);
  auto* strata_face = strata_cmd->add_subcommand("facecheck", "face isotropy check");
  strata_face->add_option("--model", model_path)->required();
  strata_face->add_option("--samples", samples);
  add_common(strata_face);

  auto* convexity = app.add_subcommand("convexity", "union-convexity verdict on a cloud");
  convexity->add_option("--cloud", cloud_path, "avec CSV file");
  convexity->add_option("--model", model_path);
  convexity->add_option("--y", y_text);
  convexity->add_option("--samples", samples);
  convexity->add_option("--tol", verdict_tol);
  convexity->add_option("--probes", probes);
  add_common(convexity);

  auto* semistable = app.add_subcommand("semistable", "semistability of a point");
  semistable->add_option("--model", model_path)->required();
  semistable->add_option("--point", point_text)->required();
  semistable->add_option("--alpha", alpha_text);
  semistable->add_option("--beta", beta_text, "p/q:<direction> for the shifted route");
  semistable->add_option("--orbit-model", orbit_model_path);
  semistable->add_option("--orbit-base", orbit_base_text);
  semistable->add_option("--tol-ss", tol_ss);
  semistable->add_option("--budget", budget);
  semistable->add_option("--restarts", restarts);
  add_common(semistable);

  auto* nullcone = app.add_subcommand("nullcone", "null-cone membership of a vector");
  nullcone->add_option("--model", model_path)->required();
  nullcone->add_option("--vector", vector_text)->required();
  nullcone->add_option("--budget", budget);
  nullcone->add_option("--tol-null", tol_null);
  nullcone->add_option("--tol-ss", tol_ss);
  add_common(nullcone);

  auto* flow_cmd = app.add_subcommand("flow", "norm-square gradient flow");
  flow_cmd->add_option("--model", model_path)->required();
  flow_cmd->add_option("--point", point_text)->required();
  flow_cmd->add_option("--alpha", alpha_text);
  flow_cmd->add_option("--tol-ss", tol_ss);
  flow_cmd->add_option("--budget", budget);
  flow_cmd->add_option("--restarts", restarts);
  add_common(flow_cmd);

  auto* props = app.add_subcommand("props", "property suites");
  auto* props_kostant = props->add_subcommand("kostant", "Kostant inequality trials");
  props_kostant->add_option("--model", model_path)->required();
  props_kostant->add_option("--trials", trials);
  add_common(props_kostant);
  auto* props_grad = props->add_subcommand("gradcheck", "gradient identity finite differences");
  props_grad->add_option("--model", model_path)->required();
  props_grad->add_option("--samples", samples);
  add_common(props_grad);
  auto* props_segre = props->add_subcommand("segre", "Segre additivity residuals");
  props_segre->add_option("--model", model_path)->required();
  props_segre->add_option("--samples", samples);
  add_common(props_segre);

  auto* plot = app.add_subcommand("plot", "SVG + CSV rendering of polytopes and clouds");
  plot->add_option("--in", in_path, "aplus.json or avec CSV")->required();
  plot->add_option("--model", model_path, "optional: draws weight points and chamber walls");
  plot->add_option("--plane", plane_text, "two frame-coordinate axes, e.g. 0,1");
  add_common(plot);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      std::cout << app.help();
      return kOk;
    }
    std::cerr << e.what() << "\n";
    return kUsageError;
  }

  if (workers > 0) set_default_workers(workers);
  io::ToleranceSet tset;
  tset.tol_ss = tol_ss;
  tset.tol_null = tol_null;
  tset.hull_tol = hull_tol;
  tset.verdict_tol = verdict_tol;
  tset.budget = budget;
  tset.restarts = restarts;

  OutputSink sink;
  sink.dir = out_dir;

  try {
    if (model_build->parsed() || model_validate->parsed() || model_derive->parsed()) {
      ModelSpec spec = io::spec_from_file(spec_path);
      if (model_derive->parsed()) {
        const auto colon = functor_text.find(':');
        const std::string tag = functor_text.substr(0, colon);
        const int deg = colon == std::string::npos ? 1 : std::stoi(functor_text.substr(colon + 1));
        RepFunctor f;
        if (tag == "dual") f = RepFunctor::dual();
        else if (tag == "sym") f = RepFunctor::sym(deg);
        else if (tag == "ext") f = RepFunctor::ext(deg);
        else if (tag == "tensor") f = RepFunctor::tensor(deg);
        else fail(Errc::usage_error, "unknown functor '" + tag + "'");
        spec.functors.push_back(f);
      }
      const ModelPtr m = build_model(spec);
      const Diagnostics diag = validate_model(*m);
      for (const auto& e : diag.entries)
        std::cout << (e.pass ? "pass " : "FAIL ") << e.name << " residual=" << io::fmt_double(e.residual)
                  << " tol=" << io::fmt_double(e.tol) << "\n";
      if (model_validate->parsed()) {
        sink.write_json("diagnostics.json", io::diagnostics_json(diag));
      } else {
        sink.write_json("model.json", io::model_to_json(*m, spec));
        sink.write_json("diagnostics.json", io::diagnostics_json(diag));
      }
      sink.finish("model", args, spec.seed, tset);
      return diag.pass ? kOk : kValidationFailure;
    }

    if (aplus->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      const YSpec y = parse_yspec(y_text, samples, seed);
      const Cloud cloud = orbit_sample(*m, y);
      const APlusResult res = compute_A_plus(*m, y, hull_tol, verdict_tol, probes);
      sink.write("cloud.csv", io::cloud_csv(cloud, seed, tset));
      sink.write("avecs.csv", io::avec_csv(res.avecs, m->frame.names, seed, tset));
      sink.write_json("aplus.json", io::polytope_json(res.a_plus));
      sink.write_json("verdict.json", io::verdict_json(res.verdict));
      sink.finish("aplus", args, seed, tset);
      std::cout << "A+ vertices:\n";
      for (Eigen::Index i = 0; i < res.a_plus.vertices.rows(); ++i) {
        for (Eigen::Index j = 0; j < res.a_plus.vertices.cols(); ++j)
          std::cout << (j ? "," : "  ") << io::fmt_double(res.a_plus.vertices(i, j));
        std::cout << "\n";
      }
      std::cout << "convex: " << (res.verdict.is_convex ? "yes" : "no") << "\n";
      return kOk;
    }

    if (strata_enum->parsed() || strata_dec->parsed() || strata_face->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      if (strata_enum->parsed()) {
        json arr = json::array();
        for (const auto& s : enumerate_strata(*m)) arr.push_back(io::stratum_json(s));
        sink.write_json("strata.json", arr);
        sink.finish("strata", args, seed, tset);
        return kOk;
      }
      const Decomposition dec = decompose_P0(*m);
      if (strata_dec->parsed()) {
        sink.write_json("decomposition.json", io::decomposition_json(dec));
        sink.finish("strata", args, seed, tset);
        return kOk;
      }
      const FaceCheckReport rep = face_isotropy_check(*m, dec, samples, seed);
      sink.write_json("facecheck.json", io::facecheck_json(rep));
      sink.finish("strata", args, seed, tset);
      std::cout << "samples=" << rep.samples << " violations=" << rep.violations << "\n";
      return rep.violations == 0 ? kOk : kValidationFailure;
    }

    if (convexity->parsed()) {
      RMat cloud;
      if (!cloud_path.empty()) {
        // Reuse the complex-cloud reader; real frame CSVs parse as pairs.
        const std::string text = io::read_file(cloud_path);
        std::vector<RVec> rows;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#') continue;
          bool numeric = line.find_first_not_of("0123456789+-.eE, \t") == std::string::npos;
          if (!numeric) continue;
          rows.push_back(parse_rvec(line));
        }
        if (rows.empty()) fail(Errc::empty_cloud, "convexity: no rows in " + cloud_path);
        cloud = RMat(static_cast<Eigen::Index>(rows.size()), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) cloud.row(static_cast<Eigen::Index>(i)) = rows[i];
      } else {
        const ModelPtr m = load_model_file(model_path);
        const YSpec y = parse_yspec(y_text, samples, seed);
        cloud = compute_A_plus(*m, y, hull_tol, verdict_tol, probes).avecs;
      }
      const ConvexityVerdict v = union_convexity(cloud, verdict_tol, probes);
      sink.write_json("verdict.json", io::verdict_json(v));
      sink.finish("convexity", args, seed, tset);
      std::cout << "convex: " << (v.is_convex ? "yes" : "no") << " max_gap=" << io::fmt_double(v.max_gap)
                << "\n";
      return kOk;
    }

    if (semistable->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      const ProjPoint z = make_proj(*m, parse_cvec(point_text));
      FlowParams params;
      params.tol_ss = tol_ss;
      params.budget = budget;
      params.restarts = restarts;
      AVector alpha = avec_of_frame(*m, alpha_text.empty() ? RVec(RVec::Zero(m->frame.dim))
                                                           : parse_rvec(alpha_text));
      SsVerdict v;
      if (!beta_text.empty()) {
        const BetaSpec b = parse_beta(beta_text);
        if (orbit_model_path.empty() || orbit_base_text.empty())
          fail(Errc::usage_error, "shifted route needs --orbit-model and --orbit-base");
        Shift shift;
        shift.p = b.p;
        shift.q = b.q;
        shift.orb.orbit_model = load_model_file(orbit_model_path);
        shift.orb.base = make_proj(*shift.orb.orbit_model, parse_cvec(orbit_base_text));
        shift.orb.target = avec_of_frame(*shift.orb.orbit_model, b.direction);
        shift.orb.dual_sign = true;
        v = semistable_test(*m, z, alpha, params, seed, 0, &shift);
      } else {
        v = semistable_test(*m, z, alpha, params, seed);
      }
      sink.write_json("verdict.json", io::ss_json(v));
      sink.finish("semistable", args, seed, tset);
      std::cout << (v.semistable ? "semistable" : "not semistable at budget") << " floor="
                << io::fmt_double(v.final_value) << "\n";
      return v.status == FlowStatus::budget_exhausted && !v.semistable ? kBudgetExhausted : kOk;
    }

    if (nullcone->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      const Vec v = parse_cvec(vector_text);
      FlowParams params;
      params.tol_ss = tol_ss;
      params.tol_null = tol_null;
      params.budget = budget;
      const NullResult r = nullcone_numeric(*m, v, params);
      json j = io::null_json(r);
      if (m->kind == Kind::torus) j["exact_null"] = nullcone_torus_exact(*m, v);
      sink.write_json("verdict.json", j);
      sink.finish("nullcone", args, seed, tset);
      std::cout << "numeric: " << null_verdict_name(r.verdict);
      if (m->kind == Kind::torus)
        std::cout << "  exact: " << (j["exact_null"].get<bool>() ? "null" : "not null");
      std::cout << "\n";
      return r.verdict == NullVerdict::inconclusive ? kBudgetExhausted : kOk;
    }

    if (flow_cmd->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      const ProjPoint z = make_proj(*m, parse_cvec(point_text));
      FlowParams params;
      params.tol_ss = tol_ss;
      params.budget = budget;
      params.restarts = restarts;
      const AVector alpha = avec_of_frame(
          *m, alpha_text.empty() ? RVec(RVec::Zero(m->frame.dim)) : parse_rvec(alpha_text));
      const FlowResult r = norm_square_flow(*m, z, alpha, params, seed);
      sink.write_json("flow.json", io::flow_json(r));
      sink.write("trajectory.csv", io::trail_csv(r));
      sink.finish("flow", args, seed, tset);
      std::cout << flow_status_name(r.status) << " final=" << io::fmt_double(r.final_value) << "\n";
      return r.status == FlowStatus::budget_exhausted ? kBudgetExhausted : kOk;
    }

    if (props_kostant->parsed() || props_grad->parsed() || props_segre->parsed()) {
      const ModelPtr m = load_model_file(model_path);
      json j;
      std::string name;
      bool pass = true;
      if (props_kostant->parsed()) {
        const double gap = kostant_min_gap(*m, trials, seed);
        pass = gap > -1e-9;
        j = json{{"trials", trials}, {"min_gap", gap}, {"pass", pass}};
        name = "kostant.json";
      } else if (props_grad->parsed()) {
        const GradReport rep = grad_consistency(*m, samples, seed);
        pass = rep.max_grad_residual < 1e-5;
        j = io::gradreport_json(rep);
        j["pass"] = pass;
        name = "gradcheck.json";
      } else {
        const ModelPtr mm = tensor_model(m, m);
        double max_res = 0.0;
        for (int i = 0; i < samples; ++i) {
          Rng rng(seed, static_cast<std::uint64_t>(i));
          const Vec a = rng.unit_cvec(m->rep_dim);
          const Vec b = rng.unit_cvec(m->rep_dim);
          const PElement lhs = mu_P(*mm, make_proj(*mm, kron_vec(a, b)));
          const PElement r1 = mu_P(*m, make_proj(*m, a));
          const PElement r2 = mu_P(*m, make_proj(*m, b));
          max_res = std::max(max_res, (lhs.coeffs - r1.coeffs - r2.coeffs).norm());
        }
        pass = max_res < 1e-10;
        j = json{{"samples", samples}, {"max_residual", max_res}, {"pass", pass}};
        name = "segre.json";
      }
      sink.write_json(name, j);
      sink.finish("props", args, seed, tset);
      std::cout << j.dump() << "\n";
      return pass ? kOk : kValidationFailure;
    }

    if (plot->parsed()) {
      std::vector<Polytope> polys;
      RMat points(0, 0);
      if (in_path.size() > 5 && in_path.substr(in_path.size() - 5) == ".json") {
        polys.push_back(io::polytope_from_json(json::parse(io::read_file(in_path))));
      } else {
        const std::string text = io::read_file(in_path);
        std::vector<RVec> rows;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
          if (line.empty() || line[0] == '#') continue;
          if (line.find_first_of("0123456789") == std::string::npos) continue;
          if (line.find_first_not_of("0123456789+-.eE,") != std::string::npos) continue;
          rows.push_back(parse_rvec(line));
        }
        if (rows.empty()) fail(Errc::empty_cloud, "plot: no rows in " + in_path);
        points = RMat(static_cast<Eigen::Index>(rows.size()), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) points.row(static_cast<Eigen::Index>(i)) = rows[i];
      }
      std::vector<Halfspace> walls;
      std::vector<std::string> labels;
      RMat weight_pts(0, 0);
      if (!model_path.empty()) {
        const ModelPtr m = load_model_file(model_path);
        walls = chamber_halfspaces(*m);
        const auto fpi = fixed_point_images(*m);
        weight_pts = RMat(static_cast<Eigen::Index>(fpi.size()), m->frame.dim);
        for (std::size_t i = 0; i < fpi.size(); ++i) {
          for (int j = 0; j < m->frame.dim; ++j)
            weight_pts(static_cast<Eigen::Index>(i), j) = exact::to_double(fpi[i][static_cast<std::size_t>(j)]);
          labels.push_back("w" + std::to_string(i));
        }
      }
      RMat all_points;
      if (points.rows() > 0 && weight_pts.rows() > 0) {
        all_points = RMat(points.rows() + weight_pts.rows(), points.cols());
        all_points.topRows(points.rows()) = points;
        all_points.bottomRows(weight_pts.rows()) = weight_pts;
        std::vector<std::string> all_labels(static_cast<std::size_t>(points.rows()));
        for (const auto& l : labels) all_labels.push_back(l);
        labels = std::move(all_labels);
      } else if (points.rows() > 0) {
        all_points = points;
        labels.assign(static_cast<std::size_t>(points.rows()), "");
      } else {
        all_points = weight_pts;
      }
      const RVec plane = parse_rvec(plane_text);
      const int ax = static_cast<int>(plane[0]);
      const int ay = plane.size() > 1 ? static_cast<int>(plane[1]) : -1;
      const io::Plot2D p2 = io::plot_2d(polys, all_points, labels, walls, ax, ay);
      sink.write("plot.svg", p2.svg);
      sink.write("plot.csv", p2.csv);
      sink.finish("plot", args, seed, tset);
      return kOk;
    }

    fail(Errc::usage_error, "no subcommand selected");
  } catch (const Error& e) {
    std::cerr << errc_name(e.code()) << ": " << e.what() << "\n";
    return map_error_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidationFailure;
  }
}

}  // namespace gradpoly::cli
