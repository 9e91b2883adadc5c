#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gradpoly/flow.hpp"
#include "gradpoly/strata.hpp"

namespace gradpoly::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Tolerances embedded in every numeric output artifact.
struct ToleranceSet {
  double tol_ss = tols::ss;
  double tol_null = tols::null;
  double grad_tol = tols::grad;
  double hull_tol = tols::polytope;
  double verdict_tol = 2e-3;
  long long budget = 100000;
  int restarts = 8;
};

json tolerances_json(const ToleranceSet& t);

// Shortest round-trip decimal representation.
std::string fmt_double(double x);

// Write-temp-then-rename.
void atomic_write(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

std::string cloud_csv(const Cloud& cloud, std::uint64_t seed, const ToleranceSet& t);
Cloud cloud_from_csv(const std::string& text);
std::string avec_csv(const RMat& rows, const std::vector<std::string>& names, std::uint64_t seed,
                     const ToleranceSet& t);
std::string trail_csv(const FlowResult& r);

json polytope_json(const Polytope& p);
Polytope polytope_from_json(const json& j);
json verdict_json(const ConvexityVerdict& v);
json flow_json(const FlowResult& r);
json ss_json(const SsVerdict& v);
json null_json(const NullResult& r);
json diagnostics_json(const Diagnostics& d);
json stratum_json(const StratumType& s);
json exact_poly_json(const geom::ExactPoly& p);
json decomposition_json(const Decomposition& d);
json facecheck_json(const FaceCheckReport& r);
json gradreport_json(const GradReport& r);
json fixeddir_json(const FixedDirReport& r);

ModelSpec spec_from_json(const json& j);
json spec_to_json(const ModelSpec& spec);
// Persisted model: the spec plus serialized operator matrices.
json model_to_json(const Model& m, const ModelSpec& origin);
ModelSpec spec_from_file(const fs::path& path);

json manifest(const std::string& command, const std::vector<std::string>& argv, std::uint64_t seed,
              const ToleranceSet& t, const std::vector<std::string>& outputs);

// 2-D diagnostic plot: polygon outlines, chamber walls, marked points.
// Returns the SVG and a CSV twin with identical coordinates.
struct Plot2D {
  std::string svg;
  std::string csv;
};
Plot2D plot_2d(const std::vector<Polytope>& polys, const RMat& points,
               const std::vector<std::string>& point_labels, const std::vector<Halfspace>& walls,
               int axis_x, int axis_y);

}  // namespace gradpoly::io
