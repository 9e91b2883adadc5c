#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gradpoly {

inline constexpr const char* kVersion = "0.1.0";

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Error codes surfaced by the library.  The CLI maps them onto exit codes.
enum class Errc {
  non_compatible,
  non_commutative,
  degenerate_spec,
  dimension_overflow,
  dimension_cap,
  unsupported_kind,
  realization_mismatch,
  zero_vector,
  not_torus,
  param_error,
  empty_cloud,
  dim_mismatch,
  infeasible_fiber,
  plane_degenerate,
  io_error,
  usage_error,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

const char* errc_name(Errc code);

// Default tolerances.  Operations take explicit tolerances where the contract
// depends on them; these are the construction-time defaults.
namespace tols {
inline constexpr double hermitian = 1e-12;
inline constexpr double commute = 1e-12;
inline constexpr double gram = 1e-10;
inline constexpr double weight_block = 1e-10;
inline constexpr double cartan = 1e-10;
inline constexpr double factorization = 1e-8;
inline constexpr double chamber_flag = 1e-10;
inline constexpr double support = 1e-11;
inline constexpr double unit_norm = 1e-12;
inline constexpr double polytope = 1e-9;
inline constexpr double ss = 1e-5;      // semistability threshold on ||mu - alpha||
inline constexpr double null = 1e-6;    // null-cone norm collapse threshold
inline constexpr double grad = 1e-7;    // flow stationarity threshold
}  // namespace tols

}  // namespace gradpoly
