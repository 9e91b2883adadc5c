#pragma once

#include <cstdint>
#include <random>

#include "gradpoly/common.hpp"

namespace gradpoly {

// Deterministic random source.  Every sampler below is implemented on top of
// raw 64-bit draws so that results are reproducible across platforms and
// standard-library versions.  Parallel work items use Rng(seed, item_index);
// the stream index is mixed into the seed, so disjoint indices give
// independent streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);
  // Standard normal via Box-Muller (spare value cached).
  double gaussian();
  cxd cgaussian();

  RVec gaussian_vec(int dim);
  Vec cgaussian_vec(int dim);
  // Uniform on the unit sphere in R^dim.
  RVec unit_vec(int dim);
  // Uniform in the closed ball of the given radius.
  RVec ball(int dim, double radius);
  // Fubini-Study uniform point of P(V): normalized complex Gaussian.
  Vec unit_cvec(int dim);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace gradpoly
