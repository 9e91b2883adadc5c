#include "gradpoly/rng.hpp"

#include <cmath>
#include <numbers>

#include "gradpoly/parallel.hpp"

namespace gradpoly {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : gen_(splitmix64(seed ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL))) {}

std::uint64_t Rng::next_u64() { return gen_(); }

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

cxd Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return {re, im};
}

RVec Rng::gaussian_vec(int dim) {
  RVec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gaussian();
  return v;
}

Vec Rng::cgaussian_vec(int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cgaussian();
  return v;
}

RVec Rng::unit_vec(int dim) {
  for (;;) {
    RVec v = gaussian_vec(dim);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

RVec Rng::ball(int dim, double radius) {
  RVec dir = unit_vec(dim);
  const double u = uniform();
  return dir * (radius * std::pow(u, 1.0 / static_cast<double>(dim)));
}

Vec Rng::unit_cvec(int dim) {
  for (;;) {
    Vec v = cgaussian_vec(dim);
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

namespace {
int g_workers = 0;
}

int default_workers() {
  if (g_workers > 0) return g_workers;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_default_workers(int workers) { g_workers = workers; }

}  // namespace gradpoly
