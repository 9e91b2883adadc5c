// Timing comparison of the serial reference kernels against the OpenMP
// variants, with output equality checked on every row.

#include <chrono>
#include <cstdio>

#include "gradpoly/kernels.hpp"
#include "gradpoly/rng.hpp"

using namespace gradpoly;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <class Fn>
double timed(Fn&& fn) {
  const double t0 = now_ms();
  fn();
  return now_ms() - t0;
}

Cloud random_cloud(const Model& m, int n, std::uint64_t seed) {
  Cloud cloud(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    cloud[static_cast<std::size_t>(i)] = rng.unit_cvec(m.rep_dim);
  }
  return cloud;
}

void row(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-28s %10.1f ms %10.1f ms   x%5.2f   %s\n", name, serial_ms, parallel_ms,
              parallel_ms > 0 ? serial_ms / parallel_ms : 0.0, equal ? "outputs equal" : "OUTPUTS DIFFER");
}

}  // namespace

int main() {
  ModelSpec sl2;
  sl2.kind = "sl_n_real";
  sl2.n = 2;
  const ModelPtr m2 = build_model(sl2);
  ModelSpec sl3;
  sl3.kind = "sl_n_real";
  sl3.n = 3;
  const ModelPtr m3 = build_model(sl3);
  ModelSpec tor;
  tor.kind = "torus";
  tor.weights = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const ModelPtr mt = build_model(tor);

  std::printf("%-28s %13s %13s %8s\n", "kernel", "serial", "openmp", "speedup");

  {
    const Cloud cloud = random_cloud(*m3, 200000, 7);
    std::vector<AVector> a, b;
    const double ts = timed([&] { a = map_chamber_serial(*m3, cloud); });
    const double tp = timed([&] { b = map_chamber_parallel(*m3, cloud); });
    bool eq = a.size() == b.size();
    for (std::size_t i = 0; eq && i < a.size(); ++i) eq = a[i].frame == b[i].frame;
    row("map_chamber (sl3, 200k)", ts, tp, eq);
  }
  {
    Cloud vecs = random_cloud(*mt, 20000, 11);
    FlowParams params;
    std::vector<NullResult> a, b;
    const double ts = timed([&] { a = nullcone_serial(*mt, vecs, params); });
    const double tp = timed([&] { b = nullcone_parallel(*mt, vecs, params); });
    bool eq = a.size() == b.size();
    for (std::size_t i = 0; eq && i < a.size(); ++i)
      eq = a[i].verdict == b[i].verdict && a[i].final_norm == b[i].final_norm;
    row("nullcone flow (torus, 20k)", ts, tp, eq);
  }
  {
    const Cloud pts = random_cloud(*m2, 400, 13);
    FlowParams params;
    const AVector alpha = avec_of_frame(*m2, RVec::Zero(2));
    std::vector<SsVerdict> a, b;
    const double ts = timed([&] { a = semistable_serial(*m2, pts, alpha, params, 3); });
    const double tp = timed([&] { b = semistable_parallel(*m2, pts, alpha, params, 3); });
    bool eq = a.size() == b.size();
    for (std::size_t i = 0; eq && i < a.size(); ++i)
      eq = a[i].semistable == b[i].semistable && a[i].final_value == b[i].final_value;
    row("semistable flow (sl2, 400)", ts, tp, eq);
  }
  {
    double a = 0, b = 0;
    const double ts = timed([&] { a = kostant_min_gap_serial(*m3, 100000, 5); });
    const double tp = timed([&] { b = kostant_min_gap_parallel(*m3, 100000, 5); });
    row("kostant trials (sl3, 100k)", ts, tp, a == b);
  }
  return 0;
}
