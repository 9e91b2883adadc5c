#pragma once

#include "gradpoly/flow.hpp"

namespace gradpoly {

// Batch kernels over immutable models.  Each kernel comes in a serial
// reference implementation and an OpenMP one with identical per-index work;
// outputs are bit-identical across modes and worker counts.  The dispatchers
// pick by ExecMode.

std::vector<AVector> map_chamber_serial(const Model& m, const Cloud& cloud);
std::vector<AVector> map_chamber_parallel(const Model& m, const Cloud& cloud, int workers = 0);
std::vector<AVector> map_chamber_batch(const Model& m, const Cloud& cloud,
                                       ExecMode mode = ExecMode::parallel, int workers = 0);

std::vector<NullResult> nullcone_serial(const Model& m, const Cloud& vectors,
                                        const FlowParams& params);
std::vector<NullResult> nullcone_parallel(const Model& m, const Cloud& vectors,
                                          const FlowParams& params, int workers = 0);
std::vector<NullResult> nullcone_batch(const Model& m, const Cloud& vectors,
                                       const FlowParams& params, ExecMode mode = ExecMode::parallel,
                                       int workers = 0);

std::vector<SsVerdict> semistable_serial(const Model& m, const Cloud& points, const AVector& alpha,
                                         const FlowParams& params, std::uint64_t seed);
std::vector<SsVerdict> semistable_parallel(const Model& m, const Cloud& points, const AVector& alpha,
                                           const FlowParams& params, std::uint64_t seed,
                                           int workers = 0);
std::vector<SsVerdict> semistable_batch(const Model& m, const Cloud& points, const AVector& alpha,
                                        const FlowParams& params, std::uint64_t seed,
                                        ExecMode mode = ExecMode::parallel, int workers = 0);

// Kostant inequality trials: min over random (k, q, p) of
// ||k.q - p||^2 - ||q - p||^2 with q, p chamber representatives.
double kostant_min_gap_serial(const Model& m, int trials, std::uint64_t seed);
double kostant_min_gap_parallel(const Model& m, int trials, std::uint64_t seed, int workers = 0);
double kostant_min_gap(const Model& m, int trials, std::uint64_t seed,
                       ExecMode mode = ExecMode::parallel, int workers = 0);

}  // namespace gradpoly
