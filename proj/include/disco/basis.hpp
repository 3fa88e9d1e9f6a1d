#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "disco/resample.hpp"
#include "disco/scales.hpp"

namespace disco {

enum class Provenance { Pixel, Dilated, Optimized, Interpolated };
enum class SolveMethod { NormalEquations, GradientDescent };

/// Monte-Carlo setup for the least-squares kernel solvers. The sample signals
/// are square white-noise images of side sample_size (0 picks
/// max(24, 4 * largest kernel side)). The seed is mandatory state: identical
/// configs produce bit-identical solutions.
struct SolveConfig {
  int num_samples = 4096;
  int sample_size = 0;
  std::uint64_t seed = 42;
  SolveMethod method = SolveMethod::NormalEquations;
  int gd_steps = 3000;
  double gd_rate = 0.0;  // 0 picks 1 / lambda_max of the normal matrix
  InterpMethod interp = InterpMethod::Bicubic;
  Boundary boundary = Boundary::Circular;
};

struct BasisSlot {
  Mat values;
  double scale = 1.0;
  Provenance provenance = Provenance::Pixel;
};

/// Fixed per-scale kernel dictionary psi_{s,j}: slots[j][k] is basis function
/// j at scale index k. num_functions = smallest kernel size squared.
struct MultiScaleBasis {
  ScaleSet scale_set;
  int num_functions = 0;
  std::vector<std::vector<BasisSlot>> slots;
};

/// Standard (pixel) basis: size^2 kernels, the j-th has a single 1 at
/// row-major position j.
std::vector<Mat> pixel_basis(int size);

/// Objective bookkeeping for one least-squares solve.
struct SolveTrace {
  double objective_at_solution = 0.0;
  double objective_at_zero = 0.0;
  double objective_at_init = 0.0;
  std::vector<double> gd_objectives;  // recorded every 100 steps
};

/// Minimizes E_f[ ||L[f] * psi1 - L[f * psi]||^2 + ||L[f] * psi - L[f * psi2]||^2 ]
/// over target_size x target_size kernels psi, where L downscales by `factor`
/// (realized as sample_size -> round(sample_size / factor)). The objective is
/// quadratic; NormalEquations solves it directly, GradientDescent iterates
/// from the interpolated initializer.
Mat solve_intermediate(const Mat& psi1, const Mat& psi2, int target_size, double factor,
                       const SolveConfig& cfg, SolveTrace* trace = nullptr);

/// Joint solve over all scales of the set: minimizes the summed pairwise
/// constraint residuals with the smallest-scale kernel fixed at the seed.
/// `fixed` pins additional scale indices (one kernel per function).
/// Per-function sample streams are seeded with cfg.seed ^ j.
/// Returns kernels[function][scale_index].
std::vector<std::vector<Mat>> solve_general(
    const ScaleSet& set, const std::vector<Mat>& seeds, const SolveConfig& cfg,
    const std::map<int, std::vector<Mat>>* fixed = nullptr,
    std::vector<SolveTrace>* traces = nullptr);

/// True when the set decomposes as: integer-ratio scales plus non-integer
/// scales that are integer multiples of the smallest non-integer scale whose
/// squared ratio is an integer (the sqrt2-like family).
bool disco_builder_feasible(const ScaleSet& set);

/// Pixel basis at the smallest scale, dilation at integer-ratio scales, one
/// optimized slot at the smallest non-integer scale, dilation of it above.
/// Throws std::domain_error for sets that need the joint solver.
MultiScaleBasis build_disco_basis(int smallest_size, const ScaleSet& set, const SolveConfig& cfg,
                                  std::vector<SolveTrace>* traces = nullptr);

/// Joint-solver variant for arbitrary-step sets: integer-ratio scales are
/// fixed at their exact dilations, all remaining slots are optimized together.
MultiScaleBasis build_disco_basis_general(int smallest_size, const ScaleSet& set,
                                          const SolveConfig& cfg,
                                          std::vector<SolveTrace>* traces = nullptr);

/// Continuous-solution baseline: pixel basis interpolated up to each scale's
/// kernel size with the 1/s^2 amplitude factor.
MultiScaleBasis build_interp_baseline(int smallest_size, const ScaleSet& set, InterpMethod method);

/// kappa_s = sum_j psi_{s,j} w_j, one kernel per scale.
std::vector<Mat> kernels_from_weights(const MultiScaleBasis& basis, const Vec& w);

/// Kernel-constraint residual between two basis scales (Eq.-7-style check):
/// max/mean over random signals of ||L[f] * k_small - L[f * k_large]|| /
/// ||L[f] * k_small||, with L downscaling by the scale ratio.
struct PairResidual {
  int low = 0, high = 0;
  double ratio = 1.0;
  bool integer_ratio = false;
  double max_residual = 0.0;
  double mean_residual = 0.0;
};

std::vector<PairResidual> basis_pair_residuals(const MultiScaleBasis& basis, int num_samples,
                                               std::uint64_t seed, InterpMethod interp,
                                               int sample_size = 0);

}  // namespace disco
