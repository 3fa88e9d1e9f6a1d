#pragma once

#include "disco/scales.hpp"

namespace disco {

/// Dense vs nonzero-skipping cost model for a multi-scale kernel stack with
/// num_scales scales at step sigma and smallest kernel side W, plus measured
/// single-threaded timings for both inner loops on the same kernels.
struct ComplexityProfile {
  int num_scales = 1;
  double step = 1.0;
  int smallest_size = 1;
  int spatial = 0;
  int repeats = 0;
  // per spatial position
  double analytic_dense_macs = 0.0;   // W^2 * (1 + sigma^2 + ... + sigma^(2 Ns - 2))
  double analytic_sparse_macs = 0.0;  // Ns * W^2
  double analytic_speedup = 0.0;      // sigma^(2 Ns) / Ns
  long long discrete_dense_macs = 0;  // sum of actual kernel areas
  long long discrete_sparse_macs = 0; // sum of actual nonzero counts
  double dense_ms = 0.0;
  double sparse_ms = 0.0;
  double measured_speedup = 0.0;
};

/// The analytics take the squared step so integer-valued sigma^2 (sqrt2 sets)
/// evaluates exactly: 2^Ns / Ns comes out as an exact double.
double analytic_dense_macs(int smallest_size, double step_squared, int num_scales);
double analytic_sparse_macs(int smallest_size, int num_scales);
double analytic_speedup(double step_squared, int num_scales);

/// Runs the timing comparison on structurally-sparse multi-scale kernels
/// (each scale holds exactly W^2 nonzero taps spread over the scale's kernel
/// size). Timings are medians over `repeats` runs after one warmup; the two
/// loops produce bit-identical outputs.
ComplexityProfile run_complexity_bench(const ScaleSet& set, int spatial, int repeats,
                                       std::uint64_t seed = 42);

}  // namespace disco
