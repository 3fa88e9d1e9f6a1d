#include "disco/complexity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "disco/grid.hpp"

namespace disco {

double analytic_dense_macs(int smallest_size, double step_squared, int num_scales) {
  double sum = 0.0;
  double power = 1.0;
  for (int k = 0; k < num_scales; ++k, power *= step_squared) sum += power;
  return static_cast<double>(smallest_size) * smallest_size * sum;
}

double analytic_sparse_macs(int smallest_size, int num_scales) {
  return static_cast<double>(num_scales) * smallest_size * smallest_size;
}

double analytic_speedup(double step_squared, int num_scales) {
  double power = 1.0;
  for (int k = 0; k < num_scales; ++k) power *= step_squared;
  return power / num_scales;
}

namespace {

struct Tap {
  int dy, dx;
  double value;
};

// One circular convolution pass accumulating through an explicit tap list.
// The dense list carries every kernel cell (zeros included), the sparse list
// only the nonzero taps; both run the identical inner loop.
void conv_taps(const Mat& feature, const std::vector<Tap>& taps, Mat* out) {
  const Index n = feature.rows();
  for (Index y = 0; y < n; ++y) {
    for (Index x = 0; x < n; ++x) {
      double acc = 0.0;
      for (const Tap& t : taps)
        acc += t.value * feature(wrap_index(y + t.dy, n), wrap_index(x + t.dx, n));
      (*out)(y, x) += acc;
    }
  }
}

double time_passes(const Mat& feature, const std::vector<std::vector<Tap>>& kernels, int repeats,
                   Mat* result) {
  std::vector<double> times;
  for (int rep = 0; rep <= repeats; ++rep) {  // first pass is warmup
    Mat out = Mat::Zero(feature.rows(), feature.cols());
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& taps : kernels) conv_taps(feature, taps, &out);
    const auto t1 = std::chrono::steady_clock::now();
    if (rep > 0) times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    *result = out;
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

ComplexityProfile run_complexity_bench(const ScaleSet& set, int spatial, int repeats,
                                       std::uint64_t seed) {
  if (spatial < set.kernel_size(set.count() - 1))
    throw std::invalid_argument("complexity bench: feature size smaller than largest kernel");
  if (repeats < 1) throw std::invalid_argument("complexity bench: repeats >= 1");

  ComplexityProfile p;
  p.num_scales = set.count();
  p.step = set.step;
  p.smallest_size = set.smallest_kernel_size;
  p.spatial = spatial;
  p.repeats = repeats;
  p.analytic_dense_macs = analytic_dense_macs(p.smallest_size, set.step_squared, p.num_scales);
  p.analytic_sparse_macs = analytic_sparse_macs(p.smallest_size, p.num_scales);
  p.analytic_speedup = analytic_speedup(set.step_squared, p.num_scales);

  // Structurally sparse kernels: W x W random taps spread over each scale's
  // kernel grid, everything else exactly zero.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int w = p.smallest_size;
  std::vector<std::vector<Tap>> dense_kernels, sparse_kernels;
  for (int k = 0; k < set.count(); ++k) {
    const int size = set.kernel_size(k);
    const int c = (size - 1) / 2;
    Mat kernel = Mat::Zero(size, size);
    for (int i = 0; i < w; ++i) {
      for (int j = 0; j < w; ++j) {
        const int y = w == 1 ? c : static_cast<int>(std::lround(i * (size - 1) / double(w - 1)));
        const int x = w == 1 ? c : static_cast<int>(std::lround(j * (size - 1) / double(w - 1)));
        kernel(y, x) = normal(rng);
      }
    }
    std::vector<Tap> dense, sparse;
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        dense.push_back({y - c, x - c, kernel(y, x)});
        if (kernel(y, x) != 0.0) sparse.push_back({y - c, x - c, kernel(y, x)});
      }
    }
    p.discrete_dense_macs += static_cast<long long>(dense.size());
    p.discrete_sparse_macs += static_cast<long long>(sparse.size());
    dense_kernels.push_back(std::move(dense));
    sparse_kernels.push_back(std::move(sparse));
  }

  Mat feature(spatial, spatial);
  for (Index j = 0; j < spatial; ++j)
    for (Index i = 0; i < spatial; ++i) feature(i, j) = normal(rng);

  Mat dense_out, sparse_out;
  p.dense_ms = time_passes(feature, dense_kernels, repeats, &dense_out);
  p.sparse_ms = time_passes(feature, sparse_kernels, repeats, &sparse_out);
  if ((dense_out - sparse_out).cwiseAbs().maxCoeff() != 0.0)
    throw std::runtime_error("complexity bench: dense and sparse passes disagree");
  p.measured_speedup = p.sparse_ms > 0.0 ? p.dense_ms / p.sparse_ms : 0.0;
  return p;
}

}  // namespace disco
