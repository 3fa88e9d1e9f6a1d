#pragma once

#include <memory>

#include "disco/basis.hpp"

namespace disco {

/// Feature map on the scale-translation group: planes indexed
/// (batch, channel, scale index), each a square spatial grid. Slices below
/// valid_from carry no comparable content after a group action.
struct ScaleFeatureMap {
  ScaleSet scale_set;
  int batch = 0;
  int channels = 0;
  int valid_from = 0;
  std::vector<Mat> planes;  // ((b * channels + c) * num_scales + sigma)

  int num_scales() const { return scale_set.count(); }
  Index height() const { return planes.empty() ? 0 : planes.front().rows(); }
  Index width() const { return planes.empty() ? 0 : planes.front().cols(); }
  Mat& at(int b, int c, int sigma);
  const Mat& at(int b, int c, int sigma) const;
};

enum class Nonlinearity { Identity, ReLU };

/// One scale-convolution layer. Kernels are linear combinations of the basis:
/// the kernel applied at output scale sigma and scale offset q is
/// sum_j weights(oc, ic, q, j) * psi_{sigma, j}.
struct ScaleConvLayer {
  std::shared_ptr<const MultiScaleBasis> basis;
  int in_channels = 1;
  int out_channels = 1;
  int scale_extent = 1;  // Q
  Boundary boundary = Boundary::Circular;
  std::vector<double> weights;  // (oc, ic, q, j)

  double& w(int oc, int ic, int q, int j);
  double w(int oc, int ic, int q, int j) const;
  /// Kernel for (oc, ic, q) at scale index sigma, baked from the weights.
  const Mat& kernel(int oc, int ic, int q, int sigma) const;
  void bake();

 private:
  std::vector<Mat> kernels_;  // (((oc * in_channels + ic) * Q + q) * num_scales + sigma)
};

ScaleConvLayer make_scale_conv_layer(std::shared_ptr<const MultiScaleBasis> basis,
                                     int in_channels, int out_channels, int scale_extent,
                                     Boundary boundary = Boundary::Circular);

struct RandomNetwork {
  std::shared_ptr<const MultiScaleBasis> basis;
  std::vector<ScaleConvLayer> layers;  // empty means the identity map
  Nonlinearity nonlinearity = Nonlinearity::Identity;
  std::uint64_t seed = 0;
};

/// Random scale-conv stack with channel chain `channels` (first entry = input
/// channels). Weights drawn N(0, 1/(in_channels * J * Q)).
RandomNetwork make_random_network(std::shared_ptr<const MultiScaleBasis> basis,
                                  const std::vector<int>& channels, int scale_extent,
                                  Nonlinearity nonlinearity, std::uint64_t seed);

/// Places each image at scale index 0 with zeros elsewhere.
ScaleFeatureMap lift(const std::vector<Mat>& images, const ScaleSet& set);

/// f(s, t) -> f(s / step^k, t / step^k): shifts the scale axis up by `s_index`
/// and downscales every slice spatially by step^s_index. Slices with no
/// source are zero and marked invalid via valid_from.
ScaleFeatureMap act(const ScaleFeatureMap& f, int s_index, InterpMethod interp);

/// out(sigma) = sum_ic sum_q convolve(in(ic, sigma + q), kernel(oc, ic, q, sigma));
/// scale indices beyond the set contribute zero.
ScaleFeatureMap scale_convolve(const ScaleFeatureMap& f, const ScaleConvLayer& layer);

/// Applies the layers in order with the nonlinearity between them.
ScaleFeatureMap forward(const RandomNetwork& net, const ScaleFeatureMap& f);

/// Equivariance error of the network: for each test index s the normalized
/// squared difference between act-then-net and net-then-act, compared on
/// valid scale slices; delta is the sum over test indices of the per-index
/// means over inputs.
struct EquivarianceReport {
  struct IndexTerm {
    int s_index = 0;
    double mean_rel_error = 0.0;
    int valid_from = 0;
    int num_inputs = 0;
    int excluded_inputs = 0;  // zero-denominator comparisons
  };
  std::vector<IndexTerm> per_index;
  double delta = 0.0;
};

EquivarianceReport equivariance_error(const RandomNetwork& net, const std::vector<Mat>& inputs,
                                      const std::vector<int>& test_indices, InterpMethod interp);

/// Smooth synthetic test images: seeded sums of random Gaussian blobs.
std::vector<Mat> synthetic_images(int count, int size, std::uint64_t seed);

}  // namespace disco
