#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "disco/scaleconv.hpp"

using namespace disco;

namespace {

std::shared_ptr<const MultiScaleBasis> disco_basis(const std::string& scales, int size = 3,
                                                   int samples = 128, std::uint64_t seed = 42) {
  SolveConfig cfg;
  cfg.num_samples = samples;
  cfg.seed = seed;
  return std::make_shared<MultiScaleBasis>(
      build_disco_basis(size, make_scale_set(scales, size), cfg));
}

Mat random_mat(std::mt19937_64& rng, Index h, Index w) {
  std::normal_distribution<double> d(0.0, 1.0);
  Mat m(h, w);
  for (Index j = 0; j < w; ++j)
    for (Index i = 0; i < h; ++i) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST_CASE("lift places the image at scale index 0") {
  std::mt19937_64 rng(41);
  const Mat img = random_mat(rng, 8, 8);
  const ScaleSet set = make_scale_set("1,2,4", 3);
  const ScaleFeatureMap f = lift({img}, set);
  CHECK(f.at(0, 0, 0) == img);
  CHECK(f.at(0, 0, 1).isZero(0.0));
  CHECK(f.at(0, 0, 2).isZero(0.0));
  // sum over the scale axis returns the image
  Mat sum = Mat::Zero(8, 8);
  for (int sigma = 0; sigma < f.num_scales(); ++sigma) sum += f.at(0, 0, sigma);
  CHECK(sum == img);
  const ScaleFeatureMap zero = lift({Mat::Zero(8, 8)}, set);
  for (const auto& p : zero.planes) CHECK(p.isZero(0.0));
}

TEST_CASE("one-hot center weights make the identity layer") {
  auto basis = disco_basis("1,2,4");
  auto layer = make_scale_conv_layer(basis, 1, 1, 1);
  layer.w(0, 0, 0, 4) = 1.0;  // center pixel function
  layer.bake();
  // the center function stays a centered delta at every scale, so each slice
  // passes through unchanged
  std::mt19937_64 rng(43);
  ScaleFeatureMap f = lift({random_mat(rng, 8, 8)}, basis->scale_set);
  f.at(0, 0, 1) = random_mat(rng, 8, 8);
  const ScaleFeatureMap out = scale_convolve(f, layer);
  for (int sigma = 0; sigma < 3; ++sigma)
    CHECK((out.at(0, 0, sigma) - f.at(0, 0, sigma)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("single-scale set reduces to plain 2D convolution") {
  auto basis = disco_basis("1");
  auto layer = make_scale_conv_layer(basis, 1, 1, 1);
  std::mt19937_64 rng(44);
  Vec w(9);
  for (int j = 0; j < 9; ++j) {
    w(j) = j * 0.25 - 1.0;
    layer.w(0, 0, 0, j) = w(j);
  }
  layer.bake();
  const Mat kernel = kernels_from_weights(*basis, w)[0];
  const Mat img = random_mat(rng, 10, 10);
  const ScaleFeatureMap out = scale_convolve(lift({img}, basis->scale_set), layer);
  CHECK((out.at(0, 0, 0) - convolve(img, kernel, Boundary::Circular)).cwiseAbs().maxCoeff() <
        1e-14);
}

TEST_CASE("scale_convolve is linear in inputs and weights") {
  auto basis = disco_basis("1,2");
  std::mt19937_64 rng(45);
  auto net = make_random_network(basis, {1, 2}, 2, Nonlinearity::Identity, 7);
  const ScaleConvLayer& layer = net.layers[0];

  ScaleFeatureMap f = lift({random_mat(rng, 8, 8)}, basis->scale_set);
  ScaleFeatureMap g = lift({random_mat(rng, 8, 8)}, basis->scale_set);
  f.at(0, 0, 1) = random_mat(rng, 8, 8);
  ScaleFeatureMap combo = f;
  for (size_t i = 0; i < combo.planes.size(); ++i)
    combo.planes[i] = 0.8 * f.planes[i] - 1.7 * g.planes[i];
  const ScaleFeatureMap of = scale_convolve(f, layer);
  const ScaleFeatureMap og = scale_convolve(g, layer);
  const ScaleFeatureMap oc = scale_convolve(combo, layer);
  for (size_t i = 0; i < oc.planes.size(); ++i) {
    const Mat expect = 0.8 * of.planes[i] - 1.7 * og.planes[i];
    CHECK((oc.planes[i] - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
  }
}

TEST_CASE("circular scale_convolve commutes with integer translations") {
  auto basis = disco_basis("1,2");
  std::mt19937_64 rng(46);
  auto net = make_random_network(basis, {1, 2}, 2, Nonlinearity::Identity, 9);
  ScaleFeatureMap f = lift({random_mat(rng, 9, 9)}, basis->scale_set);
  f.at(0, 0, 1) = random_mat(rng, 9, 9);
  ScaleFeatureMap shifted = f;
  for (auto& p : shifted.planes) p = circshift(p, 3, 5);
  const ScaleFeatureMap a = scale_convolve(shifted, net.layers[0]);
  ScaleFeatureMap b = scale_convolve(f, net.layers[0]);
  for (auto& p : b.planes) p = circshift(p, 3, 5);
  for (size_t i = 0; i < a.planes.size(); ++i) CHECK(a.planes[i] == b.planes[i]);
}

TEST_CASE("act basics") {
  auto basis = disco_basis("1,2,4");
  std::mt19937_64 rng(47);
  const Mat img = random_mat(rng, 16, 16);
  const ScaleFeatureMap f = lift({img}, basis->scale_set);

  const ScaleFeatureMap same = act(f, 0, InterpMethod::Nearest);
  CHECK(same.valid_from == 0);
  for (size_t i = 0; i < f.planes.size(); ++i)
    CHECK((same.planes[i] - f.planes[i]).cwiseAbs().maxCoeff() < 1e-14);

  const ScaleFeatureMap acted = act(f, 1, InterpMethod::Bilinear);
  CHECK(acted.valid_from == 1);
  CHECK(acted.height() == 8);
  CHECK(acted.at(0, 0, 0).isZero(0.0));
  const InterpOperator L = make_downscale(16, 8, InterpMethod::Bilinear, Boundary::Circular);
  CHECK((acted.at(0, 0, 1) - downscale_image(img, L)).cwiseAbs().maxCoeff() < 1e-14);

  CHECK_THROWS_AS(act(f, 3, InterpMethod::Nearest), std::domain_error);
}

TEST_CASE("double action composes for nearest on integer factors") {
  // odd step keeps nearest sampling away from half-sample ties
  SolveConfig cfg;
  cfg.num_samples = 16;
  auto basis = std::make_shared<MultiScaleBasis>(
      build_disco_basis(3, make_scale_set("1,3,9", 3), cfg));
  std::mt19937_64 rng(48);
  ScaleFeatureMap f = lift({random_mat(rng, 27, 27)}, basis->scale_set);
  f.at(0, 0, 1) = random_mat(rng, 27, 27);
  f.at(0, 0, 2) = random_mat(rng, 27, 27);
  const ScaleFeatureMap twice = act(act(f, 1, InterpMethod::Nearest), 1, InterpMethod::Nearest);
  const ScaleFeatureMap once = act(f, 2, InterpMethod::Nearest);
  CHECK(twice.valid_from == once.valid_from);
  REQUIRE(twice.height() == once.height());
  for (int sigma = once.valid_from; sigma < once.num_scales(); ++sigma)
    CHECK((twice.at(0, 0, sigma) - once.at(0, 0, sigma)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zero-layer network has zero equivariance error") {
  auto basis = disco_basis("1,2,4");
  auto net = make_random_network(basis, {1}, 1, Nonlinearity::Identity, 1);
  CHECK(net.layers.empty());
  const auto inputs = synthetic_images(3, 16, 5);
  const EquivarianceReport report =
      equivariance_error(net, inputs, {1, 2}, InterpMethod::Nearest);
  CHECK(report.delta == 0.0);
}

TEST_CASE("integer scales with nearest action are equivariant") {
  auto basis = disco_basis("1,2,4");
  auto net = make_random_network(basis, {1, 3, 2}, 2, Nonlinearity::Identity, 11);
  const auto inputs = synthetic_images(4, 32, 6);
  const EquivarianceReport report =
      equivariance_error(net, inputs, {1, 2}, InterpMethod::Nearest);
  CHECK(report.delta < 1e-6);
  // delta equals the sum of the per-index terms
  double sum = 0.0;
  for (const auto& t : report.per_index) sum += t.mean_rel_error;
  CHECK(report.delta == sum);
}

TEST_CASE("relu stays equivariant under nearest subsampling") {
  auto basis = disco_basis("1,2");
  auto net = make_random_network(basis, {1, 2, 2}, 1, Nonlinearity::ReLU, 13);
  const auto inputs = synthetic_images(3, 16, 7);
  const EquivarianceReport report = equivariance_error(net, inputs, {1}, InterpMethod::Nearest);
  CHECK(report.delta < 1e-6);
}

TEST_CASE("delta is invariant under positive intensity rescaling (linear net)") {
  auto basis = disco_basis("1,sqrt2,2", 3, 96, 17);
  auto net = make_random_network(basis, {1, 2}, 1, Nonlinearity::Identity, 15);
  auto inputs = synthetic_images(2, 24, 8);
  const double d1 = equivariance_error(net, inputs, {1}, InterpMethod::Bilinear).delta;
  for (auto& img : inputs) img *= 37.5;
  const double d2 = equivariance_error(net, inputs, {1}, InterpMethod::Bilinear).delta;
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
}

TEST_CASE("disco beats the interpolated baseline on sqrt2 scales") {
  const ScaleSet set = make_scale_set("1,sqrt2,2,2sqrt2", 3);
  SolveConfig cfg;
  cfg.num_samples = 256;
  cfg.seed = 42;
  auto disco = std::make_shared<MultiScaleBasis>(build_disco_basis(3, set, cfg));
  auto baseline =
      std::make_shared<MultiScaleBasis>(build_interp_baseline(3, set, InterpMethod::Bicubic));
  const auto inputs = synthetic_images(4, 32, 9);
  const auto net_d = make_random_network(disco, {1, 2, 2}, 2, Nonlinearity::Identity, 19);
  const auto net_b = make_random_network(baseline, {1, 2, 2}, 2, Nonlinearity::Identity, 19);
  const double delta_d = equivariance_error(net_d, inputs, {1, 2}, InterpMethod::Bilinear).delta;
  const double delta_b = equivariance_error(net_b, inputs, {1, 2}, InterpMethod::Bilinear).delta;
  CHECK(delta_d > 0.0);
  CHECK(delta_b > 0.0);
  CHECK(delta_d < delta_b);
}

TEST_CASE("equivariance error rejects bad test indices") {
  auto basis = disco_basis("1,2");
  auto net = make_random_network(basis, {1, 1}, 1, Nonlinearity::Identity, 21);
  const auto inputs = synthetic_images(1, 16, 10);
  CHECK_THROWS_AS(equivariance_error(net, inputs, {2}, InterpMethod::Nearest), std::domain_error);
}
