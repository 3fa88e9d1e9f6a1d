#include "disco/scaleconv.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace disco {

namespace {

int plane_index(const ScaleFeatureMap& f, int b, int c, int sigma) {
  return (b * f.channels + c) * f.num_scales() + sigma;
}

}  // namespace

Mat& ScaleFeatureMap::at(int b, int c, int sigma) { return planes[plane_index(*this, b, c, sigma)]; }

const Mat& ScaleFeatureMap::at(int b, int c, int sigma) const {
  return planes[plane_index(*this, b, c, sigma)];
}

double& ScaleConvLayer::w(int oc, int ic, int q, int j) {
  const int J = basis->num_functions;
  return weights[((static_cast<size_t>(oc) * in_channels + ic) * scale_extent + q) * J + j];
}

double ScaleConvLayer::w(int oc, int ic, int q, int j) const {
  const int J = basis->num_functions;
  return weights[((static_cast<size_t>(oc) * in_channels + ic) * scale_extent + q) * J + j];
}

const Mat& ScaleConvLayer::kernel(int oc, int ic, int q, int sigma) const {
  const int S = basis->scale_set.count();
  return kernels_[((static_cast<size_t>(oc) * in_channels + ic) * scale_extent + q) * S + sigma];
}

void ScaleConvLayer::bake() {
  const int S = basis->scale_set.count();
  const int J = basis->num_functions;
  kernels_.assign(static_cast<size_t>(out_channels) * in_channels * scale_extent * S, Mat());
  for (int oc = 0; oc < out_channels; ++oc) {
    for (int ic = 0; ic < in_channels; ++ic) {
      for (int q = 0; q < scale_extent; ++q) {
        Vec wv(J);
        for (int j = 0; j < J; ++j) wv(j) = w(oc, ic, q, j);
        auto per_scale = kernels_from_weights(*basis, wv);
        for (int sigma = 0; sigma < S; ++sigma)
          kernels_[((static_cast<size_t>(oc) * in_channels + ic) * scale_extent + q) * S + sigma] =
              std::move(per_scale[sigma]);
      }
    }
  }
}

ScaleConvLayer make_scale_conv_layer(std::shared_ptr<const MultiScaleBasis> basis, int in_channels,
                                     int out_channels, int scale_extent, Boundary boundary) {
  if (!basis) throw std::invalid_argument("scale conv layer: basis required");
  if (scale_extent < 1 || scale_extent > basis->scale_set.count())
    throw std::invalid_argument("scale conv layer: scale extent out of range");
  ScaleConvLayer layer;
  layer.basis = std::move(basis);
  layer.in_channels = in_channels;
  layer.out_channels = out_channels;
  layer.scale_extent = scale_extent;
  layer.boundary = boundary;
  layer.weights.assign(static_cast<size_t>(out_channels) * in_channels * scale_extent *
                           layer.basis->num_functions,
                       0.0);
  return layer;
}

RandomNetwork make_random_network(std::shared_ptr<const MultiScaleBasis> basis,
                                  const std::vector<int>& channels, int scale_extent,
                                  Nonlinearity nonlinearity, std::uint64_t seed) {
  if (channels.size() < 1) throw std::invalid_argument("random network: channel chain required");
  if (!basis) throw std::invalid_argument("random network: basis required");
  RandomNetwork net;
  net.basis = basis;
  net.nonlinearity = nonlinearity;
  net.seed = seed;
  std::mt19937_64 rng(seed);
  const int J = basis->num_functions;
  for (size_t l = 0; l + 1 < channels.size(); ++l) {
    auto layer = make_scale_conv_layer(basis, channels[l], channels[l + 1], scale_extent);
    const double stddev = 1.0 / std::sqrt(static_cast<double>(channels[l]) * J * scale_extent);
    std::normal_distribution<double> normal(0.0, stddev);
    for (auto& w : layer.weights) w = normal(rng);
    layer.bake();
    net.layers.push_back(std::move(layer));
  }
  return net;
}

ScaleFeatureMap lift(const std::vector<Mat>& images, const ScaleSet& set) {
  if (images.empty()) throw std::invalid_argument("lift: at least one image required");
  const Index h = images.front().rows(), w = images.front().cols();
  ScaleFeatureMap f;
  f.scale_set = set;
  f.batch = static_cast<int>(images.size());
  f.channels = 1;
  f.planes.reserve(static_cast<size_t>(f.batch) * set.count());
  for (const auto& img : images) {
    if (img.rows() != h || img.cols() != w)
      throw std::invalid_argument("lift: images must share one size");
    f.planes.push_back(img);
    for (int sigma = 1; sigma < set.count(); ++sigma) f.planes.push_back(Mat::Zero(h, w));
  }
  return f;
}

ScaleFeatureMap act(const ScaleFeatureMap& f, int s_index, InterpMethod interp) {
  if (s_index < 0 || s_index >= f.num_scales())
    throw std::domain_error("act: scale shift outside the scale set");
  if (f.height() != f.width()) throw std::invalid_argument("act: square grids required");
  const double factor = std::pow(f.scale_set.step, s_index);
  const auto n_out = static_cast<Index>(std::lround(f.height() / factor));
  if (n_out < 1) throw std::domain_error("act: spatial grid vanishes at this shift");
  const InterpOperator L = make_downscale(f.height(), n_out, interp, Boundary::Circular);

  ScaleFeatureMap out;
  out.scale_set = f.scale_set;
  out.batch = f.batch;
  out.channels = f.channels;
  out.valid_from = std::min(f.valid_from + s_index, f.num_scales());
  out.planes.resize(f.planes.size());
  for (int b = 0; b < f.batch; ++b) {
    for (int c = 0; c < f.channels; ++c) {
      for (int sigma = 0; sigma < f.num_scales(); ++sigma) {
        Mat& dst = out.planes[plane_index(out, b, c, sigma)];
        if (sigma < s_index) {
          dst = Mat::Zero(n_out, n_out);
        } else {
          dst = downscale_image(f.at(b, c, sigma - s_index), L);
        }
      }
    }
  }
  return out;
}

ScaleFeatureMap scale_convolve(const ScaleFeatureMap& f, const ScaleConvLayer& layer) {
  const ScaleSet& set = layer.basis->scale_set;
  if (set.count() != f.num_scales() || std::abs(set.step - f.scale_set.step) > 1e-12)
    throw std::invalid_argument("scale_convolve: feature map and layer scale sets differ");
  if (f.channels != layer.in_channels)
    throw std::invalid_argument("scale_convolve: channel mismatch");

  ScaleFeatureMap out;
  out.scale_set = f.scale_set;
  out.batch = f.batch;
  out.channels = layer.out_channels;
  out.valid_from = f.valid_from;
  out.planes.assign(static_cast<size_t>(f.batch) * layer.out_channels * f.num_scales(),
                    Mat::Zero(f.height(), f.width()));
  for (int b = 0; b < f.batch; ++b) {
    for (int oc = 0; oc < layer.out_channels; ++oc) {
      for (int sigma = 0; sigma < f.num_scales(); ++sigma) {
        Mat& dst = out.at(b, oc, sigma);
        for (int q = 0; q < layer.scale_extent; ++q) {
          if (sigma + q >= f.num_scales()) break;  // beyond the set: zero contribution
          for (int ic = 0; ic < layer.in_channels; ++ic) {
            dst += convolve(f.at(b, ic, sigma + q), layer.kernel(oc, ic, q, sigma), layer.boundary);
          }
        }
      }
    }
  }
  return out;
}

namespace {

ScaleFeatureMap apply_nonlinearity(ScaleFeatureMap f, Nonlinearity nl) {
  if (nl == Nonlinearity::ReLU)
    for (auto& p : f.planes) p = p.cwiseMax(0.0);
  return f;
}

}  // namespace

ScaleFeatureMap forward(const RandomNetwork& net, const ScaleFeatureMap& f) {
  ScaleFeatureMap out = f;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    if (l > 0) out = apply_nonlinearity(std::move(out), net.nonlinearity);
    out = scale_convolve(out, net.layers[l]);
  }
  return out;
}

EquivarianceReport equivariance_error(const RandomNetwork& net, const std::vector<Mat>& inputs,
                                      const std::vector<int>& test_indices, InterpMethod interp) {
  if (!net.basis) throw std::invalid_argument("equivariance_error: network carries no basis");
  const ScaleSet& set = net.basis->scale_set;
  for (int s_index : test_indices) {
    if (s_index < 0 || s_index >= set.count())
      throw std::domain_error("equivariance_error: test index outside the scale set");
  }

  EquivarianceReport report;
  for (int s_index : test_indices) {
    EquivarianceReport::IndexTerm term;
    term.s_index = s_index;
    term.num_inputs = static_cast<int>(inputs.size());
    double sum = 0.0;
    int counted = 0;
    for (const auto& img : inputs) {
      ScaleFeatureMap lifted = lift({img}, set);
      const ScaleFeatureMap reference = act(forward(net, lifted), s_index, interp);
      const ScaleFeatureMap probed = forward(net, act(lifted, s_index, interp));
      term.valid_from = reference.valid_from;
      double num = 0.0, den = 0.0;
      for (int b = 0; b < reference.batch; ++b) {
        for (int c = 0; c < reference.channels; ++c) {
          for (int sigma = reference.valid_from; sigma < reference.num_scales(); ++sigma) {
            num += (reference.at(b, c, sigma) - probed.at(b, c, sigma)).squaredNorm();
            den += reference.at(b, c, sigma).squaredNorm();
          }
        }
      }
      if (den == 0.0) {
        ++term.excluded_inputs;
        continue;
      }
      sum += num / den;
      ++counted;
    }
    term.mean_rel_error = counted > 0 ? sum / counted : 0.0;
    report.per_index.push_back(term);
    report.delta += term.mean_rel_error;
  }
  return report;
}

std::vector<Mat> synthetic_images(int count, int size, std::uint64_t seed) {
  if (count < 1 || size < 1) throw std::invalid_argument("synthetic_images: positive count/size");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, static_cast<double>(size));
  std::uniform_real_distribution<double> width(size / 16.0, size / 5.0);
  std::uniform_real_distribution<double> amp(-1.0, 1.0);
  std::vector<Mat> out;
  out.reserve(count);
  for (int n = 0; n < count; ++n) {
    Mat img = Mat::Zero(size, size);
    for (int blob = 0; blob < 6; ++blob) {
      const double cy = pos(rng), cx = pos(rng), s = width(rng), a = amp(rng);
      for (Index y = 0; y < size; ++y)
        for (Index x = 0; x < size; ++x)
          img(y, x) += a * std::exp(-((y - cy) * (y - cy) + (x - cx) * (x - cx)) / (2.0 * s * s));
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace disco
