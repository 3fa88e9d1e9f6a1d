#include "disco/resample.hpp"

#include <cmath>
#include <stdexcept>

namespace disco {

double interp_weight(InterpMethod method, double t) {
  const double a = std::abs(t);
  switch (method) {
    case InterpMethod::Nearest:
      // Half-open cell so a sweep over integer taps selects exactly one.
      return (t >= -0.5 && t < 0.5) ? 1.0 : 0.0;
    case InterpMethod::Bilinear:
      return a < 1.0 ? 1.0 - a : 0.0;
    case InterpMethod::Bicubic:
      if (a <= 1.0) return (1.5 * a - 2.5) * a * a + 1.0;
      if (a < 2.0) return ((-0.5 * a + 2.5) * a - 4.0) * a + 2.0;
      return 0.0;
  }
  return 0.0;
}

namespace {

// Taps covering the interpolation support around source position x.
void tap_range(InterpMethod method, double x, Index* first, Index* last) {
  const auto i0 = static_cast<Index>(std::floor(x));
  switch (method) {
    case InterpMethod::Nearest:
      *first = *last = static_cast<Index>(std::floor(x + 0.5));
      break;
    case InterpMethod::Bilinear:
      *first = i0;
      *last = i0 + 1;
      break;
    case InterpMethod::Bicubic:
      *first = i0 - 1;
      *last = i0 + 2;
      break;
  }
}

}  // namespace

InterpOperator make_downscale(Index n_in, Index n_out, InterpMethod method, Boundary boundary) {
  if (n_in < 1 || n_out < 1) throw std::invalid_argument("make_downscale: sizes must be positive");
  if (n_out > n_in)
    throw std::invalid_argument("make_downscale: n_out must not exceed n_in (downscaling only)");
  InterpOperator op;
  op.method = method;
  op.boundary = boundary;
  op.matrix = Mat::Zero(n_out, n_in);
  const double ratio = static_cast<double>(n_in) / n_out;
  for (Index i = 0; i < n_out; ++i) {
    const double x = (i + 0.5) * ratio - 0.5;
    Index first = 0, last = -1;
    tap_range(method, x, &first, &last);
    for (Index j = first; j <= last; ++j) {
      const double w = method == InterpMethod::Nearest ? 1.0 : interp_weight(method, x - j);
      if (w == 0.0) continue;
      if (boundary == Boundary::Circular) {
        op.matrix(i, wrap_index(j, n_in)) += w;
      } else if (j >= 0 && j < n_in) {
        op.matrix(i, j) += w;
      }
    }
    if (boundary == Boundary::ZeroPad) {
      const double s = op.matrix.row(i).sum();
      if (s != 0.0) op.matrix.row(i) /= s;
    }
  }
  return op;
}

Vec apply(const InterpOperator& op, const Vec& f) {
  if (f.size() != op.n_in()) throw std::invalid_argument("apply: size mismatch with operator");
  return op.matrix * f;
}

Mat downscale_image(const Mat& img, const InterpOperator& op) {
  if (img.rows() != op.n_in() || img.cols() != op.n_in())
    throw std::invalid_argument("downscale_image: image axes must match operator n_in");
  return op.matrix * img * op.matrix.transpose();
}

Mat upscale_kernel(const Mat& kernel, Index target, double scale, InterpMethod method) {
  if (target < 1 || target % 2 == 0)
    throw std::invalid_argument("upscale_kernel: target size must be odd and positive");
  if (scale <= 0.0) throw std::invalid_argument("upscale_kernel: scale must be positive");
  const Index w = kernel.rows();
  if (kernel.cols() != w) throw std::invalid_argument("upscale_kernel: kernel must be square");
  Mat up = Mat::Zero(target, w);
  const double c_src = (w - 1) / 2.0;
  const double c_dst = (target - 1) / 2.0;
  for (Index i = 0; i < target; ++i) {
    const double x = (i - c_dst) / scale + c_src;
    Index first = 0, last = -1;
    tap_range(method, x, &first, &last);
    for (Index j = first; j <= last; ++j) {
      if (j < 0 || j >= w) continue;
      const double wgt = method == InterpMethod::Nearest ? 1.0 : interp_weight(method, x - j);
      up(i, j) += wgt;
    }
  }
  return (up * kernel * up.transpose()) / (scale * scale);
}

}  // namespace disco
