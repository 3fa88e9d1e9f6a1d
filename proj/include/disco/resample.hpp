#pragma once

#include "disco/grid.hpp"

namespace disco {

enum class InterpMethod { Nearest, Bilinear, Bicubic };

/// Explicit rectangular downscaling matrix. Row i holds the interpolation
/// weights for sampling the input at the center-aligned source position of
/// output sample i. Rows sum to 1 (partition of unity).
struct InterpOperator {
  Mat matrix;  // n_out x n_in
  InterpMethod method = InterpMethod::Bilinear;
  Boundary boundary = Boundary::Circular;

  Index n_in() const { return matrix.cols(); }
  Index n_out() const { return matrix.rows(); }
  /// n_out / n_in, <= 1. The downscaling factor s is its reciprocal.
  double factor() const { return static_cast<double>(matrix.rows()) / matrix.cols(); }
};

/// Builds the n_out x n_in downscaler. Source positions are center-aligned:
/// output i samples at (i + 0.5) * n_in / n_out - 0.5. Circular wraps taps;
/// ZeroPad drops taps outside the grid and renormalizes the row so constants
/// are preserved.
InterpOperator make_downscale(Index n_in, Index n_out, InterpMethod method, Boundary boundary);

Vec apply(const InterpOperator& op, const Vec& f);

/// out = L * img * L^T (separable rescaling, both axes must match n_in).
Mat downscale_image(const Mat& img, const InterpOperator& op);

/// Grid projection of the continuous rescaling kappa_s(t) = s^-2 kappa(s^-1 t):
/// upsamples `kernel` to a target x target grid with center alignment and the
/// 1/s amplitude factor per axis. Taps outside the source support contribute 0.
Mat upscale_kernel(const Mat& kernel, Index target, double scale, InterpMethod method);

/// 1D interpolation kernel weight at offset t (nearest / triangle / Catmull-Rom
/// cubic with a = -0.5).
double interp_weight(InterpMethod method, double t);

}  // namespace disco
