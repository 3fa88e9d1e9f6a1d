#pragma once

#include <Eigen/Dense>

namespace disco {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Spatial boundary handling for convolutions and resampling operators.
enum class Boundary { Circular, ZeroPad };

inline Index wrap_index(Index i, Index n) {
  i %= n;
  return i < 0 ? i + n : i;
}

/// Same-size centered convolution (correlation convention, no kernel flip).
/// Circular mode wraps indices; ZeroPad treats samples outside the grid as 0.
/// Kernel length must be odd, and must not exceed the signal under Circular.
Vec convolve(const Vec& f, const Vec& kernel, Boundary mode);
Mat convolve(const Mat& f, const Mat& kernel, Boundary mode);

/// À-trous dilation: spreads kernel taps onto a stride-`factor` grid.
/// Output size is (k - 1) * factor + 1 per axis; inserted entries are exactly 0.
Vec dilate(const Vec& kernel, int factor);
Mat dilate(const Mat& kernel, int factor);

/// out(i, j) = u(i) * v(j)
Mat outer(const Vec& u, const Vec& v);

/// Content moves by +shift: out[i] = f[(i - shift) mod n].
Vec circshift(const Vec& f, Index shift);
Mat circshift(const Mat& f, Index dy, Index dx);

/// out[y][x] = f[y + dy][x + dx], wrapped (Circular) or zero-filled (ZeroPad).
Mat sample_shift(const Mat& f, Index dy, Index dx, Boundary mode);

Index count_nonzeros(const Mat& m);

}  // namespace disco
