#include "disco/grid.hpp"

#include <stdexcept>

namespace disco {

namespace {

void check_kernel_1d(Index n, Index k, Boundary mode) {
  if (n < 1 || k < 1) throw std::invalid_argument("convolve: empty signal or kernel");
  if (k % 2 == 0) throw std::invalid_argument("convolve: kernel length must be odd");
  if (mode == Boundary::Circular && k > n)
    throw std::invalid_argument("convolve: kernel larger than signal under circular boundary");
}

}  // namespace

Vec convolve(const Vec& f, const Vec& kernel, Boundary mode) {
  const Index n = f.size();
  const Index k = kernel.size();
  check_kernel_1d(n, k, mode);
  const Index c = (k - 1) / 2;
  Vec out = Vec::Zero(n);
  for (Index t = 0; t < n; ++t) {
    double acc = 0.0;
    for (Index u = 0; u < k; ++u) {
      Index idx = t + u - c;
      if (mode == Boundary::Circular) {
        idx = wrap_index(idx, n);
      } else if (idx < 0 || idx >= n) {
        continue;
      }
      acc += kernel(u) * f(idx);
    }
    out(t) = acc;
  }
  return out;
}

Mat convolve(const Mat& f, const Mat& kernel, Boundary mode) {
  const Index h = f.rows(), w = f.cols();
  const Index kh = kernel.rows(), kw = kernel.cols();
  check_kernel_1d(h, kh, mode);
  check_kernel_1d(w, kw, mode);
  const Index cy = (kh - 1) / 2, cx = (kw - 1) / 2;
  Mat out = Mat::Zero(h, w);
  for (Index y = 0; y < h; ++y) {
    for (Index x = 0; x < w; ++x) {
      double acc = 0.0;
      for (Index uy = 0; uy < kh; ++uy) {
        Index iy = y + uy - cy;
        if (mode == Boundary::Circular) {
          iy = wrap_index(iy, h);
        } else if (iy < 0 || iy >= h) {
          continue;
        }
        for (Index ux = 0; ux < kw; ++ux) {
          Index ix = x + ux - cx;
          if (mode == Boundary::Circular) {
            ix = wrap_index(ix, w);
          } else if (ix < 0 || ix >= w) {
            continue;
          }
          acc += kernel(uy, ux) * f(iy, ix);
        }
      }
      out(y, x) = acc;
    }
  }
  return out;
}

Vec dilate(const Vec& kernel, int factor) {
  if (factor < 1) throw std::invalid_argument("dilate: factor must be >= 1");
  const Index k = kernel.size();
  if (k < 1 || k % 2 == 0) throw std::invalid_argument("dilate: kernel length must be odd");
  Vec out = Vec::Zero((k - 1) * factor + 1);
  for (Index i = 0; i < k; ++i) out(i * factor) = kernel(i);
  return out;
}

Mat dilate(const Mat& kernel, int factor) {
  if (factor < 1) throw std::invalid_argument("dilate: factor must be >= 1");
  const Index kh = kernel.rows(), kw = kernel.cols();
  if (kh < 1 || kh % 2 == 0 || kw < 1 || kw % 2 == 0)
    throw std::invalid_argument("dilate: kernel sides must be odd");
  Mat out = Mat::Zero((kh - 1) * factor + 1, (kw - 1) * factor + 1);
  for (Index i = 0; i < kh; ++i)
    for (Index j = 0; j < kw; ++j) out(i * factor, j * factor) = kernel(i, j);
  return out;
}

Mat outer(const Vec& u, const Vec& v) { return u * v.transpose(); }

Vec circshift(const Vec& f, Index shift) {
  const Index n = f.size();
  Vec out(n);
  for (Index i = 0; i < n; ++i) out(i) = f(wrap_index(i - shift, n));
  return out;
}

Mat circshift(const Mat& f, Index dy, Index dx) {
  const Index h = f.rows(), w = f.cols();
  Mat out(h, w);
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) out(y, x) = f(wrap_index(y - dy, h), wrap_index(x - dx, w));
  return out;
}

Mat sample_shift(const Mat& f, Index dy, Index dx, Boundary mode) {
  const Index h = f.rows(), w = f.cols();
  Mat out = Mat::Zero(h, w);
  for (Index y = 0; y < h; ++y) {
    Index iy = y + dy;
    if (mode == Boundary::Circular) {
      iy = wrap_index(iy, h);
    } else if (iy < 0 || iy >= h) {
      continue;
    }
    for (Index x = 0; x < w; ++x) {
      Index ix = x + dx;
      if (mode == Boundary::Circular) {
        ix = wrap_index(ix, w);
      } else if (ix < 0 || ix >= w) {
        continue;
      }
      out(y, x) = f(iy, ix);
    }
  }
  return out;
}

Index count_nonzeros(const Mat& m) {
  Index n = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != 0.0) ++n;
  return n;
}

}  // namespace disco
