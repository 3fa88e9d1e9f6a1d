#include "disco/spectral.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace disco {

Mat CirculantMatrix::dense() const {
  const Index n = size();
  Mat out(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) out(i, j) = first_row(wrap_index(j - i, n));
  return out;
}

CMat dft_matrix(Index n) {
  if (n < 1) throw std::invalid_argument("dft_matrix: size must be positive");
  CMat f(n, n);
  const double root = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      // Reduce jk mod n first so large indices do not lose phase accuracy.
      const double angle = -2.0 * M_PI * static_cast<double>((j * k) % n) / n;
      f(j, k) = std::polar(root, angle);
    }
  }
  return f;
}

CirculantMatrix embed_kernel_circulant(const Vec& kernel, Index n) {
  const Index k = kernel.size();
  if (k < 1 || k % 2 == 0)
    throw std::invalid_argument("embed_kernel_circulant: kernel length must be odd");
  if (k > n) throw std::invalid_argument("embed_kernel_circulant: kernel longer than matrix size");
  const Index c = (k - 1) / 2;
  CirculantMatrix out;
  out.first_row = Vec::Zero(n);
  for (Index u = 0; u < k; ++u) out.first_row(wrap_index(u - c, n)) = kernel(u);
  return out;
}

Vec centered_from_first_row(const Vec& first_row, Index klen) {
  const Index n = first_row.size();
  if (klen < 1 || klen % 2 == 0 || klen > n)
    throw std::invalid_argument("centered_from_first_row: bad kernel length");
  const Index c = (klen - 1) / 2;
  Vec kernel(klen);
  for (Index u = 0; u < klen; ++u) kernel(u) = first_row(wrap_index(u - c, n));
  return kernel;
}

CVec circulant_eigenvalues(const CirculantMatrix& K) {
  const Index n = K.size();
  return std::sqrt(static_cast<double>(n)) * (dft_matrix(n) * K.first_row.cast<std::complex<double>>());
}

namespace {

double constraint_residual(const Mat& kl, const Mat& L, const Vec& first_row) {
  CirculantMatrix kp{first_row};
  const double den = kl.norm();
  if (den == 0.0) return 0.0;
  return (kl - L * kp.dense()).norm() / den;
}

}  // namespace

ConstraintResidual solve_exact(const Vec& kernel, const InterpOperator& L) {
  if (L.boundary != Boundary::Circular)
    throw std::invalid_argument("solve_exact: circular-boundary downscaler required");
  const Index n_in = L.n_in(), n_out = L.n_out();
  if (n_in % n_out != 0)
    throw std::domain_error(
        "solve_exact: non-integer downscaling factor; no exact solution exists "
        "(Lemma 1) -- use solve_lemma_residual");
  const Mat k_out = embed_kernel_circulant(kernel, n_out).dense();
  const CMat f_in = dft_matrix(n_in);
  const CMat lf = L.matrix * f_in;
  const CMat klf = k_out * lf;

  // Per-column proportionality constant: prefer the first-row ratio, fall back
  // to a whole-column least-squares ratio where the first row vanishes.
  CVec d(n_in);
  const double row_scale = lf.row(0).cwiseAbs().maxCoeff();
  for (Index j = 0; j < n_in; ++j) {
    if (std::abs(lf(0, j)) > 1e-9 * row_scale) {
      d(j) = klf(0, j) / lf(0, j);
    } else {
      const double den = lf.col(j).squaredNorm();
      d(j) = den > 1e-18 * row_scale * row_scale ? lf.col(j).dot(klf.col(j)) / den
                                                 : std::complex<double>(0.0, 0.0);
    }
  }
  // d = sqrt(n) * F * first_row, so first_row = F^H * d / sqrt(n).
  const CVec fr = f_in.adjoint() * d / std::sqrt(static_cast<double>(n_in));

  ConstraintResidual out;
  out.factor = static_cast<double>(n_in) / n_out;
  out.solution = fr.real();
  const Mat kl = k_out * L.matrix;
  out.degenerate = kl.norm() == 0.0;
  out.residual = constraint_residual(kl, L.matrix, out.solution);
  return out;
}

ConstraintResidual solve_lemma_residual(const Vec& kernel, const InterpOperator& L) {
  const Index n_in = L.n_in(), n_out = L.n_out();
  const Mat k_out = embed_kernel_circulant(kernel, n_out).dense();
  const Mat target = k_out * L.matrix;  // n_out x n_in

  // (L K')(i, m) = sum_p L(i, (m - p) mod n_in) * first_row(p): assemble the
  // design matrix over the n_in free parameters of K'.
  Mat design(n_out * n_in, n_in);
  Vec rhs(n_out * n_in);
  for (Index m = 0; m < n_in; ++m) {
    for (Index i = 0; i < n_out; ++i) {
      const Index row = m * n_out + i;
      rhs(row) = target(i, m);
      for (Index p = 0; p < n_in; ++p) design(row, p) = L.matrix(i, wrap_index(m - p, n_in));
    }
  }
  Mat gram = design.transpose() * design;
  gram.diagonal().array() += 1e-12;
  const Vec fr = gram.ldlt().solve(design.transpose() * rhs);

  ConstraintResidual out;
  out.factor = static_cast<double>(n_in) / n_out;
  out.solution = fr;
  out.degenerate = target.norm() == 0.0;
  out.residual = constraint_residual(target, L.matrix, fr);
  return out;
}

}  // namespace disco
