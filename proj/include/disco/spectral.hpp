#pragma once

#include "disco/resample.hpp"

namespace disco {

/// Circulant matrix K with K(i, j) = first_row((j - i) mod n). Multiplication
/// by K realizes circular convolution with the kernel embedded in first_row.
struct CirculantMatrix {
  Vec first_row;

  Index size() const { return first_row.size(); }
  Mat dense() const;
};

/// Unitary DFT matrix: F(j, k) = exp(-2*pi*i*j*k / n) / sqrt(n).
CMat dft_matrix(Index n);

/// Centers an odd-length kernel into the first row of an n x n circulant so
/// that K * f equals convolve(f, kernel, Circular).
CirculantMatrix embed_kernel_circulant(const Vec& kernel, Index n);

/// Inverse of the centered embedding: reads an odd-length kernel back out of
/// a circulant first row (remaining entries are ignored).
Vec centered_from_first_row(const Vec& first_row, Index klen);

/// Eigenvalues of the circulant: the unnormalized DFT of its first row,
/// i.e. sqrt(n) * F * first_row with the unitary F above.
CVec circulant_eigenvalues(const CirculantMatrix& K);

/// Result of probing the kernel constraint K L = L K' for a given downscaler.
struct ConstraintResidual {
  double factor = 1.0;     // n_in / n_out, >= 1
  double residual = 0.0;   // ||K L - L K'||_F / ||K L||_F
  bool degenerate = false; // ||K L||_F was zero; residual reported as 0
  Vec solution;            // first row of the recovered circulant K' (length n_in)
};

/// Frequency-domain solution of K L = L K' for integer-factor circular
/// downscalers: recovers K' column-ratio-wise from K L F and L F. The
/// recovered kernel equals the dilation of `kernel` by n_in / n_out.
/// Throws std::domain_error for non-integer factors (use solve_lemma_residual).
ConstraintResidual solve_exact(const Vec& kernel, const InterpOperator& L);

/// Least-squares minimizer of ||K L - L K'||_F over all circulant K'
/// (n_in free parameters, ridge 1e-12). The normalized residual is ~0 exactly
/// when the downscaling factor is an integer (Lemma 1), strictly positive
/// otherwise.
ConstraintResidual solve_lemma_residual(const Vec& kernel, const InterpOperator& L);

}  // namespace disco
