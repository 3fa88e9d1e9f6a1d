#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "disco/spectral.hpp"

using namespace disco;

namespace {

Vec random_kernel(std::mt19937_64& rng, Index len) {
  std::normal_distribution<double> d(0.0, 1.0);
  Vec v(len);
  for (Index i = 0; i < len; ++i) v(i) = d(rng);
  return v;
}

}  // namespace

TEST_CASE("DFT matrix is unitary") {
  for (Index n : {1, 4, 7, 24}) {
    const CMat f = dft_matrix(n);
    CHECK((f * f.adjoint() - CMat::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("embedding a single tap gives the scaled identity") {
  Vec k(1);
  k << 2.0;
  const Mat dense = embed_kernel_circulant(k, 4).dense();
  CHECK((dense - 2.0 * Mat::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("circulant multiplication equals circular convolution") {
  std::mt19937_64 rng(21);
  Vec probe(4);
  probe << 1, 0, 0, 0;
  Vec k(3);
  k << 1, 1, 1;
  Vec expected(4);
  expected << 1, 1, 0, 1;
  CHECK(embed_kernel_circulant(k, 4).dense() * probe == expected);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec kernel = random_kernel(rng, 5);
    const Vec f = random_kernel(rng, 12);
    const Vec via_matrix = embed_kernel_circulant(kernel, 12).dense() * f;
    const Vec via_conv = convolve(f, kernel, Boundary::Circular);
    CHECK((via_matrix - via_conv).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("DFT diagonalization of the circulant") {
  std::mt19937_64 rng(22);
  const Index n = 12;
  const CirculantMatrix K = embed_kernel_circulant(random_kernel(rng, 5), n);
  const CMat f = dft_matrix(n);
  const CVec lam = circulant_eigenvalues(K);
  // columns of F are eigenvectors
  const CMat kf = K.dense().cast<std::complex<double>>() * f;
  for (Index j = 0; j < n; ++j) {
    CHECK((kf.col(j) - lam(j) * f.col(j)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // K = F diag(sqrt(n) F k_pad) F^*
  const CMat rebuilt = f * lam.asDiagonal() * f.adjoint();
  CHECK((rebuilt - K.dense().cast<std::complex<double>>()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("centered embedding round-trips") {
  std::mt19937_64 rng(23);
  const Vec kernel = random_kernel(rng, 5);
  const CirculantMatrix K = embed_kernel_circulant(kernel, 9);
  CHECK((centered_from_first_row(K.first_row, 5) - kernel).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve_exact: single tap") {
  Vec k(1);
  k << 1.7;
  const InterpOperator L = make_downscale(8, 4, InterpMethod::Nearest, Boundary::Circular);
  const ConstraintResidual r = solve_exact(k, L);
  CHECK(r.factor == 2.0);
  CHECK(r.residual < 1e-12);
  CHECK((centered_from_first_row(r.solution, 1) - k).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("solve_exact recovers the dilation, frozen example") {
  Vec k(3);
  k << 1, 2, 3;
  const InterpOperator L = make_downscale(8, 4, InterpMethod::Nearest, Boundary::Circular);
  const ConstraintResidual r = solve_exact(k, L);
  Vec expected(5);
  expected << 1, 0, 2, 0, 3;
  CHECK(r.residual < 1e-10);
  CHECK((centered_from_first_row(r.solution, 5) - expected).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((centered_from_first_row(r.solution, 5) - dilate(k, 2)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("solve_exact equals dilate for random kernels") {
  std::mt19937_64 rng(24);
  for (int factor : {2, 4}) {
    const InterpOperator L =
        make_downscale(24, 24 / factor, InterpMethod::Nearest, Boundary::Circular);
    for (Index len : {3, 5}) {
      for (int trial = 0; trial < 10; ++trial) {
        const Vec kernel = random_kernel(rng, len);
        const ConstraintResidual r = solve_exact(kernel, L);
        const Vec dil = dilate(kernel, factor);
        CHECK(r.residual < 1e-10);
        CHECK((centered_from_first_row(r.solution, dil.size()) - dil).cwiseAbs().maxCoeff() <
              1e-10);
        // everything outside the dilated support is zero
        CHECK(r.solution.cwiseAbs().sum() ==
              doctest::Approx(dil.cwiseAbs().sum()).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("solve_exact refuses non-integer factors") {
  const InterpOperator L = make_downscale(8, 5, InterpMethod::Bilinear, Boundary::Circular);
  Vec k(3);
  k << 1, 2, 3;
  CHECK_THROWS_AS(solve_exact(k, L), std::domain_error);
}

TEST_CASE("lemma residual: integer factors are feasible for every method") {
  std::mt19937_64 rng(25);
  for (InterpMethod m : {InterpMethod::Nearest, InterpMethod::Bilinear, InterpMethod::Bicubic}) {
    const InterpOperator L = make_downscale(12, 6, m, Boundary::Circular);
    for (int trial = 0; trial < 5; ++trial) {
      const ConstraintResidual r = solve_lemma_residual(random_kernel(rng, 3), L);
      CHECK(r.residual < 1e-10);
    }
  }
}

TEST_CASE("lemma residual: non-integer factors are infeasible, frozen threshold") {
  Vec k(3);
  k << 1, 2, 3;
  const InterpOperator L = make_downscale(8, 5, InterpMethod::Bilinear, Boundary::Circular);
  const ConstraintResidual r = solve_lemma_residual(k, L);
  CHECK(r.residual > 1e-3);
}

TEST_CASE("feasibility gap over the factor grid") {
  std::mt19937_64 rng(26);
  for (Index n_in : {12, 24}) {
    for (auto [p, q] : {std::pair{2, 1}, {3, 1}, {3, 2}, {4, 3}, {8, 5}}) {
      const auto n_out = static_cast<Index>(std::lround(n_in * double(q) / p));
      const bool integer_factor = n_in % n_out == 0;
      const InterpOperator L = make_downscale(n_in, n_out, InterpMethod::Bilinear, Boundary::Circular);
      for (int trial = 0; trial < 3; ++trial) {
        const ConstraintResidual r = solve_lemma_residual(random_kernel(rng, 3), L);
        if (integer_factor) {
          CHECK(r.residual < 1e-10);
        } else {
          CHECK(r.residual > 1e-6);
        }
      }
    }
  }
}

TEST_CASE("lemma residual: zero kernel is degenerate") {
  const InterpOperator L = make_downscale(8, 5, InterpMethod::Bilinear, Boundary::Circular);
  const ConstraintResidual r = solve_lemma_residual(Vec::Zero(3), L);
  CHECK(r.degenerate);
  CHECK(r.residual == 0.0);
}

TEST_CASE("lemma solve is reproducible bit for bit") {
  std::mt19937_64 rng(27);
  const Vec kernel = random_kernel(rng, 5);
  const InterpOperator L = make_downscale(24, 17, InterpMethod::Bicubic, Boundary::Circular);
  const ConstraintResidual a = solve_lemma_residual(kernel, L);
  const ConstraintResidual b = solve_lemma_residual(kernel, L);
  CHECK(a.residual == b.residual);
  CHECK(a.solution == b.solution);
}
