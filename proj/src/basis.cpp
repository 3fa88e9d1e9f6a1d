#include "disco/basis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace disco {

namespace {

Vec flatten(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

Mat unflatten(const Vec& v, Index rows, Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

Mat gaussian_image(std::mt19937_64& rng, int size) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Mat f(size, size);
  for (Index j = 0; j < size; ++j)
    for (Index i = 0; i < size; ++i) f(i, j) = normal(rng);
  return f;
}

int auto_sample_size(int largest_kernel, int requested) {
  if (requested > 0) return requested;
  return std::max(24, 4 * largest_kernel);
}

// Accumulated empirical normal system of a quadratic objective
// E_f[...] = x' G x - 2 r' x + c0 (after dividing by the sample count).
struct Quadratic {
  Mat G;
  Vec r;
  double c0 = 0.0;

  explicit Quadratic(Index dim) : G(Mat::Zero(dim, dim)), r(Vec::Zero(dim)) {}
  double objective(const Vec& x) const { return x.dot(G * x) - 2.0 * r.dot(x) + c0; }
};

double lambda_max(const Mat& G) {
  Vec v = Vec::Ones(G.rows());
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec w = G * v;
    lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
  }
  return lam;
}

Vec minimize(const Quadratic& q, const SolveConfig& cfg, const Vec& init, SolveTrace* trace) {
  Vec x;
  std::vector<double> gd_trace;
  if (cfg.method == SolveMethod::NormalEquations) {
    Mat G = q.G;
    G.diagonal().array() += 1e-12;
    x = G.ldlt().solve(q.r);
  } else {
    const double lam = lambda_max(q.G);
    if (!(lam > 0.0) || !std::isfinite(lam))
      throw std::runtime_error("gradient descent: degenerate normal matrix");
    const double rate = cfg.gd_rate > 0.0 ? cfg.gd_rate : 0.5 / lam;
    x = init;
    for (int step = 0; step < cfg.gd_steps; ++step) {
      if (step % 100 == 0) gd_trace.push_back(q.objective(x));
      x -= rate * 2.0 * (q.G * x - q.r);
    }
    gd_trace.push_back(q.objective(x));
  }
  if (!x.allFinite()) throw std::runtime_error("kernel solve produced non-finite values");
  if (trace) {
    trace->objective_at_solution = q.objective(x);
    trace->objective_at_zero = q.c0;
    trace->objective_at_init = q.objective(init);
    trace->gd_objectives = std::move(gd_trace);
  }
  return x;
}

// Columns of the map psi -> vec(L[f * psi]) over the taps of a t x t kernel.
Mat columns_inside(const Mat& f, const InterpOperator& L, int t, Boundary boundary) {
  const Index c = (t - 1) / 2;
  Mat cols(L.n_out() * L.n_out(), static_cast<Index>(t) * t);
  for (Index p = 0; p < cols.cols(); ++p) {
    const Index dy = p % t - c;
    const Index dx = p / t - c;
    cols.col(p) = flatten(downscale_image(sample_shift(f, dy, dx, boundary), L));
  }
  return cols;
}

// Columns of the map psi -> vec(L[f] * psi) over the taps of a t x t kernel.
Mat columns_outside(const Mat& lf, int t, Boundary boundary) {
  const Index c = (t - 1) / 2;
  Mat cols(lf.size(), static_cast<Index>(t) * t);
  for (Index p = 0; p < cols.cols(); ++p) {
    const Index dy = p % t - c;
    const Index dx = p / t - c;
    cols.col(p) = flatten(sample_shift(lf, dy, dx, boundary));
  }
  return cols;
}

void check_odd_square(const Mat& k, const char* what) {
  if (k.rows() != k.cols() || k.rows() < 1 || k.rows() % 2 == 0)
    throw std::invalid_argument(std::string(what) + ": kernel must be square with odd side");
}

Vec interp_init(const Mat& seed, int target, double factor) {
  return flatten(upscale_kernel(seed, target, factor, InterpMethod::Bilinear));
}

}  // namespace

std::vector<Mat> pixel_basis(int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("pixel_basis: size must be odd and positive");
  std::vector<Mat> out;
  out.reserve(static_cast<size_t>(size) * size);
  for (int j = 0; j < size * size; ++j) {
    Mat k = Mat::Zero(size, size);
    k(j / size, j % size) = 1.0;  // row-major index convention
    out.push_back(std::move(k));
  }
  return out;
}

Mat solve_intermediate(const Mat& psi1, const Mat& psi2, int target_size, double factor,
                       const SolveConfig& cfg, SolveTrace* trace) {
  check_odd_square(psi1, "solve_intermediate");
  check_odd_square(psi2, "solve_intermediate");
  if (target_size < psi1.rows() || target_size % 2 == 0)
    throw std::invalid_argument("solve_intermediate: bad target size");
  if (factor <= 1.0) throw std::invalid_argument("solve_intermediate: factor must exceed 1");
  if (cfg.num_samples < 1) throw std::invalid_argument("solve_intermediate: num_samples >= 1");

  const int largest = static_cast<int>(std::max<Index>(psi2.rows(), target_size));
  const int s_in = auto_sample_size(largest, cfg.sample_size);
  if (s_in < 2 * largest)
    throw std::invalid_argument("solve_intermediate: sample_size below twice the largest kernel");
  const auto s_out = static_cast<Index>(std::lround(s_in / factor));
  if (s_out < target_size)
    throw std::invalid_argument("solve_intermediate: downscaled grid smaller than target kernel");
  const InterpOperator L = make_downscale(s_in, s_out, cfg.interp, cfg.boundary);

  const Index dim = static_cast<Index>(target_size) * target_size;
  Quadratic q(dim);
  std::mt19937_64 rng(cfg.seed);
  for (int s = 0; s < cfg.num_samples; ++s) {
    const Mat f = gaussian_image(rng, s_in);
    const Mat lf = downscale_image(f, L);
    const Vec g1 = flatten(convolve(lf, psi1, cfg.boundary));
    const Vec c2 = flatten(downscale_image(convolve(f, psi2, cfg.boundary), L));
    const Mat a = columns_inside(f, L, target_size, cfg.boundary);
    const Mat b = columns_outside(lf, target_size, cfg.boundary);
    q.G.noalias() += a.transpose() * a + b.transpose() * b;
    q.r.noalias() += a.transpose() * g1 + b.transpose() * c2;
    q.c0 += g1.squaredNorm() + c2.squaredNorm();
  }
  q.G /= cfg.num_samples;
  q.r /= cfg.num_samples;
  q.c0 /= cfg.num_samples;

  const Vec x = minimize(q, cfg, interp_init(psi1, target_size, factor), trace);
  return unflatten(x, target_size, target_size);
}

std::vector<std::vector<Mat>> solve_general(const ScaleSet& set, const std::vector<Mat>& seeds,
                                            const SolveConfig& cfg,
                                            const std::map<int, std::vector<Mat>>* fixed,
                                            std::vector<SolveTrace>* traces) {
  const int n_scales = set.count();
  if (seeds.empty()) throw std::invalid_argument("solve_general: seeds required");
  for (const auto& s : seeds) check_odd_square(s, "solve_general");
  const auto num_functions = seeds.size();
  if (fixed) {
    for (const auto& [k, kernels] : *fixed) {
      if (k <= 0 || k >= n_scales) throw std::invalid_argument("solve_general: fixed index range");
      if (kernels.size() != num_functions)
        throw std::invalid_argument("solve_general: fixed kernels per function mismatch");
    }
  }
  if (traces) traces->assign(num_functions, SolveTrace{});

  // Unknown scale indices and their block offsets in the stacked solution.
  std::vector<int> unknown;
  std::vector<Index> offset(n_scales, -1);
  Index dim = 0;
  for (int k = 1; k < n_scales; ++k) {
    if (fixed && fixed->count(k)) continue;
    offset[k] = dim;
    dim += static_cast<Index>(set.kernel_size(k)) * set.kernel_size(k);
    unknown.push_back(k);
  }

  std::vector<std::vector<Mat>> out(num_functions, std::vector<Mat>(n_scales));
  for (size_t j = 0; j < num_functions; ++j) {
    out[j][0] = seeds[j];
    if (fixed)
      for (const auto& [k, kernels] : *fixed) out[j][k] = kernels[j];
  }
  if (unknown.empty() || n_scales < 2) return out;

  int largest = set.kernel_size(n_scales - 1);
  const int s_in = auto_sample_size(largest, cfg.sample_size);
  if (s_in < 2 * largest)
    throw std::invalid_argument("solve_general: sample_size below twice the largest kernel");

  struct Pair {
    int low, high;
    InterpOperator L;
  };
  std::vector<Pair> pairs;
  for (int k = 1; k < n_scales; ++k) {
    for (int l = 0; l < k; ++l) {
      const double factor = set.value(k) / set.value(l);
      const auto s_out = static_cast<Index>(std::lround(s_in / factor));
      if (s_out < set.kernel_size(l))
        throw std::invalid_argument("solve_general: downscaled grid smaller than pair kernel");
      pairs.push_back({l, k, make_downscale(s_in, s_out, cfg.interp, cfg.boundary)});
    }
  }

  for (size_t j = 0; j < num_functions; ++j) {
    Quadratic q(dim);
    std::mt19937_64 rng(cfg.seed ^ static_cast<std::uint64_t>(j));
    for (int s = 0; s < cfg.num_samples; ++s) {
      const Mat f = gaussian_image(rng, s_in);
      for (const auto& pair : pairs) {
        const Mat lf = downscale_image(f, pair.L);
        const int tl = set.kernel_size(pair.low);
        const int th = set.kernel_size(pair.high);
        const bool low_unknown = offset[pair.low] >= 0 && pair.low != 0;
        const bool high_unknown = offset[pair.high] >= 0;
        if (low_unknown && high_unknown) {
          const Mat b = columns_outside(lf, tl, cfg.boundary);
          const Mat a = columns_inside(f, pair.L, th, cfg.boundary);
          const Index ol = offset[pair.low], oh = offset[pair.high];
          q.G.block(ol, ol, b.cols(), b.cols()).noalias() += b.transpose() * b;
          q.G.block(oh, oh, a.cols(), a.cols()).noalias() += a.transpose() * a;
          q.G.block(ol, oh, b.cols(), a.cols()).noalias() -= b.transpose() * a;
          q.G.block(oh, ol, a.cols(), b.cols()).noalias() -= a.transpose() * b;
        } else if (high_unknown) {
          const Vec g = flatten(convolve(lf, out[j][pair.low], cfg.boundary));
          const Mat a = columns_inside(f, pair.L, th, cfg.boundary);
          const Index oh = offset[pair.high];
          q.G.block(oh, oh, a.cols(), a.cols()).noalias() += a.transpose() * a;
          q.r.segment(oh, a.cols()).noalias() += a.transpose() * g;
          q.c0 += g.squaredNorm();
        } else if (low_unknown) {
          const Vec h = flatten(downscale_image(convolve(f, out[j][pair.high], cfg.boundary), pair.L));
          const Mat b = columns_outside(lf, tl, cfg.boundary);
          const Index ol = offset[pair.low];
          q.G.block(ol, ol, b.cols(), b.cols()).noalias() += b.transpose() * b;
          q.r.segment(ol, b.cols()).noalias() += b.transpose() * h;
          q.c0 += h.squaredNorm();
        } else {
          const Vec g = flatten(convolve(lf, out[j][pair.low], cfg.boundary));
          const Vec h = flatten(downscale_image(convolve(f, out[j][pair.high], cfg.boundary), pair.L));
          q.c0 += (g - h).squaredNorm();
        }
      }
    }
    q.G /= cfg.num_samples;
    q.r /= cfg.num_samples;
    q.c0 /= cfg.num_samples;

    Vec init(dim);
    for (int k : unknown) {
      const double ratio = set.value(k) / set.value(0);
      init.segment(offset[k], static_cast<Index>(set.kernel_size(k)) * set.kernel_size(k)) =
          interp_init(seeds[j], set.kernel_size(k), ratio);
    }
    const Vec x = minimize(q, cfg, init, traces ? &(*traces)[j] : nullptr);
    for (int k : unknown)
      out[j][k] = unflatten(x.segment(offset[k], static_cast<Index>(set.kernel_size(k)) * set.kernel_size(k)),
                            set.kernel_size(k), set.kernel_size(k));
  }
  return out;
}

bool disco_builder_feasible(const ScaleSet& set) {
  const auto u = set.smallest_non_integer();
  if (!u) return true;
  const ScaleToken ru = token_ratio(set.entries[*u].token, set.entries[0].token);
  if (!token_integer(token_square(ru))) return false;
  for (int k = 0; k < set.count(); ++k) {
    if (set.entries[k].integer_ratio || k == *u) continue;
    const auto m = token_integer(token_ratio(set.entries[k].token, set.entries[*u].token));
    if (!m || *m < 1) return false;
  }
  return true;
}

MultiScaleBasis build_disco_basis(int smallest_size, const ScaleSet& set, const SolveConfig& cfg,
                                  std::vector<SolveTrace>* traces) {
  if (!disco_builder_feasible(set))
    throw std::domain_error(
        "build_disco_basis: scale set has independent non-integer scales; "
        "use build_disco_basis_general");
  if (smallest_size != set.smallest_kernel_size)
    throw std::invalid_argument("build_disco_basis: size disagrees with the scale set");

  const auto pix = pixel_basis(smallest_size);
  const auto J = static_cast<int>(pix.size());
  MultiScaleBasis basis;
  basis.scale_set = set;
  basis.num_functions = J;
  basis.slots.assign(J, std::vector<BasisSlot>(set.count()));
  if (traces) traces->clear();

  const auto u = set.smallest_non_integer();
  for (int j = 0; j < J; ++j) {
    std::vector<SolveTrace> local;
    Mat optimized;
    if (u) {
      const double factor = set.value(*u) / set.value(0);
      const auto m2 = token_integer(
          token_square(token_ratio(set.entries[*u].token, set.entries[0].token)));
      SolveConfig cfg_j = cfg;
      cfg_j.seed = cfg.seed ^ static_cast<std::uint64_t>(j);
      SolveTrace trace;
      optimized = solve_intermediate(pix[j], dilate(pix[j], static_cast<int>(*m2)),
                                     set.kernel_size(*u), factor, cfg_j, &trace);
      if (traces) traces->push_back(std::move(trace));
    }
    for (int k = 0; k < set.count(); ++k) {
      BasisSlot& slot = basis.slots[j][k];
      slot.scale = set.value(k);
      const auto& e = set.entries[k];
      if (e.integer_ratio) {
        if (e.ratio_to_smallest == 1) {
          slot.values = pix[j];
          slot.provenance = Provenance::Pixel;
        } else {
          slot.values = dilate(pix[j], static_cast<int>(e.ratio_to_smallest));
          slot.provenance = Provenance::Dilated;
        }
      } else if (k == static_cast<int>(*u)) {
        slot.values = optimized;
        slot.provenance = Provenance::Optimized;
      } else {
        const auto m = token_integer(token_ratio(e.token, set.entries[*u].token));
        slot.values = dilate(optimized, static_cast<int>(*m));
        slot.provenance = Provenance::Dilated;
      }
    }
  }
  return basis;
}

MultiScaleBasis build_disco_basis_general(int smallest_size, const ScaleSet& set,
                                          const SolveConfig& cfg,
                                          std::vector<SolveTrace>* traces) {
  if (smallest_size != set.smallest_kernel_size)
    throw std::invalid_argument("build_disco_basis_general: size disagrees with the scale set");
  const auto pix = pixel_basis(smallest_size);
  const auto J = static_cast<int>(pix.size());

  std::map<int, std::vector<Mat>> fixed;
  for (int k = 1; k < set.count(); ++k) {
    if (!set.entries[k].integer_ratio) continue;
    std::vector<Mat> kernels;
    kernels.reserve(J);
    for (int j = 0; j < J; ++j)
      kernels.push_back(dilate(pix[j], static_cast<int>(set.entries[k].ratio_to_smallest)));
    fixed[k] = std::move(kernels);
  }
  const auto kernels = solve_general(set, pix, cfg, &fixed, traces);

  MultiScaleBasis basis;
  basis.scale_set = set;
  basis.num_functions = J;
  basis.slots.assign(J, std::vector<BasisSlot>(set.count()));
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < set.count(); ++k) {
      BasisSlot& slot = basis.slots[j][k];
      slot.scale = set.value(k);
      slot.values = kernels[j][k];
      if (k == 0)
        slot.provenance = Provenance::Pixel;
      else if (set.entries[k].integer_ratio)
        slot.provenance = Provenance::Dilated;
      else
        slot.provenance = Provenance::Optimized;
    }
  }
  return basis;
}

MultiScaleBasis build_interp_baseline(int smallest_size, const ScaleSet& set,
                                      InterpMethod method) {
  if (smallest_size != set.smallest_kernel_size)
    throw std::invalid_argument("build_interp_baseline: size disagrees with the scale set");
  const auto pix = pixel_basis(smallest_size);
  const auto J = static_cast<int>(pix.size());
  MultiScaleBasis basis;
  basis.scale_set = set;
  basis.num_functions = J;
  basis.slots.assign(J, std::vector<BasisSlot>(set.count()));
  for (int j = 0; j < J; ++j) {
    for (int k = 0; k < set.count(); ++k) {
      BasisSlot& slot = basis.slots[j][k];
      slot.scale = set.value(k);
      if (k == 0) {
        slot.values = pix[j];
        slot.provenance = Provenance::Pixel;
      } else {
        const double ratio = set.value(k) / set.value(0);
        slot.values = upscale_kernel(pix[j], set.kernel_size(k), ratio, method);
        slot.provenance = Provenance::Interpolated;
      }
    }
  }
  return basis;
}

std::vector<Mat> kernels_from_weights(const MultiScaleBasis& basis, const Vec& w) {
  if (w.size() != basis.num_functions)
    throw std::invalid_argument("kernels_from_weights: weight length must equal num_functions");
  std::vector<Mat> out;
  out.reserve(basis.scale_set.count());
  for (int k = 0; k < basis.scale_set.count(); ++k) {
    Mat acc = Mat::Zero(basis.slots[0][k].values.rows(), basis.slots[0][k].values.cols());
    for (int j = 0; j < basis.num_functions; ++j) acc += w(j) * basis.slots[j][k].values;
    out.push_back(std::move(acc));
  }
  return out;
}

std::vector<PairResidual> basis_pair_residuals(const MultiScaleBasis& basis, int num_samples,
                                               std::uint64_t seed, InterpMethod interp,
                                               int sample_size) {
  const ScaleSet& set = basis.scale_set;
  const int largest = set.kernel_size(set.count() - 1);
  const int s_in = auto_sample_size(largest, sample_size);

  std::vector<PairResidual> out;
  for (int low = 0; low < set.count(); ++low) {
    for (int high = low + 1; high < set.count(); ++high) {
      PairResidual pr;
      pr.low = low;
      pr.high = high;
      pr.ratio = set.value(high) / set.value(low);
      pr.integer_ratio =
          token_integer(token_ratio(set.entries[high].token, set.entries[low].token)).has_value();
      const auto s_out = static_cast<Index>(std::lround(s_in / pr.ratio));
      if (s_out < set.kernel_size(low))
        throw std::invalid_argument("basis_pair_residuals: sample size too small for pair");
      const InterpOperator L = make_downscale(s_in, s_out, interp, Boundary::Circular);

      std::mt19937_64 rng(seed);
      double sum = 0.0;
      int count = 0;
      for (int s = 0; s < num_samples; ++s) {
        const Mat f = gaussian_image(rng, s_in);
        const Mat lf = downscale_image(f, L);
        for (int j = 0; j < basis.num_functions; ++j) {
          const Mat lhs = convolve(lf, basis.slots[j][low].values, Boundary::Circular);
          const Mat rhs =
              downscale_image(convolve(f, basis.slots[j][high].values, Boundary::Circular), L);
          const double den = lhs.norm();
          if (den == 0.0) continue;
          const double rel = (lhs - rhs).norm() / den;
          pr.max_residual = std::max(pr.max_residual, rel);
          sum += rel;
          ++count;
        }
      }
      pr.mean_residual = count > 0 ? sum / count : 0.0;
      out.push_back(pr);
    }
  }
  return out;
}

}  // namespace disco
