#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace lmcf {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Wraps an angle to (-pi, pi].
double wrap_to_pi(double a);

/// Weights of the non-uniform 3-point stencil, f'(x_i) or f''(x_i) from
/// (f_{i-1}, f_i, f_{i+1}) with spacings h_minus, h_plus.
struct StencilWeights {
  double wm = 0.0, w0 = 0.0, wp = 0.0;
  double apply(double fm, double f0, double fp) const { return wm * fm + w0 * f0 + wp * fp; }
};
StencilWeights d1_weights(double h_minus, double h_plus);
StencilWeights d2_weights(double h_minus, double h_plus);

/// Thomas algorithm. lower[i] multiplies x_{i-1} in row i (lower[0] unused),
/// upper[i] multiplies x_{i+1} (upper[n-1] unused).
std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs);

/// Cyclic tridiagonal system with corner entries corner_first (row 0, column
/// n-1) and corner_last (row n-1, column 0), via Sherman-Morrison.
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper, double corner_first,
                                             double corner_last, const std::vector<double>& rhs);

/// Cubic Hermite interpolant through (knots, values) with 3-point finite
/// difference tangents (one-sided at the ends). Knots strictly increasing.
class HermiteSpline {
 public:
  HermiteSpline(std::vector<double> knots, std::vector<double> values);
  double eval(double s) const;

 private:
  std::vector<double> knots_, values_, tangents_;
};

/// Deterministic uniforms: the mt19937_64 stream is pinned by the standard, so
/// results are reproducible bit-for-bit from the seed on any platform.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : rng_(seed) {}
  double next() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }
  double next(double lo, double hi) { return lo + (hi - lo) * next(); }

 private:
  std::mt19937_64 rng_;
};

/// FNV-1a fold of raw double bits; used to fingerprint sample streams.
std::uint64_t hash_fold(std::uint64_t h, double v);
inline constexpr std::uint64_t kHashSeed = 1469598103934665603ull;

}  // namespace lmcf
