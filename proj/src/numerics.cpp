#include "lmcf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmcf {

double wrap_to_pi(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

StencilWeights d1_weights(double hm, double hp) {
  const double s = hm + hp;
  return {-hp / (hm * s), (hp - hm) / (hm * hp), hm / (hp * s)};
}

StencilWeights d2_weights(double hm, double hp) {
  const double s = hm + hp;
  return {2.0 / (hm * s), -2.0 / (hm * hp), 2.0 / (hp * s)};
}

std::vector<double> solve_tridiagonal(std::vector<double> lower, std::vector<double> diag,
                                      std::vector<double> upper, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("tridiagonal: inconsistent sizes");
  for (std::size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper, double corner_first,
                                             double corner_last, const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw std::invalid_argument("cyclic tridiagonal: need n >= 3");
  // Sherman-Morrison: A = B + u v^T with u = (gamma, 0, .., 0, corner_last)^T,
  // v = (1, 0, .., 0, corner_first / gamma)^T.
  const double gamma = -diag[0];
  std::vector<double> d(diag);
  d[0] -= gamma;
  d[n - 1] -= corner_first * corner_last / gamma;
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = corner_last;
  auto x = solve_tridiagonal(lower, d, upper, rhs);
  auto z = solve_tridiagonal(lower, d, upper, u);
  const double vx = x[0] + corner_first / gamma * x[n - 1];
  const double vz = z[0] + corner_first / gamma * z[n - 1];
  const double f = vx / (1.0 + vz);
  for (std::size_t i = 0; i < n; ++i) x[i] -= f * z[i];
  return x;
}

HermiteSpline::HermiteSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n < 2 || values_.size() != n) throw std::invalid_argument("spline: need >= 2 knots");
  for (std::size_t i = 1; i < n; ++i)
    if (!(knots_[i] > knots_[i - 1])) throw std::invalid_argument("spline: knots not increasing");
  tangents_.resize(n);
  tangents_[0] = (values_[1] - values_[0]) / (knots_[1] - knots_[0]);
  tangents_[n - 1] = (values_[n - 1] - values_[n - 2]) / (knots_[n - 1] - knots_[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto w = d1_weights(knots_[i] - knots_[i - 1], knots_[i + 1] - knots_[i]);
    tangents_[i] = w.apply(values_[i - 1], values_[i], values_[i + 1]);
  }
}

double HermiteSpline::eval(double s) const {
  const std::size_t n = knots_.size();
  if (s <= knots_.front()) return values_.front();
  if (s >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double h = knots_[i + 1] - knots_[i];
  const double t = (s - knots_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * values_[i] + h10 * h * tangents_[i] + h01 * values_[i + 1] +
         h11 * h * tangents_[i + 1];
}

std::uint64_t hash_fold(std::uint64_t h, double v) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(v));
  __builtin_memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    h ^= (bits >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace lmcf
