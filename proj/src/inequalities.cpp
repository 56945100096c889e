#include "lmcf/inequalities.hpp"

#include <cmath>
#include <stdexcept>

#include "lmcf/geometry.hpp"
#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

// Relative cushion for floating-point evaluation of inequalities that hold
// with exact arithmetic.
constexpr double kFpRel = 1e-12;

bool violates(double lhs, double rhs) { return lhs > rhs + kFpRel * (std::abs(rhs) + 1.0); }

}  // namespace

void SampleDomain::validate() const {
  if (!(a_min > 0.0 && a_min < a_max) || !(b_min > 0.0 && b_min < b_max))
    throw std::invalid_argument("sample domain: a, b ranges must be positive");
  if (!(eps_min > 0.0 && eps_min < eps_max))
    throw std::invalid_argument("sample domain: eps range must be positive");
  if (!(p_min > 1.0 && p_min < p_max))
    throw std::invalid_argument("sample domain: p range must satisfy p > 1");
  if (!(xyz_max > 0.0)) throw std::invalid_argument("sample domain: xyz_max must be positive");
  if (!(cal_b_min > 0.0 && cal_b_min < cal_b_max && cal_b_max < 1.0))
    throw std::invalid_argument("sample domain: calibration b range must sit inside (0, 1)");
  if (sample_count <= 0) throw std::invalid_argument("sample domain: sample count must be positive");
}

LabReport young_check(const SampleDomain& domain) {
  domain.validate();
  UniformRng rng(domain.seed);
  LabReport rep;
  rep.stream_checksum = kHashSeed;
  for (long s = 0; s < domain.sample_count; ++s) {
    const double a = rng.next(domain.a_min, domain.a_max);
    const double b = rng.next(domain.b_min, domain.b_max);
    const double eps = rng.next(domain.eps_min, domain.eps_max);
    const double p = rng.next(domain.p_min, domain.p_max);
    const double q = p / (p - 1.0);
    const double lhs = a * b;
    const double rhs = eps * std::pow(a, p) + std::pow(eps, -q / p) * std::pow(b, q);
    if (violates(lhs, rhs)) ++rep.violations;
    rep.stream_checksum = hash_fold(rep.stream_checksum, a);
    rep.stream_checksum = hash_fold(rep.stream_checksum, b);
    rep.stream_checksum = hash_fold(rep.stream_checksum, eps);
    rep.stream_checksum = hash_fold(rep.stream_checksum, p);
    rep.stream_checksum = hash_fold(rep.stream_checksum, rhs - lhs);
  }
  return rep;
}

LabReport amgm_mei_check(const SampleDomain& domain) {
  domain.validate();
  UniformRng rng(domain.seed);
  LabReport rep;
  rep.stream_checksum = kHashSeed;
  for (long s = 0; s < domain.sample_count; ++s) {
    const double x = rng.next(0.0, domain.xyz_max);
    const double y = rng.next(0.0, domain.xyz_max);
    const double z = rng.next(0.0, domain.xyz_max);
    const double cb = rng.next(domain.cal_b_min, domain.cal_b_max);
    const double v = cb * rng.next();  // 0 < v < b
    const double d = cb - v;
    const double lhs = 4.0 * x * y * z / (d * d * d);
    const double rhs = 2.0 * x * x / (d * d) + 2.0 * y * y * z * z / (d * d * d * d);
    if (violates(lhs, rhs)) ++rep.violations;
    rep.stream_checksum = hash_fold(rep.stream_checksum, x);
    rep.stream_checksum = hash_fold(rep.stream_checksum, y);
    rep.stream_checksum = hash_fold(rep.stream_checksum, z);
    rep.stream_checksum = hash_fold(rep.stream_checksum, d);
    rep.stream_checksum = hash_fold(rep.stream_checksum, rhs - lhs);
  }
  return rep;
}

double curve_kato_check(const PlanarCurve& curve) {
  curve.validate();
  const ScalarField kappa = curvature(curve);
  ScalarField abs_kappa = kappa;
  for (auto& v : abs_kappa.values) v = std::abs(v);
  const ScalarField gk = gradient(kappa, curve);
  const ScalarField ga = gradient(abs_kappa, curve);
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!curve.interior(i, 2)) continue;
    if (std::abs(kappa[i]) <= kKatoKappaGuard) continue;
    worst = std::max(worst, ga[i] * ga[i] - gk[i] * gk[i]);
  }
  return worst;
}

}  // namespace lmcf
