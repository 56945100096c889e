#pragma once

#include <cstdint>

#include "lmcf/curve.hpp"

namespace lmcf {

/// Seeded sampling domain for the bare inequalities the proof invokes.
/// Constraints: p > 1 with q = p/(p-1); 0 < v < b < 1; positive a, b_hat, eps.
struct SampleDomain {
  double a_min = 1e-6, a_max = 10.0;
  double b_min = 1e-6, b_max = 10.0;
  double eps_min = 0.01, eps_max = 10.0;
  double p_min = 1.1, p_max = 4.0;
  double xyz_max = 10.0;          // X, Y, Z in [0, xyz_max]
  double cal_b_min = 0.05, cal_b_max = 0.99;  // calibration b; v uniform in (0, b)
  long sample_count = 1'000'000;
  std::uint64_t seed = 12345;

  void validate() const;
};

struct LabReport {
  long violations = 0;
  std::uint64_t stream_checksum = 0;  // fingerprint of the sampled tuples
};

/// Young's inequality a b <= eps a^p + eps^{-q/p} b^q over seeded tuples.
LabReport young_check(const SampleDomain& domain);

/// 2 X^2/(b-v)^2 + 2 Y^2 Z^2/(b-v)^4 >= 4 X Y Z/(b-v)^3 over seeded tuples.
LabReport amgm_mei_check(const SampleDomain& domain);

/// Kato on a discrete curve: max over vertices with |kappa| above the guard of
/// (d_s |kappa|)^2 - (d_s kappa)^2 (positive values are violations).
double curve_kato_check(const PlanarCurve& curve);

}  // namespace lmcf
