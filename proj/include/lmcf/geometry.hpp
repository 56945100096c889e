#pragma once

#include <utility>
#include <vector>

#include "lmcf/curve.hpp"

namespace lmcf {

/// Per-segment lengths and the intrinsic distance field r(p) = d(o, p), o the
/// basepoint vertex. Distance is cumulative arclength along the stored
/// traversal in both directions from the basepoint (no wrap-around shortcut:
/// a periodic curve models its complete periodic extension, whose intrinsic
/// balls are arcs).
std::pair<std::vector<double>, ScalarField> arclength_and_distance(const PlanarCurve& curve);

/// Unwrapped tangent direction angle per vertex (mean of the two adjacent
/// segment angles, one-sided at open endpoints) plus a constant offset, and
/// the winding number of a closed traversal (0 for open curves).
/// Throws if a turning angle reaches pi (under-resolved curve).
std::pair<ScalarField, int> tangent_angle(const PlanarCurve& curve, double offset = 0.0);

/// Signed curvature from turning angles: turn at vertex i divided by the mean
/// of the adjacent segment lengths; left turn positive. Open endpoints copy
/// their neighbor's value.
ScalarField curvature(const PlanarCurve& curve);

/// Signed d/ds by the non-uniform central stencil, one-sided at open ends.
ScalarField gradient(const ScalarField& field, const PlanarCurve& curve);
/// |d/ds| of the above.
ScalarField gradient_norm(const ScalarField& field, const PlanarCurve& curve);

/// d2/ds2 by the non-uniform 3-point stencil; open endpoints copy neighbors
/// (they are excluded from downstream suprema regardless).
ScalarField laplacian(const ScalarField& field, const PlanarCurve& curve);

struct GeometryReport {
  ScalarField theta;
  ScalarField cos_theta;
  ScalarField varphi;    // 1 - cos(theta), composed bitwise
  ScalarField kappa;     // signed
  ScalarField abs_h;     // |kappa| bitwise
  ScalarField distance_r;
  std::vector<double> arclengths;
  int winding_number = 0;
  double inf_cos_theta = 0.0;  // over interior vertices
};

GeometryReport geometry_report(const PlanarCurve& curve, double theta_offset = 0.0);

/// Pointwise audit of the curve-level inequalities and product-lift
/// identities. Violations are maxima of (lhs - rhs); identities report
/// max |difference|. The product lift c x R has |A|^2 = kappa^2 = |H|^2 and
/// P = <A, H> with |P|^2 = kappa^4.
struct InequalityAuditReport {
  double cos_h_violation_max = 0.0;   // |grad cos(theta)|^2 <= |H|^2
  double kato_violation_max = 0.0;    // (d_s|kappa|)^2 <= (d_s kappa)^2, |kappa| > guard
  double scal_abs_max = 0.0;          // | |H|^2 - |A|^2 | for the product lift
  double p_identity_abs_max = 0.0;    // | |P|^2 - |H|^4 |
  double p_bound_violation_max = 0.0; // |P|^2 <= |A|^2 |H|^2
};

inline constexpr double kKatoKappaGuard = 1e-8;

InequalityAuditReport inequality_audit(const PlanarCurve& curve, double theta_offset = 0.0);

}  // namespace lmcf
