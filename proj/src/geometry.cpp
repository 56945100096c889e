#include "lmcf/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

std::vector<double> segment_angles(const PlanarCurve& c) {
  std::vector<double> a(c.size() - 1);
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const Vec2 d = c.vertices[i + 1] - c.vertices[i];
    a[i] = std::atan2(d.y, d.x);
  }
  return a;
}

double resolved_turn(double from_angle, double to_angle, std::size_t vertex) {
  const double turn = wrap_to_pi(to_angle - from_angle);
  if (std::abs(turn) >= kPi * (1.0 - 1e-9))
    throw std::invalid_argument("turning angle >= pi at vertex " + std::to_string(vertex) +
                                ": curve under-resolved");
  return turn;
}

struct Spacing {
  std::vector<double> seg;
  double h_minus(std::size_t i) const { return i > 0 ? seg[i - 1] : seg[seg.size() - 1]; }
  double h_plus(std::size_t i) const { return i < seg.size() ? seg[i] : seg[0]; }
};

}  // namespace

std::pair<std::vector<double>, ScalarField> arclength_and_distance(const PlanarCurve& curve) {
  curve.validate();
  const auto seg = curve.segment_lengths();
  std::vector<double> cum(curve.size(), 0.0);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) cum[i + 1] = cum[i] + seg[i];
  ScalarField r;
  r.tag = FieldTag::DistanceR;
  r.values.resize(curve.size());
  const double cb = cum[curve.basepoint_index];
  for (std::size_t i = 0; i < curve.size(); ++i) r[i] = std::abs(cum[i] - cb);
  return {seg, r};
}

std::pair<ScalarField, int> tangent_angle(const PlanarCurve& curve, double offset) {
  curve.validate();
  const std::size_t n = curve.size();
  const auto raw = segment_angles(curve);
  std::vector<double> unwrapped(raw.size());
  unwrapped[0] = raw[0];
  for (std::size_t i = 1; i < raw.size(); ++i)
    unwrapped[i] = unwrapped[i - 1] + resolved_turn(raw[i - 1], raw[i], i);

  ScalarField theta;
  theta.tag = FieldTag::Theta;
  theta.values.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i)
    theta[i] = 0.5 * (unwrapped[i - 1] + unwrapped[i]) + offset;

  double total_turn = 0.0;
  if (curve.periodic()) {
    const double seam = resolved_turn(raw[raw.size() - 1], raw[0], 0);
    theta[0] = unwrapped[0] - 0.5 * seam + offset;
    theta[n - 1] = unwrapped[raw.size() - 1] + 0.5 * seam + offset;
    total_turn = unwrapped[raw.size() - 1] - unwrapped[0] + seam;
  } else {
    theta[0] = unwrapped[0] + offset;
    theta[n - 1] = unwrapped[raw.size() - 1] + offset;
  }
  const int winding =
      curve.periodic() ? static_cast<int>(std::lround(total_turn / (2.0 * kPi))) : 0;
  return {theta, winding};
}

ScalarField curvature(const PlanarCurve& curve) {
  curve.validate();
  const std::size_t n = curve.size();
  const auto raw = segment_angles(curve);
  Spacing sp{curve.segment_lengths()};
  ScalarField kappa;
  kappa.tag = FieldTag::Kappa;
  kappa.values.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double turn = resolved_turn(raw[i - 1], raw[i], i);
    kappa[i] = turn / (0.5 * (sp.h_minus(i) + sp.h_plus(i)));
  }
  if (curve.periodic()) {
    const double turn = resolved_turn(raw[raw.size() - 1], raw[0], 0);
    kappa[0] = turn / (0.5 * (sp.h_minus(0) + sp.h_plus(0)));
    kappa[n - 1] = kappa[0];
  } else {
    kappa[0] = kappa[1];
    kappa[n - 1] = kappa[n - 2];
  }
  return kappa;
}

namespace {

ScalarField differentiate(const ScalarField& field, const PlanarCurve& curve, bool second) {
  if (field.size() != curve.size())
    throw std::invalid_argument("field length does not match vertex count");
  const std::size_t n = curve.size();
  Spacing sp{curve.segment_lengths()};
  ScalarField out;
  out.values.resize(n);
  const std::size_t lo = curve.periodic() ? 0 : 1;
  const std::size_t hi = n - 1;  // exclusive; covers all material vertices when periodic
  for (std::size_t i = lo; i < hi; ++i) {
    const double hm = sp.h_minus(i), hp = sp.h_plus(i);
    const auto w = second ? d2_weights(hm, hp) : d1_weights(hm, hp);
    out[i] = w.apply(field_prev(field, curve, i), field[i], field_next(field, curve, i));
  }
  if (curve.periodic()) {
    out[n - 1] = out[0];
  } else if (second) {
    out[0] = out[1];
    out[n - 1] = out[n - 2];
  } else {
    out[0] = (field[1] - field[0]) / sp.seg[0];
    out[n - 1] = (field[n - 1] - field[n - 2]) / sp.seg[n - 2];
  }
  return out;
}

}  // namespace

ScalarField gradient(const ScalarField& field, const PlanarCurve& curve) {
  return differentiate(field, curve, false);
}

ScalarField gradient_norm(const ScalarField& field, const PlanarCurve& curve) {
  ScalarField g = gradient(field, curve);
  for (auto& v : g.values) v = std::abs(v);
  return g;
}

ScalarField laplacian(const ScalarField& field, const PlanarCurve& curve) {
  return differentiate(field, curve, true);
}

GeometryReport geometry_report(const PlanarCurve& curve, double theta_offset) {
  GeometryReport rep;
  auto [seg, r] = arclength_and_distance(curve);
  rep.arclengths = std::move(seg);
  rep.distance_r = std::move(r);
  auto [theta, winding] = tangent_angle(curve, theta_offset);
  rep.theta = std::move(theta);
  rep.winding_number = winding;
  rep.kappa = curvature(curve);

  const std::size_t n = curve.size();
  rep.cos_theta.tag = FieldTag::CosTheta;
  rep.varphi.tag = FieldTag::Varphi;
  rep.abs_h.tag = FieldTag::AbsH;
  rep.cos_theta.values.resize(n);
  rep.varphi.values.resize(n);
  rep.abs_h.values.resize(n);
  double inf_cos = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    rep.cos_theta[i] = std::cos(rep.theta[i]);
    rep.varphi[i] = 1.0 - rep.cos_theta[i];
    rep.abs_h[i] = std::abs(rep.kappa[i]);
    if (curve.interior(i)) inf_cos = std::min(inf_cos, rep.cos_theta[i]);
  }
  rep.inf_cos_theta = inf_cos;
  return rep;
}

InequalityAuditReport inequality_audit(const PlanarCurve& curve, double theta_offset) {
  const GeometryReport rep = geometry_report(curve, theta_offset);
  const ScalarField grad_cos = gradient(rep.cos_theta, curve);
  const ScalarField grad_kappa = gradient(rep.kappa, curve);
  const ScalarField grad_abs = gradient(rep.abs_h, curve);

  InequalityAuditReport audit;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!curve.interior(i, 2)) continue;
    const double k = rep.kappa[i];
    audit.cos_h_violation_max =
        std::max(audit.cos_h_violation_max, grad_cos[i] * grad_cos[i] - k * k);
    if (std::abs(k) > kKatoKappaGuard)
      audit.kato_violation_max = std::max(
          audit.kato_violation_max, grad_abs[i] * grad_abs[i] - grad_kappa[i] * grad_kappa[i]);
    // product lift c x R: |A|^2 = kappa^2, |H|^2 = kappa^2, |P|^2 = <A,H>^2 = kappa^4
    const double a2 = k * k;
    const double h2 = k * k;
    const double p2 = a2 * h2;
    audit.scal_abs_max = std::max(audit.scal_abs_max, std::abs(h2 - a2));
    audit.p_identity_abs_max = std::max(audit.p_identity_abs_max, std::abs(p2 - h2 * h2));
    audit.p_bound_violation_max = std::max(audit.p_bound_violation_max, p2 - a2 * h2);
  }
  return audit;
}

}  // namespace lmcf
