#include "lmcf/solutions.hpp"

#include <cmath>
#include <stdexcept>

#include "lmcf/geometry.hpp"
#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::size_t default_basepoint(const SolutionSpec& spec, std::size_t vertex_count) {
  if (spec.basepoint >= 0) {
    require(static_cast<std::size_t>(spec.basepoint) < vertex_count,
            "solution: basepoint out of range");
    return static_cast<std::size_t>(spec.basepoint);
  }
  return vertex_count / 2;
}

}  // namespace

void SolutionSpec::validate() const {
  require(samples >= 4, "solution: needs at least 4 samples");
  switch (kind) {
    case SolutionKind::GrimReaper:
    case SolutionKind::Hairclip:
      require(y_min < y_max, "solution: empty y range");
      require(y_min > -kPi / 2 && y_max < kPi / 2,
              "solution: y range must lie inside (-pi/2, pi/2)");
      break;
    case SolutionKind::Line:
      require((line_to - line_from).norm() > 0.0, "solution: line endpoints coincide");
      break;
    case SolutionKind::Circle:
      require(radius > 0.0, "solution: radius must be positive");
      break;
    case SolutionKind::SineGraph:
      require(amplitude > 0.0, "solution: amplitude must be positive");
      require(wavenumber > 0.0, "solution: wavenumber must be positive");
      require(periods >= 1, "solution: periods must be >= 1");
      break;
  }
}

double SolutionSpec::canonical_theta_offset() const {
  switch (kind) {
    case SolutionKind::GrimReaper:
    case SolutionKind::Hairclip:
      return -kPi / 2;
    default:
      return 0.0;
  }
}

double SolutionSpec::calibration_delta() const {
  validate();
  switch (kind) {
    case SolutionKind::GrimReaper:
      return std::min(std::cos(y_min), std::cos(y_max));
    case SolutionKind::Hairclip: {
      const double ys = std::max(std::abs(y_min), std::abs(y_max));
      const double e = std::exp(-time);
      const double slope = e * std::sin(ys) / std::sqrt(1.0 + e * e * std::cos(ys) * std::cos(ys));
      return 1.0 / std::sqrt(1.0 + slope * slope);
    }
    case SolutionKind::Line: {
      const Vec2 d = line_to - line_from;
      return std::cos(std::atan2(d.y, d.x));
    }
    case SolutionKind::SineGraph: {
      const double ak = amplitude * wavenumber;
      require(ak < 1.0, "solution: calibration bound requires amplitude * wavenumber < 1");
      return 1.0 / std::sqrt(1.0 + ak * ak);
    }
    case SolutionKind::Circle:
      throw std::invalid_argument("solution: a circle is not almost calibrated");
  }
  return 0.0;
}

PlanarCurve sample(const SolutionSpec& spec) { return sample_at(spec, spec.time); }

PlanarCurve sample_at(const SolutionSpec& spec, double t) {
  spec.validate();
  PlanarCurve curve;
  switch (spec.kind) {
    case SolutionKind::GrimReaper: {
      const int n = spec.samples;
      curve.vertices.resize(n);
      for (int i = 0; i < n; ++i) {
        const double y = spec.y_min + (spec.y_max - spec.y_min) * i / (n - 1);
        curve.vertices[i] = {-std::log(std::cos(y)) + t, y};
      }
      curve.topology = Topology::open();
      break;
    }
    case SolutionKind::Hairclip: {
      const int n = spec.samples;
      curve.vertices.resize(n);
      for (int i = 0; i < n; ++i) {
        const double y = spec.y_min + (spec.y_max - spec.y_min) * i / (n - 1);
        curve.vertices[i] = {std::asinh(std::exp(-t) * std::cos(y)), y};
      }
      curve.topology = Topology::open();
      break;
    }
    case SolutionKind::Line: {
      const int n = spec.samples;
      curve.vertices.resize(n);
      for (int i = 0; i < n; ++i) {
        const double a = static_cast<double>(i) / (n - 1);
        curve.vertices[i] = spec.line_from + a * (spec.line_to - spec.line_from);
      }
      curve.topology = Topology::open();
      break;
    }
    case SolutionKind::Circle: {
      const double r2 = spec.radius * spec.radius - 2.0 * (t - spec.time);
      require(r2 > 0.0, "solution: circle extinct at requested time");
      const double rho = std::sqrt(r2);
      const int n = spec.samples;
      curve.vertices.resize(n + 1);
      for (int i = 0; i < n; ++i) {
        const double a = 2.0 * kPi * i / n;
        curve.vertices[i] = {rho * std::cos(a), rho * std::sin(a)};
      }
      curve.vertices[n] = curve.vertices[0];
      curve.topology = Topology::x_periodic(0.0);
      break;
    }
    case SolutionKind::SineGraph: {
      require(std::abs(t - spec.time) <= 1e-12 * std::max(1.0, std::abs(t)),
              "solution: sine graph has no closed-form evolution");
      const double period = spec.periods * 2.0 * kPi / spec.wavenumber;
      const int n = spec.samples;
      curve.vertices.resize(n + 1);
      for (int i = 0; i < n; ++i) {
        const double x = period * i / n;
        curve.vertices[i] = {x, spec.amplitude * std::sin(spec.wavenumber * x)};
      }
      curve.vertices[n] = curve.vertices[0] + Vec2{period, 0.0};
      curve.topology = Topology::x_periodic(period);
      break;
    }
  }
  curve.basepoint_index = default_basepoint(spec, curve.size());
  curve.validate();
  return curve;
}

double translator_residual(const PlanarCurve& curve, Vec2 v) {
  if (!(v.norm() > 0.0)) throw std::invalid_argument("translator residual: zero direction vector");
  curve.validate();
  const ScalarField kappa = curvature(curve);
  double worst = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!curve.interior(i)) continue;
    Vec2 chord = curve.next_position(i) - curve.prev_position(i);
    const double len = chord.norm();
    const Vec2 tangent = chord * (1.0 / len);
    const Vec2 normal = tangent.left_normal();
    const Vec2 h = kappa[i] * normal;
    const Vec2 v_perp = v - v.dot(tangent) * tangent;
    worst = std::max(worst, (h - v_perp).norm());
  }
  return worst;
}

double implicit_residual_hairclip(const PlanarCurve& curve, double t) {
  curve.validate();
  double worst = 0.0;
  for (const Vec2& p : curve.vertices)
    worst = std::max(worst, std::abs(std::sinh(p.x) - std::exp(-t) * std::cos(p.y)));
  return worst;
}

}  // namespace lmcf
