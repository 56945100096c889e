#pragma once

#include "lmcf/curve.hpp"

namespace lmcf {

enum class SolutionKind { GrimReaper, Hairclip, Line, Circle, SineGraph };

/// Closed-form test curves. Grim reaper: x = -log(cos y) + t, the unique
/// planar translator (direction (1,0)). Hairclip: sinh x = e^{-t} cos y, an
/// eternal non-translating solution that straightens as t -> +inf. Circle:
/// radius(t) = sqrt(radius0^2 - 2 t), flow-validation oracle. Sine graph:
/// y = A sin(kx) over `periods` full periods, x-periodic initial data.
struct SolutionSpec {
  SolutionKind kind = SolutionKind::Line;
  double time = 0.0;

  // grim_reaper / hairclip: sampled uniformly in y over (y_min, y_max)
  double y_min = -1.3;
  double y_max = 1.3;
  int samples = 400;

  // sine_graph
  double amplitude = 0.2;
  double wavenumber = 1.0;
  int periods = 1;

  // circle
  double radius = 1.0;

  // line
  Vec2 line_from{0.0, 0.0};
  Vec2 line_to{1.0, 0.0};

  int basepoint = -1;  // -1: middle vertex

  void validate() const;

  /// Phase of the tangent-angle convention that makes the solution almost
  /// calibrated: -pi/2 for grim reaper and hairclip (cos theta = cos y > 0),
  /// 0 otherwise.
  double canonical_theta_offset() const;

  /// Analytic lower bound delta with cos(theta) >= delta > 0 under the
  /// canonical offset. sine_graph: 1/sqrt(1 + A^2 k^2), requires A k < 1.
  /// Throws for kinds with no positive bound (circle).
  double calibration_delta() const;

  bool has_closed_form() const { return kind != SolutionKind::SineGraph; }
};

PlanarCurve sample(const SolutionSpec& spec);

/// Same parameter grid evaluated at time t (closed-form kinds only; the sine
/// graph is initial data, not an exact solution).
PlanarCurve sample_at(const SolutionSpec& spec, double t);

/// sup over interior vertices of |kappa N - (V - <V,T> T)|; zero exactly on
/// translators with direction V.
double translator_residual(const PlanarCurve& curve, Vec2 v);

/// sup over vertices of |sinh x - e^{-t} cos y|.
double implicit_residual_hairclip(const PlanarCurve& curve, double t);

}  // namespace lmcf
