#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace lmcf {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  Vec2 left_normal() const { return {-y, x}; }  // rotation by +pi/2
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

enum class TopologyKind { Open, XPeriodic };

/// XPeriodic closes the curve after a horizontal shift: the stored vertex list
/// carries a seam duplicate, vertices.back() == vertices.front() + (period, 0).
/// period == 0 degenerates to an ordinary closed loop (circle).
struct Topology {
  TopologyKind kind = TopologyKind::Open;
  double period = 0.0;

  static Topology open() { return {TopologyKind::Open, 0.0}; }
  static Topology x_periodic(double period) { return {TopologyKind::XPeriodic, period}; }
  bool periodic() const { return kind == TopologyKind::XPeriodic; }
};

enum class FieldTag { Theta, CosTheta, Varphi, Kappa, AbsH, DistanceR, Custom };

/// Per-vertex scalar samples aligned with a PlanarCurve.
struct ScalarField {
  std::vector<double> values;
  FieldTag tag = FieldTag::Custom;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Polygonal time slice of the flow. For periodic topology the last vertex is
/// the seam duplicate of the first, so material points are 0 .. size()-2 and
/// every material point has two neighbors (wrapping across the seam with the
/// period offset applied).
struct PlanarCurve {
  std::vector<Vec2> vertices;
  Topology topology = Topology::open();
  std::size_t basepoint_index = 0;

  std::size_t size() const { return vertices.size(); }
  bool periodic() const { return topology.periodic(); }
  std::size_t material_count() const { return periodic() ? size() - 1 : size(); }

  /// Throws std::invalid_argument on degenerate segments, bad seam, or a
  /// basepoint out of range.
  void validate() const;

  /// Segment i joins vertices i and i+1; size()-1 entries.
  std::vector<double> segment_lengths() const;

  bool has_prev(std::size_t i) const { return periodic() || i > 0; }
  bool has_next(std::size_t i) const { return periodic() || i + 1 < size(); }

  Vec2 seam_offset() const { return {topology.period, 0.0}; }
  Vec2 prev_position(std::size_t i) const;
  Vec2 next_position(std::size_t i) const;

  /// True for vertices whose stencils of half-width `depth` involve only
  /// genuine (not one-sided endpoint-copied) values. Suprema of derived
  /// quantities are taken over these; the seam duplicate is excluded to avoid
  /// double counting.
  bool interior(std::size_t i, std::size_t depth = 1) const;
};

/// Stencil neighbors of a per-vertex field. Fields on periodic curves are
/// quasi-periodic: the mismatch across the seam is the constant offset
/// f[0] - f[last] (2*pi*winding for theta, the period for x, zero for most
/// fields), and values beyond the seam extend by that offset.
double field_prev(const ScalarField& f, const PlanarCurve& c, std::size_t i);
double field_next(const ScalarField& f, const PlanarCurve& c, std::size_t i);

}  // namespace lmcf
