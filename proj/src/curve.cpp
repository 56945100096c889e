#include "lmcf/curve.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lmcf {

void PlanarCurve::validate() const {
  const std::size_t n = size();
  if (n < 4) throw std::invalid_argument("curve: needs at least 4 vertices");
  if (basepoint_index >= n) throw std::invalid_argument("curve: basepoint index out of range");
  double span = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double len = (vertices[i + 1] - vertices[i]).norm();
    if (!(len > 0.0))
      throw std::invalid_argument("curve: degenerate segment at vertex " + std::to_string(i));
    span += len;
  }
  if (periodic()) {
    if (topology.period < 0.0) throw std::invalid_argument("curve: negative period");
    const Vec2 gap = vertices.back() - (vertices.front() + seam_offset());
    const double tol = 1e-9 * std::max(1.0, span + topology.period);
    if (gap.norm() > tol)
      throw std::invalid_argument("curve: periodic seam mismatch (" + std::to_string(gap.norm()) +
                                  ")");
  }
}

std::vector<double> PlanarCurve::segment_lengths() const {
  std::vector<double> seg(size() - 1);
  for (std::size_t i = 0; i + 1 < size(); ++i) seg[i] = (vertices[i + 1] - vertices[i]).norm();
  return seg;
}

Vec2 PlanarCurve::prev_position(std::size_t i) const {
  if (i > 0) return vertices[i - 1];
  // material predecessor of the first vertex sits one period back
  return vertices[size() - 2] + (vertices[0] - vertices[size() - 1]);
}

Vec2 PlanarCurve::next_position(std::size_t i) const {
  if (i + 1 < size()) return vertices[i + 1];
  return vertices[1] + (vertices[size() - 1] - vertices[0]);
}

bool PlanarCurve::interior(std::size_t i, std::size_t depth) const {
  if (periodic()) return i + 1 < size();
  return i >= depth && i + depth < size();
}

double field_prev(const ScalarField& f, const PlanarCurve& c, std::size_t i) {
  if (i > 0) return f[i - 1];
  return f[c.size() - 2] + (f[0] - f[c.size() - 1]);
}

double field_next(const ScalarField& f, const PlanarCurve& c, std::size_t i) {
  if (i + 1 < c.size()) return f[i + 1];
  return f[1] + (f[c.size() - 1] - f[0]);
}

}  // namespace lmcf
