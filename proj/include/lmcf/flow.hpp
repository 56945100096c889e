#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmcf/curve.hpp"
#include "lmcf/solutions.hpp"

namespace lmcf {

enum class Scheme { ExplicitCfl, FixedEuler, SemiImplicit };
enum class BoundaryPolicy { PinToExact, FreeNeumann, Periodic };

struct CflViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SpacingCollapse : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FlowConfig {
  SolutionSpec initial;
  double t_start = 0.0;
  double t_end = 1.0;
  Scheme scheme = Scheme::SemiImplicit;
  double dt = 1e-3;          // FixedEuler / SemiImplicit step
  double cfl_safety = 0.4;   // ExplicitCfl: dt = safety * h_min^2
  int snapshot_stride = 1;   // snapshots every this many steps
  int reparametrize_every = 0;  // 0 = never
  BoundaryPolicy boundary = BoundaryPolicy::PinToExact;
  long max_steps = 20'000'000;

  void validate() const;
};

struct FlowState {
  PlanarCurve curve;
  double time = 0.0;
};

struct Trajectory {
  std::vector<FlowState> states;
  FlowConfig config;

  std::size_t size() const { return states.size(); }
  double theta_offset() const { return config.initial.canonical_theta_offset(); }
};

/// One step of d/dt F = H (curve shortening): interior vertices move by
/// dt * kappa * N, so they are material points of the flow. Boundary per
/// policy: pin_to_exact re-evaluates the closed form at t + dt; free_neumann
/// moves the endpoint with its neighbor's curvature; periodic wraps.
/// SemiImplicit treats the arclength Laplacian (frozen from the current
/// spacing) implicitly: a tridiagonal / cyclic-tridiagonal solve per
/// coordinate, allowing dt proportional to h.
FlowState step(const FlowState& state, double dt, const FlowConfig& config);

struct RunOutcome {
  Trajectory trajectory;
  std::optional<std::string> abort_reason;  // spacing collapse / step budget
  long steps_taken = 0;
};

/// Iterates `step` from t_start to t_end, recording snapshots on the stride
/// cadence (the final state is always recorded) and resampling to uniform
/// arclength every `reparametrize_every` steps. Deterministic given config.
RunOutcome run_capturing(const FlowConfig& config);

/// As run_capturing, but an abort throws SpacingCollapse.
Trajectory run(const FlowConfig& config);

struct ResidualReport {
  double r1 = 0.0;  // d theta/dt - Lap theta
  double r2 = 0.0;  // (d/dt - Lap) cos theta - |H|^2 cos theta
  double r3 = 0.0;  // (d/dt - Lap) kappa^2 + 2 (d_s kappa)^2 - 2 kappa^4
};

/// Sup-norms of the evolution-equation residuals, measured by central
/// differencing fields over consecutive snapshots (material time derivative)
/// against the spatial operators on the middle snapshot. Requires a
/// trajectory with persistent vertex identity: reparametrize_every == 0 and
/// at least 3 snapshots.
ResidualReport evolution_residuals(const Trajectory& traj);

double total_length(const PlanarCurve& curve);
double min_spacing(const PlanarCurve& curve);

/// Symmetric Hausdorff distance between polylines (vertices against segments).
double polyline_hausdorff(const PlanarCurve& a, const PlanarCurve& b);

/// Arclength-uniform resample with the same vertex count, cubic interpolation
/// through the vertices; the basepoint is re-anchored to the nearest new
/// vertex.
PlanarCurve reparametrize_uniform(const PlanarCurve& curve);

}  // namespace lmcf
