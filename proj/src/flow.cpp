#include "lmcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lmcf/geometry.hpp"
#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

Vec2 unit_tangent(const PlanarCurve& c, std::size_t i) {
  Vec2 chord;
  if (c.has_prev(i) && c.has_next(i))
    chord = c.next_position(i) - c.prev_position(i);
  else if (c.has_next(i))
    chord = c.next_position(i) - c.vertices[i];
  else
    chord = c.vertices[i] - c.prev_position(i);
  return chord * (1.0 / chord.norm());
}

/// Purely normal discrete velocity kappa * N per vertex; vertices are material
/// points of the flow.
std::vector<Vec2> normal_velocity(const PlanarCurve& c) {
  const ScalarField kappa = curvature(c);
  std::vector<Vec2> vel(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    vel[i] = kappa[i] * unit_tangent(c, i).left_normal();
  return vel;
}

void apply_seam(PlanarCurve& c) {
  if (c.periodic()) c.vertices.back() = c.vertices.front() + c.seam_offset();
}

FlowState explicit_step(const FlowState& state, double dt, const FlowConfig& config) {
  const PlanarCurve& c = state.curve;
  auto vel = normal_velocity(c);
  PlanarCurve out = c;
  if (config.boundary == BoundaryPolicy::Periodic) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) out.vertices[i] += dt * vel[i];
    apply_seam(out);
  } else {
    for (std::size_t i = 1; i + 1 < c.size(); ++i) out.vertices[i] += dt * vel[i];
    if (config.boundary == BoundaryPolicy::PinToExact) {
      const PlanarCurve exact = sample_at(config.initial, state.time + dt);
      out.vertices.front() = exact.vertices.front();
      out.vertices.back() = exact.vertices.back();
    } else {  // free_neumann: endpoints move with the neighbor's curvature
      const ScalarField kappa = curvature(c);
      out.vertices.front() += dt * kappa[1] * unit_tangent(c, 0).left_normal();
      out.vertices.back() +=
          dt * kappa[c.size() - 2] * unit_tangent(c, c.size() - 1).left_normal();
    }
  }
  return {out, state.time + dt};
}

/// d/dt F = F_ss with the arclength Laplacian frozen at the current spacing,
/// treated implicitly: (I - dt L) F_new = F_old per coordinate.
FlowState semi_implicit_step(const FlowState& state, double dt, const FlowConfig& config) {
  const PlanarCurve& c = state.curve;
  const auto seg = c.segment_lengths();
  PlanarCurve out = c;
  const std::size_t n = c.size();

  if (config.boundary == BoundaryPolicy::Periodic) {
    const std::size_t m = n - 1;  // material vertices
    std::vector<double> lower(m), diag(m), upper(m), rhs_x(m), rhs_y(m);
    double corner_first = 0.0, corner_last = 0.0;
    const double period = c.topology.period;
    for (std::size_t i = 0; i < m; ++i) {
      const double hm = i > 0 ? seg[i - 1] : seg[m - 1];
      const double hp = seg[i];
      const auto w = d2_weights(hm, hp);
      diag[i] = 1.0 - dt * w.w0;
      lower[i] = -dt * w.wm;
      upper[i] = -dt * w.wp;
      rhs_x[i] = c.vertices[i].x;
      rhs_y[i] = c.vertices[i].y;
      if (i == 0) {
        corner_first = -dt * w.wm;  // couples to x_{m-1} (one period back)
        lower[i] = 0.0;
        rhs_x[i] -= dt * w.wm * period;
      }
      if (i == m - 1) {
        corner_last = -dt * w.wp;  // couples to x_0 (one period forward)
        upper[i] = 0.0;
        rhs_x[i] += dt * w.wp * period;
      }
    }
    const auto xs = solve_cyclic_tridiagonal(lower, diag, upper, corner_first, corner_last, rhs_x);
    const auto ys = solve_cyclic_tridiagonal(lower, diag, upper, corner_first, corner_last, rhs_y);
    for (std::size_t i = 0; i < m; ++i) out.vertices[i] = {xs[i], ys[i]};
    apply_seam(out);
    return {out, state.time + dt};
  }

  // Open curve: Dirichlet rows at the endpoints.
  Vec2 first_new, last_new;
  if (config.boundary == BoundaryPolicy::PinToExact) {
    const PlanarCurve exact = sample_at(config.initial, state.time + dt);
    first_new = exact.vertices.front();
    last_new = exact.vertices.back();
  } else {
    const ScalarField kappa = curvature(c);
    first_new = c.vertices.front() + dt * kappa[1] * unit_tangent(c, 0).left_normal();
    last_new = c.vertices.back() + dt * kappa[n - 2] * unit_tangent(c, n - 1).left_normal();
  }
  std::vector<double> lower(n, 0.0), diag(n, 1.0), upper(n, 0.0), rhs_x(n), rhs_y(n);
  rhs_x[0] = first_new.x;
  rhs_y[0] = first_new.y;
  rhs_x[n - 1] = last_new.x;
  rhs_y[n - 1] = last_new.y;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto w = d2_weights(seg[i - 1], seg[i]);
    lower[i] = -dt * w.wm;
    diag[i] = 1.0 - dt * w.w0;
    upper[i] = -dt * w.wp;
    rhs_x[i] = c.vertices[i].x;
    rhs_y[i] = c.vertices[i].y;
  }
  const auto xs = solve_tridiagonal(lower, diag, upper, rhs_x);
  const auto ys = solve_tridiagonal(lower, diag, upper, rhs_y);
  for (std::size_t i = 0; i < n; ++i) out.vertices[i] = {xs[i], ys[i]};
  return {out, state.time + dt};
}

}  // namespace

void FlowConfig::validate() const {
  initial.validate();
  require(t_end >= t_start, "flow: t_end must be >= t_start");
  require(snapshot_stride >= 1, "flow: snapshot_stride must be >= 1");
  require(reparametrize_every >= 0, "flow: reparametrize_every must be >= 0");
  require(max_steps > 0, "flow: max_steps must be positive");
  if (scheme == Scheme::ExplicitCfl)
    require(cfl_safety > 0.0 && cfl_safety <= 0.5, "flow: cfl_safety must lie in (0, 0.5]");
  else
    require(dt > 0.0, "flow: dt must be positive");
  if (boundary == BoundaryPolicy::PinToExact)
    require(initial.has_closed_form(), "flow: pin_to_exact needs a closed-form solution");
  const bool periodic_curve = initial.kind == SolutionKind::Circle ||
                              initial.kind == SolutionKind::SineGraph;
  if (boundary == BoundaryPolicy::Periodic)
    require(periodic_curve, "flow: periodic boundary requires an x-periodic curve");
  if (periodic_curve)
    require(boundary == BoundaryPolicy::Periodic,
            "flow: x-periodic curves require the periodic boundary policy");
}

FlowState step(const FlowState& state, double dt, const FlowConfig& config) {
  require(dt > 0.0, "flow: dt must be positive");
  state.curve.validate();
  if (config.scheme == Scheme::SemiImplicit) return semi_implicit_step(state, dt, config);
  if (config.scheme == Scheme::ExplicitCfl) {
    const double limit = config.cfl_safety * min_spacing(state.curve) * min_spacing(state.curve);
    if (dt > limit * (1.0 + 1e-12))
      throw CflViolation("flow: dt " + std::to_string(dt) + " exceeds CFL limit " +
                         std::to_string(limit));
  }
  return explicit_step(state, dt, config);
}

RunOutcome run_capturing(const FlowConfig& config) {
  config.validate();
  RunOutcome out;
  out.trajectory.config = config;
  FlowState state{sample_at(config.initial, config.t_start), config.t_start};
  out.trajectory.states.push_back(state);
  if (config.t_end == config.t_start) return out;

  const double initial_mean = total_length(state.curve) / (state.curve.size() - 1);
  const double collapse_limit = 1e-6 * initial_mean;
  long steps = 0;
  bool aborted = false;
  while (state.time < config.t_end) {
    if (steps >= config.max_steps) {
      out.abort_reason = "step budget exhausted at t = " + std::to_string(state.time);
      aborted = true;
      break;
    }
    const double remaining = config.t_end - state.time;
    if (remaining <= 1e-12 * std::max(1.0, std::abs(config.t_end))) break;
    double dt = config.scheme == Scheme::ExplicitCfl
                    ? config.cfl_safety * min_spacing(state.curve) * min_spacing(state.curve)
                    : config.dt;
    if (dt >= remaining) dt = remaining;
    if (!(dt > 0.0) || state.time + dt == state.time) {
      out.abort_reason = "time step underflow at t = " + std::to_string(state.time);
      aborted = true;
      break;
    }
    state = step(state, dt, config);
    ++steps;
    if (config.reparametrize_every > 0 && steps % config.reparametrize_every == 0 &&
        state.time < config.t_end)
      state.curve = reparametrize_uniform(state.curve);
    if (min_spacing(state.curve) < collapse_limit) {
      out.abort_reason = "vertex spacing collapsed below 1e-6 of the initial mean at t = " +
                         std::to_string(state.time);
      aborted = true;
      break;
    }
    if (steps % config.snapshot_stride == 0) out.trajectory.states.push_back(state);
  }
  if (!aborted && out.trajectory.states.back().time < state.time)
    out.trajectory.states.push_back(state);
  out.steps_taken = steps;
  return out;
}

Trajectory run(const FlowConfig& config) {
  RunOutcome out = run_capturing(config);
  if (out.abort_reason) throw SpacingCollapse(*out.abort_reason);
  return std::move(out.trajectory);
}

ResidualReport evolution_residuals(const Trajectory& traj) {
  require(traj.config.reparametrize_every == 0,
          "residuals: reparametrized trajectories lose material vertex identity");
  require(traj.size() >= 3, "residuals: need at least 3 snapshots");
  const std::size_t n = traj.states.front().curve.size();
  for (const auto& s : traj.states)
    require(s.curve.size() == n, "residuals: vertex count changed along the trajectory");

  const double offset = traj.theta_offset();
  std::vector<GeometryReport> reports(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    reports[k] = geometry_report(traj.states[k].curve, offset);
    if (k > 0) {
      // keep one unwrap branch across snapshots
      const double d = reports[k].theta[0] - reports[k - 1].theta[0];
      const double shift = 2.0 * kPi * std::round(d / (2.0 * kPi));
      if (shift != 0.0)
        for (auto& v : reports[k].theta.values) v -= shift;
    }
  }

  ResidualReport res;
  for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
    const PlanarCurve& c = traj.states[k].curve;
    const double dtm = traj.states[k].time - traj.states[k - 1].time;
    const double dtp = traj.states[k + 1].time - traj.states[k].time;
    const auto wt = d1_weights(dtm, dtp);
    const GeometryReport& rm = reports[k - 1];
    const GeometryReport& r0 = reports[k];
    const GeometryReport& rp = reports[k + 1];

    ScalarField kappa2;
    kappa2.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) kappa2[i] = r0.kappa[i] * r0.kappa[i];
    const ScalarField lap_theta = laplacian(r0.theta, c);
    const ScalarField lap_cos = laplacian(r0.cos_theta, c);
    const ScalarField lap_kappa2 = laplacian(kappa2, c);
    const ScalarField grad_kappa = gradient(r0.kappa, c);

    for (std::size_t i = 0; i < n; ++i) {
      if (!c.interior(i, 2)) continue;
      const double theta_dot = wt.apply(rm.theta[i], r0.theta[i], rp.theta[i]);
      res.r1 = std::max(res.r1, std::abs(theta_dot - lap_theta[i]));

      const double cos_dot = wt.apply(rm.cos_theta[i], r0.cos_theta[i], rp.cos_theta[i]);
      res.r2 = std::max(
          res.r2, std::abs(cos_dot - lap_cos[i] - kappa2[i] * r0.cos_theta[i]));

      const double k2_dot = wt.apply(rm.kappa[i] * rm.kappa[i], kappa2[i],
                                     rp.kappa[i] * rp.kappa[i]);
      res.r3 = std::max(res.r3, std::abs(k2_dot - lap_kappa2[i] +
                                         2.0 * grad_kappa[i] * grad_kappa[i] -
                                         2.0 * kappa2[i] * kappa2[i]));
    }
  }
  return res;
}

double total_length(const PlanarCurve& curve) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    len += (curve.vertices[i + 1] - curve.vertices[i]).norm();
  return len;
}

double min_spacing(const PlanarCurve& curve) {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < curve.size(); ++i)
    h = std::min(h, (curve.vertices[i + 1] - curve.vertices[i]).norm());
  return h;
}

namespace {

double point_to_polyline(const Vec2& p, const PlanarCurve& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const Vec2 a = c.vertices[i], b = c.vertices[i + 1];
    const Vec2 ab = b - a;
    const double t = std::clamp((p - a).dot(ab) / ab.dot(ab), 0.0, 1.0);
    best = std::min(best, (p - (a + t * ab)).norm());
  }
  return best;
}

double directed_hausdorff(const PlanarCurve& a, const PlanarCurve& b) {
  double worst = 0.0;
  for (const Vec2& p : a.vertices) worst = std::max(worst, point_to_polyline(p, b));
  return worst;
}

}  // namespace

double polyline_hausdorff(const PlanarCurve& a, const PlanarCurve& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

PlanarCurve reparametrize_uniform(const PlanarCurve& curve) {
  curve.validate();
  const auto seg = curve.segment_lengths();
  const std::size_t n = curve.size();
  std::vector<double> cum(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) cum[i + 1] = cum[i] + seg[i];
  const double total = cum.back();

  std::vector<double> knots, xs, ys;
  if (curve.periodic()) {
    // one ghost vertex beyond each seam keeps interior tangent quality
    knots.push_back(-seg[n - 2]);
    const Vec2 off = curve.seam_offset();
    xs.push_back(curve.vertices[n - 2].x - off.x);
    ys.push_back(curve.vertices[n - 2].y - off.y);
  }
  for (std::size_t i = 0; i < n; ++i) {
    knots.push_back(cum[i]);
    xs.push_back(curve.vertices[i].x);
    ys.push_back(curve.vertices[i].y);
  }
  if (curve.periodic()) {
    knots.push_back(total + seg[0]);
    const Vec2 off = curve.seam_offset();
    xs.push_back(curve.vertices[1].x + off.x);
    ys.push_back(curve.vertices[1].y + off.y);
  }
  const HermiteSpline sx(knots, xs), sy(knots, ys);

  PlanarCurve out = curve;
  const double cb = cum[curve.basepoint_index];
  if (curve.periodic()) {
    const std::size_t m = n - 1;
    const double h = total / m;
    for (std::size_t j = 0; j < m; ++j) out.vertices[j] = {sx.eval(j * h), sy.eval(j * h)};
    apply_seam(out);
    out.basepoint_index = static_cast<std::size_t>(std::lround(cb / h)) % m;
  } else {
    const double h = total / (n - 1);
    out.vertices.front() = curve.vertices.front();
    out.vertices.back() = curve.vertices.back();
    for (std::size_t j = 1; j + 1 < n; ++j) out.vertices[j] = {sx.eval(j * h), sy.eval(j * h)};
    out.basepoint_index =
        std::min(n - 1, static_cast<std::size_t>(std::lround(cb / h)));
  }
  out.validate();
  return out;
}

}  // namespace lmcf
