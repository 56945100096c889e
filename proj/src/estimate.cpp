#include "lmcf/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "lmcf/geometry.hpp"
#include "lmcf/numerics.hpp"

namespace lmcf {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Discrete-slack calibration (frozen from the refinement studies in the test
// suite): identity (meimei) drift is O(h), the maximum-point chain drift is
// O(h + dt).
constexpr double kFpRel = 1e-11;
constexpr double kGradCosSlackCoeff = 20.0;   // x h^2 on |grad varphi| <= |H|
constexpr double kMeimeiSlackCoeff = 60.0;    // x h x scale
constexpr double kFinalSlackCoeff = 40.0;     // x (h + dt) x scale

double fp_slack(double a, double b) { return kFpRel * (std::abs(a) + std::abs(b) + 1.0); }

}  // namespace

void CutoffSpec::validate() const {
  require(R > 0.0 && T > 0.0, "cutoff: R and T must be positive");
  require(profile_power >= 8 && profile_power % 2 == 0,
          "cutoff: profile power must be even and >= 8");
}

Cutoff::Cutoff(CutoffSpec spec) : spec_(spec) { spec_.validate(); }

double Cutoff::profile(double u, double half) const {
  if (u <= 0.5 * half) return 1.0;
  if (u >= half) return 0.0;
  const double a = kPi * (2.0 * u / half - 1.0) / 2.0;
  return std::pow(std::cos(a), spec_.profile_power);
}

double Cutoff::profile_d1(double u, double half) const {
  if (u <= 0.5 * half || u >= half) return 0.0;
  const double a = kPi * (2.0 * u / half - 1.0) / 2.0;
  const int p = spec_.profile_power;
  return -p * (kPi / half) * std::pow(std::cos(a), p - 1) * std::sin(a);
}

double Cutoff::profile_d2(double u, double half) const {
  if (u <= 0.5 * half || u >= half) return 0.0;
  const double a = kPi * (2.0 * u / half - 1.0) / 2.0;
  const int p = spec_.profile_power;
  const double c = std::cos(a), s = std::sin(a);
  const double w = kPi / half;
  return p * w * w * ((p - 1) * std::pow(c, p - 2) * s * s - std::pow(c, p));
}

double Cutoff::d_dr(double r, double t) const {
  const double sgn = r < 0.0 ? -1.0 : 1.0;
  return sgn * profile_d1(std::abs(r), spec_.R) * eta2(t);
}

double Cutoff::d2_drr(double r, double t) const {
  return profile_d2(std::abs(r), spec_.R) * eta2(t);
}

double Cutoff::d_dt(double r, double t) const {
  const double sgn = t < 0.0 ? -1.0 : 1.0;
  return eta1(r) * sgn * profile_d1(std::abs(t), spec_.T);
}

Cutoff build_cutoff(const CutoffSpec& spec) { return Cutoff(spec); }

CutoffAuditReport audit_cutoff(const CutoffSpec& spec, int samples) {
  require(samples >= 1000, "cutoff audit: needs at least 1000 samples");
  const Cutoff eta(spec);
  CutoffAuditReport rep;
  for (int i = 0; i < samples; ++i) {
    // midpoint sampling of the open transition bands
    const double fr = (i + 0.5) / samples;
    const double r = spec.R * (0.5 + 0.5 * fr);
    const double t = spec.T * (0.5 + 0.5 * fr);
    const double e1 = eta.eta1(r);
    const double e2 = eta.eta2(t);
    const double v1 = std::abs(eta.d_dr(r, 0.0)) * std::pow(e1, -0.75) * spec.R;
    const double v2 = std::abs(eta.d2_drr(r, 0.0)) * std::pow(e1, -0.5) * spec.R * spec.R;
    const double v3 = std::abs(eta.d_dt(0.0, t)) * std::pow(e2, -0.5) * spec.T;
    if (!std::isfinite(v1) || !std::isfinite(v2) || !std::isfinite(v3)) rep.all_finite = false;
    rep.sup_dr_ratio = std::max(rep.sup_dr_ratio, v1);
    rep.sup_drr_ratio = std::max(rep.sup_drr_ratio, v2);
    rep.sup_dt_ratio = std::max(rep.sup_dt_ratio, v3);
  }
  double prev = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= samples; ++i) {
    const double v = eta.eta1(spec.R * i / samples);
    if (v > prev * (1.0 + 1e-14)) rep.monotone = false;
    prev = v;
  }
  return rep;
}

CutoffConstants cutoff_profile_constants(int profile_power) {
  CutoffSpec unit{1.0, 1.0, profile_power};
  unit.validate();
  const double p = profile_power;
  CutoffConstants c;
  const int n = 400000;
  for (int i = 1; i < n; ++i) {
    const double a = (kPi / 2) * i / n;
    const double cs = std::cos(a), sn = std::sin(a);
    c.c_dr_34 = std::max(c.c_dr_34, p * kPi * std::pow(cs, p / 4.0 - 1.0) * sn);
    c.c_drr_12 =
        std::max(c.c_drr_12, p * kPi * kPi *
                                 std::abs((p - 1) * std::pow(cs, p / 2.0 - 2.0) * sn * sn -
                                          std::pow(cs, p / 2.0)));
    c.c_dt_12 = std::max(c.c_dt_12, p * kPi * std::pow(cs, p / 2.0 - 1.0) * sn);
  }
  return c;
}

double choose_b(double delta) {
  require(delta > 0.0 && delta <= 1.0, "choose_b: delta must lie in (0, 1]");
  return 1.0 - delta / 2.0;
}

double default_epsilon(double b, double sup_varphi) {
  require(b > sup_varphi && b < 1.0, "epsilon: requires sup varphi < b < 1");
  return (1.0 - b) * (b - sup_varphi);
}

void CylinderSpec::validate() const {
  require(R > 0.0 && T > 0.0, "cylinder: R and T must be positive");
}

namespace {

class ReportCache {
 public:
  explicit ReportCache(const Trajectory& traj) : traj_(traj), slots_(traj.size()) {}
  const GeometryReport& at(std::size_t k) {
    if (!slots_[k]) slots_[k] = geometry_report(traj_.states[k].curve, traj_.theta_offset());
    return *slots_[k];
  }
  const Trajectory& traj() const { return traj_; }

 private:
  const Trajectory& traj_;
  std::vector<std::optional<GeometryReport>> slots_;
};

struct FrameSnap {
  std::size_t index = 0;
  bool in_half = false;
  std::vector<double> signed_s;  // arclength coordinate relative to the basepoint
};

struct Frame {
  std::vector<FrameSnap> snaps;
  double sup_varphi = 0.0;  // over the full cylinder
};

Frame make_frame(ReportCache& cache, const CylinderSpec& cyl) {
  cyl.validate();
  const Trajectory& traj = cache.traj();
  require(traj.size() >= 1, "cylinder: empty trajectory");
  const double tol_t = 1e-9 * std::max(1.0, cyl.T);
  if (traj.states.front().time > cyl.center_time - cyl.T + tol_t ||
      traj.states.back().time < cyl.center_time + cyl.T - tol_t)
    throw std::domain_error("trajectory does not cover the cylinder in time");

  Frame frame;
  frame.sup_varphi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double dt = traj.states[k].time - cyl.center_time;
    if (std::abs(dt) > cyl.T + tol_t) continue;
    const GeometryReport& rep = cache.at(k);
    const PlanarCurve& curve = traj.states[k].curve;
    require(cyl.basepoint < curve.size(), "cylinder: basepoint out of range");
    FrameSnap snap;
    snap.index = k;
    snap.in_half = std::abs(dt) <= cyl.T / 2 + tol_t;
    snap.signed_s.resize(curve.size());
    std::vector<double> cum(curve.size(), 0.0);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) cum[i + 1] = cum[i] + rep.arclengths[i];
    const double cb = cum[cyl.basepoint];
    for (std::size_t i = 0; i < curve.size(); ++i) snap.signed_s[i] = cum[i] - cb;
    const double left = cb, right = cum.back() - cb;
    if (std::min(left, right) < cyl.R * (1.0 - 1e-12))
      throw std::domain_error("intrinsic radius of the curve is below R at t = " +
                              std::to_string(traj.states[k].time));
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (!curve.interior(i)) continue;
      if (std::abs(snap.signed_s[i]) <= cyl.R * (1.0 + 1e-12))
        frame.sup_varphi = std::max(frame.sup_varphi, rep.varphi[i]);
    }
    frame.snaps.push_back(std::move(snap));
  }
  require(!frame.snaps.empty(), "cylinder: no snapshots inside the time window");
  return frame;
}

void check_calibrated(double b, const Frame& frame) {
  if (!(b > frame.sup_varphi))
    throw NotAlmostCalibrated("not almost calibrated at level b = " + std::to_string(b) +
                              " (sup varphi = " + std::to_string(frame.sup_varphi) + ")");
}

double sup_ratio_impl(ReportCache& cache, const CylinderSpec& cyl, double b) {
  const Frame frame = make_frame(cache, cyl);
  check_calibrated(b, frame);
  double sup = 0.0;
  for (const FrameSnap& snap : frame.snaps) {
    if (!snap.in_half) continue;
    const GeometryReport& rep = cache.at(snap.index);
    const PlanarCurve& curve = cache.traj().states[snap.index].curve;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (!curve.interior(i)) continue;
      if (std::abs(snap.signed_s[i]) > cyl.R / 2 * (1.0 + 1e-12)) continue;
      sup = std::max(sup, rep.abs_h[i] / (b - rep.varphi[i]));
    }
  }
  return sup;
}

}  // namespace

double sup_ratio(const Trajectory& traj, const CylinderSpec& cyl, double b) {
  ReportCache cache(traj);
  return sup_ratio_impl(cache, cyl, b);
}

EstimateSweepResult sweep_and_fit(const Trajectory& traj, std::size_t basepoint,
                                  const std::vector<double>& r_list,
                                  const std::vector<double>& t_list, double b, double center_time,
                                  int profile_power) {
  require(!r_list.empty() && !t_list.empty(), "sweep: empty R or T list");
  (void)profile_power;
  ReportCache cache(traj);
  EstimateSweepResult result;
  for (double r : r_list) {
    for (double t : t_list) {
      SweepCell cell;
      cell.R = r;
      cell.T = t;
      const CylinderSpec cyl{basepoint, r, t, center_time};
      try {
        cell.sup_ratio = sup_ratio_impl(cache, cyl, b);
      } catch (const NotAlmostCalibrated& e) {
        throw NotAlmostCalibrated("cell (R = " + std::to_string(r) + ", T = " + std::to_string(t) +
                                  "): " + e.what());
      } catch (const std::exception& e) {
        throw std::domain_error("cell (R = " + std::to_string(r) + ", T = " + std::to_string(t) +
                                "): " + e.what());
      }
      cell.ratio_to_bound =
          cell.sup_ratio / (1.0 / r + 1.0 / std::sqrt(r) + 1.0 / std::sqrt(t));
      result.grid.push_back(cell);
    }
  }
  std::vector<std::size_t> order(result.grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t bdx) {
    const SweepCell& ca = result.grid[a];
    const SweepCell& cb = result.grid[bdx];
    const double pa = ca.R * ca.T, pb = cb.R * cb.T;
    if (pa != pb) return pa < pb;
    if (ca.R != cb.R) return ca.R < cb.R;
    return ca.T < cb.T;
  });
  const std::size_t half = (order.size() + 1) / 2;
  for (std::size_t j = 0; j < order.size(); ++j) {
    const double v = result.grid[order[j]].ratio_to_bound;
    result.fitted_c = std::max(result.fitted_c, v);
    if (j < half) result.fitted_c_small = std::max(result.fitted_c_small, v);
    if (j + half >= order.size()) result.fitted_c_large = std::max(result.fitted_c_large, v);
  }
  result.scaling_ok = result.fitted_c_large <= 2.0 * result.fitted_c_small + kFpRel;
  return result;
}

bool MaxpointAuditReport::all_pass() const {
  return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

namespace {

CheckRow make_row(std::string name, double lhs, double rhs, double slack) {
  CheckRow row;
  row.name = std::move(name);
  row.lhs = lhs;
  row.rhs = rhs + slack;
  row.pass = lhs <= row.rhs;
  return row;
}

}  // namespace

MaxpointAuditReport maxpoint_audit(const Trajectory& traj, const CylinderSpec& cyl, double b,
                                   double epsilon, int profile_power) {
  ReportCache cache(traj);
  const Frame frame = make_frame(cache, cyl);
  check_calibrated(b, frame);
  require(epsilon > 0.0 && epsilon < 2.0 * (1.0 - b) * (b - frame.sup_varphi),
          "maxpoint audit: epsilon outside (0, 2(1-b)(b - sup varphi))");

  const Cutoff eta = build_cutoff({cyl.R, cyl.T, profile_power});
  const CutoffConstants consts = cutoff_profile_constants(profile_power);
  const double c34 = consts.c_dr_34 / cyl.R;          // >= |grad psi| psi^{-3/4}
  const double c12rr = consts.c_drr_12 / (cyl.R * cyl.R);
  const double c12t = consts.c_dt_12 / cyl.T;

  // C(eps) per term, from Young's inequality with the measured cutoff ratios:
  // (I): p = 4/3, q = 4 with eps1 = eps/8; (II): p = q = 2 with eps2 = eps/8;
  // (III1), (III2): p = q = 2 with eps3 = eps/4.
  const double c_I = 2.0 * std::pow(8.0 / epsilon, 3.0) * std::pow(consts.c_dr_34, 4.0);
  const double c_II = (16.0 / epsilon) * std::pow(consts.c_dr_34, 4.0);
  const double c_III1 = (4.0 / epsilon) * consts.c_drr_12 * consts.c_drr_12;
  const double c_III2 = (4.0 / epsilon) * consts.c_dt_12 * consts.c_dt_12;

  MaxpointAuditReport report;
  report.c_final = c_I + c_II + c_III1 + c_III2;
  const double geom_budget = c_I / std::pow(cyl.R, 4) + c_II / std::pow(cyl.R, 4) +
                             c_III1 / std::pow(cyl.R, 4) + c_III2 / (cyl.T * cyl.T);
  const double final_budget =
      report.c_final *
      (std::pow(cyl.R, -4.0) + std::pow(cyl.R, -2.0) + std::pow(cyl.T, -2.0));

  // Discrete argmax of psi * Q; ties resolve to the smallest vertex index,
  // then the earliest snapshot.
  double best = 0.0;
  std::size_t best_frame = frame.snaps.size();
  std::size_t best_vertex = 0;
  bool found = false;
  for (std::size_t f = 0; f < frame.snaps.size(); ++f) {
    const FrameSnap& snap = frame.snaps[f];
    const GeometryReport& rep = cache.at(snap.index);
    const PlanarCurve& curve = cache.traj().states[snap.index].curve;
    const double dt = cache.traj().states[snap.index].time - cyl.center_time;
    for (std::size_t i = 0; i < curve.size(); ++i) {
      if (!curve.interior(i, 2)) continue;
      const double q = std::pow(rep.abs_h[i] / (b - rep.varphi[i]), 2.0);
      const double v = eta.value(snap.signed_s[i], dt) * q;
      const bool better =
          !found || v > best ||
          (v == best && (i < best_vertex || (i == best_vertex && f < best_frame)));
      if (better) {
        best = v;
        best_frame = f;
        best_vertex = i;
        found = true;
      }
    }
  }
  require(found, "maxpoint audit: no admissible vertices in the cylinder");
  report.psi_q_max = best;
  const FrameSnap& snap = frame.snaps[best_frame];
  report.argmax_snapshot = snap.index;
  report.argmax_vertex = best_vertex;

  if (best == 0.0) {
    // H vanishes on the whole cylinder; every bound is 0 <= rhs.
    report.trivial = true;
    report.rows.push_back(make_row("young_substep_I", 0.0, 0.0, kFpRel));
    report.rows.push_back(make_row("term_I", 0.0, c_I / std::pow(cyl.R, 4), kFpRel));
    report.rows.push_back(make_row("term_II", 0.0, c_II / std::pow(cyl.R, 4), kFpRel));
    report.rows.push_back(make_row("term_III1", 0.0, c_III1 / std::pow(cyl.R, 4), kFpRel));
    report.rows.push_back(make_row("term_III2", 0.0, c_III2 / (cyl.T * cyl.T), kFpRel));
    report.rows.push_back(make_row("lapcomp_term_zero", 0.0, 0.0, kFpRel));
    report.rows.push_back(make_row("final", 0.0, epsilon * 0.0 + final_budget, kFpRel));
    return report;
  }

  const GeometryReport& rep = cache.at(snap.index);
  const PlanarCurve& curve = cache.traj().states[snap.index].curve;
  const double t_off = cache.traj().states[snap.index].time - cyl.center_time;
  const std::size_t i = best_vertex;
  const std::size_t n = curve.size();

  // Per-vertex fields on the argmax snapshot.
  ScalarField q_field, h2_field, psi_q_field;
  q_field.values.resize(n);
  h2_field.values.resize(n);
  psi_q_field.values.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double d = b - rep.varphi[j];
    q_field[j] = rep.abs_h[j] * rep.abs_h[j] / (d * d);
    h2_field[j] = rep.abs_h[j] * rep.abs_h[j];
    psi_q_field[j] = eta.value(snap.signed_s[j], t_off) * q_field[j];
  }
  const ScalarField grad_varphi = gradient(rep.varphi, curve);
  const ScalarField grad_h2 = gradient(h2_field, curve);
  const ScalarField grad_q = gradient(q_field, curve);
  const ScalarField grad_kappa = gradient(rep.kappa, curve);
  const ScalarField grad_psi_q = gradient(psi_q_field, curve);
  const ScalarField lap_psi_q = laplacian(psi_q_field, curve);

  const double varphi = rep.varphi[i];
  const double d = b - varphi;
  const double habs = rep.abs_h[i];
  const double q = q_field[i];
  const double s_signed = snap.signed_s[i];
  const double psi = eta.value(s_signed, t_off);
  const double grad_psi = eta.d_dr(s_signed, t_off);  // d/ds: |grad r| = 1, sign of s
  const double abs_grad_psi = std::abs(grad_psi);
  const double lap_psi = eta.d2_drr(s_signed, t_off);  // Delta r = 0 away from the basepoint
  const double psi_t = eta.d_dt(s_signed, t_off);

  const double h_local = total_length(curve) / (n - 1);
  double dt_local = 0.0;
  if (best_frame > 0)
    dt_local = cache.traj().states[snap.index].time -
               cache.traj().states[frame.snaps[best_frame - 1].index].time;
  else if (best_frame + 1 < frame.snaps.size())
    dt_local = cache.traj().states[frame.snaps[best_frame + 1].index].time -
               cache.traj().states[snap.index].time;

  // Young's sub-step of (I) on the measured numbers, p = q = 2.
  {
    const double a_val = std::pow(psi, 0.75) * std::pow(q, 1.5);
    const double b_val = abs_grad_psi * std::pow(psi, -0.75);
    report.rows.push_back(make_row("young_substep_I", a_val * b_val,
                                   epsilon * a_val * a_val + b_val * b_val / epsilon,
                                   fp_slack(a_val * b_val, b_val)));
  }

  // |grad varphi| <= |H| (the gradient form of cos-theta vs H), O(h^2) slack.
  const double grad_varphi_abs = std::abs(grad_varphi[i]);
  report.rows.push_back(make_row("grad_varphi_le_H", grad_varphi_abs, habs,
                                 kGradCosSlackCoeff * h_local * h_local * (1.0 + habs) +
                                     fp_slack(grad_varphi_abs, habs)));

  // (I) = 2 Q <grad varphi, grad psi> / (b - varphi).
  {
    const double lhs = 2.0 * q * grad_varphi[i] * grad_psi / d;
    const double discrete_gap =
        std::max(0.0, 2.0 * q * abs_grad_psi * (grad_varphi_abs - habs) / d);
    report.rows.push_back(make_row("term_I", lhs,
                                   epsilon / 4.0 * psi * q * q + c_I / std::pow(cyl.R, 4) +
                                       discrete_gap,
                                   fp_slack(lhs, geom_budget)));
  }
  // (II) = 2 Q |grad psi|^2 / psi.
  {
    const double lhs = psi > 0.0 ? 2.0 * q * abs_grad_psi * abs_grad_psi / psi : 0.0;
    report.rows.push_back(make_row("term_II", lhs,
                                   epsilon / 4.0 * psi * q * q + c_II / std::pow(cyl.R, 4),
                                   fp_slack(lhs, geom_budget)));
  }
  // (III1) = -Q Delta psi, with Delta psi = eta_rr (Laplacian comparison term
  // (n-1)/r vanishes for n = 1 and is kept symbolically below).
  {
    const double lhs = -q * lap_psi;
    report.rows.push_back(make_row("term_III1", lhs,
                                   epsilon / 4.0 * psi * q * q + c_III1 / std::pow(cyl.R, 4),
                                   fp_slack(lhs, geom_budget)));
  }
  // (III2) = Q d psi/dt.
  {
    const double lhs = q * psi_t;
    report.rows.push_back(make_row("term_III2", lhs,
                                   epsilon / 4.0 * psi * q * q + c_III2 / (cyl.T * cyl.T),
                                   fp_slack(lhs, geom_budget)));
  }
  // (n-1) |d eta/dr| Q / r at n = 1.
  {
    const double r_abs = std::abs(s_signed);
    const double lhs = r_abs > 0.0 ? 0.0 * abs_grad_psi * q / r_abs : 0.0;
    report.rows.push_back(make_row("lapcomp_term_zero", lhs, 0.0, kFpRel));
  }
  // Identity (meimei): 2<grad |H|^2, grad varphi>/(b-varphi)^3
  //   + 4 |H|^2 |grad varphi|^2/(b-varphi)^4 = 2 <grad varphi, grad Q>/(b-varphi).
  {
    const double t1 = 2.0 * grad_h2[i] * grad_varphi[i] / std::pow(d, 3);
    const double t2 = 4.0 * habs * habs * grad_varphi[i] * grad_varphi[i] / std::pow(d, 4);
    const double t3 = 2.0 * grad_varphi[i] * grad_q[i] / d;
    const double scale = 1.0 + std::abs(t1) + std::abs(t2) + std::abs(t3);
    report.rows.push_back(make_row("identity_meimei", std::abs(t1 + t2 - t3),
                                   kMeimeiSlackCoeff * h_local * scale, 0.0));
  }
  // AM-GM relation (mei) with the curve substitutions X = |d_s kappa|,
  // Y = |grad varphi|, Z = |H|.
  {
    const double X = std::abs(grad_kappa[i]), Y = grad_varphi_abs, Z = habs;
    const double lhs = 4.0 * X * Y * Z / std::pow(d, 3);
    const double rhs = 2.0 * X * X / (d * d) + 2.0 * Y * Y * Z * Z / std::pow(d, 4);
    report.rows.push_back(make_row("amgm_mei", lhs, rhs, fp_slack(lhs, rhs)));
  }
  // Discrete maximum-point conditions: the grid argmax has non-positive
  // discrete Laplacian, and a non-negative backward time difference.
  report.rows.push_back(
      make_row("argmax_laplacian", lap_psi_q[i], 0.0, fp_slack(lap_psi_q[i], best / (h_local * h_local))));
  double backward_rate = 0.0;
  if (best_frame > 0) {
    const FrameSnap& prev = frame.snaps[best_frame - 1];
    const GeometryReport& rep_prev = cache.at(prev.index);
    const double t_prev = cache.traj().states[prev.index].time - cyl.center_time;
    const double d_prev = b - rep_prev.varphi[i];
    const double q_prev = rep_prev.abs_h[i] * rep_prev.abs_h[i] / (d_prev * d_prev);
    const double v_prev = eta.value(prev.signed_s[i], t_prev) * q_prev;
    const double step = cache.traj().states[snap.index].time - cache.traj().states[prev.index].time;
    backward_rate = (best - v_prev) / step;
    report.rows.push_back(
        make_row("argmax_time_backward", -backward_rate, 0.0, fp_slack(backward_rate, best)));
  }
  // Final display: 2(1-b)(b-varphi) psi Q^2 <= eps psi Q^2
  //   + C(eps,n)(1/R^4 + 1/R^2 + 1/T^2), with the measured positive part of
  //   the discrete (meei) bracket and O(h + dt) slack.
  {
    const double phi_term = -2.0 * grad_varphi[i] / d;  // the transient field Phi
    double bracket = lap_psi_q[i] + phi_term * grad_psi_q[i] - backward_rate;
    if (psi > 0.0) bracket -= 2.0 * (grad_psi / psi) * grad_psi_q[i];
    const double zeta = std::max(0.0, bracket);
    const double lhs = 2.0 * (1.0 - b) * d * psi * q * q;
    const double slack = kFinalSlackCoeff * (h_local + dt_local) * std::max(1.0, q * q);
    report.rows.push_back(make_row("final", lhs,
                                   epsilon * psi * q * q + final_budget + zeta + slack,
                                   fp_slack(lhs, final_budget)));
  }
  return report;
}

}  // namespace lmcf
