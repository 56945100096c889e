#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmcf/flow.hpp"

namespace lmcf {

struct NotAlmostCalibrated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Space-time cutoff eta(r, t) = eta1(|r|) * eta2(|t|): identically 1 on
/// [-R/2, R/2] x [-T/2, T/2], supported in [-R, R] x [-T, T], with
/// eta1(u) = cos^p(pi (2u/R - 1)/2) on the transition band (same in t with T).
/// C^1 everywhere, piecewise-smooth second derivative.
struct CutoffSpec {
  double R = 1.0;
  double T = 1.0;
  int profile_power = 8;

  void validate() const;  // R, T > 0; profile_power even, >= 8
};

class Cutoff {
 public:
  explicit Cutoff(CutoffSpec spec);

  double value(double r, double t) const { return eta1(r) * eta2(t); }
  /// Partial derivatives in r and t (signed), and the pure second r-derivative.
  double d_dr(double r, double t) const;
  double d2_drr(double r, double t) const;
  double d_dt(double r, double t) const;

  double eta1(double r) const { return profile(std::abs(r), spec_.R); }
  double eta2(double t) const { return profile(std::abs(t), spec_.T); }
  const CutoffSpec& spec() const { return spec_; }

 private:
  double profile(double u, double half) const;
  double profile_d1(double u, double half) const;
  double profile_d2(double u, double half) const;
  CutoffSpec spec_;
};

Cutoff build_cutoff(const CutoffSpec& spec);

/// Empirical suprema of the ratios consumed by the proof's term bounds:
/// |eta'| eta^{-3/4} R   (term (I)/(II): quartic ratio |grad psi|^4 / psi^3),
/// |eta''| eta^{-1/2} R^2 and |d eta/dt| eta^{-1/2} T (terms (III1)/(III2)).
struct CutoffAuditReport {
  double sup_dr_ratio = 0.0;   // |eta1'| eta1^{-3/4} * R
  double sup_drr_ratio = 0.0;  // |eta1''| eta1^{-1/2} * R^2
  double sup_dt_ratio = 0.0;   // |eta2'| eta2^{-1/2} * T
  bool monotone = true;        // eta1 non-increasing on [0, R]
  bool all_finite = true;
};

CutoffAuditReport audit_cutoff(const CutoffSpec& spec, int samples);

/// Scale-free profile constants by dense 1-D maximization (R = T = 1): the
/// exact suprema of the three audited ratios for a given profile power.
struct CutoffConstants {
  double c_dr_34 = 0.0;   // sup |eta'| eta^{-3/4}
  double c_drr_12 = 0.0;  // sup |eta''| eta^{-1/2}
  double c_dt_12 = 0.0;   // sup |eta'| eta^{-1/2}
};
CutoffConstants cutoff_profile_constants(int profile_power);

/// b = 1 - delta/2: midpoint of the admissible gap 1 - delta < b < 1.
double choose_b(double delta);

/// D_{R,T}(o): the intrinsic ball of radius R about the basepoint vertex
/// crossed with [center_time - T, center_time + T].
struct CylinderSpec {
  std::size_t basepoint = 0;
  double R = 1.0;
  double T = 1.0;
  double center_time = 0.0;

  void validate() const;
};

/// sup over the half cylinder D_{R/2, T/2} of |H| / (b - varphi).
/// Preconditions: the trajectory covers [center-T, center+T]; b exceeds
/// sup varphi over the full cylinder (else NotAlmostCalibrated); the curve
/// extends at least R in arclength on both sides of the basepoint at every
/// covered snapshot (else std::domain_error).
double sup_ratio(const Trajectory& traj, const CylinderSpec& cyl, double b);

struct SweepCell {
  double R = 0.0;
  double T = 0.0;
  double sup_ratio = 0.0;
  double ratio_to_bound = 0.0;  // sup_ratio / (1/R + 1/sqrt(R) + 1/sqrt(T))
};

struct EstimateSweepResult {
  std::vector<SweepCell> grid;
  double fitted_c = 0.0;        // max ratio_to_bound over the grid
  double fitted_c_small = 0.0;  // over the smallest-(R*T) half of the cells
  double fitted_c_large = 0.0;  // over the largest-(R*T) half
  bool scaling_ok = false;      // fitted_c_large <= 2 * fitted_c_small
};

/// Fills the (R, T) grid of sup-ratio measurements around center_time and
/// fits the constant. Halves are by sorting cells on (R*T, R, T) and taking
/// the first/last ceil(n/2); cell errors propagate with cell coordinates.
EstimateSweepResult sweep_and_fit(const Trajectory& traj, std::size_t basepoint,
                                  const std::vector<double>& r_list,
                                  const std::vector<double>& t_list, double b,
                                  double center_time, int profile_power = 8);

struct CheckRow {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;   // includes any slack
  bool pass = false;
};

struct MaxpointAuditReport {
  std::vector<CheckRow> rows;
  std::size_t argmax_vertex = 0;
  std::size_t argmax_snapshot = 0;  // index into the trajectory
  double psi_q_max = 0.0;
  double c_final = 0.0;  // reported constant C(eps, n) of the final display
  bool trivial = false;  // psi*Q vanished on the whole cylinder

  bool all_pass() const;
};

/// Locates the discrete argmax of psi * Q over the cylinder grid, with
/// Q = |H|^2/(b - varphi)^2 and psi(p,t) = eta(r(p), t - center), and audits
/// the maximum-point inequality chain there: the Young-inequality term bounds
/// (I), (II), (III1), (III2), the supporting identities, and the final
/// display 2(1-b)(b-varphi) psi Q^2 <= eps psi Q^2 + C (1/R^4 + 1/R^2 + 1/T^2)
/// with measured cutoff constants. Discrete slack is O(h + dt).
MaxpointAuditReport maxpoint_audit(const Trajectory& traj, const CylinderSpec& cyl, double b,
                                   double epsilon, int profile_power = 8);

/// Half the available positivity margin in 2(1-b)(b - sup varphi) - eps > 0.
double default_epsilon(double b, double sup_varphi);

}  // namespace lmcf
