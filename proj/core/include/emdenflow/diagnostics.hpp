#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

struct DiagnosticSample {
  double t = 0.0;
  double F = 0.0;  // x_t^2/2 + x^{p+1}/(p+1) - K x^2/(p-1)
  double V = 0.0;  // Lyapunov function, V_t = L x_t^2 - M((2x/(p-1))^q - y^q) x_t
  double Z = 0.0;  // e^{2(p+1)Lt/(p+3)} ((p+1)y^2/2 + x^{p+1} - a x y + M x y^q)
  double G = 0.0;  // (u_r^2 - q u^{p+1})/2
  std::optional<double> E;  // Sobolev energy, M = 0 and L = 0 only
  double a_exponent = 0.0;  // a = 2(p+1)(N-1)/(p+3)
};

DiagnosticSample diagnostics_at(const ProblemParams& params, double t, PhasePoint pt);
std::vector<DiagnosticSample> eval_diagnostics(const ProblemParams& params,
                                               const Trajectory& traj);

// Closed-form time derivatives.
double dV_dt(const ProblemParams& params, PhasePoint pt);
double dF_dt(const ProblemParams& params, PhasePoint pt);

struct MonotonicityReport {
  // +1 nondecreasing, -1 nonincreasing.
  int direction = 0;
  bool holds = true;
  double worst_violation = 0.0;
  // Max relative error between the closed-form derivative and finite differences
  // along the local flow.
  double identity_error = 0.0;
  // |change over the span - quadrature of the closed-form rate| / |change|.
  double integral_error = 0.0;
  std::size_t checked = 0;
};

// V decreases for M > 0, L <= 0 and increases for M < 0, L >= 0; RegimeMismatch otherwise.
MonotonicityReport check_V_monotonicity(const ProblemParams& params, const Trajectory& traj);
// F along the parts of traj strictly below L; RegimeMismatch unless LM > 0.
MonotonicityReport check_F_monotonicity(const ProblemParams& params, const Trajectory& traj);

struct ZRelationReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  // Sign of the source term U over samples with y <= sign_y_max; 0 when it changes.
  int u_sign = 0;
  bool u_sign_constant = true;
};

// Z_r - qM|u_r|^{(p-1)/(p+1)} Z = e^{(b-1)t} c x y (-L + kappa M y^{(p-1)/(p+1)}),
// b = 2(p+1)L/(p+3), c = 2(N-1)(p^2-1)/(p+3)^2, kappa = p(p+3)/(p+1)^2.
double z_source(const ProblemParams& params, double t, PhasePoint pt);
ZRelationReport check_Z_relation(const ProblemParams& params, const Trajectory& traj,
                                 std::optional<double> sign_y_max = std::nullopt);

struct GReport {
  bool applicable = false;
  bool g_negative = true;
  bool lower_bound_holds = true;
  double max_G = 0.0;
  double liminf_value = 0.0;  // r^{2/(p-1)} u at the largest r
  double liminf_bound = 0.0;
  bool liminf_holds = true;
};

// Applies for M <= -mu*(1).
GReport check_G_negative(const ProblemParams& params, const Trajectory& traj);

struct BoundCheck {
  std::string name;
  bool applicable = false;
  bool holds = true;
  double value = 0.0;
  double bound = 0.0;
};

// a priori ceilings on a regular trajectory confined to Q:
//   "regular-ceiling"   M >= 0, N >= 3, p > N/(N-2): x and y ceilings
//   "ground-state-x"    M > 0, L >= 0, trajectory not exiting Q
//   "log-decay-c0"      -mu*(2) < M < 0, N >= 2; fitted constant only
std::vector<BoundCheck> check_a_priori_bounds(const ProblemParams& params,
                                              const Trajectory& traj);

}  // namespace emdenflow
