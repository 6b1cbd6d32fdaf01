#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "emdenflow/equilibria.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

enum class CycleStability { kAttracting, kRepelling, kNeutral };

inline constexpr double kFloquetNeutralBand = 1e-6;
inline constexpr double kReturnResidualTol = 1e-8;
inline constexpr int kCycleBudget = 60;

struct CycleAnalysis {
  // Fixed point of the return map on L, section side x > X of the enclosed equilibrium.
  PhasePoint section_point;
  Equilibrium center;
  double period = 0.0;
  // One period, starting and ending on the section.
  Trajectory orbit;
  double floquet_integral = 0.0;
  CycleStability stability = CycleStability::kNeutral;
  double mean_y = 0.0;
  // Period average of y^{(p-1)/(p+1)}.
  double mean_y_pow = 0.0;
  // max x - min x over the orbit.
  double amplitude = 0.0;
  double return_residual = 0.0;
  int evaluations = 0;
};

enum class VerdictKind { kToEquilibrium, kLimitCycle, kExitsQ, kUndetermined };
enum class ExitSide { kNone, kXAxis, kYAxis };
enum class TimeDirection { kForward, kBackward };

struct LimitVerdict {
  VerdictKind kind = VerdictKind::kUndetermined;
  TimeDirection direction = TimeDirection::kForward;
  // kToEquilibrium: the limit point, the origin included.
  std::optional<Equilibrium> equilibrium;
  std::optional<CycleAnalysis> cycle;
  // kExitsQ. Crossing x = 0 is a sign change of u.
  ExitSide side = ExitSide::kNone;
  PhasePoint exit_point;

  // Evidence.
  Termination termination = Termination::kBudget;
  PhasePoint final_point;
  double final_distance = 0.0;  // to the limit set when one was identified
  std::vector<double> section_crossings;
  std::vector<Event> events;
};

LimitVerdict classify_limit(const ProblemParams& params, const Trajectory& traj,
                            TimeDirection direction);
inline LimitVerdict classify_limit(const ProblemParams& params, const Trajectory& traj) {
  return classify_limit(params, traj,
                        traj.direction >= 0 ? TimeDirection::kForward : TimeDirection::kBackward);
}

// Periodic orbit whose section passes near hint. NoCycleFound otherwise.
CycleAnalysis find_cycle(const ProblemParams& params, PhasePoint hint);

struct KolmogorovFloquet {
  // Integral of the Kolmogorov divergence over one period.
  double integral = 0.0;
  double sigma_bar_integral = 0.0;  // integral of y/x - 2/(p-1)
  double z_bar_integral = 0.0;      // integral of x^p/y - X^p/Y at the centre
  // Both sides of the decomposition I/tau = qM Y^{(p-1)/(p+1)} - L - (q/tau) int z_bar.
  double decomposition_lhs = 0.0;
  double decomposition_rhs = 0.0;
  // Period average concavity bound, checked when mean_y < Y at the centre.
  bool concavity_applies = false;
  bool concavity_holds = true;
  bool sign_agrees = true;
};

// TransformInvalid when the orbit reaches y = 0.
KolmogorovFloquet kolmogorov_floquet(const ProblemParams& params, const CycleAnalysis& cyc);

// Requires M = -mu* (RegimeMismatch otherwise). True when sigma = y/x is nondecreasing,
// slack 1e-9, on the part of the trajectory above L with sigma >= 2/(p-1).
bool sigma_monotonicity_check(const ProblemParams& params, const Trajectory& traj);

std::string_view to_string(VerdictKind kind);
std::string_view to_string(CycleStability s);
std::string_view to_string(ExitSide s);

}  // namespace emdenflow
