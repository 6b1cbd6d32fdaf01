#pragma once

#include <array>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

#include "emdenflow/field.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

enum class SeedKind { kUser, kEquilibrium, kRegular, kOriginStable, kOriginSlow, kSaddleBranch };
enum class SaddleBranch { kNone, kStableBelowL, kStableAboveL, kUnstableBelowL, kUnstableAboveL };

struct SeedDescriptor {
  SeedKind kind = SeedKind::kUser;
  SaddleBranch branch = SaddleBranch::kNone;
  int eq_id = -1;
  double t0 = 0.0;
  double offset = 0.0;
  PhasePoint point;
  // Magnitude of the first dropped term of the local expansion.
  double seed_error = 0.0;
  // +1 to be integrated forward in t, -1 backward.
  int direction = 1;
};

struct IntegrationConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double t0 = 0.0;
  double t1 = 100.0;
  long max_steps = 2'000'000;
  double event_tol = 1e-12;
  double blowup = 1e8;
  // Equilibrium ball targets; the origin is always added.
  std::vector<PhasePoint> targets;
  bool stop_on_equilibrium = true;
  bool stop_on_exit = true;
  // Stop once this many crossings of L were recorded (0 disables).
  int stop_after_L_crossings = 0;
  // Stop when successive upward crossings of L agree to this tolerance (0 disables).
  double cycle_tol = 0.0;
  // Stop at the first crossing of L with y_t > 0 and x > section_x_min (NaN disables).
  double section_x_min = std::numeric_limits<double>::quiet_NaN();
};

enum class EventKind {
  kCrossL,
  kCrossC,
  kExitQx,
  kExitQy,
  kEquilibriumBall,
  kCrossSection,
  kBlowupGuard,
};

struct Event {
  EventKind kind = EventKind::kCrossL;
  double t = 0.0;
  PhasePoint point;
  // Sign of the time derivative of the event function, in increasing t.
  int direction = 0;
};

enum class Termination { kEquilibrium, kExitsQ, kCycle, kBudget, kBlowup, kSection };

struct DenseStep {
  double t0 = 0.0;
  double h = 0.0;
  std::array<std::array<double, 2>, 5> rc{};
};

struct Trajectory {
  ProblemParams params;
  SeedDescriptor seed;
  std::vector<double> t;
  std::vector<PhasePoint> samples;
  std::vector<DenseStep> steps;
  std::vector<Event> events;
  Termination termination = Termination::kBudget;
  // Index into the target list (targets first, origin last) when kEquilibrium.
  int equilibrium_id = -1;
  PhasePoint equilibrium_point;
  int direction = 1;

  double t_begin() const { return t.front(); }
  double t_end() const { return t.back(); }
  // Dense output, clamped to the integrated span.
  PhasePoint at(double time) const;
  std::vector<Event> events_of(EventKind kind) const;
};

struct RadialSample {
  double r = 0.0;
  double u = 0.0;
  double ur = 0.0;
};

Trajectory integrate(const ProblemParams& params, PhasePoint start, const IntegrationConfig& cfg);
Trajectory integrate(const ProblemParams& params, const SeedDescriptor& seed,
                     IntegrationConfig cfg);

// Integral over the integrated span, in increasing t, by Gauss-Legendre per dense step.
double integrate_along(const Trajectory& traj,
                       const std::function<double(double, PhasePoint)>& integrand);

std::vector<RadialSample> trajectory_to_radial(const Trajectory& traj);
// Max relative residual of the radial ODE, with u_rr from finite differences.
double residual_check(const ProblemParams& params, const Trajectory& traj);

std::string_view to_string(Termination term);
std::string_view to_string(EventKind kind);
std::string_view to_string(SeedKind kind);
std::string_view to_string(SaddleBranch branch);

}  // namespace emdenflow
