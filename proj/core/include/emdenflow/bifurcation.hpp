#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emdenflow/classifier.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

enum class ShootTarget { kG, kH };

// How the L-crossing abscissa of a trajectory was taken.
enum class CrossingConvention {
  kFirst,             // first crossing in integration order
  kFarthest,          // largest x over all crossings
  kLastForward,       // first crossing of a backward run, i.e. last in forward time
  kEquilibriumValue,  // no crossing: monotone convergence, X of the limit
};

// Which proof's construction a grid point follows.
enum class ShootBranch {
  kPositiveM,        // K > 0, M > 0: T_reg against the origin-stable trajectory
  kNegativeMSaddle,  // K > 0, M < 0: farthest crossings of both
  kTwoEquilibria,    // K < 0, M < -mu*: T_reg against the stable branch above L at P_1
  kSaddleLoop,       // h: unstable branch below L against stable branch above L at P_1
};

struct ShootPoint {
  double M = 0.0;
  double value = 0.0;
  bool ok = false;
  std::string failure;
  ShootBranch branch = ShootBranch::kPositiveM;
  // a: T_reg (g) or the unstable branch (h); b: the stable trajectory.
  double x_a = 0.0, x_b = 0.0;
  CrossingConvention conv_a = CrossingConvention::kFirst, conv_b = CrossingConvention::kFirst;
  VerdictKind verdict_a = VerdictKind::kUndetermined, verdict_b = VerdictKind::kUndetermined;
  bool widened = false;
};

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

struct Refined {
  double M = 0.0;
  double residual = 0.0;  // shooting value at M
  int iterations = 0;
  double width = 0.0;
};

struct ShootResult {
  ShootTarget target = ShootTarget::kG;
  int N = 3;
  double p = 2.0;
  std::vector<ShootPoint> grid;
  std::vector<Bracket> brackets;
  std::vector<Refined> refined;
  // max - min over refined values; below_resolution when within twice the M tolerance.
  std::optional<double> conjecture_gap;
  bool gap_below_resolution = false;
};

struct ShootOptions {
  IntegrationConfig integration = [] {
    IntegrationConfig c;
    c.t1 = 400;
    c.cycle_tol = 1e-9;
    return c;
  }();
  double m_tol = 1e-8;
  int max_iterations = 40;
  // Worker threads for grid points; 0 means hardware concurrency.
  unsigned threads = 1;
  bool refine = true;
};

ShootPoint shoot_g_at(const ProblemParams& params, const ShootOptions& opt = {});
ShootPoint shoot_h_at(const ProblemParams& params, const ShootOptions& opt = {});

// RegimeMismatch when (N, p) admits no branch for the target.
ShootResult shoot_g(int N, double p, const std::vector<double>& m_grid, const ShootOptions& opt = {});
ShootResult shoot_h(int N, double p, const std::vector<double>& m_grid, const ShootOptions& opt = {});

// n points log-spaced in |M| between a and b (same sign), ends included.
std::vector<double> log_grid(double a, double b, int n = 64);

struct HopfCycle {
  double offset = 0.0;
  double M = 0.0;
  std::optional<double> amplitude;
  std::string failure;
};

struct HopfReport {
  bool crossing_found = false;
  double m_cross = 0.0;
  double m_bar = 0.0;
  double abs_error = 0.0;
  double lyapunov = 0.0;
  // +1 when the small cycles live at M > m_bar.
  int cycle_side = 0;
  std::vector<HopfCycle> cycles;
  std::optional<double> amplitude_ratio;  // amp(largest offset) / amp(smallest)
};

// Trace-zero crossing at the Hopf equilibrium over a 64-point grid around m_bar,
// and small cycles at the given offsets on the side fixed by the sign of the
// Lyapunov coefficient.
HopfReport hopf_scan(int N, double p, const std::vector<double>& offsets = {0.01, 0.04});

std::string_view to_string(ShootTarget t);
std::string_view to_string(CrossingConvention c);
std::string_view to_string(ShootBranch b);

}  // namespace emdenflow
