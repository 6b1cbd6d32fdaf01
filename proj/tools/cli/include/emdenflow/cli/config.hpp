#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "emdenflow/bifurcation.hpp"
#include "emdenflow/errors.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow::cli {

class IOError : public Error { using Error::Error; };
class UsageError : public Error { using Error::Error; };

enum class Command {
  kConstants,
  kEquilibria,
  kClassify,
  kTrajectory,
  kPortrait,
  kDiagnose,
  kShoot,
  kReport,
};

enum class OutputFormat { kDefault, kCsv, kJson, kSvg, kText };

// Which trajectory a command starts from.
struct SeedSpec {
  // regular | origin-stable | origin-slow | point | saddle
  std::string kind = "regular";
  PhasePoint point;
  bool backward = false;
  // st-below | st-above | unst-below | unst-above, at equilibrium eq (0-based, origin excluded).
  std::string branch = "st-above";
  int eq = 0;
  // Seed offset; EMDENFLOW_SEED_EPS when unset.
  std::optional<double> eps;
};

struct ShootSpec {
  ShootTarget target = ShootTarget::kG;
  // Defaults bracket the interesting window of the regime.
  double m_lo = std::numeric_limits<double>::quiet_NaN();
  double m_hi = std::numeric_limits<double>::quiet_NaN();
  int m_points = 64;
  bool log_spacing = true;
  double m_tol = 1e-8;
  bool refine = true;
  // 0 means hardware concurrency.
  unsigned threads = 0;
};

struct RunConfig {
  Command command = Command::kConstants;
  ProblemParams params;
  IntegrationConfig integrator = [] {
    IntegrationConfig c;
    c.t1 = 400;
    c.cycle_tol = 1e-9;
    return c;
  }();
  std::string output;  // empty: stdout (not allowed for trajectory)
  OutputFormat format = OutputFormat::kDefault;
  SeedSpec seed;
  // Sampling stride in t for CSV rows; 0 keeps the accepted steps.
  double stride = 0.0;
  ShootSpec shoot;
  std::string input;  // report
  // Portrait overlays, seed kinds as in SeedSpec.
  std::vector<std::string> overlays;
  int quiver = 24;
};

// Seed offset override from the environment, if set and valid.
std::optional<double> env_seed_eps();

std::string_view to_string(Command c);
std::string_view to_string(OutputFormat f);

}  // namespace emdenflow::cli
