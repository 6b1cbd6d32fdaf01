#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "emdenflow/cli/config.hpp"
#include "emdenflow/cli/report.hpp"

namespace emdenflow::cli {

// Writes through a temporary file in the target directory and renames it into
// place, so a failed write leaves nothing behind. IOError on failure.
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

SeedDescriptor resolve_seed(const ProblemParams& params, const SeedSpec& spec);
// Integrates the seed with the equilibria of params as stopping targets.
Trajectory run_seed(const ProblemParams& params, const SeedDescriptor& seed,
                    IntegrationConfig cfg);

json cmd_constants(const RunConfig& cfg);
json cmd_equilibria(const RunConfig& cfg);
json cmd_classify(const RunConfig& cfg);

struct TrajectoryOutput {
  std::string csv;
  json sidecar;
};
// CSV rows t,r,x,y,u,ur,region,F,V,Z,G and the sidecar with seed, verdict and events.
TrajectoryOutput cmd_trajectory(const RunConfig& cfg);

json cmd_diagnose(const RunConfig& cfg);
json cmd_shoot(const RunConfig& cfg);
// Text summary, or the report re-emitted when the format is json.
std::string cmd_report(const RunConfig& cfg);

// Deterministic SVG with the metadata block as JSON.
std::string cmd_portrait(const RunConfig& cfg);
json portrait_metadata(const std::string& svg);

// Default M window for a shoot target in the regime of (N, p).
std::vector<double> shoot_grid(int N, double p, const ShootSpec& spec);

// Parses argv, runs the command and returns the exit code:
// 0 success, 1 usage, 2 regime error, 3 numerical failure, 4 I/O.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace emdenflow::cli
