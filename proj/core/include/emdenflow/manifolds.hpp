#pragma once

#include <array>

#include "emdenflow/equilibria.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

// Seed offset used along eigenvectors: 1e-7 (1 + |P|).
double default_seed_eps(PhasePoint P);
// delta = min(1e-4, 1e-3^{2/(p-1)}), which keeps r = e^{t0} <= 1e-3.
double default_regular_delta(double p);

SeedDescriptor seed_regular(const ProblemParams& params, double delta);
SeedDescriptor seed_regular(const ProblemParams& params);
SeedDescriptor seed_origin_stable(const ProblemParams& params, double eps = 1e-9);
SeedDescriptor seed_origin_slow(const ProblemParams& params, double eps = 1e-9);
// Order: st-below-L, st-above-L, unst-below-L, unst-above-L.
std::array<SeedDescriptor, 4> seed_saddle_branches(const ProblemParams& params,
                                                   const Equilibrium& eq, double eps,
                                                   int eq_id = 0);

// Eigenvalue and unit eigenvector (positive x component) of the Jacobian at eq.
struct EigenDirection {
  double lambda = 0.0;
  PhasePoint v;
};
std::array<EigenDirection, 2> saddle_directions(const ProblemParams& params,
                                                const Equilibrium& eq);

}  // namespace emdenflow
