#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "emdenflow/equilibria.hpp"
#include "emdenflow/params.hpp"

namespace emdenflow {

// x = r^{2/(p-1)} u, y = -r^{(p+1)/(p-1)} u_r, t = ln r.
struct PhasePoint {
  double x = 0.0;
  double y = 0.0;
};

// sigma = y/x, z = x^p/y.
struct KolmogorovPoint {
  double sigma = 0.0;
  double z = 0.0;
};

enum class RegionTag { kA, kB, kC, kD, kE, kOnL, kOnC, kOutsideQ };

std::pair<double, double> eval_H(const ProblemParams& params, PhasePoint pt);
std::pair<double, double> eval_V(const ProblemParams& params, KolmogorovPoint kpt);
// Field in (s, w) with sigma = s^{2k+1}, z = w^{2k+1}; BadK unless k > p+1.
std::pair<double, double> eval_V_desingularized(const ProblemParams& params, double s,
                                                double w, int k);

KolmogorovPoint to_kolmogorov(const ProblemParams& params, PhasePoint pt);
// Divergence of the Kolmogorov field.
double kolmogorov_divergence(const ProblemParams& params, KolmogorovPoint kpt);

// psi(y) = (K y - M y^q)^{1/p}; negative radicand yields NaN.
double psi(const ProblemParams& params, double y);

struct Nullclines {
  std::vector<PhasePoint> line;                  // y = 2x/(p-1)
  std::vector<std::vector<PhasePoint>> curve;    // x = psi(y), one polyline per branch
};

Nullclines nullclines(const ProblemParams& params, double y_max, int samples = 512);

RegionTag region_of(const ProblemParams& params, PhasePoint pt);
// Same, with the equilibria of params precomputed.
RegionTag region_of(const ProblemParams& params, PhasePoint pt,
                    const std::vector<Equilibrium>& eqs);
std::string_view to_string(RegionTag tag);

}  // namespace emdenflow
