#include "emdenflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "emdenflow/equilibria.hpp"
#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

double spow(double v, double e) { return std::copysign(std::pow(std::abs(v), e), v); }

double kolmogorov_J(double p, double sigma, double z) {
  return std::pow(std::abs(spow(sigma, p) * z), 1 / (p + 1));
}

}  // namespace

std::pair<double, double> eval_H(const ProblemParams& params, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  return {2 * pt.x / (p - 1) - pt.y,
          -dc.K * pt.y + spow(pt.x, p) + params.M * std::pow(std::abs(pt.y), dc.q)};
}

std::pair<double, double> eval_V(const ProblemParams& params, KolmogorovPoint k) {
  const double p = params.p, N = params.N;
  const double mj = params.M * kolmogorov_J(p, k.sigma, k.z);
  return {k.sigma * (k.sigma + 2 - N + k.z + mj), k.z * (N - p * k.sigma - k.z - mj)};
}

std::pair<double, double> eval_V_desingularized(const ProblemParams& params, double s,
                                                double w, int k) {
  validate(params);
  const double p = params.p, N = params.N;
  if (!(k > p + 1)) throw BadK("desingularization needs an integer k > p+1");
  const int e = 2 * k + 1;
  const double se = std::pow(s, e), we = std::pow(w, e);
  const double mj = params.M * std::pow(std::abs(std::pow(spow(s, p), e) * we), 1 / (p + 1));
  return {s * (se + 2 - N + we + mj) / e, w * (N - p * se - we - mj) / e};
}

KolmogorovPoint to_kolmogorov(const ProblemParams& params, PhasePoint pt) {
  return {pt.y / pt.x, spow(pt.x, params.p) / pt.y};
}

double kolmogorov_divergence(const ProblemParams& params, KolmogorovPoint k) {
  const double p = params.p;
  return (2 - p) * k.sigma + 2 - k.z +
         params.M * (p - 1) / (p + 1) * kolmogorov_J(p, k.sigma, k.z);
}

double psi(const ProblemParams& params, double y) {
  const DerivedConstants dc = derive_constants(params);
  const double rad = dc.K * y - params.M * std::pow(y, dc.q);
  if (rad < 0) return std::numeric_limits<double>::quiet_NaN();
  return std::pow(rad, 1 / params.p);
}

Nullclines nullclines(const ProblemParams& params, double y_max, int samples) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  Nullclines nc;
  nc.line = {{0.0, 0.0}, {(p - 1) * y_max / 2, y_max}};

  std::vector<double> ys;
  ys.reserve(samples + 8);
  for (int i = 0; i <= samples; ++i) ys.push_back(y_max * i / samples);
  if (params.M != 0 && dc.K / params.M > 0) {
    const double y_end = std::pow(dc.K / params.M, (p + 1) / (p - 1));
    if (y_end < y_max) ys.push_back(y_end);
  }
  for (const Equilibrium& e : find_equilibria(params))
    if (e.y < y_max) ys.push_back(e.y);
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  std::vector<PhasePoint> branch;
  for (double y : ys) {
    double rad = dc.K * y - params.M * std::pow(y, dc.q);
    // Exact zeros of the radicand land on the axis.
    if (std::abs(rad) <= 1e-13 * (std::abs(dc.K * y) + 1e-300)) rad = 0;
    if (rad >= 0) {
      branch.push_back({std::pow(rad, 1 / p), y});
    } else if (!branch.empty()) {
      nc.curve.push_back(std::move(branch));
      branch.clear();
    }
  }
  if (branch.size() > 1) nc.curve.push_back(std::move(branch));
  return nc;
}

RegionTag region_of(const ProblemParams& params, PhasePoint pt) {
  return region_of(params, pt, find_equilibria(params));
}

RegionTag region_of(const ProblemParams& params, PhasePoint pt,
                    const std::vector<Equilibrium>& eqs) {
  if (pt.x < 0 || pt.y < 0) return RegionTag::kOutsideQ;
  const double band = 1e-12 * (1 + std::abs(pt.x) + std::abs(pt.y));
  const auto [h1, h2] = eval_H(params, pt);
  if (std::abs(h1) <= band) return RegionTag::kOnL;
  if (std::abs(h2) <= band) return RegionTag::kOnC;
  if (h1 > 0) return h2 < 0 ? RegionTag::kB : RegionTag::kC;
  if (h2 < 0) return RegionTag::kA;
  if (!eqs.empty() && (eqs.size() == 2 || eqs.front().multiplicity == Multiplicity::kDouble) &&
      pt.x < eqs.front().x)
    return RegionTag::kE;
  return RegionTag::kD;
}

std::string_view to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::kA: return "A";
    case RegionTag::kB: return "B";
    case RegionTag::kC: return "C";
    case RegionTag::kD: return "D";
    case RegionTag::kE: return "E";
    case RegionTag::kOnL: return "on-L";
    case RegionTag::kOnC: return "on-C";
    case RegionTag::kOutsideQ: return "outside-Q";
  }
  return "unknown";
}

}  // namespace emdenflow
