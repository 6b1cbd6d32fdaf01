#include "emdenflow/manifolds.hpp"

#include <cmath>

#include "emdenflow/errors.hpp"

namespace emdenflow {

double default_seed_eps(PhasePoint P) { return 1e-7 * (1 + std::hypot(P.x, P.y)); }

double default_regular_delta(double p) {
  return std::min(1e-4, std::pow(1e-3, 2 / (p - 1)));
}

SeedDescriptor seed_regular(const ProblemParams& params) {
  return seed_regular(params, default_regular_delta(params.p));
}

SeedDescriptor seed_regular(const ProblemParams& params, double delta) {
  const DerivedConstants dc = derive_constants(params);
  if (!(delta > 0 && delta <= 1e-3)) throw InvalidParams("seed_regular needs 0 < delta <= 1e-3");
  const double p = params.p, N = params.N, M = params.M, q = dc.q;
  const double t0 = (p - 1) / 2 * std::log(delta);
  const double r = std::exp(t0);
  const double nq = std::pow(N, q);
  const double rq = std::pow(r, q);
  // u = 1 - r^2/(2N) - M (p+1)^2 r^{q+2} / (N^q (4p+2)(N(p+1)+2p)) + ...
  const double x = delta * (1 - r * r / (2 * N) -
                            M * (p + 1) * (p + 1) * rq * r * r /
                                (nq * (4 * p + 2) * (N * (p + 1) + 2 * p)));
  const double y = std::pow(delta, p) * (1 / N + M * (p + 1) * rq / (nq * (N * (p + 1) + 2 * p)));
  SeedDescriptor s;
  s.kind = SeedKind::kRegular;
  s.t0 = t0;
  s.offset = delta;
  s.point = {x, y};
  s.direction = 1;
  const double r4 = r * r * r * r;
  s.seed_error = delta * (p * r4 / (8 * N * (N + 2)) + std::abs(M) * rq * r4 / nq +
                          M * M * rq * rq * r * r / (nq * nq));
  return s;
}

SeedDescriptor seed_origin_stable(const ProblemParams& params, double eps) {
  const DerivedConstants dc = derive_constants(params);
  if (!(dc.K > 0) || regime_of(params).serrin_critical)
    throw NotASaddle("origin is a saddle only for K > 0");
  if (!(eps > 1e-10 && eps < 1e-4)) throw InvalidParams("seed_origin_stable needs eps in (1e-10, 1e-4)");
  SeedDescriptor s;
  s.kind = SeedKind::kOriginStable;
  s.offset = eps;
  s.point = {eps, (params.N - 2) * eps};
  s.direction = -1;
  s.seed_error = eps * (std::abs(params.M) * std::pow((params.N - 2) * eps, dc.q - 1) +
                        std::pow(eps, params.p - 1));
  return s;
}

SeedDescriptor seed_origin_slow(const ProblemParams& params, double eps) {
  const DerivedConstants dc = derive_constants(params);
  if (!(dc.K < 0)) throw RegimeUndefined("slow trajectories at the origin need K < 0");
  if (params.N == 1) throw RegimeUndefined("no slow direction inside Q for N = 1");
  if (!(eps > 0 && eps < 1e-3)) throw InvalidParams("seed_origin_slow needs eps in (0, 1e-3)");
  SeedDescriptor s;
  s.kind = SeedKind::kOriginSlow;
  s.offset = eps;
  s.direction = 1;
  if (params.N == 2) {
    // Jordan block: x ~ |t| y as t -> -infinity with e^{lambda t} = eps.
    const double lam = 2 / (params.p - 1);
    s.point = {eps * std::abs(std::log(eps)) / lam, eps};
    s.seed_error = eps;
  } else {
    s.point = {eps, (params.N - 2) * eps};
    s.seed_error = eps * (std::abs(params.M) * std::pow((params.N - 2) * eps, dc.q - 1) +
                          std::pow(eps, params.p - 1));
  }
  return s;
}

std::array<EigenDirection, 2> saddle_directions(const ProblemParams& params,
                                                const Equilibrium& eq) {
  const Classification c = classify_equilibrium(params, eq);
  if (c.kind != StabilityKind::kSaddle) throw NotASaddle("equilibrium is not a saddle");
  const double a = 2 / (params.p - 1);
  std::array<EigenDirection, 2> out;
  for (int i = 0; i < 2; ++i) {
    const double lam = c.eigenvalues[i].real();
    const double vx = 1, vy = a - lam;
    const double n = std::hypot(vx, vy);
    out[i] = {lam, {vx / n, vy / n}};
  }
  return out;  // eigenvalues ascending: stable first
}

std::array<SeedDescriptor, 4> seed_saddle_branches(const ProblemParams& params,
                                                   const Equilibrium& eq, double eps,
                                                   int eq_id) {
  if (!(eps > 0)) throw InvalidParams("seed offset must be positive");
  const std::array<EigenDirection, 2> dirs = saddle_directions(params, eq);
  const double a = 2 / (params.p - 1);
  std::array<SeedDescriptor, 4> out;
  for (int i = 0; i < 2; ++i) {
    const bool stable = dirs[i].lambda < 0;
    for (int sgn : {1, -1}) {
      SeedDescriptor s;
      s.kind = SeedKind::kSaddleBranch;
      s.eq_id = eq_id;
      s.offset = eps;
      s.point = {eq.x + sgn * eps * dirs[i].v.x, eq.y + sgn * eps * dirs[i].v.y};
      s.direction = stable ? -1 : 1;
      s.seed_error = eps * eps;
      const bool below = s.point.y - a * s.point.x < 0;
      if (stable) {
        s.branch = below ? SaddleBranch::kStableBelowL : SaddleBranch::kStableAboveL;
        out[below ? 0 : 1] = s;
      } else {
        s.branch = below ? SaddleBranch::kUnstableBelowL : SaddleBranch::kUnstableAboveL;
        out[below ? 2 : 3] = s;
      }
    }
  }
  return out;
}

}  // namespace emdenflow
