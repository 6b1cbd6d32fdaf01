#include "emdenflow/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/roots.hpp>

#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

struct MapValue {
  double s = 0.0;
  double image = 0.0;
  double e = 0.0;  // (P(s) - X)/(s - X) - 1
  bool defined = false;
};

// Return map on the section {on L, x > X}, X the largest equilibrium abscissa.
class ReturnMap {
 public:
  ReturnMap(const ProblemParams& params, const std::vector<Equilibrium>& eqs)
      : params_(params), center_(eqs.back()) {
    cfg_.rel_tol = 1e-12;
    cfg_.abs_tol = 1e-14;
    cfg_.t1 = 500;
    cfg_.max_steps = 400'000;
    cfg_.section_x_min = center_.x;
    for (const Equilibrium& e : eqs) cfg_.targets.push_back({e.x, e.y});
  }

  const Equilibrium& center() const { return center_; }
  int evaluations() const { return evals_; }

  MapValue operator()(double s) {
    if (++evals_ > kCycleBudget) throw NoCycleFound("return map budget exhausted");
    last_ = integrate(params_, on_section(s), cfg_);
    MapValue v;
    v.s = s;
    if (last_.termination != Termination::kSection) return v;
    v.image = last_.samples.back().x;
    v.e = (v.image - center_.x) / (s - center_.x) - 1;
    v.defined = true;
    return v;
  }

  const Trajectory& last() const { return last_; }

  PhasePoint on_section(double s) const { return {s, 2 / (params_.p - 1) * s}; }

 private:
  ProblemParams params_;
  Equilibrium center_;
  IntegrationConfig cfg_;
  Trajectory last_;
  int evals_ = 0;
};

double sign_band(double v) {
  if (v > kFloquetNeutralBand) return 1;
  if (v < -kFloquetNeutralBand) return -1;
  return 0;
}

CycleAnalysis analyze(const ProblemParams& params, const ReturnMap& map, const MapValue& v) {
  const DerivedConstants dc = derive_constants(params);
  const double a = (params.p - 1) / (params.p + 1);
  CycleAnalysis c;
  c.section_point = map.on_section(v.s);
  c.center = map.center();
  c.orbit = map.last();
  c.period = std::abs(c.orbit.t_end() - c.orbit.t_begin());
  c.return_residual = std::abs(v.image - v.s);
  c.evaluations = map.evaluations();
  c.floquet_integral = integrate_along(c.orbit, [&](double, PhasePoint pt) {
    return dc.q * params.M * std::pow(std::abs(pt.y), a) - dc.L;
  });
  c.mean_y = integrate_along(c.orbit, [](double, PhasePoint pt) { return pt.y; }) / c.period;
  c.mean_y_pow = integrate_along(c.orbit, [&](double, PhasePoint pt) {
                   return std::pow(std::abs(pt.y), a);
                 }) / c.period;
  const double s = sign_band(c.floquet_integral);
  c.stability = s < 0 ? CycleStability::kAttracting
                      : (s > 0 ? CycleStability::kRepelling : CycleStability::kNeutral);
  double xmin = INFINITY, xmax = -INFINITY;
  const int n = 4096;
  for (int i = 0; i <= n; ++i) {
    const double time = c.orbit.t_begin() + (c.orbit.t_end() - c.orbit.t_begin()) * i / n;
    const double x = c.orbit.at(time).x;
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
  }
  c.amplitude = xmax - xmin;
  return c;
}

bool converged(const MapValue& v) {
  return v.defined && std::abs(v.image - v.s) <= kReturnResidualTol;
}

}  // namespace

CycleAnalysis find_cycle(const ProblemParams& params, PhasePoint hint) {
  validate(params);
  const std::vector<Equilibrium> eqs = find_equilibria(params);
  if (eqs.empty()) throw NoCycleFound("no equilibrium in Q for a cycle to surround");
  ReturnMap map(params, eqs);
  const double X = map.center().x;
  const double min_amp = 1e-7 * (1 + X);

  // Move the hint onto the section.
  double s0 = hint.x;
  const double lam = 2 / (params.p - 1);
  if (!(std::abs(hint.y - lam * hint.x) <= 1e-12 * (1 + hint.x) && hint.x > X)) {
    IntegrationConfig cfg;
    cfg.t1 = 1000;
    cfg.section_x_min = X;
    for (const Equilibrium& e : eqs) cfg.targets.push_back({e.x, e.y});
    const Trajectory tr = integrate(params, hint, cfg);
    if (tr.termination != Termination::kSection)
      throw NoCycleFound("hint does not reach the section");
    s0 = tr.samples.back().x;
  }
  if (!(s0 - X > min_amp)) throw NoCycleFound("hint too close to the equilibrium");

  std::vector<MapValue> seen;
  auto eval = [&](double s) {
    MapValue v = map(s);
    seen.push_back(v);
    return v;
  };
  auto finish = [&](const MapValue& v) {
    if (!(v.s - X > min_amp)) throw NoCycleFound("cycle collapsed onto the equilibrium");
    // The last integration must belong to v.
    MapValue w = v;
    if (map.last().samples.front().x != v.s) w = map(v.s);
    if (!converged(w)) throw NoCycleFound("return map residual above tolerance");
    return analyze(params, map, w);
  };

  MapValue v0 = eval(s0);
  if (!v0.defined) throw NoCycleFound("hint does not return to the section");
  if (converged(v0)) return finish(v0);
  MapValue v1 = eval(v0.image);
  if (converged(v1)) return finish(v1);

  for (;;) {
    // Sign change between neighbouring defined values: bracketed solve.
    std::vector<MapValue> def;
    for (const MapValue& v : seen)
      if (v.defined) def.push_back(v);
    std::sort(def.begin(), def.end(),
              [](const MapValue& a, const MapValue& b) { return a.s < b.s; });
    for (std::size_t i = 0; i + 1 < def.size(); ++i) {
      if ((def[i].e < 0) == (def[i + 1].e < 0)) continue;
      MapValue best = def[i];
      auto fn = [&](double s) {
        const MapValue v = eval(s);
        if (!v.defined) throw NoCycleFound("return map undefined inside a bracket");
        if (!best.defined || std::abs(v.e) < std::abs(best.e) || converged(v)) best = v;
        return v.e;
      };
      std::uintmax_t iters = kCycleBudget;
      auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-13 * (1 + std::abs(a)); };
      boost::math::tools::toms748_solve(fn, def[i].s, def[i + 1].s, def[i].e, def[i + 1].e,
                                        tol, iters);
      if (std::abs(def[i].e) < std::abs(best.e)) best = def[i];
      if (std::abs(def[i + 1].e) < std::abs(best.e)) best = def[i + 1];
      return finish(best);
    }

    // Secant step on e(s), amplitude change limited to a factor 4.
    const MapValue& a = v0;
    const MapValue& b = v1;
    double s_new;
    if (a.defined && b.defined && b.e != a.e && b.s != a.s) {
      s_new = b.s - b.e * (b.s - a.s) / (b.e - a.e);
    } else {
      s_new = b.defined ? b.image : 0.5 * (a.s + b.s);
    }
    const double amp = b.s - X;
    s_new = X + std::clamp(s_new - X, 0.25 * amp, 4 * amp);
    if (!(s_new - X > min_amp)) throw NoCycleFound("return map drives towards the equilibrium");
    MapValue v = eval(s_new);
    while (!v.defined) {
      s_new = 0.5 * (s_new + b.s);
      v = eval(s_new);
    }
    if (converged(v)) return finish(v);
    v0 = v1;
    v1 = v;
  }
}

LimitVerdict classify_limit(const ProblemParams& params, const Trajectory& traj,
                            TimeDirection direction) {
  const std::vector<Equilibrium> eqs = find_equilibria(params);
  LimitVerdict v;
  v.direction = direction;
  v.termination = traj.termination;
  v.events = traj.events;
  v.final_point = traj.samples.back();
  const double X = eqs.empty() ? INFINITY : eqs.back().x;
  for (const Event& e : traj.events)
    if (e.kind == EventKind::kCrossL && e.direction > 0 && e.point.x > X)
      v.section_crossings.push_back(e.point.x);

  switch (traj.termination) {
    case Termination::kEquilibrium: {
      const PhasePoint P = traj.equilibrium_point;
      Equilibrium match;  // origin unless a root matches
      for (const Equilibrium& e : eqs)
        if (std::hypot(e.x - P.x, e.y - P.y) <= 1e-9 * (1 + std::hypot(e.x, e.y))) match = e;
      if (match.index == EquilibriumIndex::kOrigin && std::hypot(P.x, P.y) > 0) break;
      v.kind = VerdictKind::kToEquilibrium;
      v.equilibrium = match;
      v.final_distance = std::hypot(v.final_point.x - match.x, v.final_point.y - match.y);
      return v;
    }
    case Termination::kExitsQ: {
      for (auto it = traj.events.rbegin(); it != traj.events.rend(); ++it) {
        if (it->kind != EventKind::kExitQx && it->kind != EventKind::kExitQy) continue;
        v.kind = VerdictKind::kExitsQ;
        v.side = it->kind == EventKind::kExitQx ? ExitSide::kXAxis : ExitSide::kYAxis;
        v.exit_point = it->point;
        return v;
      }
      break;
    }
    case Termination::kBlowup:
      return v;
    default:
      break;
  }

  // Limit cycle: the return map converges near the last section crossings.
  const auto& sc = v.section_crossings;
  if (sc.size() < 2) return v;
  try {
    CycleAnalysis cyc = find_cycle(params, {sc.back(), 2 / (params.p - 1) * sc.back()});
    const double s_star = cyc.section_point.x;
    const double d_last = std::abs(sc.back() - s_star);
    const double d_prev = std::abs(sc[sc.size() - 2] - s_star);
    const bool compatible = direction == TimeDirection::kForward
                                ? cyc.stability != CycleStability::kRepelling
                                : cyc.stability != CycleStability::kAttracting;
    if (compatible && d_last <= 1e-2 * (1 + s_star) && d_last <= d_prev) {
      v.kind = VerdictKind::kLimitCycle;
      v.final_distance = d_last;
      v.cycle = std::move(cyc);
    }
  } catch (const NoCycleFound&) {
  }
  return v;
}

KolmogorovFloquet kolmogorov_floquet(const ProblemParams& params, const CycleAnalysis& cyc) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  const Trajectory& orb = cyc.orbit;
  for (const PhasePoint& s : orb.samples)
    if (!(s.y > 0 && s.x > 0)) throw TransformInvalid("orbit leaves the open quadrant");
  for (const DenseStep& st : orb.steps)
    for (int i = 0; i <= 8; ++i)
      if (!(orb.at(st.t0 + st.h * i / 8).y > 0))
        throw TransformInvalid("orbit touches y = 0");

  KolmogorovFloquet k;
  const double X = cyc.center.x, Y = cyc.center.y;
  const double zc = std::pow(X, p) / Y;
  const double tau = cyc.period;
  k.integral = integrate_along(orb, [&](double, PhasePoint pt) {
    return kolmogorov_divergence(params, to_kolmogorov(params, pt));
  });
  k.sigma_bar_integral =
      integrate_along(orb, [&](double, PhasePoint pt) { return pt.y / pt.x - 2 / (p - 1); });
  k.z_bar_integral =
      integrate_along(orb, [&](double, PhasePoint pt) { return std::pow(pt.x, p) / pt.y - zc; });
  const double a = (p - 1) / (p + 1);
  k.decomposition_lhs = cyc.floquet_integral / tau;
  k.decomposition_rhs =
      dc.q * params.M * std::pow(Y, a) - dc.L - dc.q / tau * k.z_bar_integral;
  k.concavity_applies = cyc.mean_y < Y;
  k.concavity_holds = cyc.mean_y_pow <= std::pow(cyc.mean_y, a) * (1 + 1e-12);
  k.sign_agrees = sign_band(k.integral) == sign_band(cyc.floquet_integral);
  return k;
}

bool sigma_monotonicity_check(const ProblemParams& params, const Trajectory& traj) {
  double ms = 0;
  try {
    ms = mu_star(params.N, params.p);
  } catch (const RegimeUndefined&) {
    throw RegimeMismatch("sigma monotonicity needs M = -mu*");
  }
  if (std::abs(params.M + ms) > 1e-9 * (1 + ms))
    throw RegimeMismatch("sigma monotonicity needs M = -mu*");
  const double lam = 2 / (params.p - 1);
  bool have_prev = false;
  double prev = 0;
  for (const PhasePoint& s : traj.samples) {
    const bool above = s.x > 0 && s.y / s.x >= lam;
    if (!above) {
      have_prev = false;
      continue;
    }
    const double sigma = s.y / s.x;
    if (have_prev && sigma < prev - 1e-9) return false;
    prev = sigma;
    have_prev = true;
  }
  return true;
}

std::string_view to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::kToEquilibrium: return "to-equilibrium";
    case VerdictKind::kLimitCycle: return "limit-cycle";
    case VerdictKind::kExitsQ: return "exits-Q";
    case VerdictKind::kUndetermined: return "undetermined";
  }
  return "unknown";
}

std::string_view to_string(CycleStability s) {
  switch (s) {
    case CycleStability::kAttracting: return "attracting";
    case CycleStability::kRepelling: return "repelling";
    case CycleStability::kNeutral: return "neutral";
  }
  return "unknown";
}

std::string_view to_string(ExitSide s) {
  switch (s) {
    case ExitSide::kNone: return "none";
    case ExitSide::kXAxis: return "x=0";
    case ExitSide::kYAxis: return "y=0";
  }
  return "unknown";
}

}  // namespace emdenflow
