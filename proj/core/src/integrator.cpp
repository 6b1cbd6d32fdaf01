#include "emdenflow/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

struct Rhs {
  double p, K, M, q, lam;
  explicit Rhs(const ProblemParams& params) {
    const DerivedConstants dc = derive_constants(params);
    p = params.p;
    K = dc.K;
    M = params.M;
    q = dc.q;
    lam = 2 / (p - 1);
  }
  Vec operator()(const Vec& s) const {
    const double ax = std::abs(s[0]);
    return {lam * s[0] - s[1],
            -K * s[1] + std::copysign(std::pow(ax, p), s[0]) + M * std::pow(std::abs(s[1]), q)};
  }
};

Vec dense_eval(const DenseStep& st, double time) {
  const double th = (time - st.t0) / st.h, th1 = 1 - th;
  Vec out;
  for (int i = 0; i < 2; ++i)
    out[i] = st.rc[0][i] +
             th * (st.rc[1][i] + th1 * (st.rc[2][i] + th * (st.rc[3][i] + th1 * st.rc[4][i])));
  return out;
}

struct EventFn {
  EventKind kind;
  double (*fn)(const Rhs&, const Vec&);
};

double g_line(const Rhs& f, const Vec& s) { return s[1] - f.lam * s[0]; }
double g_curve(const Rhs& f, const Vec& s) { return f(s)[1]; }
double g_x(const Rhs&, const Vec& s) { return s[0]; }
double g_y(const Rhs&, const Vec& s) { return s[1]; }

constexpr EventFn kEvents[] = {
    {EventKind::kCrossL, g_line},
    {EventKind::kCrossC, g_curve},
    {EventKind::kExitQx, g_x},
    {EventKind::kExitQy, g_y},
};

double locate(const Rhs& f, const DenseStep& st, double (*fn)(const Rhs&, const Vec&),
              double ga, double tol) {
  double lo = st.t0, hi = st.t0 + st.h;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    const double gm = fn(f, dense_eval(st, mid));
    if (std::abs(gm) <= tol && std::abs(hi - lo) <= 1e-13 * (1 + std::abs(mid))) return mid;
    if ((gm < 0) == (ga < 0)) {
      lo = mid;
      ga = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int sgn(double v) { return (v > 0) - (v < 0); }

}  // namespace

PhasePoint Trajectory::at(double time) const {
  if (steps.empty()) return samples.front();
  const bool fwd = direction > 0;
  if (fwd ? time <= t.front() : time >= t.front()) return samples.front();
  if (fwd ? time >= t.back() : time <= t.back()) return samples.back();
  auto it = std::partition_point(steps.begin(), steps.end(), [&](const DenseStep& s) {
    return fwd ? s.t0 + s.h < time : s.t0 + s.h > time;
  });
  if (it == steps.end()) --it;
  const Vec v = dense_eval(*it, time);
  return {v[0], v[1]};
}

std::vector<Event> Trajectory::events_of(EventKind kind) const {
  std::vector<Event> out;
  for (const Event& e : events)
    if (e.kind == kind) out.push_back(e);
  return out;
}

Trajectory integrate(const ProblemParams& params, PhasePoint start, const IntegrationConfig& cfg) {
  validate(params);
  if (!(cfg.rel_tol > 0) || !(cfg.abs_tol > 0) || cfg.max_steps < 1)
    throw InvalidParams("integration tolerances must be positive and max_steps >= 1");
  const Rhs f(params);
  Trajectory tr;
  tr.params = params;
  tr.seed.point = start;
  tr.seed.t0 = cfg.t0;
  tr.direction = cfg.t1 >= cfg.t0 ? 1 : -1;
  tr.seed.direction = tr.direction;
  const double dir = tr.direction;
  tr.t.push_back(cfg.t0);
  tr.samples.push_back(start);

  std::vector<PhasePoint> targets = cfg.targets;
  targets.push_back({0.0, 0.0});
  std::vector<int> confirm(targets.size(), 0);
  std::vector<double> last_dist(targets.size(), INFINITY);

  Vec y0{start.x, start.y};
  Vec k1 = f(y0);
  double t = cfg.t0;
  const double span = std::abs(cfg.t1 - cfg.t0);
  if (span == 0) return tr;

  // Initial step from the Hairer heuristic.
  double h;
  {
    double dnf = 0, dny = 0;
    for (int i = 0; i < 2; ++i) {
      const double sk = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
      dnf += (k1[i] / sk) * (k1[i] / sk);
      dny += (y0[i] / sk) * (y0[i] / sk);
    }
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min(h, span);
  }

  double facold = 1e-4;
  const double beta = 0.04, expo1 = 0.2 - beta * 0.75, safe = 0.9;
  const double facc1 = 1.0 / 0.2, facc2 = 1.0 / 10.0;
  bool reject = false;
  int l_crossings = 0;
  std::vector<double> upward;

  for (long n = 0;; ++n) {
    if (n >= cfg.max_steps) {
      tr.termination = Termination::kBudget;
      return tr;
    }
    const double remaining = span - std::abs(t - cfg.t0);
    if (remaining <= 1e-14 * std::max(1.0, std::abs(t))) {
      tr.termination = Termination::kBudget;
      return tr;
    }
    if (h > remaining) h = remaining;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) throw StepUnderflow("step size underflow");
    const double hs = dir * h;

    Vec ys, k2, k3, k4, k5, k6, k7, y1;
    for (int i = 0; i < 2; ++i) ys[i] = y0[i] + hs * a21 * k1[i];
    k2 = f(ys);
    for (int i = 0; i < 2; ++i) ys[i] = y0[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    k3 = f(ys);
    for (int i = 0; i < 2; ++i) ys[i] = y0[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = f(ys);
    for (int i = 0; i < 2; ++i)
      ys[i] = y0[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = f(ys);
    for (int i = 0; i < 2; ++i)
      ys[i] = y0[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = f(ys);
    for (int i = 0; i < 2; ++i)
      y1[i] = y0[i] + hs * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    k7 = f(y1);

    double err = 0;
    for (int i = 0; i < 2; ++i) {
      const double ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
      err += (ei / sk) * (ei / sk);
    }
    err = std::sqrt(err / 2);
    if (!std::isfinite(err)) {
      h *= 0.1;
      reject = true;
      continue;
    }
    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;

    if (err > 1.0) {
      h /= std::min(facc1, fac11 / safe);
      reject = true;
      continue;
    }

    facold = std::max(err, 1e-4);
    if (std::abs(y1[1]) <= 1e-10 || std::abs(y0[1]) <= 1e-10) hnew = std::min(hnew, 1.5 * h);
    if (reject) hnew = std::min(hnew, h);
    reject = false;

    DenseStep st;
    st.t0 = t;
    st.h = hs;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y1[i] - y0[i];
      const double bspl = hs * k1[i] - ydiff;
      st.rc[0][i] = y0[i];
      st.rc[1][i] = ydiff;
      st.rc[2][i] = bspl;
      st.rc[3][i] = ydiff - hs * k7[i] - bspl;
      st.rc[4][i] = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                          d7 * k7[i]);
    }

    // Events inside the step, in integration order.
    struct Hit {
      double t;
      EventKind kind;
      double (*fn)(const Rhs&, const Vec&);
    };
    std::vector<Hit> hits;
    for (const EventFn& ev : kEvents) {
      const double ga = ev.fn(f, y0), gb = ev.fn(f, y1);
      if (ga == 0 || (gb != 0 && (ga < 0) == (gb < 0))) continue;
      hits.push_back({locate(f, st, ev.fn, ga, cfg.event_tol), ev.kind, ev.fn});
    }
    std::sort(hits.begin(), hits.end(),
              [&](const Hit& a, const Hit& b) { return dir * a.t < dir * b.t; });

    double t_stop = t + hs;
    bool terminal = false;
    for (const Hit& hit : hits) {
      const Vec pv = dense_eval(st, hit.t);
      Event e;
      e.kind = hit.kind;
      e.t = hit.t;
      e.point = {pv[0], pv[1]};
      // Slope of the event function in increasing t.
      const Vec v = f(pv);
      if (hit.kind == EventKind::kCrossL) e.direction = sgn(v[1] - f.lam * v[0]);
      else if (hit.kind == EventKind::kExitQx) e.direction = sgn(v[0]);
      else if (hit.kind == EventKind::kExitQy) e.direction = sgn(v[1]);
      else {
        const double dt = 1e-7 * dir;
        e.direction = sgn(dir * (hit.fn(f, dense_eval(st, hit.t + dt)) - hit.fn(f, pv)));
      }
      const bool leaving = (hit.kind == EventKind::kExitQx || hit.kind == EventKind::kExitQy) &&
                           dir * e.direction < 0;
      if ((hit.kind == EventKind::kExitQx || hit.kind == EventKind::kExitQy) && !leaving) continue;
      tr.events.push_back(e);
      if (hit.kind == EventKind::kCrossL) {
        ++l_crossings;
        if (e.direction > 0) upward.push_back(e.point.x);
      }
      if (leaving && cfg.stop_on_exit) {
        t_stop = hit.t;
        terminal = true;
        tr.termination = Termination::kExitsQ;
        break;
      }
      if (hit.kind == EventKind::kCrossL && e.direction > 0 && e.point.x > cfg.section_x_min &&
          std::abs(hit.t - cfg.t0) > 0) {
        tr.events.push_back({EventKind::kCrossSection, e.t, e.point, e.direction});
        t_stop = hit.t;
        terminal = true;
        tr.termination = Termination::kSection;
        break;
      }
      if (hit.kind == EventKind::kCrossL && cfg.stop_after_L_crossings > 0 &&
          l_crossings >= cfg.stop_after_L_crossings) {
        t_stop = hit.t;
        terminal = true;
        tr.termination = Termination::kBudget;
        break;
      }
    }

    if (terminal) {
      const Vec pv = dense_eval(st, t_stop);
      st.h = hs;
      tr.steps.push_back(st);
      tr.t.push_back(t_stop);
      tr.samples.push_back({pv[0], pv[1]});
      return tr;
    }

    tr.steps.push_back(st);
    t += hs;
    y0 = y1;
    k1 = k7;
    tr.t.push_back(t);
    tr.samples.push_back({y1[0], y1[1]});

    if (std::abs(y1[0]) + std::abs(y1[1]) > cfg.blowup) {
      tr.events.push_back({EventKind::kBlowupGuard, t, {y1[0], y1[1]}, 1});
      tr.termination = Termination::kBlowup;
      return tr;
    }

    if (cfg.stop_on_equilibrium) {
      for (std::size_t j = 0; j < targets.size(); ++j) {
        const PhasePoint& P = targets[j];
        const double d = std::hypot(y1[0] - P.x, y1[1] - P.y);
        const double radius = 1e-8 * (1 + std::hypot(P.x, P.y));
        // Below 5% of the radius the distance is at noise level and need not decrease.
        if (d < radius && (d <= last_dist[j] || d < 0.05 * radius)) {
          if (confirm[j] == 0)
            tr.events.push_back({EventKind::kEquilibriumBall, t, {y1[0], y1[1]}, -1});
          if (++confirm[j] >= 10) {
            tr.termination = Termination::kEquilibrium;
            tr.equilibrium_id = static_cast<int>(j);
            tr.equilibrium_point = P;
            return tr;
          }
        } else {
          confirm[j] = 0;
        }
        last_dist[j] = d;
      }
    }

    if (cfg.cycle_tol > 0 && upward.size() >= 3) {
      const double s2 = upward[upward.size() - 1], s1 = upward[upward.size() - 2],
                   s0 = upward[upward.size() - 3];
      bool near_target = false;
      for (const PhasePoint& P : targets)
        if (std::abs(s2 - P.x) <= 1e-6 * (1 + P.x)) near_target = true;
      if (!near_target && std::abs(s2 - s1) <= cfg.cycle_tol * (1 + s2) &&
          std::abs(s1 - s0) <= 10 * cfg.cycle_tol * (1 + s2)) {
        tr.termination = Termination::kCycle;
        return tr;
      }
    }

    h = hnew;
  }
}

Trajectory integrate(const ProblemParams& params, const SeedDescriptor& seed,
                     IntegrationConfig cfg) {
  const double span = std::abs(cfg.t1 - cfg.t0);
  cfg.t0 = seed.t0;
  cfg.t1 = seed.t0 + (seed.direction >= 0 ? span : -span);
  // Seeds near the origin live far below abs_tol; keep the control relative.
  const double mag = std::max(std::abs(seed.point.x), std::abs(seed.point.y));
  if (seed.kind != SeedKind::kUser && seed.kind != SeedKind::kEquilibrium && mag > 0)
    cfg.abs_tol = std::min(cfg.abs_tol, std::max(1e-300, 1e-2 * cfg.rel_tol * mag));
  Trajectory tr = integrate(params, seed.point, cfg);
  tr.seed = seed;
  return tr;
}

double integrate_along(const Trajectory& traj,
                       const std::function<double(double, PhasePoint)>& integrand) {
  const double lo = std::min(traj.t_begin(), traj.t_end());
  const double hi = std::max(traj.t_begin(), traj.t_end());
  double total = 0;
  for (const DenseStep& st : traj.steps) {
    double a = std::min(st.t0, st.t0 + st.h), b = std::max(st.t0, st.t0 + st.h);
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(b > a)) continue;
    total += boost::math::quadrature::gauss<double, 10>::integrate(
        [&](double time) {
          const Vec v = dense_eval(st, time);
          return integrand(time, {v[0], v[1]});
        },
        a, b);
  }
  return total;
}

std::vector<RadialSample> trajectory_to_radial(const Trajectory& traj) {
  const double p = traj.params.p;
  std::vector<RadialSample> out;
  out.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double r = std::exp(traj.t[i]);
    const PhasePoint& s = traj.samples[i];
    out.push_back({r, std::pow(r, -2 / (p - 1)) * s.x, -std::pow(r, -(p + 1) / (p - 1)) * s.y});
  }
  if (traj.direction < 0) std::reverse(out.begin(), out.end());
  return out;
}

double residual_check(const ProblemParams& params, const Trajectory& traj) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, N = params.N;
  const double lo = std::min(traj.t_begin(), traj.t_end());
  const double hi = std::max(traj.t_begin(), traj.t_end());
  auto ur_at = [&](double time) {
    return -std::exp(-(p + 1) / (p - 1) * time) * traj.at(time).y;
  };
  double worst = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double tc = traj.t[i];
    // Stencil width follows the local step, which tracks the time scale.
    const double hloc = traj.steps.empty() ? 1e-3 : std::abs(traj.steps[std::min(i, traj.steps.size() - 1)].h);
    const double d = std::clamp(0.25 * hloc, 1e-5, 1e-3);
    if (tc - 2 * d < lo || tc + 2 * d > hi) continue;
    const double r = std::exp(tc);
    const PhasePoint s = traj.at(tc);
    const double u = std::pow(r, -2 / (p - 1)) * s.x;
    const double ur = -std::pow(r, -(p + 1) / (p - 1)) * s.y;
    const double dur_dt = (ur_at(tc - 2 * d) - 8 * ur_at(tc - d) + 8 * ur_at(tc + d) -
                           ur_at(tc + 2 * d)) / (12 * d);
    const double urr = dur_dt / r;
    const double t1 = urr, t2 = (N - 1) * ur / r, t3 = std::copysign(std::pow(std::abs(u), p), u),
                 t4 = params.M * std::pow(std::abs(ur), dc.q);
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3) + std::abs(t4);
    if (scale == 0) continue;
    worst = std::max(worst, std::abs(t1 + t2 + t3 + t4) / scale);
  }
  return worst;
}

std::string_view to_string(Termination term) {
  switch (term) {
    case Termination::kEquilibrium: return "equilibrium";
    case Termination::kExitsQ: return "exits-Q";
    case Termination::kCycle: return "cycle";
    case Termination::kBudget: return "budget-exhausted";
    case Termination::kBlowup: return "blowup";
    case Termination::kSection: return "section";
  }
  return "unknown";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kCrossL: return "cross-L";
    case EventKind::kCrossC: return "cross-C";
    case EventKind::kExitQx: return "exit-Q-x";
    case EventKind::kExitQy: return "exit-Q-y";
    case EventKind::kEquilibriumBall: return "enter-equilibrium-ball";
    case EventKind::kCrossSection: return "cross-section";
    case EventKind::kBlowupGuard: return "blowup-guard";
  }
  return "unknown";
}

std::string_view to_string(SeedKind kind) {
  switch (kind) {
    case SeedKind::kUser: return "user";
    case SeedKind::kEquilibrium: return "equilibrium";
    case SeedKind::kRegular: return "regular";
    case SeedKind::kOriginStable: return "origin-stable";
    case SeedKind::kOriginSlow: return "origin-slow";
    case SeedKind::kSaddleBranch: return "saddle-branch";
  }
  return "unknown";
}

std::string_view to_string(SaddleBranch branch) {
  switch (branch) {
    case SaddleBranch::kNone: return "none";
    case SaddleBranch::kStableBelowL: return "st-below-L";
    case SaddleBranch::kStableAboveL: return "st-above-L";
    case SaddleBranch::kUnstableBelowL: return "unst-below-L";
    case SaddleBranch::kUnstableAboveL: return "unst-above-L";
  }
  return "unknown";
}

}  // namespace emdenflow
