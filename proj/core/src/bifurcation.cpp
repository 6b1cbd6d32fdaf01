#include "emdenflow/bifurcation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>

#include <boost/math/tools/roots.hpp>

#include "emdenflow/errors.hpp"
#include "emdenflow/manifolds.hpp"

namespace emdenflow {

namespace {

struct Crossing {
  bool found = false;
  double x = 0.0;
  CrossingConvention conv = CrossingConvention::kFirst;
};

Crossing take_crossing(const Trajectory& tr, CrossingConvention conv) {
  Crossing c;
  c.conv = conv;
  for (const Event& e : tr.events) {
    if (e.kind != EventKind::kCrossL) continue;
    if (!c.found) {
      c.x = e.point.x;
      c.found = true;
      if (conv != CrossingConvention::kFarthest) break;
    } else {
      c.x = std::max(c.x, e.point.x);
    }
  }
  return c;
}

// Falls back to the limit equilibrium when the trajectory converges without crossing L.
Crossing crossing_or_limit(const Trajectory& tr, CrossingConvention conv,
                           const LimitVerdict& v) {
  Crossing c = take_crossing(tr, conv);
  if (!c.found && v.kind == VerdictKind::kToEquilibrium && v.equilibrium &&
      v.equilibrium->index != EquilibriumIndex::kOrigin) {
    c.found = true;
    c.x = v.equilibrium->x;
    c.conv = CrossingConvention::kEquilibriumValue;
  }
  return c;
}

IntegrationConfig config_for(const ProblemParams& params, const ShootOptions& opt,
                             double widen) {
  IntegrationConfig cfg = opt.integration;
  cfg.t1 = cfg.t0 + (cfg.t1 - cfg.t0) * widen;
  cfg.targets.clear();
  for (const Equilibrium& e : find_equilibria(params)) cfg.targets.push_back({e.x, e.y});
  return cfg;
}

struct Pair {
  Trajectory a, b;
};

ShootBranch g_branch(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const RegimeTag tag = regime_of(params);
  if (dc.K > 0 && !tag.serrin_critical && params.M > 0) return ShootBranch::kPositiveM;
  if (dc.K > 0 && !tag.serrin_critical && params.M < 0) return ShootBranch::kNegativeMSaddle;
  if (dc.K < 0 && tag.kind == RegimeCase::kTwoRoots) return ShootBranch::kTwoEquilibria;
  throw RegimeMismatch("g is defined for K > 0, M != 0 or for two equilibria with K < 0");
}

ShootPoint evaluate(const ProblemParams& params, const ShootOptions& opt, ShootTarget target) {
  ShootPoint pt;
  pt.M = params.M;
  const ShootBranch branch =
      target == ShootTarget::kG ? g_branch(params) : ShootBranch::kSaddleLoop;
  pt.branch = branch;
  if (branch == ShootBranch::kSaddleLoop && regime_of(params).kind != RegimeCase::kTwoRoots)
    throw RegimeMismatch("h needs two equilibria (K < 0, M < -mu*)");

  for (double widen : {1.0, 4.0}) {
    pt.widened = widen > 1;
    const IntegrationConfig cfg = config_for(params, opt, widen);
    SeedDescriptor sa, sb;
    CrossingConvention ca = CrossingConvention::kFirst, cb = CrossingConvention::kFirst;
    switch (branch) {
      case ShootBranch::kPositiveM:
        sa = seed_regular(params);
        sb = seed_origin_stable(params);
        break;
      case ShootBranch::kNegativeMSaddle:
        sa = seed_regular(params);
        sb = seed_origin_stable(params);
        ca = cb = CrossingConvention::kFarthest;
        break;
      case ShootBranch::kTwoEquilibria:
      case ShootBranch::kSaddleLoop: {
        const Equilibrium P1 = find_equilibria(params).front();
        const auto br = seed_saddle_branches(params, P1, default_seed_eps({P1.x, P1.y}), 1);
        sa = branch == ShootBranch::kSaddleLoop ? br[2] : seed_regular(params);
        sb = br[1];
        ca = branch == ShootBranch::kSaddleLoop ? CrossingConvention::kFirst
                                                : CrossingConvention::kFarthest;
        cb = CrossingConvention::kLastForward;
        break;
      }
    }
    const Trajectory ta = integrate(params, sa, cfg);
    const Trajectory tb = integrate(params, sb, cfg);
    const LimitVerdict va = classify_limit(params, ta);
    const LimitVerdict vb = classify_limit(params, tb);
    pt.verdict_a = va.kind;
    pt.verdict_b = vb.kind;
    const Crossing xa = crossing_or_limit(ta, ca, va);
    const Crossing xb = crossing_or_limit(tb, cb, vb);
    pt.conv_a = xa.conv;
    pt.conv_b = xb.conv;
    pt.x_a = xa.x;
    pt.x_b = xb.x;
    // A farthest crossing is final only once the trajectory's limit is known.
    const bool a_final = xa.found && (ca != CrossingConvention::kFarthest ||
                                      va.kind != VerdictKind::kUndetermined);
    const bool b_final = xb.found && (cb != CrossingConvention::kFarthest ||
                                      vb.kind != VerdictKind::kUndetermined);
    if (a_final && b_final) {
      pt.value = xa.x - xb.x;
      pt.ok = true;
      pt.failure.clear();
      return pt;
    }
    pt.failure = !xa.found || !xb.found ? "no crossing of L" : "undetermined limit";
  }
  return pt;
}

std::vector<ShootPoint> run_grid(int N, double p, const std::vector<double>& grid,
                                 const ShootOptions& opt, ShootTarget target) {
  std::vector<ShootPoint> out(grid.size());
  auto work = [&](std::size_t i) {
    try {
      out[i] = evaluate({N, p, grid[i]}, opt, target);
    } catch (const RegimeMismatch&) {
      throw;
    } catch (const Error& e) {
      out[i].M = grid[i];
      out[i].ok = false;
      out[i].failure = e.what();
    }
  };
  unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : opt.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) work(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < grid.size(); i = next++) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

ShootResult scan(int N, double p, const std::vector<double>& grid, const ShootOptions& opt,
                 ShootTarget target) {
  if (grid.empty()) throw InvalidParams("empty M grid");
  ShootResult res;
  res.target = target;
  res.N = N;
  res.p = p;
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  res.grid = run_grid(N, p, sorted, opt, target);

  for (std::size_t i = 0; i + 1 < res.grid.size(); ++i) {
    const ShootPoint &a = res.grid[i], &b = res.grid[i + 1];
    if (a.ok && b.ok && a.value != 0 && b.value != 0 && (a.value < 0) != (b.value < 0))
      res.brackets.push_back({a.M, b.M});
  }
  if (!opt.refine) return res;

  for (const Bracket& br : res.brackets) {
    double lo = br.lo, hi = br.hi;
    const ShootPoint* plo = nullptr;
    for (const ShootPoint& g : res.grid)
      if (g.M == lo) plo = &g;
    const bool lo_negative = plo->value < 0;
    Refined r;
    ShootPoint mid_pt;
    while (r.iterations < opt.max_iterations && hi - lo > opt.m_tol) {
      const double mid = 0.5 * (lo + hi);
      mid_pt = evaluate({N, p, mid}, opt, target);
      ++r.iterations;
      if (!mid_pt.ok) break;
      if ((mid_pt.value < 0) == lo_negative) lo = mid;
      else hi = mid;
    }
    r.M = 0.5 * (lo + hi);
    r.width = hi - lo;
    const ShootPoint at = evaluate({N, p, r.M}, opt, target);
    r.residual = at.ok ? at.value : NAN;
    res.refined.push_back(r);
  }
  if (!res.refined.empty()) {
    auto [mn, mx] = std::minmax_element(res.refined.begin(), res.refined.end(),
                                        [](const Refined& a, const Refined& b) { return a.M < b.M; });
    res.conjecture_gap = mx->M - mn->M;
    res.gap_below_resolution = *res.conjecture_gap <= 2 * opt.m_tol;
  }
  return res;
}

}  // namespace

ShootPoint shoot_g_at(const ProblemParams& params, const ShootOptions& opt) {
  validate(params);
  return evaluate(params, opt, ShootTarget::kG);
}

ShootPoint shoot_h_at(const ProblemParams& params, const ShootOptions& opt) {
  validate(params);
  return evaluate(params, opt, ShootTarget::kH);
}

ShootResult shoot_g(int N, double p, const std::vector<double>& m_grid, const ShootOptions& opt) {
  validate({N, p, 0.0});
  return scan(N, p, m_grid, opt, ShootTarget::kG);
}

ShootResult shoot_h(int N, double p, const std::vector<double>& m_grid, const ShootOptions& opt) {
  validate({N, p, 0.0});
  if (!(derive_constants({N, p, 0.0}).K < 0))
    throw RegimeMismatch("h needs K < 0 so that two equilibria can exist");
  return scan(N, p, m_grid, opt, ShootTarget::kH);
}

std::vector<double> log_grid(double a, double b, int n) {
  if (n < 2 || a == 0 || b == 0 || (a < 0) != (b < 0))
    throw InvalidParams("log_grid needs n >= 2 and same-sign nonzero ends");
  const double s = a < 0 ? -1 : 1;
  const double la = std::log(std::abs(a)), lb = std::log(std::abs(b));
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = s * std::exp(la + (lb - la) * i / (n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

HopfReport hopf_scan(int N, double p, const std::vector<double>& offsets) {
  validate({N, p, 0.0});
  if (N < 3) throw RegimeMismatch("the Hopf scan needs N >= 3");
  HopfReport rep;
  const ProblemParams base{N, p, 0.0};
  const DerivedConstants dc = derive_constants(base);
  if (regime_of(base).sobolev_critical || dc.L == 0) return rep;
  rep.m_bar = m_bar(N, p);

  // Trace at the outermost equilibrium, which carries the Hopf point.
  auto trace = [&](double M) -> std::optional<double> {
    const ProblemParams pr{N, p, M};
    const std::vector<Equilibrium> eqs = find_equilibria(pr);
    if (eqs.empty()) return std::nullopt;
    return dc.q * M * std::pow(eqs.back().y, (p - 1) / (p + 1)) - dc.L;
  };
  const int n = 64;
  const double w = 0.5 * std::abs(rep.m_bar);
  std::optional<double> prev;
  double prev_m = 0;
  for (int i = 0; i < n && !rep.crossing_found; ++i) {
    const double M = rep.m_bar - w + 2 * w * i / (n - 1);
    const std::optional<double> tr = trace(M);
    if (tr && prev && (*tr < 0) != (*prev < 0)) {
      std::uintmax_t iters = 200;
      auto fn = [&](double m) { return trace(m).value_or(NAN); };
      auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * (1 + std::abs(a)); };
      const auto r = boost::math::tools::toms748_solve(fn, prev_m, M, *prev, *tr, tol, iters);
      rep.m_cross = 0.5 * (r.first + r.second);
      rep.crossing_found = true;
    }
    if (tr) {
      prev = tr;
      prev_m = M;
    }
  }
  if (!rep.crossing_found) return rep;
  rep.abs_error = std::abs(rep.m_cross - rep.m_bar);

  const ProblemParams at{N, p, rep.m_cross};
  rep.lyapunov = lyapunov_coefficient(at, find_equilibria(at).back());
  // Supercritical (negative coefficient): cycles where the focus repels.
  const double dtrace_dm = (trace(rep.m_cross + 1e-6).value_or(NAN) -
                            trace(rep.m_cross - 1e-6).value_or(NAN)) / 2e-6;
  const int source_side = dtrace_dm > 0 ? 1 : -1;
  rep.cycle_side = rep.lyapunov < 0 ? source_side : -source_side;

  for (double off : offsets) {
    HopfCycle hc;
    hc.offset = off;
    hc.M = rep.m_bar + rep.cycle_side * off;
    const ProblemParams pr{N, p, hc.M};
    try {
      const Equilibrium P = find_equilibria(pr).back();
      const double s0 = P.x * (1 + 0.5 * std::sqrt(off));
      hc.amplitude = find_cycle(pr, {s0, 2 / (p - 1) * s0}).amplitude;
    } catch (const Error& e) {
      hc.failure = e.what();
    }
    rep.cycles.push_back(hc);
  }
  if (rep.cycles.size() >= 2) {
    auto [lo, hi] = std::minmax_element(rep.cycles.begin(), rep.cycles.end(),
                                        [](const HopfCycle& a, const HopfCycle& b) {
                                          return a.offset < b.offset;
                                        });
    if (lo->amplitude && hi->amplitude && *lo->amplitude > 0)
      rep.amplitude_ratio = *hi->amplitude / *lo->amplitude;
  }
  return rep;
}

std::string_view to_string(ShootTarget t) { return t == ShootTarget::kG ? "g" : "h"; }

std::string_view to_string(CrossingConvention c) {
  switch (c) {
    case CrossingConvention::kFirst: return "first";
    case CrossingConvention::kFarthest: return "farthest";
    case CrossingConvention::kLastForward: return "last";
    case CrossingConvention::kEquilibriumValue: return "equilibrium-value";
  }
  return "unknown";
}

std::string_view to_string(ShootBranch b) {
  switch (b) {
    case ShootBranch::kPositiveM: return "positive-M";
    case ShootBranch::kNegativeMSaddle: return "negative-M-saddle";
    case ShootBranch::kTwoEquilibria: return "two-equilibria";
    case ShootBranch::kSaddleLoop: return "saddle-loop";
  }
  return "unknown";
}

}  // namespace emdenflow
