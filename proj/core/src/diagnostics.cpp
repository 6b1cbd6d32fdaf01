#include "emdenflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

// A value and the sum of the magnitudes of its terms, which sets the rounding level.
struct Valued {
  double value = 0.0;
  double scale = 0.0;
};

Valued F_terms(const ProblemParams& params, PhasePoint pt) {
  const double p = params.p, K = derive_constants(params).K;
  const double xt = 2 * pt.x / (p - 1) - pt.y;
  const double a = xt * xt / 2, b = std::pow(std::abs(pt.x), p + 1) / (p + 1),
               c = K * pt.x * pt.x / (p - 1);
  return {a + b - c, std::abs(a) + std::abs(b) + std::abs(c)};
}

Valued V_terms(const ProblemParams& params, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, ax = std::abs(pt.x);
  const double xt = 2 * pt.x / (p - 1) - pt.y;
  const double a = dc.K * pt.x * pt.x / (p - 1), b = std::pow(ax, p + 1) / (p + 1),
               c = params.M * std::pow(2 / (p - 1), dc.q) * (p + 1) *
                   std::pow(ax, (3 * p + 1) / (p + 1)) / (3 * p + 1),
               d = xt * xt / 2;
  return {a - b - c - d, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d)};
}

Valued Z_terms(const ProblemParams& params, double t, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, N = params.N;
  const double az = 2 * (p + 1) * (N - 1) / (p + 3);
  const double w = std::exp(2 * (p + 1) * dc.L * t / (p + 3));
  const double a = (p + 1) / 2 * pt.y * pt.y, b = std::pow(std::abs(pt.x), p + 1),
               c = az * pt.x * pt.y, d = params.M * pt.x * std::pow(std::abs(pt.y), dc.q);
  return {w * (a + b - c + d), w * (std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d))};
}

constexpr int kFlowSubsteps = 40;

// Exact flow over a short time s by RK4 substeps, independent of the trajectory's
// interpolant.
PhasePoint local_flow(const ProblemParams& params, PhasePoint pt, double s) {
  const int n = kFlowSubsteps;
  const double h = s / n;
  auto f = [&](PhasePoint q) {
    const auto [a, b] = eval_H(params, q);
    return PhasePoint{a, b};
  };
  for (int i = 0; i < n; ++i) {
    const PhasePoint k1 = f(pt);
    const PhasePoint k2 = f({pt.x + h / 2 * k1.x, pt.y + h / 2 * k1.y});
    const PhasePoint k3 = f({pt.x + h / 2 * k2.x, pt.y + h / 2 * k2.y});
    const PhasePoint k4 = f({pt.x + h * k3.x, pt.y + h * k3.y});
    pt.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
    pt.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
  }
  return pt;
}

// Derivative of value(t + s, flow_s(pt)) at s = 0: five-point stencils at d and d/2,
// Richardson-combined. Returns the value and an error bar (truncation estimate plus
// rounding). The step follows the local time scale 1/|J|.
template <class Fn>
std::pair<double, double> flow_derivative(const ProblemParams& params, double t, PhasePoint pt,
                                          Fn&& value) {
  const auto J = jacobian(params, pt.x, pt.y);
  const double rate = std::max({std::abs(J[0]), std::abs(J[1]), std::abs(J[2]), std::abs(J[3])});
  const double d = 4e-3 / (1 + rate);
  double mag = value(t, pt).scale;
  auto stencil5 = [&](double h) {
    double v[4];
    const double offs[4] = {-2 * h, -h, h, 2 * h};
    for (int i = 0; i < 4; ++i) {
      const Valued w = value(t + offs[i], local_flow(params, pt, offs[i]));
      v[i] = w.value;
      mag = std::max(mag, w.scale);
    }
    return (v[0] - 8 * v[1] + 8 * v[2] - v[3]) / (12 * h);
  };
  const double coarse = stencil5(d), fine = stencil5(d / 2);
  const double best = (16 * fine - coarse) / 15;
  // Rounding: the values themselves, plus the position error of the substeps carried
  // through a value of homogeneity at most p + 2.
  const double rounding = (100 + kFlowSubsteps * (params.p + 2)) *
                          std::numeric_limits<double>::epsilon() * mag / d;
  const double bar = std::abs(fine - coarse) / 15 + rounding;
  return {best, bar};
}

// Discrepancy beyond the finite-difference error bar, relative to scale.
double excess(double diff, double bar, double scale) {
  const double over = diff - bar;
  if (!(over > 0)) return 0;
  return scale > 0 ? over / scale : INFINITY;
}

bool is_sobolev_center(const ProblemParams& params) {
  return params.M == 0 && params.N >= 3 && std::abs(derive_constants(params).L) <= 1e-12;
}

}  // namespace

DiagnosticSample diagnostics_at(const ProblemParams& params, double t, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, N = params.N, q = dc.q;
  const double x = pt.x, y = pt.y, ax = std::abs(x);
  DiagnosticSample s;
  s.t = t;
  s.a_exponent = 2 * (p + 1) * (N - 1) / (p + 3);
  s.F = F_terms(params, pt).value;
  s.V = V_terms(params, pt).value;
  s.Z = Z_terms(params, t, pt).value;
  const double r = std::exp(t);
  const double u = std::pow(r, -2 / (p - 1)) * x;
  const double ur = -std::pow(r, -(p + 1) / (p - 1)) * y;
  s.G = 0.5 * (ur * ur - q * std::pow(std::abs(u), p + 1));
  if (is_sobolev_center(params))
    s.E = y * y / 2 + (N - 2) / (2 * N) * std::pow(ax, 2 * N / (N - 2)) - (N - 2) / 2 * x * y;
  return s;
}

std::vector<DiagnosticSample> eval_diagnostics(const ProblemParams& params,
                                               const Trajectory& traj) {
  std::vector<DiagnosticSample> out;
  out.reserve(traj.t.size());
  for (std::size_t i = 0; i < traj.t.size(); ++i)
    out.push_back(diagnostics_at(params, traj.t[i], traj.samples[i]));
  return out;
}

double dV_dt(const ProblemParams& params, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  const double xt = 2 * pt.x / (p - 1) - pt.y;
  return dc.L * xt * xt -
         params.M * (std::pow(std::abs(2 * pt.x / (p - 1)), dc.q) - std::pow(std::abs(pt.y), dc.q)) *
             xt;
}

double dF_dt(const ProblemParams& params, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double xt = 2 * pt.x / (params.p - 1) - pt.y;
  return -xt * (dc.L * xt + params.M * std::pow(std::abs(pt.y), dc.q));
}

namespace {

MonotonicityReport monotone(const ProblemParams& params, const Trajectory& traj, int direction,
                            bool below_L_only,
                            Valued (*value)(const ProblemParams&, PhasePoint),
                            double (*deriv)(const ProblemParams&, PhasePoint)) {
  MonotonicityReport rep;
  rep.direction = direction;
  const double lam = 2 / (params.p - 1);
  auto below = [&](PhasePoint s) { return s.y < lam * s.x; };
  for (std::size_t i = 0; i + 1 < traj.t.size(); ++i) {
    const PhasePoint a = traj.samples[i], b = traj.samples[i + 1];
    if (below_L_only && !(below(a) && below(b))) continue;
    // Oriented along increasing t.
    double dv = value(params, b).value - value(params, a).value;
    const double dt = traj.t[i + 1] - traj.t[i];
    if (dt < 0) dv = -dv;
    const double violation = -direction * dv - 1e-9 * std::abs(dt);
    if (violation > 0) {
      rep.holds = false;
      rep.worst_violation = std::max(rep.worst_violation, violation);
    }
    ++rep.checked;

    const auto [fd, bar] = flow_derivative(
        params, traj.t[i], a, [&](double, PhasePoint q) { return value(params, q); });
    const double exact = deriv(params, a);
    rep.identity_error =
        std::max(rep.identity_error, excess(std::abs(fd - exact), bar, std::abs(fd) + std::abs(exact)));
  }
  // Integrated form: V(end) - V(begin) against the quadrature of the closed-form rate.
  const double total = integrate_along(traj, [&](double, PhasePoint q) { return deriv(params, q); });
  const std::size_t lo = traj.direction >= 0 ? 0 : traj.t.size() - 1;
  const std::size_t hi = traj.direction >= 0 ? traj.t.size() - 1 : 0;
  const double change = value(params, traj.samples[hi]).value -
                        value(params, traj.samples[lo]).value;
  if (!below_L_only)
    rep.integral_error = std::abs(total - change) / (std::abs(change) + 1e-300);
  return rep;
}

}  // namespace

MonotonicityReport check_V_monotonicity(const ProblemParams& params, const Trajectory& traj) {
  const double L = derive_constants(params).L;
  const double eps = 1e-12;
  int direction = 0;
  if (params.M > 0 && L <= eps) direction = -1;
  else if (params.M < 0 && L >= -eps) direction = 1;
  else throw RegimeMismatch("V is monotone only for M > 0, L <= 0 or M < 0, L >= 0");
  return monotone(params, traj, direction, false, V_terms, dV_dt);
}

MonotonicityReport check_F_monotonicity(const ProblemParams& params, const Trajectory& traj) {
  const double L = derive_constants(params).L;
  if (!(L * params.M > 0)) throw RegimeMismatch("F is monotone below L only when LM > 0");
  return monotone(params, traj, L > 0 ? -1 : 1, true, F_terms, dF_dt);
}

double z_source(const ProblemParams& params, double t, PhasePoint pt) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, N = params.N;
  const double b = 2 * (p + 1) * dc.L / (p + 3);
  const double c = 2 * (N - 1) * (p * p - 1) / ((p + 3) * (p + 3));
  const double kappa = p * (p + 3) / ((p + 1) * (p + 1));
  return std::exp((b - 1) * t) * c * pt.x * pt.y *
         (-dc.L + kappa * params.M * std::pow(std::abs(pt.y), (p - 1) / (p + 1)));
}

ZRelationReport check_Z_relation(const ProblemParams& params, const Trajectory& traj,
                                 std::optional<double> sign_y_max) {
  const DerivedConstants dc = derive_constants(params);
  const double a = (params.p - 1) / (params.p + 1);
  ZRelationReport rep;
  int seen_sign = 0;
  for (std::size_t i = 0; i < traj.t.size(); ++i) {
    const double tc = traj.t[i];
    const PhasePoint s = traj.samples[i];
    if (!(s.x > 0 && s.y > 0)) continue;
    const double U = z_source(params, tc, s);
    if (!sign_y_max || s.y <= *sign_y_max) {
      const int sg = (U > 0) - (U < 0);
      if (sg != 0) {
        if (seen_sign != 0 && sg != seen_sign) rep.u_sign_constant = false;
        if (seen_sign == 0) seen_sign = sg;
      }
    }
    const auto [Zt, bar] = flow_derivative(
        params, tc, s, [&](double t, PhasePoint q) { return Z_terms(params, t, q); });
    const double Zr = std::exp(-tc) * Zt;
    const double Z = diagnostics_at(params, tc, s).Z;
    const double damp = dc.q * params.M * std::exp(-tc) * std::pow(s.y, a) * Z;
    const double scale = std::abs(Zr) + std::abs(damp) + std::abs(U);
    ++rep.checked;
    rep.max_rel_error =
        std::max(rep.max_rel_error, excess(std::abs(Zr - damp - U), std::exp(-tc) * bar, scale));
  }
  rep.u_sign = rep.u_sign_constant ? seen_sign : 0;
  return rep;
}

GReport check_G_negative(const ProblemParams& params, const Trajectory& traj) {
  const double p = params.p;
  const double q = derive_constants(params).q;
  GReport rep;
  rep.applicable = params.M <= -mu_star(1, p);
  if (!rep.applicable) return rep;
  rep.max_G = -INFINITY;
  for (const RadialSample& s : trajectory_to_radial(traj)) {
    if (!(s.r > 0)) continue;
    const double G = 0.5 * (s.ur * s.ur - q * std::pow(std::abs(s.u), p + 1));
    rep.max_G = std::max(rep.max_G, G);
    if (!(G < 0)) rep.g_negative = false;
    const double lower = std::pow(1 + (p - 1) / 2 * std::sqrt(q) * s.r, -2 / (p - 1));
    if (!(s.u > lower)) rep.lower_bound_holds = false;
  }
  const std::size_t last = traj.direction >= 0 ? traj.t.size() - 1 : 0;
  rep.liminf_value = traj.samples[last].x;
  rep.liminf_bound = std::pow(2 * (p + 1) / (p * (p - 1) * (p - 1)), 1 / (p - 1));
  rep.liminf_holds = rep.liminf_value >= rep.liminf_bound - 1e-3;
  return rep;
}

std::vector<BoundCheck> check_a_priori_bounds(const ProblemParams& params,
                                              const Trajectory& traj) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, N = params.N, M = params.M, K = dc.K;
  const bool confined = traj.termination != Termination::kExitsQ &&
                        traj.termination != Termination::kBlowup;
  double xmax = 0, ymax = 0;
  for (const PhasePoint& s : traj.samples) {
    xmax = std::max(xmax, s.x);
    ymax = std::max(ymax, s.y);
  }
  const double tol = 1e-9;
  std::vector<BoundCheck> out;

  BoundCheck cx{"regular-ceiling-x"}, cy{"regular-ceiling-y"};
  if (M >= 0 && params.N >= 3 && K > 0 && confined) {
    const double base = std::pow(2 * N / (p - 1), 1 / (p - 1));
    cx.bound = base;
    cy.bound = (N - 2) * base;
    if (M > 0) {
      cx.bound = std::min(cx.bound, (p - 1) / 2 * std::pow(K / M, (p + 1) / (p - 1)));
      cy.bound = std::min(cy.bound, std::pow(K / M, (p + 1) / (p - 1)));
    }
    cx.applicable = cy.applicable = true;
    cx.value = xmax;
    cy.value = ymax;
    cx.holds = xmax <= cx.bound * (1 + tol);
    cy.holds = ymax <= cy.bound * (1 + tol);
  }
  out.push_back(cx);
  out.push_back(cy);

  BoundCheck gs{"ground-state-x"};
  if (M > 0 && params.N >= 3 && dc.L >= -1e-12 && confined && traj.seed.kind == SeedKind::kRegular) {
    gs.applicable = true;
    gs.value = xmax;
    gs.bound = std::pow((p + 1) * K / (p - 1), 1 / (p - 1));
    gs.holds = xmax <= gs.bound * (1 + tol);
  }
  out.push_back(gs);

  BoundCheck ld{"log-decay-c0"};
  if (M < 0 && params.N >= 2 && confined) {
    const double m2 = mu_star(2, p);
    if (-M < m2) {
      const double a = 1 - std::pow(-M / m2, p + 1);
      ld.applicable = true;
      ld.bound = a;
      ld.value = xmax * std::pow(a, 1 / (p - 1));
      ld.holds = std::isfinite(ld.value);
    }
  }
  out.push_back(ld);
  return out;
}

}  // namespace emdenflow
