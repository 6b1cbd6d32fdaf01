#include "emdenflow/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>

#include <boost/math/tools/toms748_solve.hpp>

#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

double y_of_x(double p, double x) { return 2 * x / (p - 1); }
double x_of_y(double p, double y) { return (p - 1) * y / 2; }

// Root of f_M on the log scale s = ln y, bracket [slo, shi] expanded outward
// until the signs differ.
double solve_log(const ProblemParams& params, double slo, double shi) {
  auto g = [&](double s) { return f_M(params, std::exp(s)); };
  double glo = g(slo), ghi = g(shi);
  for (int i = 0; i < 400 && glo * ghi > 0; ++i) {
    if (std::abs(glo) < std::abs(ghi)) {
      slo -= 1.0;
      glo = g(slo);
    } else {
      shi += 1.0;
      ghi = g(shi);
    }
  }
  if (glo == 0) return std::exp(slo);
  if (ghi == 0) return std::exp(shi);
  if (glo * ghi > 0) throw Error("f_M root bracket not found");
  std::uintmax_t iters = 300;
  auto tol = [](double a, double b) { return std::abs(a - b) <= 2e-16 * (1 + std::abs(a)); };
  auto [a, b] = boost::math::tools::toms748_solve(g, slo, shi, glo, ghi, tol, iters);
  return std::exp(std::abs(g(a)) < std::abs(g(b)) ? a : b);
}

Equilibrium make_eq(double p, double y, EquilibriumIndex idx,
                    Multiplicity mult = Multiplicity::kSimple) {
  return Equilibrium{x_of_y(p, y), y, idx, mult};
}

double safe_log(double v, double fallback) { return v > 0 ? std::log(v) : fallback; }

}  // namespace

double f_M(const ProblemParams& params, double y) {
  const double p = params.p;
  const DerivedConstants dc = derive_constants(params);
  return std::pow((p - 1) / 2, p) * std::pow(y, p - 1) +
         params.M * std::pow(y, (p - 1) / (p + 1)) - dc.K;
}

double f_M_minimizer(const ProblemParams& params) {
  const double p = params.p;
  if (!(params.M < 0)) throw RegimeUndefined("f_M has an interior minimum only for M < 0");
  return std::pow(2 / (p - 1) * std::pow(-params.M / (p + 1), 1 / p), (p + 1) / (p - 1));
}

double root_residual_tol(const ProblemParams& params) {
  return 1e-10 * (1 + std::abs(derive_constants(params).K));
}

std::optional<RootBounds> bounds_single_positive_m(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, M = params.M, K = dc.K;
  if (!(M > 0 && K > 0)) return std::nullopt;
  const double e = (p + 1) / (p - 1);
  const double hi = (p - 1) / 2 * std::pow(K / M, e);
  const double inner = 1 - std::pow((p - 1) / 2, p) * std::pow(K / M, p) / M;
  return RootBounds{hi * std::pow(std::max(inner, 0.0), e), hi};
}

std::optional<RootBounds> bounds_single_negative_m(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, M = params.M, K = dc.K;
  if (!(M < 0 && K >= 0)) return std::nullopt;
  const double a = std::pow(2 * K / (p - 1), 1 / (p - 1));
  const double b = std::pow(2 / (p - 1), 2 / (p - 1)) * std::pow(-M, (p + 1) / (p * (p - 1)));
  return RootBounds{std::max(a, b), std::pow(2.0, 2 / (p - 1)) * (a + b)};
}

std::optional<RootBounds> bounds_first_large_m(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, M = params.M, K = dc.K;
  if (!(M < 0 && K < 0)) return std::nullopt;
  const double e = (p + 1) / (p - 1);
  const double lo = (p - 1) / 2 * std::pow(K / M, e);
  const double corr = 1 - 4 / ((p - 1) * K) * std::pow((p - 1) * K / (2 * M), p + 1);
  return RootBounds{lo, lo * std::pow(corr, e)};
}

std::optional<RootBounds> bounds_second_large_m(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, M = params.M, K = dc.K;
  if (!(M < 0 && K < 0)) return std::nullopt;
  const double e = (p + 1) / (p - 1);
  const double hi = std::pow(2 / (p - 1), 2 / (p - 1)) * std::pow(-M, (p + 1) / (p * (p - 1)));
  const double inner = 1 - K / (M * std::pow(-M, 1 / p));
  return RootBounds{hi * std::pow(std::max(inner, 0.0), e), hi};
}

std::vector<Equilibrium> find_equilibria(const ProblemParams& params) {
  const RegimeTag tag = regime_of(params);
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  std::vector<Equilibrium> out;
  switch (tag.kind) {
    case RegimeCase::kNoEquilibrium:
    case RegimeCase::kNoneNegativeM:
      return out;
    case RegimeCase::kSingleZeroM: {
      out.push_back(make_eq(p, y_of_x(p, std::pow(2 * dc.K / (p - 1), 1 / (p - 1))),
                            EquilibriumIndex::kSingle));
      return out;
    }
    case RegimeCase::kSinglePositiveM: {
      const RootBounds b = *bounds_single_positive_m(params);
      const double shi = std::log(y_of_x(p, b.hi));
      const double slo = safe_log(y_of_x(p, b.lo), shi - 1);
      out.push_back(make_eq(p, solve_log(params, slo, shi), EquilibriumIndex::kSingle));
      return out;
    }
    case RegimeCase::kSingleNegativeM: {
      const RootBounds b = *bounds_single_negative_m(params);
      const double ymin = f_M_minimizer(params);
      const double slo = std::log(std::max(ymin, y_of_x(p, b.lo)));
      const double shi = std::max(std::log(y_of_x(p, b.hi)), slo + 1);
      out.push_back(make_eq(p, solve_log(params, slo, shi), EquilibriumIndex::kSingle));
      return out;
    }
    case RegimeCase::kDoubleRoot: {
      out.push_back(make_eq(p, f_M_minimizer(params), EquilibriumIndex::kDouble,
                            Multiplicity::kDouble));
      return out;
    }
    case RegimeCase::kTwoRoots: {
      const double ymin = f_M_minimizer(params);
      const double fmin = f_M(params, ymin);
      if (fmin >= -1e-9 * (1 + std::abs(dc.K))) {
        // Numerically indistinguishable from the tangency.
        out.push_back(make_eq(p, ymin, EquilibriumIndex::kDouble, Multiplicity::kDouble));
        return out;
      }
      const double smin = std::log(ymin);
      const RootBounds b1 = *bounds_first_large_m(params);
      const RootBounds b2 = *bounds_second_large_m(params);
      double s1 = safe_log(y_of_x(p, b1.lo), smin - 1);
      if (!(s1 < smin)) s1 = smin - 1;
      double s2 = std::log(y_of_x(p, b2.hi));
      if (!(s2 > smin)) s2 = smin + 1;
      out.push_back(make_eq(p, solve_log(params, s1, smin), EquilibriumIndex::kFirst));
      out.push_back(make_eq(p, solve_log(params, smin, s2), EquilibriumIndex::kSecond));
      return out;
    }
  }
  return out;
}

std::array<double, 4> jacobian(const ProblemParams& params, double x, double y) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p, q = dc.q;
  const double dy = y == 0 ? 0.0 : params.M * q * std::pow(std::abs(y), q - 1);
  return {2 / (p - 1), -1.0, p * std::pow(std::abs(x), p - 1), dy - dc.K};
}

namespace {

Classification from_trace_det(double trace, double det) {
  Classification c;
  c.trace = trace;
  c.det = det;
  c.discriminant = trace * trace - 4 * det;
  const std::complex<double> sq = std::sqrt(std::complex<double>(c.discriminant, 0.0));
  c.eigenvalues = {(trace - sq) / 2.0, (trace + sq) / 2.0};
  return c;
}

}  // namespace

Classification classify_origin(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  const RegimeTag tag = regime_of(params);
  const double p = params.p;
  const double K = tag.serrin_critical ? 0.0 : dc.K;
  Classification c = from_trace_det(2 / (p - 1) - K, -2 * K / (p - 1));
  c.eigenvalues = {std::complex<double>(-K, 0), std::complex<double>(2 / (p - 1), 0)};
  c.fast_slope = 0.0;
  if (K > 0) {
    c.kind = StabilityKind::kSaddle;
    c.stable_slope = params.N - 2.0;
  } else if (K == 0) {
    c.kind = StabilityKind::kDegenerate;
  } else if (params.N == 2) {
    c.kind = StabilityKind::kDegenerateNode;
  } else {
    c.kind = StabilityKind::kSource;
  }
  return c;
}

Classification classify_equilibrium(const ProblemParams& params, const Equilibrium& eq) {
  if (eq.index == EquilibriumIndex::kOrigin) return classify_origin(params);
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  if (!(eq.y > 0) || std::abs(eq.y - y_of_x(p, eq.x)) > 1e-12 * eq.y ||
      std::abs(f_M(params, eq.y)) > root_residual_tol(params))
    throw NotAnEquilibrium("point is not a fixed point of the field");
  const double s = dc.q * params.M * std::pow(eq.y, (p - 1) / (p + 1));
  Classification c = from_trace_det(s - dc.L, 2 * dc.K - s);
  const double scale = 1 + std::abs(dc.K) + std::abs(dc.L);
  const double ztol = 1e-12 * scale * scale;
  if (std::abs(c.det) <= ztol) {
    c.kind = std::abs(c.trace) <= kTraceTol ? StabilityKind::kBtDegenerate
                                            : StabilityKind::kDegenerate;
  } else if (c.det < 0) {
    c.kind = StabilityKind::kSaddle;
  } else if (std::abs(c.trace) <= kTraceTol) {
    c.kind = StabilityKind::kCenterCandidate;
    if (params.N >= 3 && !regime_of(params).sobolev_critical) {
      const double lam = lyapunov_coefficient(params, eq);
      c.lyapunov_coeff = lam;
      c.alpha_sq = 4 / ((p - 1) * (p - 1)) + params.N - 2;
      if (lam < 0) c.kind = StabilityKind::kWeakSink;
      if (lam > 0) c.kind = StabilityKind::kWeakSource;
    }
  } else if (std::abs(c.discriminant) <= ztol) {
    c.kind = c.trace < 0 ? StabilityKind::kSink : StabilityKind::kSource;
  } else if (c.discriminant > 0) {
    c.kind = c.trace < 0 ? StabilityKind::kNodeAttracting : StabilityKind::kNodeRepelling;
  } else {
    c.kind = c.trace < 0 ? StabilityKind::kSpiralAttracting : StabilityKind::kSpiralRepelling;
  }
  return c;
}

double lyapunov_coefficient(const ProblemParams& params, const Equilibrium& eq) {
  const DerivedConstants dc = derive_constants(params);
  const double p = params.p;
  if (params.N < 3) throw NotACenterCandidate("Lyapunov coefficient needs N >= 3");
  if (!(eq.y > 0)) throw NotACenterCandidate("origin is never a center candidate");
  const double trace = dc.q * params.M * std::pow(eq.y, (p - 1) / (p + 1)) - dc.L;
  if (std::abs(trace) > kTraceTol)
    throw NotACenterCandidate("linearization trace is not zero");
  if (regime_of(params).sobolev_critical || dc.L == 0)
    throw NotACenterCandidate("L = 0: the linear center is degenerate");
  const double alpha_sq = 4 / ((p - 1) * (p - 1)) + params.N - 2;
  const double gamma = std::sqrt(params.N - 2.0);
  return -alpha_sq * (p - 1) * (params.N + 1) * dc.L /
         ((p + 1) * (p + 1) * eq.y * eq.y * gamma);
}

BTNormalForm bt_normal_form(double p, double alpha1) {
  validate({2, p, 0.0});
  if (std::abs(alpha1) > 0.1) throw InvalidParams("bt_normal_form needs |alpha1| <= 0.1");
  BTNormalForm bt;
  bt.alpha1 = alpha1;
  const double a = (p - 1) / (p + 1);
  const double q = 2 * p / (p + 1);
  const double y0 = std::pow(p, -1 / (p - 1)) * std::pow(2 / (p - 1), (p + 1) / (p - 1));
  const double x0 = (p - 1) / 2 * y0;
  const double mu = (p + 1) * std::pow(p, -p / (p + 1)) + alpha1;
  const double w = q * (q - 1) * std::pow(y0, q - 2);
  bt.y0 = y0;
  bt.g20 = -p * (p - 1) * std::pow(x0, p - 2) + mu * w * 4 / ((p - 1) * (p - 1));
  bt.g11 = -mu * w * 2 / (p - 1);
  bt.g02 = mu * w;
  bt.coeff_A = bt.g20 / 2;
  bt.coeff_B = bt.g11;
  bt.sign_BA = bt.coeff_B / bt.coeff_A > 0 ? 1 : -1;
  const double lead = alpha1 * std::pow(y0, a) / (p * p - 1);
  bt.beta1 = -64 * lead;
  bt.beta2 = (8 * p * p + 2 * p - 1) * lead;
  return bt;
}

bool is_attracting(StabilityKind kind) {
  return kind == StabilityKind::kSink || kind == StabilityKind::kNodeAttracting ||
         kind == StabilityKind::kSpiralAttracting || kind == StabilityKind::kWeakSink;
}

bool is_repelling(StabilityKind kind) {
  return kind == StabilityKind::kSource || kind == StabilityKind::kNodeRepelling ||
         kind == StabilityKind::kSpiralRepelling || kind == StabilityKind::kWeakSource;
}

std::string_view to_string(StabilityKind kind) {
  switch (kind) {
    case StabilityKind::kSaddle: return "saddle";
    case StabilityKind::kSink: return "sink";
    case StabilityKind::kSource: return "source";
    case StabilityKind::kNodeAttracting: return "node-attracting";
    case StabilityKind::kNodeRepelling: return "node-repelling";
    case StabilityKind::kDegenerateNode: return "degenerate-node";
    case StabilityKind::kSpiralAttracting: return "spiral-attracting";
    case StabilityKind::kSpiralRepelling: return "spiral-repelling";
    case StabilityKind::kCenterCandidate: return "center-candidate";
    case StabilityKind::kWeakSink: return "weak-sink";
    case StabilityKind::kWeakSource: return "weak-source";
    case StabilityKind::kBtDegenerate: return "bt-degenerate";
    case StabilityKind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

std::string_view to_string(EquilibriumIndex index) {
  switch (index) {
    case EquilibriumIndex::kOrigin: return "origin";
    case EquilibriumIndex::kSingle: return "single";
    case EquilibriumIndex::kFirst: return "first";
    case EquilibriumIndex::kSecond: return "second";
    case EquilibriumIndex::kDouble: return "double";
  }
  return "unknown";
}

}  // namespace emdenflow
