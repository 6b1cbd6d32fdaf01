#include "emdenflow/params.hpp"

#include <cmath>
#include <string>

#include "emdenflow/errors.hpp"

namespace emdenflow {

namespace {

bool near_rel(double a, double b) {
  return std::abs(a - b) <= kBoundaryRelTol * std::max(1.0, std::abs(b));
}

bool is_serrin(int N, double p) {
  return N >= 3 && near_rel(p, double(N) / (N - 2));
}

bool is_sobolev(int N, double p) {
  return N >= 3 && near_rel(p, double(N + 2) / (N - 2));
}

// Node thresholds solve D = 0 with q*M*Y^a = c; any c < K gives a genuine
// equilibrium through M(c) below.
double m_of_c(double p, double K, double c) {
  return c * std::pow((p - 1) / 2, p / (p + 1)) / std::pow(K - c, 1 / (p + 1));
}

std::optional<double> node_threshold(int N, double p, bool upper) {
  if (N == 1) return std::nullopt;
  if (N == 2 && upper) return std::nullopt;
  const DerivedConstants dc = derive_constants({N, p, 0.0});
  const double root = 2 * std::sqrt(double(N - 1));
  const double c = (p + 1) / (2 * p) * (upper ? dc.L - 2 + root : dc.L - 2 - root);
  if (c == 0.0 || dc.K - c <= 0) return std::nullopt;
  if (dc.K < 0 && !(c < dc.K * (p + 1) / p)) return std::nullopt;
  if (upper && dc.L < 0 && !(c < 0)) return std::nullopt;
  if (!upper && dc.L >= 0 && !(c > 0)) return std::nullopt;
  return m_of_c(p, dc.K, c);
}

}  // namespace

void validate(const ProblemParams& params) {
  if (params.N < 1) throw InvalidParams("N must be a positive integer");
  if (!std::isfinite(params.p) || !(params.p > 1))
    throw InvalidParams("p must be a finite real > 1");
  if (!std::isfinite(params.M)) throw InvalidParams("M must be finite");
}

DerivedConstants derive_constants(const ProblemParams& params) {
  validate(params);
  const double N = params.N, p = params.p;
  DerivedConstants dc;
  dc.K = ((N - 2) * p - N) / (p - 1);
  dc.L = ((N - 2) * p - (N + 2)) / (p - 1);
  dc.q = 2 * p / (p + 1);
  return dc;
}

double mu_star(int N, double p) {
  validate({N, p, 0.0});
  const double num = N - (N - 2) * p;
  if (N >= 3 && num < 0)
    throw RegimeUndefined("mu*(N) needs N <= 2 or p <= N/(N-2)");
  return (p + 1) * std::pow(std::max(num, 0.0) / (2 * p), p / (p + 1));
}

double mu_star_1_closed(double p) {
  validate({1, p, 0.0});
  return std::pow(std::pow(p + 1, 2 * p + 1) / std::pow(2 * p, p), 1 / (p + 1));
}

double m_bar(int N, double p) {
  validate({N, p, 0.0});
  if (N < 2) throw RegimeUndefined("M-bar needs N >= 2");
  const double n = N;
  return (p + 1) * ((n - 2) * p - n - 2) /
         (std::pow(4 * p, p / (p + 1)) *
          std::pow((n - 2) * (p - 1) * (p - 1) + 4, 1 / (p + 1)));
}

std::optional<double> m_node_hi(int N, double p) { return node_threshold(N, p, true); }
std::optional<double> m_node_lo(int N, double p) { return node_threshold(N, p, false); }

CriticalConstants critical_constants(const ProblemParams& params) {
  validate(params);
  const int N = params.N;
  const double p = params.p;
  CriticalConstants cc;
  if (N <= 2 || N - (N - 2) * p >= 0 || is_serrin(N, p)) {
    cc.mu_star = is_serrin(N, p) && N >= 3 ? 0.0 : mu_star(N, p);
  }
  cc.mu_star_1 = mu_star(1, p);
  cc.mu_star_2 = mu_star(2, p);
  if (N >= 2) cc.m_bar = is_sobolev(N, p) ? 0.0 : m_bar(N, p);
  cc.m_node_hi = m_node_hi(N, p);
  cc.m_node_lo = m_node_lo(N, p);
  return cc;
}

RegimeTag regime_of(const ProblemParams& params) {
  const DerivedConstants dc = derive_constants(params);
  RegimeTag tag;
  tag.serrin_critical = is_serrin(params.N, params.p);
  tag.sobolev_critical = is_sobolev(params.N, params.p);
  tag.m_zero = std::abs(params.M) <= kBoundaryRelTol;
  const double K = tag.serrin_critical ? 0.0 : dc.K;

  if (tag.m_zero || params.M > 0) {
    if (K <= 0)
      tag.kind = RegimeCase::kNoEquilibrium;
    else
      tag.kind = tag.m_zero ? RegimeCase::kSingleZeroM : RegimeCase::kSinglePositiveM;
    return tag;
  }
  if (K >= 0) {
    tag.kind = RegimeCase::kSingleNegativeM;
    return tag;
  }
  const double ms = mu_star(params.N, params.p);
  if (std::abs(params.M + ms) <= kBoundaryRelTol * ms)
    tag.kind = RegimeCase::kDoubleRoot;
  else if (params.M > -ms)
    tag.kind = RegimeCase::kNoneNegativeM;
  else
    tag.kind = RegimeCase::kTwoRoots;
  return tag;
}

int expected_root_count(RegimeCase kind) {
  switch (kind) {
    case RegimeCase::kNoEquilibrium:
    case RegimeCase::kNoneNegativeM:
      return 0;
    case RegimeCase::kTwoRoots:
      return 2;
    default:
      return 1;
  }
}

std::string_view to_string(RegimeCase kind) {
  switch (kind) {
    case RegimeCase::kNoEquilibrium: return "no-equilibrium";
    case RegimeCase::kSingleZeroM: return "unique-equilibrium-m-zero";
    case RegimeCase::kSinglePositiveM: return "unique-equilibrium-m-positive";
    case RegimeCase::kSingleNegativeM: return "unique-equilibrium-m-negative";
    case RegimeCase::kNoneNegativeM: return "no-equilibrium-m-negative";
    case RegimeCase::kDoubleRoot: return "double-root";
    case RegimeCase::kTwoRoots: return "two-equilibria";
  }
  return "unknown";
}

}  // namespace emdenflow
