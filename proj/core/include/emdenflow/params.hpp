#pragma once

#include <optional>
#include <string_view>

namespace emdenflow {

// Radial problem  -u'' - (N-1)u'/r = u^p + M |u'|^q,  q = 2p/(p+1).
struct ProblemParams {
  int N = 3;
  double p = 2.0;
  double M = 0.0;
};

struct DerivedConstants {
  double K = 0.0;
  double L = 0.0;
  double q = 0.0;
};

struct CriticalConstants {
  std::optional<double> mu_star;
  double mu_star_1 = 0.0;
  double mu_star_2 = 0.0;
  std::optional<double> m_bar;
  std::optional<double> m_node_hi;
  std::optional<double> m_node_lo;
};

enum class RegimeCase {
  kNoEquilibrium,      // M >= 0 and K <= 0
  kSingleZeroM,        // M = 0, K > 0
  kSinglePositiveM,    // M > 0, K > 0
  kSingleNegativeM,    // M < 0, K >= 0
  kNoneNegativeM,      // M < 0, K < 0, M > -mu*
  kDoubleRoot,         // M = -mu*, K < 0
  kTwoRoots,           // M < -mu*, K < 0
};

struct RegimeTag {
  RegimeCase kind = RegimeCase::kNoEquilibrium;
  bool serrin_critical = false;   // p = N/(N-2), K = 0
  bool sobolev_critical = false;  // p = (N+2)/(N-2), L = 0
  bool m_zero = false;
};

inline constexpr double kBoundaryRelTol = 1e-12;

void validate(const ProblemParams& params);

DerivedConstants derive_constants(const ProblemParams& params);

// mu*(N); RegimeUndefined for N >= 3 with p > N/(N-2).
double mu_star(int N, double p);
// ((p+1)^{2p+1}/(2p)^p)^{1/(p+1)}, the closed form of mu*(1).
double mu_star_1_closed(double p);
// RegimeUndefined for N < 2.
double m_bar(int N, double p);
std::optional<double> m_node_hi(int N, double p);
std::optional<double> m_node_lo(int N, double p);

CriticalConstants critical_constants(const ProblemParams& params);

RegimeTag regime_of(const ProblemParams& params);
int expected_root_count(RegimeCase kind);
std::string_view to_string(RegimeCase kind);

}  // namespace emdenflow
