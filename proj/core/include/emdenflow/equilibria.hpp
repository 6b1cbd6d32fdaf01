#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "emdenflow/params.hpp"

namespace emdenflow {

enum class EquilibriumIndex { kOrigin, kSingle, kFirst, kSecond, kDouble };
enum class Multiplicity { kSimple, kDouble };

struct Equilibrium {
  double x = 0.0;
  double y = 0.0;
  EquilibriumIndex index = EquilibriumIndex::kOrigin;
  Multiplicity multiplicity = Multiplicity::kSimple;
};

enum class StabilityKind {
  kSaddle,
  kSink,
  kSource,
  kNodeAttracting,
  kNodeRepelling,
  kDegenerateNode,
  kSpiralAttracting,
  kSpiralRepelling,
  kCenterCandidate,
  kWeakSink,
  kWeakSource,
  kBtDegenerate,
  kDegenerate,
};

struct Classification {
  std::array<std::complex<double>, 2> eigenvalues{};
  double trace = 0.0;
  double det = 0.0;
  double discriminant = 0.0;
  StabilityKind kind = StabilityKind::kDegenerate;
  std::optional<double> lyapunov_coeff;
  std::optional<double> alpha_sq;
  // Origin only: slopes y/x of the stable and fast directions.
  std::optional<double> stable_slope;
  std::optional<double> fast_slope;
};

struct BTNormalForm {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double coeff_A = 0.0;
  double coeff_B = 0.0;
  int sign_BA = 1;
  double alpha1 = 0.0;
  double y0 = 0.0;
  // Second-order Taylor coefficients of the perturbed field at (x0, 0).
  double g20 = 0.0;
  double g11 = 0.0;
  double g02 = 0.0;
};

inline constexpr double kTraceTol = 1e-9;

// f_M(y) = ((p-1)/2)^p y^{p-1} + M y^{(p-1)/(p+1)} - K.
double f_M(const ProblemParams& params, double y);
// Minimiser of f_M for M < 0.
double f_M_minimizer(const ProblemParams& params);
double root_residual_tol(const ProblemParams& params);

std::vector<Equilibrium> find_equilibria(const ProblemParams& params);

// Explicit a priori bounds on the equilibria. Each returns nullopt outside its
// regime. x-values, not y-values.
struct RootBounds {
  double lo = 0.0;
  double hi = 0.0;
};
std::optional<RootBounds> bounds_single_positive_m(const ProblemParams& params);
std::optional<RootBounds> bounds_single_negative_m(const ProblemParams& params);
// Large |M| bounds for X_1 (lower/upper) and X_2.
std::optional<RootBounds> bounds_first_large_m(const ProblemParams& params);
std::optional<RootBounds> bounds_second_large_m(const ProblemParams& params);

Classification classify_origin(const ProblemParams& params);
Classification classify_equilibrium(const ProblemParams& params, const Equilibrium& eq);
double lyapunov_coefficient(const ProblemParams& params, const Equilibrium& eq);
BTNormalForm bt_normal_form(double p, double alpha1);

// Jacobian of the field H at (x, y), row major.
std::array<double, 4> jacobian(const ProblemParams& params, double x, double y);

bool is_attracting(StabilityKind kind);
bool is_repelling(StabilityKind kind);
std::string_view to_string(StabilityKind kind);
std::string_view to_string(EquilibriumIndex index);

}  // namespace emdenflow
