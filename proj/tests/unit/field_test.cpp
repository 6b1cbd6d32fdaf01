#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "emdenflow/equilibria.hpp"
#include "emdenflow/errors.hpp"
#include "emdenflow/field.hpp"

namespace emdenflow {
namespace {

std::set<RegionTag> tags_on_grid(const ProblemParams& pr, double x_hi, double y_hi, int n,
                                 std::set<RegionTag> acc = {}) {
  const auto eqs = find_equilibria(pr);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const RegionTag t = region_of(pr, {(i + 0.5) / n * x_hi, (j + 0.5) / n * y_hi}, eqs);
      if (t != RegionTag::kOnL && t != RegionTag::kOnC) acc.insert(t);
    }
  return acc;
}

TEST(Field, HandValues) {
  const auto [a, b] = eval_H({3, 7, 0}, {1, 0});
  EXPECT_NEAR(a, 1.0 / 3, 1e-15);
  EXPECT_NEAR(b, 1.0, 1e-15);
  for (double M : {-2.0, 0.0, 1.5}) {
    const ProblemParams pr{3, 7, M};
    const auto [c, d] = eval_H(pr, {0, 1});
    EXPECT_NEAR(c, -1, 1e-15);
    EXPECT_NEAR(d, -derive_constants(pr).K + M, 1e-15);
  }
}

TEST(Field, VanishesAtEquilibria) {
  for (ProblemParams pr : {ProblemParams{3, 7, 0.4}, ProblemParams{3, 2, -2},
                           ProblemParams{1, 3, -3.2}, ProblemParams{5, 2, -0.7}}) {
    for (const Equilibrium& e : find_equilibria(pr)) {
      const auto [h1, h2] = eval_H(pr, {e.x, e.y});
      EXPECT_LE(std::hypot(h1, h2), 1e-10);
    }
  }
}

TEST(Field, KolmogorovHandValues) {
  const ProblemParams pr{3, 2, 0};
  const auto [v1, v2] = eval_V(pr, {1, 1});
  EXPECT_NEAR(v1, 1, 1e-15);
  EXPECT_NEAR(v2, 0, 1e-15);
  EXPECT_EQ(eval_V({3, 7, 0.8}, {0, 3.5}).first, 0);
}

TEST(Field, KolmogorovImageOfEquilibriumIsFixed) {
  for (ProblemParams pr : {ProblemParams{3, 7, 0.4}, ProblemParams{3, 2, -2}}) {
    for (const Equilibrium& e : find_equilibria(pr)) {
      const KolmogorovPoint k = to_kolmogorov(pr, {e.x, e.y});
      EXPECT_NEAR(k.sigma, 2 / (pr.p - 1), 1e-14);
      EXPECT_NEAR(k.z, std::pow((pr.p - 1) / 2, pr.p) * std::pow(e.y, pr.p - 1), 1e-12);
      const auto [v1, v2] = eval_V(pr, k);
      EXPECT_LE(std::hypot(v1, v2), 1e-10);
    }
  }
}

TEST(Field, KolmogorovFieldIsTheTransportedPhaseField) {
  const ProblemParams pr{3, 2.5, -1.1};
  const PhasePoint pt{0.7, 0.9};
  const auto [hx, hy] = eval_H(pr, pt);
  const KolmogorovPoint k = to_kolmogorov(pr, pt);
  const double sigma_t = (hy * pt.x - pt.y * hx) / (pt.x * pt.x);
  const double z_t = (pr.p * std::pow(pt.x, pr.p - 1) * hx * pt.y - std::pow(pt.x, pr.p) * hy) /
                     (pt.y * pt.y);
  const auto [v1, v2] = eval_V(pr, k);
  EXPECT_NEAR(v1, sigma_t, 1e-12);
  EXPECT_NEAR(v2, z_t, 1e-12);
}

TEST(Field, KolmogorovDivergenceMatchesFiniteDifferences) {
  const ProblemParams pr{3, 7, 0.6};
  const KolmogorovPoint k{0.4, 1.3};
  const double h = 1e-6;
  const double div = (eval_V(pr, {k.sigma + h, k.z}).first -
                      eval_V(pr, {k.sigma - h, k.z}).first) / (2 * h) +
                     (eval_V(pr, {k.sigma, k.z + h}).second -
                      eval_V(pr, {k.sigma, k.z - h}).second) / (2 * h);
  EXPECT_NEAR(kolmogorov_divergence(pr, k), div, 1e-7);
}

TEST(Field, Desingularized) {
  const ProblemParams pr{3, 2, -0.7};
  const auto [a, b] = eval_V_desingularized(pr, 0, 0, 4);
  EXPECT_EQ(a, 0);
  EXPECT_EQ(b, 0);
  EXPECT_THROW(eval_V_desingularized(pr, 0.1, 0.1, static_cast<int>(std::ceil(pr.p + 1))),
               BadK);

  const int k = 4, e = 2 * k + 1;
  const double s = 0.93, w = 1.05;
  const auto [ds, dw] = eval_V_desingularized(pr, s, w, k);
  const auto [v1, v2] = eval_V(pr, {std::pow(s, e), std::pow(w, e)});
  EXPECT_NEAR(ds, v1 / (e * std::pow(s, e - 1)), 1e-12);
  EXPECT_NEAR(dw, v2 / (e * std::pow(w, e - 1)), 1e-12);
}

TEST(Field, PsiPeaksWhereTheGradientTermBalances) {
  const ProblemParams pr{3, 7, 0.8};
  const DerivedConstants dc = derive_constants(pr);
  const double y_star = std::pow(dc.K / (dc.q * pr.M), (pr.p + 1) / (pr.p - 1));
  const double peak = psi(pr, y_star);
  for (double f : {0.9, 0.99, 1.01, 1.1}) EXPECT_LT(psi(pr, f * y_star), peak);
  EXPECT_TRUE(std::isnan(psi(pr, 10 * y_star)));
}

TEST(Field, NullclinesPassThroughEquilibria) {
  const ProblemParams pr{3, 2, -2};
  const auto eqs = find_equilibria(pr);
  const Nullclines nc = nullclines(pr, 2 * eqs[1].y, 256);
  for (const Equilibrium& e : eqs) {
    double best = INFINITY;
    for (const auto& br : nc.curve)
      for (const PhasePoint& q : br) best = std::min(best, std::hypot(q.x - e.x, q.y - e.y));
    EXPECT_LE(best, 1e-12);
  }
  EXPECT_NEAR(nc.line.back().y, 2 * eqs[1].y, 0);
  EXPECT_NEAR(nc.line.back().x, (pr.p - 1) * eqs[1].y, 1e-14);
}

TEST(Field, CurveIsBoundedForPositiveCoupling) {
  const ProblemParams pr{3, 7, 1};
  const Nullclines nc = nullclines(pr, 1e6, 512);
  ASSERT_EQ(nc.curve.size(), 1u);
  const double y_end = std::pow(derive_constants(pr).K / pr.M, (pr.p + 1) / (pr.p - 1));
  EXPECT_NEAR(nc.curve[0].back().y, y_end, 1e-12);
  EXPECT_LT(nc.curve[0].back().x, 1e-3);
}

TEST(Field, RegionSignTable) {
  const ProblemParams pr{3, 7, 0};
  // Just below L, right of C.
  EXPECT_EQ(region_of(pr, {1.2, 2 * 1.2 / 6 - 1e-3}), RegionTag::kC);
  EXPECT_EQ(region_of(pr, {-1, 1}), RegionTag::kOutsideQ);
  EXPECT_EQ(region_of(pr, {3, 1}), RegionTag::kOnL);
}

TEST(Field, RegionSetsPerRegime) {
  using enum RegionTag;
  const auto acd = tags_on_grid({3, 2, -0.5}, 4, 20, 200);
  EXPECT_EQ(acd, (std::set<RegionTag>{kA, kC, kD}));

  const ProblemParams two{3, 2, -2};
  const auto eqs = find_equilibria(two);
  auto all = tags_on_grid(two, 2 * eqs[1].x, 2 * eqs[1].y, 200);
  all = tags_on_grid(two, 2 * eqs[0].x, 2 * eqs[0].y, 200, all);
  EXPECT_EQ(all, (std::set<RegionTag>{kA, kB, kC, kD, kE}));

  const auto abcd = tags_on_grid({3, 7, 1}, 2, 2, 200);
  EXPECT_EQ(abcd, (std::set<RegionTag>{kA, kB, kC, kD}));
}

}  // namespace
}  // namespace emdenflow
