#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "emdenflow/classifier.hpp"
#include "emdenflow/integrator.hpp"
#include "emdenflow/manifolds.hpp"

namespace emdenflow {
namespace {

IntegrationConfig with_targets(const ProblemParams& pr, double t1) {
  IntegrationConfig c;
  c.t1 = t1;
  for (const Equilibrium& e : find_equilibria(pr)) c.targets.push_back({e.x, e.y});
  return c;
}

Trajectory constant_at(const ProblemParams& pr, const Equilibrium& e, double t0, double t1) {
  IntegrationConfig c;
  c.t0 = t0;
  c.t1 = t1;
  c.stop_on_equilibrium = false;
  return integrate(pr, PhasePoint{e.x, e.y}, c);
}

TEST(Integrator, EquilibriumStartStaysPut) {
  const ProblemParams pr{3, 7, 0.3};
  const Equilibrium e = find_equilibria(pr)[0];
  const Trajectory tr = constant_at(pr, e, 0, 50);
  EXPECT_NEAR(tr.t_end(), 50, 1e-12);
  // Tolerance-level wobble only; the sink damps it.
  for (const PhasePoint& s : tr.samples)
    EXPECT_LE(std::hypot(s.x - e.x, s.y - e.y), 10 * IntegrationConfig{}.rel_tol);
}

TEST(Integrator, SingularSolutionIsExact) {
  const ProblemParams pr{3, 7, 0.3};
  const Equilibrium e = find_equilibria(pr)[0];
  const Trajectory tr = constant_at(pr, e, -2, 3);
  for (const RadialSample& s : trajectory_to_radial(tr))
    EXPECT_NEAR(s.u, e.x * std::pow(s.r, -2 / (pr.p - 1)), 1e-12 * s.u);
  EXPECT_LE(residual_check(pr, tr), 1e-8);
}

TEST(Integrator, RegularTrajectoryResidual) {
  for (ProblemParams pr : {ProblemParams{3, 7, 0.1}, ProblemParams{3, 2, -0.5},
                           ProblemParams{3, 2, -3}}) {
    Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 60));
    EXPECT_LE(residual_check(pr, tr), 1e-6) << pr.M;
  }
}

TEST(Integrator, CorruptedTrajectoryIsCaught) {
  const ProblemParams pr{3, 7, 0.1};
  Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 20));
  ASSERT_GT(tr.steps.size(), 20u);
  DenseStep& st = tr.steps[tr.steps.size() / 2];
  for (auto& c : st.rc) c[1] *= 1.2;
  EXPECT_GT(residual_check(pr, tr), 1e-2);
}

TEST(Integrator, RegularStartHasTheCentreLimit) {
  const ProblemParams pr{4, 3, 0.7};
  const Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 5));
  const PhasePoint s = tr.samples.front();
  EXPECT_NEAR(s.y / std::pow(s.x, pr.p), 1.0 / pr.N, 1e-3);
  EXPECT_LT(s.y / s.x, 1e-3);
  EXPECT_NEAR(s.x * std::exp(-2 * tr.t_begin() / (pr.p - 1)), 1.0, 1e-3);
}

TEST(Integrator, EventsSitOnTheirCurves) {
  const ProblemParams pr{3, 7, 0.6};
  const Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 80));
  const auto crossings = tr.events_of(EventKind::kCrossL);
  ASSERT_GE(crossings.size(), 3u);
  for (const Event& ev : crossings) {
    EXPECT_NEAR(ev.point.y, 2 * ev.point.x / (pr.p - 1), 1e-10);
    const PhasePoint d = tr.at(ev.t);
    EXPECT_NEAR(d.x, ev.point.x, 1e-12);
  }
  for (const Event& ev : tr.events_of(EventKind::kCrossC))
    EXPECT_NEAR(eval_H(pr, ev.point).second, 0, 1e-9);
  // Crossings alternate in direction.
  for (std::size_t i = 1; i < crossings.size(); ++i)
    EXPECT_EQ(crossings[i].direction, -crossings[i - 1].direction);
}

TEST(Integrator, DenseOutputHitsTheSamples) {
  const ProblemParams pr{3, 2, -2};
  const Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 30));
  for (std::size_t i = 0; i < tr.t.size(); i += 7) {
    const PhasePoint d = tr.at(tr.t[i]);
    EXPECT_NEAR(d.x, tr.samples[i].x, 1e-12 * (1 + std::abs(d.x)));
    EXPECT_NEAR(d.y, tr.samples[i].y, 1e-12 * (1 + std::abs(d.y)));
  }
}

TEST(Integrator, IntegralOfOneIsTheSpan) {
  const ProblemParams pr{3, 7, 0.3};
  const Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 15));
  EXPECT_NEAR(integrate_along(tr, [](double, PhasePoint) { return 1.0; }),
              tr.t_end() - tr.t_begin(), 1e-10);
  // d/dt of x integrates to the change in x.
  const double dx = integrate_along(
      tr, [&](double, PhasePoint s) { return eval_H(pr, s).first; });
  EXPECT_NEAR(dx, tr.samples.back().x - tr.samples.front().x, 1e-8);
}

TEST(Integrator, BackwardRunRetracesForward) {
  const ProblemParams pr{3, 7, 0.6};
  IntegrationConfig c;
  c.t1 = 4;
  c.stop_on_exit = false;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  const PhasePoint start{0.5, 0.3};
  const Trajectory fwd = integrate(pr, start, c);
  SeedDescriptor back;
  back.point = fwd.samples.back();
  back.t0 = fwd.t_end();
  back.direction = -1;
  IntegrationConfig cb = c;
  cb.t1 = fwd.t_end();
  const Trajectory bwd = integrate(pr, back, cb);
  EXPECT_EQ(bwd.direction, -1);
  EXPECT_NEAR(bwd.samples.back().x, start.x, 1e-9);
  EXPECT_NEAR(bwd.samples.back().y, start.y, 1e-9);
}

TEST(Integrator, SobolevCycleCloses) {
  const ProblemParams pr{3, 5, 0};
  const Equilibrium e = find_equilibria(pr)[0];
  IntegrationConfig c;
  c.t1 = 200;
  c.section_x_min = e.x;
  c.stop_on_equilibrium = false;
  const double x0 = 1.2 * e.x;
  SeedDescriptor seed;
  seed.point = {x0, 2 * x0 / (pr.p - 1)};
  const Trajectory tr = integrate(pr, seed, c);
  ASSERT_EQ(tr.termination, Termination::kSection);
  EXPECT_LE(std::abs(tr.samples.back().x - x0), 1e-6);
}

TEST(Integrator, ExitIsReportedOnTheAxis) {
  const ProblemParams pr{3, 2, -0.5};
  const Trajectory tr = integrate(pr, seed_regular(pr), with_targets(pr, 100));
  ASSERT_EQ(tr.termination, Termination::kExitsQ);
  const PhasePoint s = tr.samples.back();
  EXPECT_LE(std::min(std::abs(s.x), std::abs(s.y)), 1e-10);
}

}  // namespace
}  // namespace emdenflow
