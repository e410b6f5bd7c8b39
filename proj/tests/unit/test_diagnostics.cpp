#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfvl/diagnostics.hpp"
#include "mfvl/errors.hpp"
#include "mfvl/states.hpp"

using namespace mfvl;

namespace {

constexpr double kPi = std::numbers::pi;

double brute_maximal(const Field& rho, int z, const std::vector<double>& radii) {
  const GridSpec& g = rho.grid;
  const int n = g.points();
  const double L = g.length();
  double best = -1.0;
  for (double r : radii)
    for (int c = 0; c < n; ++c) {
      if (std::abs(minimal_image(g.node(c) - g.node(z), L)) > r + 1e-12) continue;
      double s = 0.0;
      int count = 0;
      for (int y = 0; y < n; ++y)
        if (std::abs(minimal_image(g.node(y) - g.node(c), L)) <= r + 1e-12) {
          s += rho[y];
          ++count;
        }
      best = std::max(best, s / count);
    }
  return best;
}

DenseOperator gaussian_kernel_operator(const GridSpec& g) {
  DenseOperator w{g, MatrixXc(g.points(), g.points()), true};
  for (int i = 0; i < g.points(); ++i)
    for (int j = 0; j < g.points(); ++j) {
      const double x = g.node(i), y = g.node(j);
      w.kernel(i, j) = std::exp(-0.5 * (x * x + y * y));
    }
  return w;
}

}  // namespace

TEST(Maximal, ConstantDensityIsFixed) {
  const GridSpec g(2, 16, 4.0);
  Field rho(g, std::vector<double>(g.size(), 0.7));
  const MaximalField m = maximal_function(rho);
  for (double v : m.values.values) EXPECT_NEAR(v, 0.7, 1e-12);
}

TEST(Maximal, MatchesBruteForce) {
  const GridSpec g(1, 32, 6.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Field rho(g);
  for (auto& v : rho.values) v = u(rng);
  MaximalOptions o;
  o.radii = {0.0, g.spacing(), 2.5 * g.spacing(), 5 * g.spacing()};
  const MaximalField m = maximal_function(rho, o);
  for (int z = 0; z < g.points(); ++z) {
    EXPECT_NEAR(m.values[z], brute_maximal(rho, z, o.radii), 1e-12);
    EXPECT_GE(m.values[z], rho[z]);
  }
}

TEST(Maximal, SpikeAverageAtDistance) {
  const GridSpec g(1, 32, 8.0);
  Field rho(g);
  rho[16] = 1.0;
  MaximalOptions o;
  o.radii = {2 * g.spacing()};
  // From 2 nodes away the best ball still reaches the spike: 1 / 5 nodes.
  EXPECT_NEAR(maximal_function_at(rho, {18}, o)[0], 0.2, 1e-14);
  EXPECT_NEAR(maximal_function_at(rho, {21}, o)[0], 0.0, 1e-14);
}

TEST(Maximal, RejectsNegativeDensity) {
  const GridSpec g(1, 8, 1.0);
  Field rho(g);
  rho[2] = -1.0;
  EXPECT_THROW(maximal_function(rho), ValidationError);
}

TEST(BallIndicator, CountsLatticePoints) {
  const GridSpec g(3, 16, 16.0);
  EXPECT_EQ(ball_indicator(g, {0, 0, 0}, 1.0).sum(), 7.0);
  EXPECT_EQ(ball_indicator(g, {0, 0, 0}, 0.0).sum(), 1.0);
  // Wraps around the box.
  EXPECT_EQ(ball_indicator(g, {-8, 0, 0}, 1.0).sum(), 7.0);
}

TEST(LocalizedCommutator, RankOneLhsMatchesClosedForm) {
  const GridSpec g(1, 256, 8.0);
  const double q = 0.0, p = 0.5;
  const LowRankState w = coherent_projector(g, &q, &p, 0.6, 0.1);
  const std::vector<double> radii{0.2, 0.4, 0.8};
  const std::vector<std::size_t> centres{128, 140};
  const LocalizedCommutatorReport rep = localized_commutator_check(w, 1.0 / 6, radii, centres, 0.8);
  for (std::size_t iz = 0; iz < centres.size(); ++iz)
    for (std::size_t ir = 0; ir < radii.size(); ++ir) {
      const Eigen::VectorXd chi = ball_indicator(g, {g.node(static_cast<int>(centres[iz])), 0, 0}, radii[ir]);
      const double a2 = g.spacing() * (chi.cwiseProduct(w.orbitals.col(0).cwiseAbs())).squaredNorm();
      EXPECT_NEAR(rep.lhs[iz][ir], 2 * std::sqrt(a2 * (1 - a2)), 1e-10);
    }
  EXPECT_GT(rep.max_ratio, 0.0);
  EXPECT_EQ(rep.exponents.size(), centres.size());
}

TEST(LocalizedCommutator, DenseAndLowRankAgree) {
  const GridSpec g(1, 128, 8.0);
  const double q = 0.3, p = -0.4;
  const LowRankState w = coherent_projector(g, &q, &p, 0.3, 0.125);
  const std::vector<double> radii{0.25, 0.5, 1.0};
  const std::vector<std::size_t> centres{64, 70};
  const LocalizedCommutatorReport a = localized_commutator_check(w, 1.0 / 6, radii, centres, 1.0);
  const LocalizedCommutatorReport b = localized_commutator_check(materialize(w), 1.0 / 6, radii, centres, 1.0);
  for (std::size_t iz = 0; iz < centres.size(); ++iz)
    for (std::size_t ir = 0; ir < radii.size(); ++ir) {
      EXPECT_NEAR(a.lhs[iz][ir], b.lhs[iz][ir], 1e-8);
      EXPECT_NEAR(a.rhs[iz][ir], b.rhs[iz][ir], 1e-8 * a.rhs[iz][ir]);
    }
}

TEST(Remainder, VanishesForQuadraticsAndIsCubicOtherwise) {
  const GridSpec g(1, 32, 4.0);
  const DenseOperator w = gaussian_kernel_operator(g);
  const DenseOperator lin = taylor_remainder_operator([](double x) { return 3 * x - 1; }, [](double) { return 3.0; }, w);
  const DenseOperator quad =
      taylor_remainder_operator([](double x) { return x * x; }, [](double x) { return 2 * x; }, w);
  EXPECT_LT(lin.kernel.cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LT(quad.kernel.cwiseAbs().maxCoeff(), 1e-13);
  const DenseOperator cub =
      taylor_remainder_operator([](double x) { return x * x * x; }, [](double x) { return 3 * x * x; }, w);
  for (int i = 0; i < g.points(); ++i)
    for (int j = 0; j < g.points(); ++j) {
      const double s = g.node(i) - g.node(j);
      EXPECT_NEAR(cub.kernel(i, j).real(), 0.25 * s * s * s * w.kernel(i, j).real(), 1e-12);
    }
}

TEST(Remainder, FieldVersionMatchesFunctionsNearDiagonal) {
  const GridSpec g(1, 64, 2 * kPi);
  Field U(g);
  for (int i = 0; i < 64; ++i) U[i] = std::sin(g.node(i));
  const DenseOperator w = gaussian_kernel_operator(g);
  const DenseOperator a = taylor_remainder_operator(U, w);
  const DenseOperator b =
      taylor_remainder_operator([](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }, w);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j)
      if (std::abs(g.node(i) - g.node(j)) < kPi - 1e-9) {
        EXPECT_NEAR(a.kernel(i, j).real(), b.kernel(i, j).real(), 1e-12);
      }
}

TEST(Remainder, HomogeneousStateHasNoRemainder) {
  const auto plan = TransformPlan::make(GridSpec(1, 64, 8.0), 1.0 / 8);
  PhaseSpaceField f(plan.xgrid, plan.vgrid);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j) f.at(i, j) = std::exp(-plan.vgrid.node(j) * plan.vgrid.node(j));
  EXPECT_LT(bt_trace_norm(f, plan, KernelSpec::gaussian(1.0, 1.0, 0.5)), 1e-12);
  EXPECT_GT(bt_bound(f, plan), 0.0);
  const auto other = TransformPlan::make(GridSpec(1, 64, 8.0), 1.0 / 4);
  EXPECT_THROW(bt_trace_norm(f, other, KernelSpec::none()), ValidationError);
}

TEST(Gronwall, InitialSampleHoldsAndMismatchFails) {
  const auto plan = TransformPlan::make(GridSpec(1, 128, 8.0), 1.0 / 8);
  CoherentSpec cs;
  cs.M.shape = ShapeKind::bump;
  cs.M.q_radius = 2.5;
  cs.M.p_radius = 2.5;
  cs.eps = plan.eps;
  const LowRankState w = coherent_superposition(cs, plan.xgrid).state;
  const KernelSpec k = KernelSpec::gaussian(1.0, 1.0, 0.5);
  const GronwallReport ok = gronwall_inequality_check({w}, {wigner(w, plan)}, {0.0}, plan, k);
  EXPECT_TRUE(ok.holds);
  EXPECT_LT(ok.rows[0].lhs, ok.floor);
  EXPECT_NO_THROW(enforce(ok));

  cs.M.q0 = {0.5};
  const LowRankState shifted = coherent_superposition(cs, plan.xgrid).state;
  const GronwallReport bad = gronwall_inequality_check({w}, {wigner(shifted, plan)}, {0.0}, plan, k);
  EXPECT_FALSE(bad.holds);
  ASSERT_TRUE(bad.violation_time.has_value());
  EXPECT_EQ(*bad.violation_time, 0.0);
  EXPECT_THROW(enforce(bad), InequalityViolation);
}

TEST(ScScan, ConstantTrajectoryHasNoVariation) {
  const GridSpec g(1, 128, 8.0);
  const double q = 0.0, p = 0.3;
  const LowRankState w = coherent_projector(g, &q, &p, 0.3, 0.125);
  const ScAssumptionReport r = sc_assumption_scan({w, w, w}, {0.0, 0.5, 1.0});
  EXPECT_EQ(r.rows.size(), 3u);
  EXPECT_NEAR(r.relative_variation, 0.0, 1e-15);
  const ScAssumptionReport d = sc_assumption_scan({materialize(w)}, {0.0}, w.particles, w.eps);
  EXPECT_NEAR(d.rows[0].value, r.rows[0].value, 1e-8 * r.rows[0].value);
  EXPECT_THROW(sc_assumption_scan({w}, {0.0}, 4.0), ValidationError);
}

TEST(LogLog, SlopeOfPowerLaw) {
  EXPECT_NEAR(loglog_slope({0.5, 0.25, 0.125}, {3 * 0.25, 3 * 0.0625, 3 * 0.015625}), 2.0, 1e-12);
  EXPECT_NEAR(loglog_slope({1, 2, 4, 8}, {1, 0, 0.25, 0.125}), -1.0, 1e-12);
}
