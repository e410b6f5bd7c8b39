#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfvl/errors.hpp"
#include "mfvl/numerics.hpp"
#include "mfvl/operators.hpp"
#include "mfvl/states.hpp"
#include "mfvl/transforms.hpp"
#include "mfvl/vlasov.hpp"

using namespace mfvl;

namespace {

constexpr double kPi = std::numbers::pi;

CoherentSpec wide_bump(double eps) {
  CoherentSpec cs;
  cs.M.shape = ShapeKind::bump;
  cs.M.q_radius = 2.5;
  cs.M.p_radius = 2.5;
  cs.eps = eps;
  return cs;
}

}  // namespace

TEST(Shapes, ValuesAndNames) {
  EXPECT_DOUBLE_EQ(shape_value(ShapeKind::gaussian, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(shape_value(ShapeKind::bump, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(shape_value(ShapeKind::polynomial_cutoff, 0.5), std::pow(0.5, 4));
  EXPECT_EQ(shape_value(ShapeKind::bump, 1.0), 0.0);
  EXPECT_EQ(shape_value(ShapeKind::polynomial_cutoff, 1.2), 0.0);
  for (auto k : {ShapeKind::gaussian, ShapeKind::bump, ShapeKind::polynomial_cutoff})
    EXPECT_EQ(parse_shape_kind(to_string(k)), k);
  EXPECT_THROW(parse_shape_kind("tophat"), ValidationError);
}

TEST(Shapes, DerivativeMatchesFiniteDifference) {
  for (auto k : {ShapeKind::gaussian, ShapeKind::bump, ShapeKind::polynomial_cutoff})
    for (double u : {0.1, 0.4, 0.8}) {
      const double fd = (shape_value(k, u + 1e-6) - shape_value(k, u - 1e-6)) / 2e-6;
      EXPECT_NEAR(shape_derivative(k, u), fd, 1e-6);
    }
}

TEST(Coherent, StateNormIsN) {
  const GridSpec g(1, 256, 8.0);
  const double q = 0.3, p = 0.7, eps = 0.1;
  const ComplexField f = coherent_state(g, &q, &p, 0.5, eps);
  double n2 = 0.0;
  for (const auto& z : f.values) n2 += std::norm(z);
  EXPECT_NEAR(n2 * g.spacing(), 1.0 / eps, 1e-10);
}

TEST(Coherent, WeightIsNormalized) {
  CoherentSpec cs;
  cs.M.shape = ShapeKind::gaussian;
  cs.M.q_radius = 1.5;
  cs.M.p_radius = 0.8;
  cs.eps = 0.05;
  cs.delta = 0.2;
  double A = 0.0;
  const auto nodes = coherent_nodes(cs, 1, &A);
  double total = 0.0;
  for (const auto& nd : nodes) total += nd.weight;
  EXPECT_NEAR(total, 1.0, 1e-12);
  // ∬ exp(-(q²/a² + p²/b²)/2) = 2π a b.
  EXPECT_NEAR(A, 1.0 / (2 * kPi * 1.5 * 0.8), 1e-8);
  // ∬|∂_p M| = 2 A a √(2π) for the Gaussian profile.
  EXPECT_NEAR(weight_grad_p_l1(cs.M, A, 4000), std::sqrt(2.0 / kPi) / 0.8, 1e-5);
}

TEST(Coherent, SingleNodeIsProjector) {
  const GridSpec g(1, 256, 8.0);
  CoherentNode nd;
  nd.q = {0.5, 0, 0};
  nd.p = {0.2, 0, 0};
  nd.weight = 1.0;
  const double eps = 1.0 / 16;
  const CoherentResult r = coherent_superposition({nd}, g, eps, 0.2);
  EXPECT_EQ(r.state.rank(), 1);
  EXPECT_NEAR(r.state.occupations[0], 1.0, 1e-15);
  EXPECT_NEAR(r.required_single_weight, 16.0, 1e-12);
  const LowRankState proj = coherent_projector(g, nd.q.data(), nd.p.data(), 0.2, eps);
  EXPECT_LT(trace_distance(r.state, proj), 1e-12);
}

TEST(Coherent, InvariantUnderRelabelling) {
  const GridSpec g(1, 128, 8.0);
  const CoherentSpec cs = wide_bump(1.0 / 8);
  const double delta = auto_delta(cs.eps, g);
  auto nodes = coherent_nodes(cs, 1);
  const CoherentResult a = coherent_superposition(nodes, g, cs.eps, delta);
  std::mt19937_64 rng(5);
  std::shuffle(nodes.begin(), nodes.end(), rng);
  const CoherentResult b = coherent_superposition(nodes, g, cs.eps, delta);
  EXPECT_LT(trace_distance(a.state, b.state), 1e-12);
}

TEST(Coherent, FermionicAndTraceN) {
  const GridSpec g(1, 256, 8.0);
  const CoherentResult r = coherent_superposition(wide_bump(1.0 / 16), g);
  r.state.validate();
  EXPECT_NEAR(r.state.trace(), 16.0, 1e-8);
  EXPECT_LE(r.state.occupations.maxCoeff(), 1.0);
  EXPECT_LT(r.clipped_mass, 1e-10);
}

TEST(Coherent, TranslationShiftsDensity) {
  const GridSpec g(1, 256, 8.0);
  CoherentSpec a = wide_bump(1.0 / 16);
  a.M.q_radius = 2.0;
  a.M.p_radius = 3.0;
  CoherentSpec b = a;
  const int shift = 8;
  b.M.q0 = {shift * g.spacing()};
  const Field ra = density(coherent_superposition(a, g).state);
  const Field rb = density(coherent_superposition(b, g).state);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < g.points(); ++i) {
    err = std::max(err, std::abs(rb[(i + shift) % g.points()] - ra[i]));
    scale = std::max(scale, ra[i]);
  }
  EXPECT_LT(err, 1e-9 * scale);
}

TEST(Coherent, CommutatorBoundOnSmallCase) {
  const GridSpec g(1, 256, 10.0);
  CoherentSpec cs;
  cs.M.shape = ShapeKind::bump;
  cs.M.q_radius = 4.0;
  cs.M.p_radius = 2.0;
  cs.eps = 1.0 / 16;
  const CoherentResult r = coherent_superposition(cs, g);
  EXPECT_LE(commutator_trace_norm(r.state, 0), 1.05 * r.grad_p_l1);
}

TEST(Coherent, DenseWeightViolatesFermionicBound) {
  const GridSpec g(1, 256, 8.0);
  CoherentSpec cs = wide_bump(1.0 / 16);
  cs.M.q_radius = 1.0;
  cs.M.p_radius = 1.0;
  EXPECT_THROW(coherent_superposition(cs, g), NumericalError);
}

TEST(Coherent, UnresolvableGridRejected) {
  EXPECT_THROW(auto_delta(0.1, GridSpec(1, 64, 8.0)), ValidationError);
  const GridSpec g(1, 256, 8.0);
  const double d = auto_delta(1.0 / 16, g);
  EXPECT_GE(d, 3 * g.spacing());
  EXPECT_LE(d, 8.0 / (12 * kPi) + 1e-15);
}

TEST(FermiSea, UniformDensityAndIndicatorWigner) {
  const GridSpec g(1, 64, 8.0);
  const FermiSeaResult fs = fermi_sea(g, 15);
  EXPECT_FALSE(fs.tie_broken);
  fs.state.validate();
  const Field rho = density(fs.state);
  for (int i = 0; i < g.points(); ++i) EXPECT_NEAR(rho[i], 15.0 / 8.0, 1e-12);
  const auto plan = TransformPlan::make(g, 1.0 / 15);
  const PhaseSpaceField w = wigner(fs.state, plan);
  EXPECT_NEAR(mass(w), 1.0, 1e-12);
  int occupied = 0;
  for (std::size_t iv = 0; iv < w.nv(); ++iv) {
    const double v = w.at(0, iv);
    for (std::size_t ix = 1; ix < w.nx(); ++ix) EXPECT_NEAR(w.at(ix, iv), v, 1e-12);
    if (std::abs(v - 1.0 / (2 * kPi)) < 1e-12) ++occupied;
    else EXPECT_NEAR(v, 0.0, 1e-12);
  }
  EXPECT_EQ(occupied, 15);
  EXPECT_TRUE(fermi_sea(g, 16).tie_broken);
}

TEST(Steady, ZeroProfileConvergesImmediately) {
  const GridSpec xg(1, 64, 8.0), vg(1, 64, 8.0);
  SteadySpec s;
  s.normalize = false;
  s.amplitude = 0.0;
  const SteadyResult r = steady_state(s, KernelSpec::gaussian(-1.0, 1.0, 0.5), xg, vg);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  for (double v : r.f.values) EXPECT_EQ(v, 0.0);
}

TEST(Steady, ConvergedStateIsStationary) {
  const auto plan = TransformPlan::make(GridSpec(1, 128, 8.0), 1.0 / 16);
  SteadySpec s;
  s.kinetic_mass = kHartreeMatchedMass;
  s.energy_scale = 0.5;
  const SteadyResult r = steady_state(s, KernelSpec::gaussian(-1.0, 1.0, 0.5), plan.xgrid, plan.vgrid);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(mass(r.f), 1.0, 1e-12);
  EXPECT_LT(r.steady_residual, 1e-6 * l2_norm(r.f));
  EXPECT_LT(r.self_consistency_error, 1e-9);
  EXPECT_NEAR(steady_state_residual(r.f, r.effective_kernel, kHartreeMatchedMass), r.steady_residual, 1e-12);
  // f is a profile of the local energy: equal on level sets, here the v -> -v mirror.
  for (std::size_t ix = 0; ix < r.f.nx(); ++ix)
    for (std::size_t iv = 1; iv < r.f.nv(); ++iv)
      EXPECT_NEAR(r.f.at(ix, iv), r.f.at(ix, r.f.nv() - iv), 1e-14);
}

TEST(Steady, RepulsiveKernelRejected) {
  const GridSpec g(1, 32, 8.0);
  EXPECT_THROW(steady_state({}, KernelSpec::gaussian(1.0, 1.0, 0.5), g, g), ValidationError);
}
