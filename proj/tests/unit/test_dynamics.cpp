#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "mfvl/errors.hpp"
#include "mfvl/hartree.hpp"
#include "mfvl/numerics.hpp"
#include "mfvl/particles.hpp"
#include "mfvl/vlasov.hpp"

using namespace mfvl;

namespace {

constexpr double kPi = std::numbers::pi;

LowRankState packet(const GridSpec& g, double sigma, double x0, double p0, double eps) {
  LowRankState s;
  s.grid = g;
  s.eps = eps;
  s.particles = 1.0;
  s.orbitals.resize(g.points(), 1);
  for (int i = 0; i < g.points(); ++i) {
    const double x = g.node(i);
    s.orbitals(i, 0) = std::polar(std::exp(-(x - x0) * (x - x0) / (2 * sigma * sigma)) / std::pow(kPi * sigma * sigma, 0.25),
                                  p0 * x / eps);
  }
  s.occupations = Eigen::VectorXd::Ones(1);
  return s;
}

// 2/eps plane waves at occupation 1/2, so tr = N = 1/eps and the density is uniform.
LowRankState mixture(const GridSpec& g, double eps) {
  LowRankState s;
  s.grid = g;
  s.eps = eps;
  s.particles = 1.0 / eps;
  const int K = static_cast<int>(std::round(2.0 / eps));
  s.orbitals.resize(g.points(), K);
  for (int k = 0; k < K; ++k) {
    const int m = k - K / 2;
    for (int i = 0; i < g.points(); ++i)
      s.orbitals(i, k) = std::polar(1.0 / std::sqrt(g.length()), 2 * kPi * m * g.node(i) / g.length());
  }
  s.occupations = Eigen::VectorXd::Constant(K, 0.5);
  return s;
}

double mean_position(const Field& rho) {
  double m = 0.0, w = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    m += rho.grid.node(static_cast<int>(i)) * rho[i];
    w += rho[i];
  }
  return m / w;
}

double variance(const Field& rho) {
  const double mu = mean_position(rho);
  double m = 0.0, w = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double dx = rho.grid.node(static_cast<int>(i)) - mu;
    m += dx * dx * rho[i];
    w += rho[i];
  }
  return m / w;
}

}  // namespace

TEST(Hartree, FreePacketMovesAndSpreads) {
  const GridSpec g(1, 512, 24.0);
  const double eps = 0.1, sigma = 1.0, p0 = 0.5;
  HartreeRun run(packet(g, sigma, -2.0, p0, eps), KernelSpec::none(), 1e-2);
  run.advance(100, 0);
  const Field rho = density(run.state());
  EXPECT_NEAR(mean_position(rho), -2.0 + 2 * p0 * 1.0, 1e-9);
  const double s = 2 * eps / (sigma * sigma);
  EXPECT_NEAR(variance(rho), 0.5 * sigma * sigma * (1 + s * s), 1e-9);
}

TEST(Hartree, PlaneWavesAreStationaryUnderUniformField) {
  const GridSpec g(1, 64, 2 * kPi);
  const LowRankState s0 = mixture(g, 0.25);
  HartreeRun run(s0, KernelSpec::gaussian(1.0, 1.0, 0.5), 1e-3);
  run.advance(200, 0);
  EXPECT_LT(trace_distance(run.state(), s0), 1e-10);
}

TEST(Hartree, ConservesTraceAndIsReversible) {
  const GridSpec g(1, 128, 12.0);
  LowRankState s0 = packet(g, 0.7, -1.0, 0.3, 0.2);
  LowRankState s1 = packet(g, 0.7, 1.5, -0.4, 0.2);
  LowRankState s;
  s.grid = g;
  // Gram-Schmidt the second packet against the first.
  MatrixXc u(g.points(), 2);
  u.col(0) = s0.orbitals.col(0);
  const cplx ov = g.cell_volume() * u.col(0).dot(s1.orbitals.col(0));
  u.col(1) = s1.orbitals.col(0) - ov * u.col(0);
  u.col(1) /= std::sqrt(g.cell_volume()) * u.col(1).norm();
  s.orbitals = u;
  s.particles = 1.6;
  s.eps = 1.0 / 1.6;
  s.occupations = Eigen::Vector2d(1.0, 0.6);
  const KernelSpec k = KernelSpec::gaussian(1.0, 2.0, 0.5);
  HartreeRun run(s, k, 2e-3);
  const double e0 = hartree_energy(s, k).total();
  run.advance(250, 50);
  for (const auto& row : run.log()) {
    EXPECT_NEAR(row.trace, s.trace(), 1e-12);
    EXPECT_LT(row.orthonormality_defect, 1e-12);
  }
  EXPECT_NEAR(hartree_energy(run.state(), k).total(), e0, 1e-4 * std::abs(e0));
  for (int i = 0; i < 250; ++i) run.step(-2e-3);
  EXPECT_LT(trace_distance(run.state(), s), 1e-10);
}

TEST(Hartree, NormalizedDensityHasUnitMass) {
  const GridSpec g(1, 64, 2 * kPi);
  const LowRankState s = mixture(g, 0.25);
  EXPECT_NEAR(integral(normalized_density(s)), 1.0, 1e-12);
}

TEST(Vlasov, FreeTransportIsExactShift) {
  const GridSpec xg(1, 64, 2 * kPi), vg(1, 64, 10.0);
  PhaseSpaceField f(xg, vg);
  auto f0 = [](double x, double v) { return (1 + 0.5 * std::sin(x)) * std::exp(-v * v); };
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j) f.at(i, j) = f0(xg.node(i), vg.node(j));
  const double m = 2.0, t = 0.77;
  VlasovRun run(f, KernelSpec::none(), t / 7, m, false);
  run.advance(7, 0);
  double err = 0.0;
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j)
      err = std::max(err, std::abs(run.f().at(i, j) - f0(xg.node(i) - vg.node(j) * t / m, vg.node(j))));
  EXPECT_LT(err, 1e-12);
}

TEST(Vlasov, HomogeneousMaxwellianIsSteady) {
  const GridSpec xg(1, 32, 4.0), vg(1, 64, 12.0);
  PhaseSpaceField f(xg, vg);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j) f.at(i, j) = std::exp(-0.5 * vg.node(j) * vg.node(j));
  const KernelSpec k = KernelSpec::gaussian(1.0, 1.0, 0.5);
  EXPECT_LT(steady_state_residual(f, k), 1e-12);
  VlasovRun run(f, k, 1e-2);
  run.advance(50, 0);
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(run.f().values[i] - f.values[i]));
  EXPECT_LT(err, 1e-12);
}

TEST(Vlasov, DiagnosticsOfMaxwellian) {
  const GridSpec xg(1, 16, 2.0), vg(1, 128, 20.0);
  PhaseSpaceField f(xg, vg);
  const double u = 0.4, m = 2.0;
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j)
      f.at(i, j) = std::exp(-0.5 * (vg.node(j) - u) * (vg.node(j) - u)) / std::sqrt(2 * kPi);
  const VlasovLogRow row = vlasov_diagnostics(f, KernelSpec::none(), m);
  EXPECT_NEAR(row.mass, 2.0, 1e-12);
  EXPECT_NEAR(row.momentum[0], 2.0 * u, 1e-12);
  EXPECT_NEAR(row.kinetic, 2.0 * (1 + u * u) / (2 * m), 1e-12);
  double d0 = 0.0, d1 = 0.0, d2 = 0.0;
  for (std::size_t j = 0; j < f.nv(); ++j) {
    const double s = vg.node(j) - u, g = std::exp(-0.5 * s * s) / std::sqrt(2 * kPi);
    d0 = std::max(d0, g);
    d1 = std::max(d1, std::abs(s * g));
    d2 = std::max(d2, std::abs((s * s - 1) * g));
  }
  EXPECT_NEAR(row.derivative_sup[0], d0, 1e-14);
  EXPECT_NEAR(row.derivative_sup[1], d1, 1e-10);
  EXPECT_NEAR(row.derivative_sup[2], d2, 1e-10);
}

TEST(Vlasov, ConservesMassMomentumEnergy) {
  const GridSpec xg(1, 64, 2 * kPi), vg(1, 64, 16.0);
  PhaseSpaceField f(xg, vg);
  for (std::size_t i = 0; i < f.nx(); ++i)
    for (std::size_t j = 0; j < f.nv(); ++j)
      f.at(i, j) = (1 + 0.2 * std::cos(xg.node(i))) * std::exp(-0.5 * vg.node(j) * vg.node(j));
  VlasovRun run(f, KernelSpec::gaussian(-1.0, 1.0, 0.7), 1e-2);
  run.advance(100, 10);
  const auto& log = run.log();
  for (const auto& row : log) {
    EXPECT_NEAR(row.mass, log[0].mass, 1e-12 * log[0].mass);
    EXPECT_NEAR(row.momentum[0], log[0].momentum[0], 1e-8);
    EXPECT_NEAR(row.energy, log[0].energy, 1e-4 * std::abs(log[0].energy));
  }
}

TEST(Vlasov, CflGuard) {
  const GridSpec xg(1, 16, 1.0), vg(1, 16, 100.0);
  PhaseSpaceField f(xg, vg, 1.0);
  VlasovRun run(f, KernelSpec::none(), 1.0, 1.0, false);
  EXPECT_THROW(run.step(), NumericalError);
}

TEST(Vlasov, MidpointValuesOfTrigPolynomial) {
  const GridSpec g(1, 32, 5.0);
  Field u(g);
  auto exact = [&](double x) { return std::cos(2 * kPi * x / 5.0) + 0.3 * std::sin(6 * kPi * x / 5.0); };
  for (int i = 0; i < 32; ++i) u[i] = exact(g.node(i));
  const Eigen::MatrixXd mid = midpoint_values(u);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) {
      const double dx = minimal_image(g.node(i) - g.node(j), 5.0);
      if (std::abs(std::abs(dx) - 2.5) < 1e-12) continue;
      EXPECT_NEAR(mid(i, j), exact(g.node(j) + 0.5 * dx), 1e-12);
    }
}

TEST(Vlasov, KineticCommutatorOfPlaneWaves) {
  const GridSpec g(1, 32, 2 * kPi);
  const double eps = 0.3;
  const int k1 = 3, k2 = -2;
  DenseOperator w{g, MatrixXc(32, 32), false};
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) w.kernel(i, j) = std::polar(1.0, k1 * g.node(i) - k2 * g.node(j));
  const DenseOperator c = kinetic_commutator(w, eps);
  const double factor = eps * eps * (k1 * k1 - k2 * k2);
  EXPECT_LT((c.kernel - factor * w.kernel).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Particles, DepositConservesMassAndHitsNodes) {
  const GridSpec g(3, 8, 4.0);
  ParticleEnsemble p = sample_gaussian_ensemble(500, {0, 0, 0}, 0.5, 1.0, 7);
  EXPECT_NEAR(integral(deposit_density(p, g)), 1.0, 1e-12);
  ParticleEnsemble one;
  one.x = {{g.node(3), g.node(5), g.node(1)}};
  one.v = {{0, 0, 0}};
  one.w = {1.0};
  const Field rho = deposit_density(one, g);
  EXPECT_NEAR(rho[g.ravel({3, 5, 1})] * g.cell_volume(), 1.0, 1e-12);
}

TEST(Particles, SamplingIsSeeded) {
  const auto a = sample_gaussian_ensemble(10, {0, 0, 0}, 1, 1, 3);
  const auto b = sample_gaussian_ensemble(10, {0, 0, 0}, 1, 1, 3);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.v, b.v);
}

TEST(Particles, FreeFlightWithoutField) {
  const GridSpec g(3, 8, 4.0);
  ParticleEnsemble p;
  p.x = {{0.1, 0.2, -0.3}};
  p.v = {{0.5, -1.0, 0.25}};
  p.w = {1.0};
  ParticleRun run(p, g, KernelSpec::none(), 0.1, 2.0);
  run.advance(10, 0);
  const Vec3 x = run.particles().x[0];
  EXPECT_NEAR(x[0], 0.1 + 0.25, 1e-12);
  EXPECT_NEAR(x[1], 0.2 - 0.5, 1e-12);
  EXPECT_NEAR(x[2], -0.3 + 0.125, 1e-12);
  EXPECT_NEAR(run.log().front().energy, run.log().back().energy, 1e-14);
}

TEST(Particles, SelfConsistentRunKeepsMass) {
  const GridSpec g(3, 16, 6.0);
  ParticleRun run(sample_gaussian_ensemble(2000, {0, 0, 0}, 0.8, 0.5, 11), g, KernelSpec::gaussian(1.0, 1.0, 1.0),
                  1e-2);
  run.advance(20, 5);
  for (const auto& row : run.log()) EXPECT_NEAR(row.mass, 1.0, 1e-12);
  EXPECT_NEAR(run.log().back().energy, run.log().front().energy, 1e-2 * std::abs(run.log().front().energy));
}
