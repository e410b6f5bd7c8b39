#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfvl/errors.hpp"
#include "mfvl/linalg.hpp"
#include "mfvl/operators.hpp"

using namespace mfvl;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixXc random_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  MatrixXc a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = {nd(rng), nd(rng)};
  Eigen::HouseholderQR<MatrixXc> qr(a);
  return qr.householderQ();
}

/// Orthonormal Hermite-Gaussian-like orbitals localized in the box centre.
LowRankState gaussian_state(const GridSpec& g, int rank, double width) {
  LowRankState s;
  s.grid = g;
  s.eps = 1.0;
  s.particles = 0.0;
  MatrixXc raw(static_cast<Eigen::Index>(g.size()), rank);
  for (int k = 0; k < rank; ++k) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.position(i)[0];
      raw(static_cast<Eigen::Index>(i), k) = std::pow(x, k) * std::exp(-x * x / (2 * width * width)) *
                                              std::polar(1.0, 0.7 * k * x);
    }
  }
  Eigen::HouseholderQR<MatrixXc> qr(raw);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(raw.rows(), rank);
  s.orbitals = q / std::sqrt(g.cell_volume());
  s.occupations.resize(rank);
  for (int k = 0; k < rank; ++k) s.occupations[k] = 0.9 - 0.2 * k;
  s.particles = s.occupations.sum();
  return s;
}

}  // namespace

TEST(Linalg, HermitianEigenvaluesOfKnownSpectrum) {
  const int n = 12;
  MatrixXc u = random_unitary(n, 1);
  Eigen::VectorXd lam(n);
  for (int i = 0; i < n; ++i) lam[i] = -3.0 + 0.5 * i;
  MatrixXc a = u * lam.cast<cplx>().asDiagonal() * u.adjoint();
  Eigen::VectorXd e = hermitian_eigenvalues(a);
  for (int i = 0; i < n; ++i) EXPECT_NEAR(e[i], lam[i], 1e-12);
  HermitianEigen full = hermitian_eigen(a);
  MatrixXc rebuilt = full.vectors * full.values.cast<cplx>().asDiagonal() * full.vectors.adjoint();
  EXPECT_LT((rebuilt - a).norm(), 1e-12);
}

TEST(Linalg, SingularValuesOfDiagonalTimesUnitary) {
  MatrixXc u = random_unitary(6, 2);
  Eigen::VectorXd s(6);
  s << 5, 4, 3, 2, 1, 0.5;
  Eigen::VectorXd got = singular_values(s.cast<cplx>().asDiagonal() * u);
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(got[i], s[i], 1e-12);
}

TEST(Linalg, LowRankSpectrumMatchesDense) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  MatrixXc u(40, 5), b(5, 5);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 5; ++j) u(i, j) = {nd(rng), nd(rng)};
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) b(i, j) = {nd(rng), nd(rng)};
  b = (b + b.adjoint()).eval();
  MatrixXc dense = u * b * u.adjoint();
  Eigen::VectorXd all = hermitian_eigenvalues(dense);
  LowRankSpectrum lr = low_rank_spectrum(u, b);
  EXPECT_NEAR(lr.values.cwiseAbs().sum(), all.cwiseAbs().sum(), 1e-10);
  MatrixXc rebuilt = lr.vectors * lr.values.cast<cplx>().asDiagonal() * lr.vectors.adjoint();
  EXPECT_LT((rebuilt - dense).norm(), 1e-10 * dense.norm());
}

TEST(Operators, ValidateChecksFermionicBound) {
  GridSpec g(1, 64, 10.0);
  LowRankState s = gaussian_state(g, 3, 1.0);
  EXPECT_NO_THROW(s.validate());
  s.occupations[0] = 1.2;
  s.particles = s.occupations.sum();
  EXPECT_THROW(s.validate(), ValidationError);
}

TEST(Operators, TraceAndDensity) {
  GridSpec g(1, 64, 10.0);
  LowRankState s = gaussian_state(g, 3, 1.0);
  EXPECT_NEAR(integral(density(s)), s.trace(), 1e-12);
  EXPECT_NEAR(trace(materialize(s)).real(), s.trace(), 1e-12);
}

TEST(Operators, TraceNormOfHermitianIsAbsoluteEigenvalueSum) {
  GridSpec g(1, 16, 4.0);
  MatrixXc u = random_unitary(16, 9);
  Eigen::VectorXd lam = Eigen::VectorXd::LinSpaced(16, -1.0, 2.0);
  DenseOperator a{g, u * lam.cast<cplx>().asDiagonal() * u.adjoint() / g.cell_volume(), false};
  TraceNormResult r = trace_norm(a);
  EXPECT_FALSE(r.from_singular_values);
  EXPECT_NEAR(r.value, lam.cwiseAbs().sum(), 1e-11);
}

TEST(Operators, NonHermitianFallsBackToSingularValues) {
  GridSpec g(1, 8, 1.0);
  DenseOperator a{g, MatrixXc::Zero(8, 8), false};
  a.kernel(0, 1) = 2.0 / g.cell_volume();
  TraceNormResult r = trace_norm(a);
  EXPECT_TRUE(r.from_singular_values);
  EXPECT_NEAR(r.value, 2.0, 1e-14);
}

TEST(Operators, TraceDistanceOfOrthogonalProjectors) {
  GridSpec g(1, 64, 10.0);
  LowRankState s = gaussian_state(g, 2, 1.0);
  LowRankState a = s, b = s;
  a.orbitals = s.orbitals.col(0);
  a.occupations = Eigen::VectorXd::Ones(1);
  a.particles = 1;
  b.orbitals = s.orbitals.col(1);
  b.occupations = Eigen::VectorXd::Ones(1);
  b.particles = 1;
  EXPECT_NEAR(trace_distance(a, b), 2.0, 1e-12);
  EXPECT_NEAR(trace_distance(a, a), 0.0, 1e-12);
  EXPECT_NEAR(trace_distance(a, materialize(b)), 2.0, 1e-10);
}

TEST(Operators, LowRankCommutatorMatchesDenseRoute) {
  GridSpec g(1, 128, 16.0);
  LowRankState s = gaussian_state(g, 4, 0.5);
  const double low = commutator_trace_norm(s, 0);
  DenseOperator c = position_commutator(s, 0);
  c.kernel *= cplx(0.0, 1.0);
  c.hermitian = true;
  EXPECT_NEAR(low, trace_norm(c).value, 1e-9 * low);
}

TEST(Operators, CommutatorDensityIntegratesToTraceNorm) {
  GridSpec g(1, 128, 16.0);
  LowRankState s = gaussian_state(g, 3, 0.5);
  Field rho = commutator_density(s, 0);
  EXPECT_NEAR(integral(rho), commutator_trace_norm(s, 0), 1e-10);
  Field dense = commutator_density(materialize(s), 0);
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(rho[i], dense[i], 1e-9);
}

TEST(Operators, CommutatorOfRankOneGaussianClosedForm) {
  // For ω = |ψ⟩⟨ψ| with a real Gaussian ψ of width σ centred at 0:
  // tr|[x, ω]| = 2 ‖xψ‖ ‖ψ‖ = 2 σ / sqrt(2).
  GridSpec g(1, 256, 20.0);
  const double sigma = 0.8;
  LowRankState s;
  s.grid = g;
  s.eps = 1.0;
  s.particles = 1.0;
  s.orbitals.resize(256, 1);
  for (int i = 0; i < 256; ++i)
    s.orbitals(i, 0) = std::exp(-g.node(i) * g.node(i) / (2 * sigma * sigma)) / std::pow(kPi * sigma * sigma, 0.25);
  s.occupations = Eigen::VectorXd::Ones(1);
  EXPECT_NEAR(commutator_trace_norm(s, 0), std::sqrt(2.0) * sigma, 1e-10);
}

TEST(Operators, BoundaryMassWarns) {
  GridSpec g(1, 64, 4.0);
  LowRankState s = gaussian_state(g, 1, 2.0);
  s.particles = s.trace();
  const std::size_t before = warning_count();
  set_warning_sink([](const std::string&) {});
  commutator_trace_norm(s, 0);
  set_warning_sink(nullptr);
  EXPECT_GT(warning_count(), before);
}
