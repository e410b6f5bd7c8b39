#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfvl/errors.hpp"
#include "mfvl/kernel.hpp"

using namespace mfvl;

namespace {
constexpr double kPi = std::numbers::pi;

/// Brute-force periodic convolution with minimal-image sampling.
Field direct_convolution(const Field& rho, const std::function<double(double)>& v) {
  const GridSpec& g = rho.grid;
  Field out(g);
  for (int i = 0; i < g.points(); ++i)
    for (int j = 0; j < g.points(); ++j)
      out[i] += v(minimal_image(g.node(i) - g.node(j), g.length())) * rho[j] * g.spacing();
  return out;
}
}  // namespace

TEST(Kernel, ParsesNames) {
  EXPECT_EQ(parse_kernel_kind("coulomb"), KernelKind::coulomb);
  EXPECT_EQ(parse_kernel_kind("smooth_fdl"), KernelKind::smooth_fdl);
  EXPECT_THROW(parse_kernel_kind("yukawa"), ValidationError);
  EXPECT_EQ(to_string(KernelKind::soft_coulomb), "soft_coulomb");
}

TEST(Kernel, CoulombOnlyInThreeDimensions) {
  EXPECT_THROW(KernelSpec::coulomb(1.0).validate(1), ValidationError);
  EXPECT_NO_THROW(KernelSpec::coulomb(-1.0).validate(3));
}

TEST(Kernel, GaussianMatchesDirectConvolution) {
  GridSpec g(1, 64, 12.0);
  Field rho(g);
  for (int i = 0; i < 64; ++i) rho[i] = std::exp(-std::pow(g.node(i) - 0.7, 2));
  KernelSpec k = KernelSpec::gaussian(-1.0, 2.0, 0.6);
  Field u = spectral_poisson(rho, k);
  Field ref = direct_convolution(rho, [](double s) { return -2.0 * std::exp(-s * s / (2 * 0.36)); });
  for (int i = 0; i < 64; ++i) EXPECT_NEAR(u[i], ref[i], 1e-9);
}

TEST(Kernel, SoftCoulombMatchesDirectConvolution) {
  GridSpec g(1, 32, 8.0);
  Field rho(g);
  for (int i = 0; i < 32; ++i) rho[i] = 1.0 + std::cos(2 * kPi * g.node(i) / 8.0);
  KernelSpec k = KernelSpec::soft_coulomb(1.0, 1.0, 0.5);
  Field u = spectral_poisson(rho, k);
  Field ref = direct_convolution(rho, [](double s) { return 1.0 / std::sqrt(s * s + 0.25); });
  for (int i = 0; i < 32; ++i) EXPECT_NEAR(u[i], ref[i], 1e-11);
}

TEST(Kernel, CoulombSolvesPoissonForPlaneWave) {
  // -ΔU = 4π ρ for U = V * ρ with V = 1/|x|.
  GridSpec g(3, 16, 2.0 * kPi);
  Field rho(g);
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::cos(g.position(i)[0] + g.position(i)[2]);
  Field u = spectral_poisson(rho, KernelSpec::coulomb(1.0));
  for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(u[i], 4 * kPi * rho[i] / 2.0, 1e-11);
}

TEST(Kernel, NeutralizedKernelsIgnoreUniformDensity) {
  GridSpec g(3, 8, 4.0);
  Field rho(g, 2.5);
  Field u = spectral_poisson(rho, KernelSpec::coulomb(1.0));
  for (double x : u.values) EXPECT_NEAR(x, 0.0, 1e-13);
}

TEST(Kernel, MollifierWidthsAddInQuadrature) {
  KernelSpec k = mollified(mollified(KernelSpec::gaussian(1.0, 1.0, 0.5), 0.3), 0.4);
  EXPECT_NEAR(k.mollifier, 0.5, 1e-15);
}

TEST(Kernel, MollifiedGaussianIsWiderGaussian) {
  // Gaussian of width σ convolved with a normalized Gaussian of width w:
  // amplitude σ/sqrt(σ²+w²) at width sqrt(σ²+w²) (d = 1).
  GridSpec g(1, 128, 20.0);
  Field rho(g);
  rho[64] = 1.0 / g.spacing();
  Field u = spectral_poisson(rho, mollified(KernelSpec::gaussian(1.0, 1.0, 0.6), 0.8));
  const double s2 = 0.36 + 0.64;
  for (int i = 0; i < 128; ++i) {
    const double x = g.node(i) - g.node(64);
    EXPECT_NEAR(u[i], 0.6 / std::sqrt(s2) * std::exp(-x * x / (2 * s2)), 1e-10);
  }
}

TEST(Kernel, NoneGivesZeroField) {
  GridSpec g(2, 8, 1.0);
  Field u = spectral_poisson(Field(g, 1.0), KernelSpec::none());
  for (double x : u.values) EXPECT_EQ(x, 0.0);
}
