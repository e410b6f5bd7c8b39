#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"
#include "mfvl/grid.hpp"

using namespace mfvl;

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(GridSpec(0, 8, 1.0), ValidationError);
  EXPECT_THROW(GridSpec(4, 8, 1.0), ValidationError);
  EXPECT_THROW(GridSpec(1, 12, 1.0), ValidationError);
  EXPECT_THROW(GridSpec(1, 8, -1.0), ValidationError);
}

TEST(Grid, NodesAndWavenumbers) {
  GridSpec g(1, 8, 4.0);
  EXPECT_DOUBLE_EQ(g.node(0), -2.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_EQ(g.frequency(5), -3);
  EXPECT_DOUBLE_EQ(g.wavenumber(1), 2.0 * std::numbers::pi / 4.0);
}

TEST(Grid, RavelRoundTripAndWrap) {
  GridSpec g(3, 4, 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.ravel(g.unravel(i)), i);
  EXPECT_EQ(g.ravel({-1, 0, 0}), g.ravel({3, 0, 0}));
}

TEST(Grid, MinimalImage) {
  EXPECT_NEAR(minimal_image(0.9, 1.0), -0.1, 1e-15);
  EXPECT_NEAR(minimal_image(-0.7, 1.0), 0.3, 1e-15);
}

TEST(Grid, LpNormOfConstant) {
  GridSpec g(2, 8, 2.0);
  Field f(g, 3.0);
  EXPECT_NEAR(lp_norm(f, 1.0), 12.0, 1e-12);
  EXPECT_NEAR(lp_norm(f, 2.0), 6.0, 1e-12);
  EXPECT_NEAR(lp_norm(f, INFINITY), 3.0, 0.0);
}

TEST(Fft, RoundTripIsIdentity) {
  GridSpec g(2, 16, 1.0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  ComplexField f(g);
  for (auto& z : f.values) z = {nd(rng), nd(rng)};
  ComplexField w = f;
  fft_forward(w.values, g);
  fft_backward(w.values, g);
  for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(std::abs(w[i] - f[i]), 0.0, 1e-13);
}

TEST(Fft, MatchesDirectDft) {
  const int n = 8;
  GridSpec g(1, n, 1.0);
  ComplexField f(g);
  for (int i = 0; i < n; ++i) f[i] = {std::sin(1.0 + i), std::cos(0.3 * i * i)};
  ComplexField w = f;
  fft_forward(w.values, g);
  for (int k = 0; k < n; ++k) {
    cplx s = 0.0;
    for (int j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -2.0 * std::numbers::pi * j * k / n);
    EXPECT_NEAR(std::abs(w[k] - s), 0.0, 1e-12);
  }
}
