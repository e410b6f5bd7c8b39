#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfvl/coulomb.hpp"
#include "mfvl/errors.hpp"

using namespace mfvl;

namespace {

constexpr double kPi = std::numbers::pi;

// Lens volume of two radius-r balls at distance s, written out independently.
double lens_oracle(double r, double s) {
  if (s >= 2 * r) return 0.0;
  return kPi * (4 * r + s) * (2 * r - s) * (2 * r - s) / 12.0;
}

}  // namespace

TEST(Coulomb, LensVolumeLimits) {
  EXPECT_NEAR(lens_volume(1.3, 0.0), 4.0 / 3.0 * kPi * std::pow(1.3, 3), 1e-12);
  EXPECT_EQ(lens_volume(1.0, 2.0), 0.0);
  EXPECT_EQ(lens_volume(1.0, 5.0), 0.0);
  for (double s : {0.1, 0.7, 1.5, 1.99}) EXPECT_NEAR(lens_volume(1.0, s), lens_oracle(1.0, s), 1e-12);
}

TEST(Coulomb, SmoothZIntegralClosedForm) {
  const Vec3 x{0.0, 0.0, 0.0}, y{0.3, 0.4, 0.0};
  for (double r : {0.2, 1.0, 3.0}) {
    const double expected = std::pow(kPi * r * r / 2, 1.5) * std::exp(-0.25 / (2 * r * r));
    EXPECT_NEAR(smooth_z_integral(r, x, y, {}), expected, 1e-12 * expected);
  }
}

TEST(Coulomb, TensorGridMatchesClosedForm) {
  FdlQuadrature q;
  q.z_strategy = ZStrategy::tensor_grid;
  q.z_nodes = 40;
  const Vec3 x{0.0, 0.0, 0.0}, y{0.5, 0.0, 0.0};
  const double sharp = sharp_z_integral(1.0, x, y, q);
  EXPECT_NEAR(sharp, lens_oracle(1.0, 0.5), 0.03 * lens_oracle(1.0, 0.5));
  const double smooth = smooth_z_integral(1.0, x, y, q);
  FdlQuadrature exact;
  EXPECT_NEAR(smooth, smooth_z_integral(1.0, x, y, exact), 1e-6);
}

TEST(Coulomb, MonteCarloIsSeeded) {
  FdlQuadrature q;
  q.z_strategy = ZStrategy::monte_carlo;
  q.mc_samples = 4000;
  const Vec3 x{0.0, 0.0, 0.0}, y{0.5, 0.0, 0.0};
  EXPECT_EQ(sharp_z_integral(1.0, x, y, q), sharp_z_integral(1.0, x, y, q));
  EXPECT_NEAR(sharp_z_integral(1.0, x, y, q), lens_oracle(1.0, 0.5), 0.1 * lens_oracle(1.0, 0.5));
}

TEST(Coulomb, FdlReproducesInverseDistance) {
  const Vec3 x{0.1, -0.2, 0.3};
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const Vec3 y{x[0], x[1] + s, x[2]};
    const FdlResult sharp = fdl_sharp(x, y);
    const FdlResult smooth = fdl_smooth(x, y);
    EXPECT_NEAR(sharp.value * s, 1.0, 1e-3);
    EXPECT_NEAR(smooth.value * s, 1.0, 1e-6);
    EXPECT_LT(sharp.residual, 1e-3 * sharp.value);
  }
}

TEST(Coulomb, CoarseQuadratureIsRejected) {
  FdlQuadrature q;
  q.r_count = 6;
  q.tolerance = 1e-8;
  EXPECT_THROW(fdl_sharp({0, 0, 0}, {1, 0, 0}, q), NumericalError);
}

TEST(Coulomb, CoincidentPointsRejected) {
  EXPECT_THROW(fdl_smooth({0, 0, 0}, {0, 0, 0}), ValidationError);
}

TEST(Coulomb, DominantTermExponents) {
  const double delta = 1.0 / 6.0;
  EXPECT_NEAR(dominant_small_r_exponent(delta, 1.0), -3.5 - 0.5 + 3.0, 1e-15);
  const double q = dominant_integrability_threshold(delta);
  EXPECT_NEAR(q, 1.0, 1e-15);
  EXPECT_NEAR(dominant_small_r_exponent(delta, q), -1.0, 1e-14);
  EXPECT_NEAR(dominant_integrability_threshold(0.0), 1.2, 1e-15);
}

TEST(Coulomb, LogQuadratureIntegratesPowers) {
  const RQuadrature rq = RQuadrature::log_spaced(1e-2, 1e2, 400);
  double s = 0.0;
  for (std::size_t i = 0; i < rq.nodes.size(); ++i) s += rq.weights[i] / rq.nodes[i];
  EXPECT_NEAR(s, std::log(1e4), 1e-3);
}
