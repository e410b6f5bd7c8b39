#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfvl/grid.hpp"

namespace mfvl {

using Vec3 = std::array<double, 3>;

/// exp(-|x - z|^2 / r^2).
double chi(double r, const Vec3& z, const Vec3& x);

/// Log-spaced radii with trapezoid weights in ln r, so that
/// Σ w_i g(r_i) ≈ ∫ g(r) dr.
struct RQuadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  static RQuadrature log_spaced(double r_min, double r_max, int count);
};

enum class ZStrategy { closed_form, tensor_grid, monte_carlo };

struct FdlQuadrature {
  /// Radii bounds; multiplied by the separation |x - y| when `relative` is set.
  double r_min = 1e-3;
  double r_max = 1e7;
  bool relative = true;
  int r_count = 400;
  ZStrategy z_strategy = ZStrategy::closed_form;
  int z_nodes = 24;                  // per axis, tensor grid
  std::size_t mc_samples = 20000;    // monte carlo
  std::uint64_t seed = 12345;
  /// Maximum accepted relative residual estimate.
  double tolerance = 1e-3;
};

struct FdlResult {
  double value = 0.0;
  /// |I(all nodes) - I(every other node)| plus a tail bound beyond r_max.
  double residual = 0.0;
};

/// Volume of the intersection of two balls of radius r whose centres are s apart.
double lens_volume(double r, double s);

/// z-integral ∫ 1_{|x-z|<=r} 1_{|y-z|<=r} dz (sharp) or ∫ χ χ dz (smooth)
/// by the requested strategy.
double sharp_z_integral(double r, const Vec3& x, const Vec3& y, const FdlQuadrature& quad);
double smooth_z_integral(double r, const Vec3& x, const Vec3& y, const FdlQuadrature& quad);

/// (1/π) ∫ r^{-5} ∫ 1_{|x-z|<=r} 1_{|y-z|<=r} dz dr ≈ 1/|x - y|.
/// Throws NumericalError if residual/value exceeds quad.tolerance.
FdlResult fdl_sharp(const Vec3& x, const Vec3& y, const FdlQuadrature& quad = {});
/// (4/π²) ∫ r^{-5} ∫ χ_{(r,z)}(x) χ_{(r,z)}(y) dz dr ≈ 1/|x - y|.
FdlResult fdl_smooth(const Vec3& x, const Vec3& y, const FdlQuadrature& quad = {});

/// Per-radius data of the convolution split of (1/|.|) * ϱ: for each r node,
/// A_r(z) = ∫ |ϱ(y)| χ_{(r,z)}(y) dy on the grid and its z-integral.
struct FdlSplit {
  RQuadrature radii;
  std::vector<Field> a_r;
  std::vector<double> totals;
};

/// Requires a d = 3 grid. Radii are taken as absolute values from `quad`.
FdlSplit fdl_convolution_split(const Field& rho_diff, const FdlQuadrature& quad);

/// (4/π²) ∫ dr r^{-5} ∫ dz A_r(z) T(r, z), with T supplied by the caller as
/// T(radius index, flat grid index of z).
double fdl_dominant_term(const FdlSplit& split, const std::function<double(int, std::size_t)>& commutator_norm);

/// Small-r exponent -7/2 - 3δ + 3/q of the dominant-term integrand.
double dominant_small_r_exponent(double delta, double q);
/// Largest q for which that integrand is integrable at r = 0: 6 / (5 + 6δ).
double dominant_integrability_threshold(double delta);

}  // namespace mfvl
