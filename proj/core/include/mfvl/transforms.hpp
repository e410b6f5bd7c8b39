#pragma once

#include "mfvl/grid.hpp"
#include "mfvl/operators.hpp"

namespace mfvl {

/// Position grid, conjugate velocity grid and the semiclassical parameter.
/// Conjugacy: n_v = n_x and h_v = 2 pi eps / L_x, so v-nodes are eps times
/// the Fourier frequencies of the x-grid. N = eps^{-d}.
struct TransformPlan {
  GridSpec xgrid;
  GridSpec vgrid;
  double eps = 1.0;
  double N = 1.0;

  /// Builds the conjugate velocity grid for `xgrid`.
  static TransformPlan make(const GridSpec& xgrid, double eps);
  /// Throws ValidationError unless the grids are conjugate and N = eps^{-d}.
  void validate() const;
};

/// Velocity box side 2 pi eps n / L for a position grid.
double conjugate_velocity_length(const GridSpec& xgrid, double eps);

/// Discrete Wigner transform (d = 1). The hermitian part of ω is
/// transformed; a NumericalError is thrown if the antihermitian part (the
/// imaginary residue of W) exceeds 1e-8 relative.
PhaseSpaceField wigner(const DenseOperator& omega, const TransformPlan& plan);
PhaseSpaceField wigner(const LowRankState& omega, const TransformPlan& plan);

/// Discrete Weyl quantization (d = 1), the exact inverse of `wigner` on
/// conjugate grids. The result is flagged hermitian.
DenseOperator weyl(const PhaseSpaceField& w, const TransformPlan& plan);

/// Gaussian smoothing at width sqrt(eps/2) along every x and v axis, using a
/// sampled periodic Gaussian normalized to unit discrete mass.
PhaseSpaceField husimi(const PhaseSpaceField& w, double eps);

}  // namespace mfvl
