#pragma once

#include <vector>

#include "mfvl/grid.hpp"

namespace mfvl {

/// Spectral derivative of the given order along one axis. The Nyquist mode is
/// zeroed for odd orders so real input stays real.
Field spectral_derivative(const Field& f, int axis, int order = 1);
/// Spectral gradient component.
inline Field spectral_gradient(const Field& f, int axis) { return spectral_derivative(f, axis, 1); }
/// Sum of second spectral derivatives.
Field spectral_laplacian(const Field& f);

/// L^2 norm through Parseval: (h^d / n^d Σ |FFT f|^2)^{1/2}.
double l2_norm_fourier(const Field& f);

/// Spectral derivative of a phase-space field along one of its 2d axes
/// (0..d-1 are x, d..2d-1 are v).
PhaseSpaceField phase_space_derivative(const PhaseSpaceField& f, int axis, int order = 1);

/// All multi-indices in `vars` variables with total order <= max_order,
/// ordered by total order, then lexicographically.
std::vector<std::vector<int>> multi_indices(int vars, int max_order);

/// Weighted Sobolev norm (Σ_{|β|<=s} ∬ (1+|x|^2+|v|^2)^m |∂^β f|^2)^{1/2},
/// β ranging over all multi-indices in the 2d phase-space variables.
/// Throws ValidationError if s > 6 or s, m < 0.
double sobolev_norm(const PhaseSpaceField& f, int s, int m);

/// ∬ |v|^m f dx dv, summed in storage order (x-major, then v).
/// With `absolute` set, |f| replaces f.
double velocity_moment(const PhaseSpaceField& f, int m, bool absolute = false);

/// Spatial density ∫ f dv.
Field spatial_density(const PhaseSpaceField& f);

/// L^2 norm of a phase-space field with weight h_x^d h_v^d.
double l2_norm(const PhaseSpaceField& f);

}  // namespace mfvl
