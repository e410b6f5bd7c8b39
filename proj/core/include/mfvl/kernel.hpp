#pragma once

#include <string>
#include <vector>

#include "mfvl/grid.hpp"

namespace mfvl {

enum class KernelKind { none, coulomb, smooth_fdl, gaussian, soft_coulomb };

std::string to_string(KernelKind kind);
/// Throws ValidationError for unknown names.
KernelKind parse_kernel_kind(const std::string& name);

/// Pair interaction V. Every kind is scaled by gamma * strength:
///   coulomb       1/|x| (d = 3 only, neutralized: zero mode dropped)
///   smooth_fdl    [erf(|x|/(sqrt2 r_min)) - erf(|x|/(sqrt2 r_max))]/|x|, the
///                 Gaussian FDL representation truncated to [r_min, r_max]
///                 (neutralized like coulomb)
///   gaussian      exp(-|x|^2 / (2 width^2))
///   soft_coulomb  1/sqrt(|x|^2 + width^2)
///   none          0
/// A positive `mollifier` convolves V with a normalized Gaussian of that width.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double gamma = 1.0;
  double strength = 1.0;
  double width = 0.5;
  double mollifier = 0.0;
  double r_min = 1e-3;
  double r_max = 1e3;
  int r_count = 400;

  static KernelSpec none();
  static KernelSpec coulomb(double gamma);
  static KernelSpec gaussian(double gamma, double strength, double width);
  static KernelSpec soft_coulomb(double gamma, double strength, double width);
  static KernelSpec smooth_fdl(double gamma, double r_min, double r_max);

  /// Throws ValidationError on bad parameters or an unsupported dimension.
  void validate(int d) const;
  /// Unmollified real-space profile V(|x|) in d = 3 units, including gamma * strength.
  double radial(double s) const;
  /// True if the zero Fourier mode is removed (neutralizing background).
  bool neutralized() const { return kind == KernelKind::coulomb || kind == KernelKind::smooth_fdl; }
};

/// Fourier multiplier m(k) in FFT order such that V * rho = IFFT(m FFT(rho)).
/// Quadrature weight h^d is already included for sampled kernels.
std::vector<double> kernel_multiplier(const KernelSpec& kernel, const GridSpec& grid);

/// Returns the same kernel with an extra Gaussian mollifier of width w
/// (widths add in quadrature).
KernelSpec mollified(const KernelSpec& kernel, double w);

/// U = V * rho on the periodic grid.
Field spectral_poisson(const Field& rho, const KernelSpec& kernel);

}  // namespace mfvl
