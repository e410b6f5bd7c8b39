#include "mfvl/kernel.hpp"

#include <cmath>
#include <numbers>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"

namespace mfvl {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::none: return "none";
    case KernelKind::coulomb: return "coulomb";
    case KernelKind::smooth_fdl: return "smooth_fdl";
    case KernelKind::gaussian: return "gaussian";
    case KernelKind::soft_coulomb: return "soft_coulomb";
  }
  return "unknown";
}

KernelKind parse_kernel_kind(const std::string& name) {
  for (auto k : {KernelKind::none, KernelKind::coulomb, KernelKind::smooth_fdl, KernelKind::gaussian,
                 KernelKind::soft_coulomb}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown kernel '" + name + "'");
}

KernelSpec KernelSpec::none() {
  KernelSpec k;
  k.kind = KernelKind::none;
  return k;
}

KernelSpec KernelSpec::coulomb(double gamma) {
  KernelSpec k;
  k.kind = KernelKind::coulomb;
  k.gamma = gamma;
  return k;
}

KernelSpec KernelSpec::gaussian(double gamma, double strength, double width) {
  KernelSpec k;
  k.kind = KernelKind::gaussian;
  k.gamma = gamma;
  k.strength = strength;
  k.width = width;
  return k;
}

KernelSpec KernelSpec::soft_coulomb(double gamma, double strength, double width) {
  KernelSpec k = gaussian(gamma, strength, width);
  k.kind = KernelKind::soft_coulomb;
  return k;
}

KernelSpec KernelSpec::smooth_fdl(double gamma, double r_min, double r_max) {
  KernelSpec k;
  k.kind = KernelKind::smooth_fdl;
  k.gamma = gamma;
  k.r_min = r_min;
  k.r_max = r_max;
  return k;
}

void KernelSpec::validate(int d) const {
  require(gamma == 1.0 || gamma == -1.0, "kernel gamma must be +1 or -1");
  require(std::isfinite(strength) && strength >= 0.0, "kernel strength must be finite and >= 0");
  require(mollifier >= 0.0, "mollifier width must be >= 0");
  if (kind == KernelKind::gaussian || kind == KernelKind::soft_coulomb)
    require(width > 0.0, "kernel width must be positive");
  if (kind == KernelKind::coulomb) require(d == 3, "the Coulomb kernel requires d = 3");
  if (kind == KernelKind::smooth_fdl) {
    require(r_min > 0.0 && r_max > r_min, "smooth_fdl requires 0 < r_min < r_max");
    require(r_count >= 2, "smooth_fdl requires at least two r nodes");
  }
}

double KernelSpec::radial(double s) const {
  const double c = gamma * strength;
  switch (kind) {
    case KernelKind::none: return 0.0;
    case KernelKind::coulomb: return c / s;
    case KernelKind::gaussian: return c * std::exp(-s * s / (2.0 * width * width));
    case KernelKind::soft_coulomb: return c / std::sqrt(s * s + width * width);
    case KernelKind::smooth_fdl: {
      const double a = std::numbers::sqrt2 * r_min;
      const double b = std::numbers::sqrt2 * r_max;
      if (s < 1e-12 * r_min) return c * std::numbers::inv_sqrtpi * 2.0 * (1.0 / a - 1.0 / b);
      return c * (std::erf(s / a) - std::erf(s / b)) / s;
    }
  }
  return 0.0;
}

KernelSpec mollified(const KernelSpec& kernel, double w) {
  KernelSpec k = kernel;
  k.mollifier = std::sqrt(kernel.mollifier * kernel.mollifier + w * w);
  return k;
}

namespace {

double k_squared(const GridSpec& grid, std::size_t flat) {
  auto idx = grid.unravel(flat);
  double k2 = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    double k = grid.wavenumber(idx[a]);
    k2 += k * k;
  }
  return k2;
}

std::vector<double> sampled_multiplier(const KernelSpec& kernel, const GridSpec& grid) {
  ComplexField v(grid);
  const double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto idx = grid.unravel(i);
    double s2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      double x = minimal_image(idx[a] * h, grid.length());
      s2 += x * x;
    }
    v[i] = kernel.radial(std::sqrt(s2));
  }
  fft_forward(v.values, grid);
  std::vector<double> m(grid.size());
  const double w = grid.cell_volume();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = w * v[i].real();
  return m;
}

}  // namespace

std::vector<double> kernel_multiplier(const KernelSpec& kernel, const GridSpec& grid) {
  kernel.validate(grid.dim());
  const int d = grid.dim();
  const double c = kernel.gamma * kernel.strength;
  std::vector<double> m(grid.size(), 0.0);
  switch (kernel.kind) {
    case KernelKind::none:
      break;
    case KernelKind::coulomb:
      for (std::size_t i = 1; i < m.size(); ++i) m[i] = c * 4.0 * std::numbers::pi / k_squared(grid, i);
      break;
    case KernelKind::gaussian: {
      const double s2 = kernel.width * kernel.width;
      const double amp = c * std::pow(2.0 * std::numbers::pi * s2, 0.5 * d);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] = amp * std::exp(-0.5 * k_squared(grid, i) * s2);
      break;
    }
    case KernelKind::smooth_fdl:
      if (d == 3) {
        const double a2 = kernel.r_min * kernel.r_min;
        const double b2 = kernel.r_max * kernel.r_max;
        for (std::size_t i = 1; i < m.size(); ++i) {
          double k2 = k_squared(grid, i);
          m[i] = c * 4.0 * std::numbers::pi / k2 * (std::exp(-0.5 * k2 * a2) - std::exp(-0.5 * k2 * b2));
        }
      } else {
        m = sampled_multiplier(kernel, grid);
        m[0] = 0.0;
      }
      break;
    case KernelKind::soft_coulomb:
      m = sampled_multiplier(kernel, grid);
      break;
  }
  if (kernel.mollifier > 0.0) {
    const double w2 = kernel.mollifier * kernel.mollifier;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] *= std::exp(-0.5 * k_squared(grid, i) * w2);
  }
  return m;
}

Field spectral_poisson(const Field& rho, const KernelSpec& kernel) {
  const auto m = kernel_multiplier(kernel, rho.grid);
  ComplexField z = to_complex(rho);
  fft_forward(z.values, rho.grid);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= m[i];
  fft_backward(z.values, rho.grid);
  return real_part(z);
}

}  // namespace mfvl
