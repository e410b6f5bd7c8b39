#include "mfvl/numerics.hpp"

#include <cmath>
#include <numbers>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"

namespace mfvl {

namespace {

/// (i k)^order for FFT bin i on an axis of n points and length L.
cplx derivative_factor(int i, int n, double L, int order) {
  if (order == 0) return 1.0;
  const int j = i < n / 2 ? i : i - n;
  if (order % 2 == 1 && j == -n / 2) return 0.0;
  const double k = 2.0 * std::numbers::pi * j / L;
  return std::pow(cplx(0.0, k), order);
}

struct PhaseShape {
  std::vector<int> dims;
  std::vector<double> lengths;
};

PhaseShape phase_shape(const PhaseSpaceField& f) {
  PhaseShape s;
  const int d = f.xgrid.dim();
  for (int a = 0; a < d; ++a) {
    s.dims.push_back(f.xgrid.points());
    s.lengths.push_back(f.xgrid.length());
  }
  for (int a = 0; a < d; ++a) {
    s.dims.push_back(f.vgrid.points());
    s.lengths.push_back(f.vgrid.length());
  }
  return s;
}

/// Unravels a flat row-major index into per-axis indices.
void unravel(std::size_t flat, const std::vector<int>& dims, std::vector<int>& idx) {
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % dims[a]);
    flat /= dims[a];
  }
}

}  // namespace

Field spectral_derivative(const Field& f, int axis, int order) {
  require(axis >= 0 && axis < f.grid.dim(), "derivative axis out of range");
  require(order >= 0, "derivative order must be >= 0");
  ComplexField z = to_complex(f);
  fft_forward(z.values, f.grid);
  const int n = f.grid.points();
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] *= derivative_factor(f.grid.unravel(i)[axis], n, f.grid.length(), order);
  }
  fft_backward(z.values, f.grid);
  return real_part(z);
}

Field spectral_laplacian(const Field& f) {
  Field out(f.grid);
  for (int a = 0; a < f.grid.dim(); ++a) {
    Field d2 = spectral_derivative(f, a, 2);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d2[i];
  }
  return out;
}

double l2_norm_fourier(const Field& f) {
  ComplexField z = to_complex(f);
  fft_forward(z.values, f.grid);
  double s = 0.0;
  for (const auto& c : z.values) s += std::norm(c);
  return std::sqrt(s * f.grid.cell_volume() / static_cast<double>(f.grid.size()));
}

PhaseSpaceField phase_space_derivative(const PhaseSpaceField& f, int axis, int order) {
  const auto shape = phase_shape(f);
  require(axis >= 0 && axis < static_cast<int>(shape.dims.size()), "phase-space axis out of range");
  std::vector<cplx> z(f.values.begin(), f.values.end());
  const int ax[1] = {axis};
  fft_axes(z, shape.dims, ax, FftDirection::forward);
  const int n = shape.dims[axis];
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < shape.dims.size(); ++a) inner *= shape.dims[a];
  for (std::size_t i = 0; i < z.size(); ++i) {
    const int j = static_cast<int>((i / inner) % n);
    z[i] *= derivative_factor(j, n, shape.lengths[axis], order);
  }
  fft_axes(z, shape.dims, ax, FftDirection::backward);
  PhaseSpaceField out(f.xgrid, f.vgrid);
  for (std::size_t i = 0; i < z.size(); ++i) out.values[i] = z[i].real() / n;
  return out;
}

std::vector<std::vector<int>> multi_indices(int vars, int max_order) {
  std::vector<std::vector<int>> out;
  std::vector<int> beta(vars, 0);
  for (int total = 0; total <= max_order; ++total) {
    // Enumerate compositions of `total` into `vars` parts in lexicographic order.
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
      if (pos == vars - 1) {
        beta[pos] = remaining;
        out.push_back(beta);
        return;
      }
      for (int b = remaining; b >= 0; --b) {
        beta[pos] = b;
        self(self, pos + 1, remaining - b);
      }
    };
    if (vars == 0) {
      if (total == 0) out.emplace_back();
      continue;
    }
    rec(rec, 0, total);
  }
  return out;
}

double sobolev_norm(const PhaseSpaceField& f, int s, int m) {
  require(s >= 0 && m >= 0, "Sobolev order and weight must be nonnegative");
  require(s <= 6, "Sobolev order above 6 is not supported");
  require(f.values.size() == f.nx() * f.nv(), "phase-space field size does not match its grids");
  const auto shape = phase_shape(f);
  const int vars = static_cast<int>(shape.dims.size());
  std::vector<double> weight(f.size());
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    auto x = f.xgrid.position(ix);
    double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    for (std::size_t iv = 0; iv < f.nv(); ++iv) {
      auto v = f.vgrid.position(iv);
      double v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
      weight[ix * f.nv() + iv] = std::pow(1.0 + x2 + v2, m);
    }
  }

  std::vector<int> all_axes(vars);
  for (int a = 0; a < vars; ++a) all_axes[a] = a;
  std::vector<cplx> spectrum(f.values.begin(), f.values.end());
  fft_axes(spectrum, shape.dims, all_axes, FftDirection::forward);
  const double norm = 1.0 / static_cast<double>(f.size());

  std::vector<cplx> work(f.size());
  std::vector<int> idx(vars);
  double total = 0.0;
  for (const auto& beta : multi_indices(vars, s)) {
    for (std::size_t i = 0; i < work.size(); ++i) {
      unravel(i, shape.dims, idx);
      cplx factor = 1.0;
      for (int a = 0; a < vars; ++a) factor *= derivative_factor(idx[a], shape.dims[a], shape.lengths[a], beta[a]);
      work[i] = spectrum[i] * factor * norm;
    }
    fft_axes(work, shape.dims, all_axes, FftDirection::backward);
    double acc = 0.0;
    for (std::size_t i = 0; i < work.size(); ++i) acc += weight[i] * std::norm(work[i]);
    total += acc;
  }
  return std::sqrt(total * f.cell_volume());
}

double velocity_moment(const PhaseSpaceField& f, int m, bool absolute) {
  require(m >= 0, "moment order must be >= 0");
  require(f.values.size() == f.nx() * f.nv(), "phase-space field size does not match its grids");
  std::vector<double> vpow(f.nv());
  for (std::size_t iv = 0; iv < f.nv(); ++iv) {
    auto v = f.vgrid.position(iv);
    double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    vpow[iv] = m == 0 ? 1.0 : std::pow(speed, m);
  }
  double s = 0.0;
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    for (std::size_t iv = 0; iv < f.nv(); ++iv) {
      double val = f.values[ix * f.nv() + iv];
      s += vpow[iv] * (absolute ? std::abs(val) : val);
    }
  }
  return s * f.cell_volume();
}

Field spatial_density(const PhaseSpaceField& f) {
  Field rho(f.xgrid);
  const double hv = f.vgrid.cell_volume();
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    double s = 0.0;
    for (std::size_t iv = 0; iv < f.nv(); ++iv) s += f.values[ix * f.nv() + iv];
    rho[ix] = s * hv;
  }
  return rho;
}

double l2_norm(const PhaseSpaceField& f) {
  double s = 0.0;
  for (double x : f.values) s += x * x;
  return std::sqrt(s * f.cell_volume());
}

}  // namespace mfvl
