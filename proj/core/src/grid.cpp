#include "mfvl/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {
bool is_power_of_two(int n) { return n >= 2 && (n & (n - 1)) == 0; }
}  // namespace

GridSpec::GridSpec(int d, int n, double L) : d_(d), n_(n), L_(L) {
  require(d >= 1 && d <= 3, "grid dimension must be 1, 2 or 3 (got " + std::to_string(d) + ")");
  require(is_power_of_two(n), "points per axis must be a power of two (got " + std::to_string(n) + ")");
  require(L > 0.0 && std::isfinite(L), "box length must be positive");
}

double GridSpec::cell_volume() const { return std::pow(spacing(), d_); }

std::size_t GridSpec::size() const {
  std::size_t s = 1;
  for (int a = 0; a < d_; ++a) s *= static_cast<std::size_t>(n_);
  return s;
}

double GridSpec::wavenumber(int i) const { return 2.0 * std::numbers::pi * frequency(i) / L_; }

std::array<int, 3> GridSpec::unravel(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % n_);
    flat /= n_;
  }
  return idx;
}

std::size_t GridSpec::ravel(const std::array<int, 3>& idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < d_; ++a) {
    int i = ((idx[a] % n_) + n_) % n_;
    flat = flat * n_ + static_cast<std::size_t>(i);
  }
  return flat;
}

std::array<double, 3> GridSpec::position(std::size_t flat) const {
  auto idx = unravel(flat);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = 0; a < d_; ++a) x[a] = node(idx[a]);
  return x;
}

double minimal_image(double dx, double L) { return dx - L * std::nearbyint(dx / L); }

template <class T>
BasicField<T>::BasicField(const GridSpec& g, std::vector<T> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), "field value count does not match grid size");
}

template struct BasicField<double>;
template struct BasicField<cplx>;

PhaseSpaceField::PhaseSpaceField(const GridSpec& xg, const GridSpec& vg, double fill)
    : xgrid(xg), vgrid(vg), values(xg.size() * vg.size(), fill) {
  require(xg.dim() == vg.dim(), "phase-space grids must share the dimension");
}

double mass(const PhaseSpaceField& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.cell_volume();
}

double integral(const Field& f) {
  double s = 0.0;
  for (double x : f.values) s += x;
  return s * f.grid.cell_volume();
}

cplx integral(const ComplexField& f) {
  cplx s = 0.0;
  for (const auto& x : f.values) s += x;
  return s * f.grid.cell_volume();
}

double lp_norm(const Field& f, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
  }
  require(p >= 1.0, "L^p norm requires p >= 1");
  double s = 0.0;
  for (double x : f.values) s += std::pow(std::abs(x), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace mfvl
