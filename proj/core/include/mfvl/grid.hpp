#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace mfvl {

using cplx = std::complex<double>;

/// Periodic tensor grid with n points per axis on [-L/2, L/2)^d.
class GridSpec {
 public:
  GridSpec() = default;
  /// Throws ValidationError unless 1 <= d <= 3, n is a power of two (>= 2)
  /// and L > 0.
  GridSpec(int d, int n, double L);

  int dim() const { return d_; }
  int points() const { return n_; }
  double length() const { return L_; }
  double spacing() const { return L_ / n_; }
  /// Quadrature weight h^d.
  double cell_volume() const;
  std::size_t size() const;

  /// Node coordinate along one axis: -L/2 + i h.
  double node(int i) const { return -0.5 * L_ + i * spacing(); }
  /// Angular wave number of FFT bin i, 2 pi j / L with j in [-n/2, n/2).
  double wavenumber(int i) const;
  /// Signed frequency index of FFT bin i.
  int frequency(int i) const { return i < n_ / 2 ? i : i - n_; }

  std::array<int, 3> unravel(std::size_t flat) const;
  std::size_t ravel(const std::array<int, 3>& idx) const;
  /// Coordinates of a flat node index (unused axes are zero).
  std::array<double, 3> position(std::size_t flat) const;

  bool operator==(const GridSpec& o) const { return d_ == o.d_ && n_ == o.n_ && L_ == o.L_; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

 private:
  int d_ = 1;
  int n_ = 2;
  double L_ = 1.0;
};

/// Minimal-image representative of a coordinate difference on a torus of side L.
double minimal_image(double dx, double L);

template <class T>
struct BasicField {
  GridSpec grid;
  std::vector<T> values;

  BasicField() = default;
  explicit BasicField(const GridSpec& g, T fill = T{}) : grid(g), values(g.size(), fill) {}
  BasicField(const GridSpec& g, std::vector<T> v);

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using Field = BasicField<double>;
using ComplexField = BasicField<cplx>;

extern template struct BasicField<double>;
extern template struct BasicField<cplx>;

/// Real function on the phase-space grid xgrid x vgrid. Storage is x-major:
/// values[ix * vgrid.size() + iv].
struct PhaseSpaceField {
  GridSpec xgrid;
  GridSpec vgrid;
  std::vector<double> values;

  PhaseSpaceField() = default;
  PhaseSpaceField(const GridSpec& xg, const GridSpec& vg, double fill = 0.0);

  std::size_t nx() const { return xgrid.size(); }
  std::size_t nv() const { return vgrid.size(); }
  std::size_t size() const { return values.size(); }
  double& at(std::size_t ix, std::size_t iv) { return values[ix * nv() + iv]; }
  double at(std::size_t ix, std::size_t iv) const { return values[ix * nv() + iv]; }
  /// h_x^d h_v^d.
  double cell_volume() const { return xgrid.cell_volume() * vgrid.cell_volume(); }
  bool same_grids(const PhaseSpaceField& o) const { return xgrid == o.xgrid && vgrid == o.vgrid; }
};

/// ∬ f dx dv with weight h_x^d h_v^d.
double mass(const PhaseSpaceField& f);
/// ∫ f dx with weight h^d.
double integral(const Field& f);
cplx integral(const ComplexField& f);
/// (h^d Σ |f|^p)^{1/p}; p = infinity gives the max norm.
double lp_norm(const Field& f, double p);

}  // namespace mfvl
