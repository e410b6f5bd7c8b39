#include "mfvl/transforms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"

namespace mfvl {

namespace {

constexpr double kPi = std::numbers::pi;

int signed_freq(int j, int n) { return j < n / 2 ? j : j - n; }

/// Shift along the centre coordinate that maps S(., r) to the r-th diagonal
/// D_r(a) = ω(a, a - r): D_r(a) = S(a - r/2, r), spectrally.
void diagonal_shift(std::vector<cplx>& g, int r, bool to_diagonal) {
  const int n = static_cast<int>(g.size());
  const int dims[1] = {n};
  const int axes[1] = {0};
  fft_axes(g, dims, axes, FftDirection::forward);
  const double sign = to_diagonal ? -1.0 : 1.0;
  for (int j = 0; j < n; ++j) {
    const double phase = sign * kPi * signed_freq(j, n) * r / n;
    g[j] *= std::polar(1.0 / n, phase);
  }
  fft_axes(g, dims, axes, FftDirection::backward);
}

void require_1d(const TransformPlan& plan) {
  require(plan.xgrid.dim() == 1, "Wigner and Weyl transforms are implemented for d = 1 only");
  require(plan.xgrid.points() >= 4, "Wigner and Weyl transforms need at least 4 points");
}

}  // namespace

double conjugate_velocity_length(const GridSpec& xgrid, double eps) {
  return 2.0 * kPi * eps * xgrid.points() / xgrid.length();
}

TransformPlan TransformPlan::make(const GridSpec& xgrid, double eps) {
  require(eps > 0.0, "eps must be positive");
  TransformPlan p;
  p.xgrid = xgrid;
  p.vgrid = GridSpec(xgrid.dim(), xgrid.points(), conjugate_velocity_length(xgrid, eps));
  p.eps = eps;
  p.N = std::pow(eps, -xgrid.dim());
  return p;
}

void TransformPlan::validate() const {
  require(eps > 0.0, "eps must be positive");
  require(xgrid.dim() == vgrid.dim(), "x and v grids must share the dimension");
  require(xgrid.points() == vgrid.points(), "conjugate grids need n_v = n_x");
  const double lv = conjugate_velocity_length(xgrid, eps);
  require(std::abs(vgrid.length() - lv) <= 1e-12 * lv, "velocity grid is not conjugate to the position grid");
  const double n_expected = std::pow(eps, -xgrid.dim());
  require(std::abs(N - n_expected) <= 1e-12 * n_expected, "N must equal eps^{-d}");
}

PhaseSpaceField wigner(const DenseOperator& omega, const TransformPlan& plan) {
  plan.validate();
  require_1d(plan);
  require(omega.grid == plan.xgrid, "operator grid does not match the transform plan");
  const int n = plan.xgrid.points();

  const MatrixXc& a = omega.kernel;
  const double total = a.norm();
  if (total > 0.0) {
    const double residue = 0.5 * (a - a.adjoint()).norm() / total;
    if (residue > 1e-8) {
      std::ostringstream msg;
      msg << "Wigner transform has imaginary residue " << residue << " (operator is not hermitian)";
      throw NumericalError(msg.str());
    }
  }
  auto herm = [&](int i, int j) { return 0.5 * (a(i, j) + std::conj(a(j, i))); };

  // s(c, r) stored at [c][r mod n].
  std::vector<std::vector<cplx>> s(n, std::vector<cplx>(n));
  std::vector<cplx> g(n);
  for (int r = 0; r < n / 2; ++r) {
    for (int i = 0; i < n; ++i) g[i] = herm(i, ((i - r) % n + n) % n);
    diagonal_shift(g, r, false);
    for (int c = 0; c < n; ++c) {
      s[c][r] = g[c];
      if (r > 0) s[c][n - r] = std::conj(g[c]);
    }
  }
  // Nyquist diagonal: E(i) = ω(i, i + n/2), real-linear cas map onto S(., -n/2).
  for (int i = 0; i < n / 2; ++i) {
    const cplx e = herm(i, i + n / 2);
    s[(i + n / 4) % n][n / 2] = e.real() + e.imag();
    s[(i + 3 * n / 4) % n][n / 2] = e.real() - e.imag();
  }

  PhaseSpaceField w(plan.xgrid, plan.vgrid);
  const double scale = plan.xgrid.spacing() / (2.0 * kPi);
  const int dims[1] = {n};
  const int axes[1] = {0};
  for (int c = 0; c < n; ++c) {
    fft_axes(s[c], dims, axes, FftDirection::forward);
    for (int kp = 0; kp < n; ++kp) {
      const int k = kp - n / 2;
      w.at(c, kp) = scale * s[c][(k % n + n) % n].real();
    }
  }
  return w;
}

PhaseSpaceField wigner(const LowRankState& omega, const TransformPlan& plan) {
  return wigner(materialize(omega), plan);
}

DenseOperator weyl(const PhaseSpaceField& w, const TransformPlan& plan) {
  plan.validate();
  require_1d(plan);
  require(w.xgrid == plan.xgrid && w.vgrid == plan.vgrid, "phase-space grids do not match the transform plan");
  const int n = plan.xgrid.points();
  const double scale = plan.N * plan.vgrid.spacing();
  const int dims[1] = {n};
  const int axes[1] = {0};

  // s(c, r) at [r mod n][c] after the k -> r synthesis.
  std::vector<std::vector<cplx>> s(n, std::vector<cplx>(n));
  std::vector<cplx> row(n);
  for (int c = 0; c < n; ++c) {
    for (int kp = 0; kp < n; ++kp) {
      const int k = kp - n / 2;
      row[(k % n + n) % n] = w.at(c, kp);
    }
    fft_axes(row, dims, axes, FftDirection::backward);
    for (int r = 0; r < n; ++r) s[r][c] = scale * row[r];
  }

  DenseOperator out;
  out.grid = plan.xgrid;
  out.hermitian = true;
  out.kernel.resize(n, n);
  std::vector<cplx> g(n);
  for (int r = 0; r < n / 2; ++r) {
    g = s[r];
    diagonal_shift(g, r, true);
    for (int i = 0; i < n; ++i) {
      const int j = ((i - r) % n + n) % n;
      out.kernel(i, j) = g[i];
      if (r > 0) out.kernel(j, i) = std::conj(g[i]);
    }
  }
  for (int i = 0; i < n / 2; ++i) {
    const double p = s[n / 2][(i + n / 4) % n].real();
    const double q = s[n / 2][(i + 3 * n / 4) % n].real();
    const cplx e(0.5 * (p + q), 0.5 * (p - q));
    out.kernel(i, i + n / 2) = e;
    out.kernel(i + n / 2, i) = std::conj(e);
  }
  return out;
}

PhaseSpaceField husimi(const PhaseSpaceField& w, double eps) {
  require(eps > 0.0, "eps must be positive");
  const int d = w.xgrid.dim();
  const double sigma = std::sqrt(0.5 * eps);
  std::vector<int> dims;
  std::vector<const GridSpec*> axis_grid;
  for (int a = 0; a < d; ++a) {
    dims.push_back(w.xgrid.points());
    axis_grid.push_back(&w.xgrid);
  }
  for (int a = 0; a < d; ++a) {
    dims.push_back(w.vgrid.points());
    axis_grid.push_back(&w.vgrid);
  }
  const int vars = 2 * d;

  // Per-axis multiplier: DFT of the sampled periodic Gaussian with unit sum.
  std::vector<std::vector<double>> mult(vars);
  for (int a = 0; a < vars; ++a) {
    const GridSpec& g = *axis_grid[a];
    const int n = g.points();
    std::vector<cplx> k(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = minimal_image(i * g.spacing(), g.length());
      const double val = std::exp(-0.5 * x * x / (sigma * sigma));
      k[i] = val;
      sum += val;
    }
    for (auto& z : k) z /= sum;
    const int dd[1] = {n};
    const int ax[1] = {0};
    fft_axes(k, dd, ax, FftDirection::forward);
    mult[a].resize(n);
    for (int i = 0; i < n; ++i) mult[a][i] = k[i].real();
  }

  std::vector<cplx> z(w.values.begin(), w.values.end());
  std::vector<int> all(vars);
  for (int a = 0; a < vars; ++a) all[a] = a;
  fft_axes(z, dims, all, FftDirection::forward);
  std::vector<std::size_t> stride(vars, 1);
  for (int a = vars - 2; a >= 0; --a) stride[a] = stride[a + 1] * dims[a + 1];
  for (std::size_t i = 0; i < z.size(); ++i) {
    double m = 1.0;
    for (int a = 0; a < vars; ++a) m *= mult[a][(i / stride[a]) % dims[a]];
    z[i] *= m / static_cast<double>(z.size());
  }
  fft_axes(z, dims, all, FftDirection::backward);
  PhaseSpaceField out(w.xgrid, w.vgrid);
  for (std::size_t i = 0; i < z.size(); ++i) out.values[i] = z[i].real();
  return out;
}

}  // namespace mfvl
