#include "mfvl/vlasov.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"
#include "mfvl/numerics.hpp"

namespace mfvl {

namespace {

/// Fourier multiplier of a shift f(x) -> f(x - s) for bin j of an n-point axis.
/// At the Nyquist bin the real cosine keeps real data real.
cplx shift_factor(int j, int n, double L, double s) {
  const int f = j < n / 2 ? j : j - n;
  const double k = 2.0 * std::numbers::pi * f / L;
  if (f == -n / 2) return std::cos(k * s);
  return std::polar(1.0, -k * s);
}

std::vector<Field> force_field(const PhaseSpaceField& f, const std::vector<double>& multiplier) {
  Field rho = spatial_density(f);
  ComplexField z = to_complex(rho);
  fft_forward(z.values, rho.grid);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= multiplier[i];
  fft_backward(z.values, rho.grid);
  Field psi = real_part(z);
  std::vector<Field> force;
  for (int a = 0; a < rho.grid.dim(); ++a) {
    Field g = spectral_gradient(psi, a);
    for (auto& v : g.values) v = -v;
    force.push_back(std::move(g));
  }
  return force;
}

std::vector<int> phase_dims(const PhaseSpaceField& f) {
  std::vector<int> dims(f.xgrid.dim(), f.xgrid.points());
  dims.insert(dims.end(), f.vgrid.dim(), f.vgrid.points());
  return dims;
}

double max_abs_speed_component(const GridSpec& vgrid) { return 0.5 * vgrid.length(); }

int signed_index(double dx, double h) { return static_cast<int>(std::lround(dx / h)); }

}  // namespace

Field vlasov_potential(const PhaseSpaceField& f, const KernelSpec& kernel) {
  return spectral_poisson(spatial_density(f), kernel);
}

VlasovLogRow vlasov_diagnostics(const PhaseSpaceField& f, const KernelSpec& kernel, double mass, double t) {
  VlasovLogRow row;
  row.t = t;
  const int d = f.xgrid.dim();
  const double w = f.cell_volume();
  for (std::size_t ix = 0; ix < f.nx(); ++ix) {
    for (std::size_t iv = 0; iv < f.nv(); ++iv) {
      const double val = f.values[ix * f.nv() + iv];
      auto v = f.vgrid.position(iv);
      row.mass += val;
      for (int a = 0; a < d; ++a) row.momentum[a] += v[a] * val;
      row.kinetic += (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) * val;
    }
  }
  row.mass *= w;
  for (auto& p : row.momentum) p *= w;
  row.kinetic *= w / (2.0 * mass);
  if (kernel.kind != KernelKind::none) {
    Field rho = spatial_density(f);
    Field psi = spectral_poisson(rho, kernel);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * psi[i];
    row.potential = 0.5 * s * f.xgrid.cell_volume();
  }
  row.energy = row.kinetic + row.potential;
  row.l2 = l2_norm(f);
  for (int m = 0; m < 7; ++m) row.moments[m] = velocity_moment(f, m);
  const auto sup = [](const PhaseSpaceField& g) {
    double s = 0.0;
    for (double x : g.values) s = std::max(s, std::abs(x));
    return s;
  };
  row.derivative_sup[0] = sup(f);
  for (int a = 0; a < 2 * d; ++a) {
    const PhaseSpaceField da = phase_space_derivative(f, a);
    row.derivative_sup[1] = std::max(row.derivative_sup[1], sup(da));
    for (int b = a; b < 2 * d; ++b)
      row.derivative_sup[2] = std::max(row.derivative_sup[2], sup(phase_space_derivative(da, b)));
  }
  return row;
}

VlasovRun::VlasovRun(PhaseSpaceField f, KernelSpec kernel, double dt, double mass, bool self_consistent)
    : f_(std::move(f)), kernel_(kernel), dt_(dt), mass_(mass), self_consistent_(self_consistent) {
  require(dt > 0.0 && std::isfinite(dt), "Vlasov time step must be positive");
  require(mass > 0.0, "kinetic mass must be positive");
  require(f_.xgrid.dim() == f_.vgrid.dim(), "phase-space grids must share the dimension");
  require(f_.values.size() == f_.nx() * f_.nv(), "phase-space field size does not match its grids");
  kernel_.validate(f_.xgrid.dim());
  multiplier_ = kernel_multiplier(kernel_, f_.xgrid);
  record();
}

void VlasovRun::advect_x(double tau) {
  const int d = f_.xgrid.dim();
  const auto dims = phase_dims(f_);
  std::vector<int> axes(d);
  for (int a = 0; a < d; ++a) axes[a] = a;
  std::vector<cplx> z(f_.values.begin(), f_.values.end());
  fft_axes(z, dims, axes, FftDirection::forward);
  const int n = f_.xgrid.points();
  const double L = f_.xgrid.length();
  const double norm = 1.0 / static_cast<double>(f_.nx());
  for (std::size_t ix = 0; ix < f_.nx(); ++ix) {
    auto kidx = f_.xgrid.unravel(ix);
    for (std::size_t iv = 0; iv < f_.nv(); ++iv) {
      auto v = f_.vgrid.position(iv);
      cplx m = norm;
      for (int a = 0; a < d; ++a) m *= shift_factor(kidx[a], n, L, v[a] * tau / mass_);
      z[ix * f_.nv() + iv] *= m;
    }
  }
  fft_axes(z, dims, axes, FftDirection::backward);
  for (std::size_t i = 0; i < z.size(); ++i) f_.values[i] = z[i].real();
}

void VlasovRun::advect_v(const std::vector<Field>& force, double tau) {
  const int d = f_.xgrid.dim();
  const auto dims = phase_dims(f_);
  std::vector<int> axes(d);
  for (int a = 0; a < d; ++a) axes[a] = d + a;
  std::vector<cplx> z(f_.values.begin(), f_.values.end());
  fft_axes(z, dims, axes, FftDirection::forward);
  const int n = f_.vgrid.points();
  const double L = f_.vgrid.length();
  const double norm = 1.0 / static_cast<double>(f_.nv());
  for (std::size_t ix = 0; ix < f_.nx(); ++ix) {
    for (std::size_t iv = 0; iv < f_.nv(); ++iv) {
      auto kidx = f_.vgrid.unravel(iv);
      cplx m = norm;
      for (int a = 0; a < d; ++a) m *= shift_factor(kidx[a], n, L, force[a][ix] * tau);
      z[ix * f_.nv() + iv] *= m;
    }
  }
  fft_axes(z, dims, axes, FftDirection::backward);
  for (std::size_t i = 0; i < z.size(); ++i) f_.values[i] = z[i].real();
}

void VlasovRun::step(double dt) {
  require(std::isfinite(dt) && dt != 0.0, "Vlasov time step must be finite and nonzero");
  const double vmax = max_abs_speed_component(f_.vgrid) / mass_;
  if (vmax * std::abs(dt) > 0.25 * f_.xgrid.length()) {
    std::ostringstream msg;
    msg << "x-displacement " << vmax * std::abs(dt) << " exceeds L_x/4";
    throw NumericalError(msg.str());
  }
  advect_x(0.5 * dt);
  if (self_consistent_ && kernel_.kind != KernelKind::none) {
    auto force = force_field(f_, multiplier_);
    double fmax = 0.0;
    for (const auto& fa : force) {
      for (double v : fa.values) fmax = std::max(fmax, std::abs(v));
    }
    if (fmax * std::abs(dt) > 0.25 * f_.vgrid.length()) {
      std::ostringstream msg;
      msg << "v-displacement " << fmax * std::abs(dt) << " exceeds L_v/4";
      throw NumericalError(msg.str());
    }
    advect_v(force, dt);
  }
  advect_x(0.5 * dt);
  t_ += dt;
}

void VlasovRun::advance(int count, int log_every) {
  require(count >= 0, "step count must be nonnegative");
  for (int s = 1; s <= count; ++s) {
    step(dt_);
    if (log_every > 0 && s % log_every == 0) record();
  }
}

void VlasovRun::record() {
  const KernelSpec k = self_consistent_ ? kernel_ : KernelSpec::none();
  log_.push_back(vlasov_diagnostics(f_, k, mass_, t_));
}

VlasovRun vlasov_step(VlasovRun run) {
  run.step();
  return run;
}

double steady_state_residual(const PhaseSpaceField& f, const KernelSpec& kernel, double mass) {
  require(mass > 0.0, "kinetic mass must be positive");
  const int d = f.xgrid.dim();
  PhaseSpaceField r(f.xgrid, f.vgrid);
  std::vector<Field> grad_psi;
  if (kernel.kind != KernelKind::none) {
    Field psi = vlasov_potential(f, kernel);
    for (int a = 0; a < d; ++a) grad_psi.push_back(spectral_gradient(psi, a));
  }
  for (int a = 0; a < d; ++a) {
    PhaseSpaceField fx = phase_space_derivative(f, a, 1);
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
      for (std::size_t iv = 0; iv < f.nv(); ++iv) {
        r.at(ix, iv) += f.vgrid.position(iv)[a] / mass * fx.at(ix, iv);
      }
    }
    if (!grad_psi.empty()) {
      PhaseSpaceField fv = phase_space_derivative(f, d + a, 1);
      for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        for (std::size_t iv = 0; iv < f.nv(); ++iv) r.at(ix, iv) -= grad_psi[a][ix] * fv.at(ix, iv);
      }
    }
  }
  return l2_norm(r);
}

Eigen::MatrixXd midpoint_values(const Field& u) {
  require(u.grid.dim() == 1, "midpoint values are implemented for d = 1");
  const int n = u.grid.points();
  const double h = u.grid.spacing();
  const double L = u.grid.length();
  std::vector<cplx> f(u.values.begin(), u.values.end());
  const int dn[1] = {n};
  const int ax[1] = {0};
  fft_axes(f, dn, ax, FftDirection::forward);
  const int m = 2 * n;
  std::vector<cplx> g(m, 0.0);
  for (int j = 0; j < n / 2; ++j) g[j] = f[j];
  for (int j = n / 2 + 1; j < n; ++j) g[j + n] = f[j];
  g[n / 2] = 0.5 * f[n / 2];
  g[m - n / 2] = 0.5 * f[n / 2];
  const int dm[1] = {m};
  fft_axes(g, dm, ax, FftDirection::backward);
  Eigen::MatrixXd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int r = signed_index(minimal_image((i - j) * h, L), h);
      const int idx = ((2 * j + r) % m + m) % m;
      out(i, j) = g[idx].real() / n;
    }
  }
  return out;
}

DenseOperator kinetic_commutator(const DenseOperator& omega, double eps) {
  require(omega.grid.dim() == 1, "kinetic commutator is implemented for d = 1");
  const int n = omega.grid.points();
  MatrixXc work = omega.kernel;
  // Column-major (i, j) storage is a row-major tensor of shape [j][i].
  std::span<cplx> data(work.data(), static_cast<std::size_t>(work.size()));
  const int dims[2] = {n, n};
  const int axes[2] = {0, 1};
  fft_axes(data, dims, axes, FftDirection::forward);
  const double scale = eps * eps / (static_cast<double>(n) * n);
  for (int j = 0; j < n; ++j) {
    const double kj = omega.grid.wavenumber(j);
    for (int i = 0; i < n; ++i) {
      const double ki = omega.grid.wavenumber(i);
      work(i, j) *= scale * (ki * ki - kj * kj);
    }
  }
  fft_axes(data, dims, axes, FftDirection::backward);
  DenseOperator out;
  out.grid = omega.grid;
  out.kernel = std::move(work);
  return out;
}

WeylVlasovResidual weyl_vlasov_residual(const std::vector<PhaseSpaceField>& snapshots, double spacing,
                                        const TransformPlan& plan, const KernelSpec& kernel) {
  require(snapshots.size() >= 3, "the Weyl-Vlasov residual needs at least three snapshots");
  require(spacing > 0.0, "snapshot spacing must be positive");
  require(plan.xgrid.dim() == 1, "the Weyl-Vlasov residual is implemented for d = 1");
  const std::size_t mid = snapshots.size() / 2;
  const DenseOperator prev = weyl(snapshots[mid - 1], plan);
  const DenseOperator cur = weyl(snapshots[mid], plan);
  const DenseOperator next = weyl(snapshots[mid + 1], plan);
  const int n = plan.xgrid.points();
  const double h = plan.xgrid.spacing();
  const double L = plan.xgrid.length();

  MatrixXc base = cplx(0.0, plan.eps / (2.0 * spacing)) * (next.kernel - prev.kernel);
  base -= kinetic_commutator(cur, plan.eps).kernel;

  Field u = vlasov_potential(snapshots[mid], kernel);
  Eigen::MatrixXd grad_mid = midpoint_values(spectral_gradient(u, 0));
  MatrixXc with_a = base;
  MatrixXc with_u = base;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double s = minimal_image((i - j) * h, L);
      with_a(i, j) -= grad_mid(i, j) * s * cur.kernel(i, j);
      with_u(i, j) -= (u[i] - u[j]) * cur.kernel(i, j);
    }
  }
  const double w = plan.xgrid.cell_volume();
  WeylVlasovResidual r;
  r.weyl = singular_values(w * with_a).sum();
  r.hartree = singular_values(w * with_u).sum();
  return r;
}

}  // namespace mfvl
