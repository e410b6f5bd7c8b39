#include "mfvl/hartree.hpp"

#include <cmath>
#include <sstream>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"

namespace mfvl {

namespace {

std::vector<double> wave_squared(const GridSpec& g) {
  std::vector<double> k2(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto idx = g.unravel(i);
    for (int a = 0; a < g.dim(); ++a) k2[i] += g.wavenumber(idx[a]) * g.wavenumber(idx[a]);
  }
  return k2;
}

std::span<cplx> column(MatrixXc& m, Eigen::Index k) {
  return {m.col(k).data(), static_cast<std::size_t>(m.rows())};
}

double orbital_norm2(const LowRankState& s, Eigen::Index k) { return s.grid.cell_volume() * s.orbitals.col(k).squaredNorm(); }

Field convolve(const Field& rho, const std::vector<double>& multiplier) {
  ComplexField z = to_complex(rho);
  fft_forward(z.values, rho.grid);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= multiplier[i];
  fft_backward(z.values, rho.grid);
  return real_part(z);
}

}  // namespace

Field normalized_density(const LowRankState& state) {
  Field rho = density(state);
  const double inv = 1.0 / state.particles;
  for (auto& v : rho.values) v *= inv;
  return rho;
}

Field mean_field(const LowRankState& state, const KernelSpec& kernel) {
  return spectral_poisson(normalized_density(state), kernel);
}

HartreeEnergy hartree_energy(const LowRankState& state, const KernelSpec& kernel) {
  HartreeEnergy e;
  const GridSpec& g = state.grid;
  const auto k2 = wave_squared(g);
  const double eps2 = state.eps * state.eps;
  const double w = g.cell_volume() / static_cast<double>(g.size());
  for (Eigen::Index k = 0; k < state.rank(); ++k) {
    std::vector<cplx> phi(state.orbitals.col(k).data(), state.orbitals.col(k).data() + state.orbitals.rows());
    fft_forward(phi, g);
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) s += k2[i] * std::norm(phi[i]);
    e.kinetic += state.occupations[k] * eps2 * w * s;
  }
  if (kernel.kind != KernelKind::none) {
    Field rho = normalized_density(state);
    Field u = spectral_poisson(rho, kernel);
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * u[i];
    e.potential = 0.5 * state.particles * s * g.cell_volume();
  }
  return e;
}

HartreeRun::HartreeRun(LowRankState state, KernelSpec kernel, double dt)
    : state_(std::move(state)), kernel_(kernel), dt_(dt) {
  require(dt > 0.0 && std::isfinite(dt), "Hartree time step must be positive");
  state_.validate();
  kernel_.validate(state_.grid.dim());
  multiplier_ = kernel_multiplier(kernel_, state_.grid);
  k2_ = wave_squared(state_.grid);
  for (Eigen::Index k = 0; k < state_.rank(); ++k) norms0_.push_back(orbital_norm2(state_, k));
  record();
}

void HartreeRun::prepare_kinetic(double dt) {
  if (!kinetic_phase_.empty() && kinetic_dt_ == dt) return;
  kinetic_dt_ = dt;
  kinetic_phase_.resize(k2_.size());
  const double scale = 1.0 / static_cast<double>(k2_.size());
  for (std::size_t i = 0; i < k2_.size(); ++i) {
    kinetic_phase_[i] = std::polar(scale, -state_.eps * k2_[i] * 0.5 * dt);
  }
}

void HartreeRun::step(double dt) {
  require(std::isfinite(dt) && dt != 0.0, "Hartree time step must be finite and nonzero");
  prepare_kinetic(dt);
  const GridSpec& g = state_.grid;
  const std::vector<int> dims(g.dim(), g.points());
  std::vector<int> axes(g.dim());
  for (int a = 0; a < g.dim(); ++a) axes[a] = a;

  auto kinetic_half = [&] {
    for (Eigen::Index k = 0; k < state_.rank(); ++k) {
      auto col = column(state_.orbitals, k);
      fft_axes(col, dims, axes, FftDirection::forward);
      for (std::size_t i = 0; i < col.size(); ++i) col[i] *= kinetic_phase_[i];
      fft_axes(col, dims, axes, FftDirection::backward);
    }
  };

  kinetic_half();
  if (kernel_.kind != KernelKind::none) {
    Field u = convolve(normalized_density(state_), multiplier_);
    std::vector<cplx> phase(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) phase[i] = std::polar(1.0, -u[i] * dt / state_.eps);
    for (Eigen::Index k = 0; k < state_.rank(); ++k) {
      auto col = column(state_.orbitals, k);
      for (std::size_t i = 0; i < col.size(); ++i) col[i] *= phase[i];
    }
  }
  kinetic_half();
  t_ += dt;

  double trace = 0.0;
  for (Eigen::Index k = 0; k < state_.rank(); ++k) {
    const double n2 = orbital_norm2(state_, k);
    if (std::abs(n2 - norms0_[k]) > 1e-10) {
      std::ostringstream msg;
      msg << "orbital " << k << " norm drifted by " << n2 - norms0_[k] << " at t = " << t_;
      throw NumericalError(msg.str());
    }
    trace += state_.occupations[k] * n2;
  }
  if (std::abs(trace - state_.trace()) > 1e-10 * state_.particles) {
    std::ostringstream msg;
    msg << "trace drifted to " << trace << " at t = " << t_;
    throw NumericalError(msg.str());
  }
}

void HartreeRun::advance(int count, int log_every) {
  require(count >= 0, "step count must be nonnegative");
  for (int s = 1; s <= count; ++s) {
    step(dt_);
    if (log_every > 0 && s % log_every == 0) record();
  }
}

void HartreeRun::record() {
  HartreeLogRow row;
  row.t = t_;
  for (Eigen::Index k = 0; k < state_.rank(); ++k) row.trace += state_.occupations[k] * orbital_norm2(state_, k);
  auto e = hartree_energy(state_, kernel_);
  row.kinetic = e.kinetic;
  row.potential = e.potential;
  row.energy = e.total();
  row.orthonormality_defect = state_.orthonormality_defect();
  if (state_.rank() > 0) {
    row.min_occupation = state_.occupations.minCoeff();
    row.max_occupation = state_.occupations.maxCoeff();
  }
  log_.push_back(row);
}

HartreeRun hartree_step(HartreeRun run) {
  run.step();
  return run;
}

}  // namespace mfvl
