#include "mfvl/particles.hpp"

#include <cmath>
#include <random>

#include "mfvl/errors.hpp"
#include "mfvl/fft.hpp"
#include "mfvl/numerics.hpp"

namespace mfvl {

namespace {

struct CicStencil {
  std::array<int, 3> base;
  std::array<double, 3> frac;
};

CicStencil stencil(const Vec3& x, const GridSpec& g) {
  CicStencil s;
  for (int a = 0; a < 3; ++a) {
    const double u = (x[a] + 0.5 * g.length()) / g.spacing();
    const double fl = std::floor(u);
    s.base[a] = static_cast<int>(fl);
    s.frac[a] = u - fl;
  }
  return s;
}

template <class F>
void for_each_corner(const CicStencil& s, const GridSpec& g, F&& f) {
  for (int c = 0; c < 8; ++c) {
    std::array<int, 3> idx;
    double weight = 1.0;
    for (int a = 0; a < 3; ++a) {
      const int bit = (c >> a) & 1;
      idx[a] = s.base[a] + bit;
      weight *= bit ? s.frac[a] : 1.0 - s.frac[a];
    }
    f(g.ravel(idx), weight);
  }
}

double wrap(double x, double L) { return x - L * std::floor((x + 0.5 * L) / L); }

}  // namespace

ParticleEnsemble sample_gaussian_ensemble(std::size_t count, const Vec3& centre, double sigma_x, double sigma_v,
                                          std::uint64_t seed) {
  require(count > 0, "particle count must be positive");
  require(sigma_x > 0.0 && sigma_v > 0.0, "particle sampling widths must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  ParticleEnsemble p;
  p.x.resize(count);
  p.v.resize(count);
  p.w.assign(count, 1.0 / static_cast<double>(count));
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < 3; ++a) {
      p.x[i][a] = centre[a] + sigma_x * normal(rng);
      p.v[i][a] = sigma_v * normal(rng);
    }
  }
  return p;
}

Field deposit_density(const ParticleEnsemble& p, const GridSpec& grid) {
  require(grid.dim() == 3, "particle deposit needs a d = 3 grid");
  Field rho(grid);
  const double inv = 1.0 / grid.cell_volume();
  for (std::size_t i = 0; i < p.size(); ++i) {
    for_each_corner(stencil(p.x[i], grid), grid, [&](std::size_t idx, double w) { rho[idx] += p.w[i] * w * inv; });
  }
  return rho;
}

ParticleRun::ParticleRun(ParticleEnsemble p, GridSpec grid, KernelSpec kernel, double dt, double mass)
    : p_(std::move(p)), grid_(grid), kernel_(kernel), dt_(dt), mass_(mass) {
  require(grid_.dim() == 3, "the particle surrogate runs on d = 3 grids");
  require(dt > 0.0 && mass > 0.0, "particle run needs positive dt and mass");
  require(p_.x.size() == p_.v.size() && p_.x.size() == p_.w.size(), "inconsistent particle arrays");
  kernel_.validate(3);
  multiplier_ = kernel_multiplier(kernel_, grid_);
  for (auto& x : p_.x) {
    for (int a = 0; a < 3; ++a) x[a] = wrap(x[a], grid_.length());
  }
  record();
}

std::vector<Vec3> ParticleRun::forces(Field* potential_out) const {
  Field rho = deposit_density(p_, grid_);
  ComplexField z = to_complex(rho);
  fft_forward(z.values, grid_);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] *= multiplier_[i];
  fft_backward(z.values, grid_);
  Field psi = real_part(z);
  std::array<Field, 3> grad{spectral_gradient(psi, 0), spectral_gradient(psi, 1), spectral_gradient(psi, 2)};
  std::vector<Vec3> f(p_.size(), Vec3{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < p_.size(); ++i) {
    for_each_corner(stencil(p_.x[i], grid_), grid_, [&](std::size_t idx, double w) {
      for (int a = 0; a < 3; ++a) f[i][a] -= w * grad[a][idx];
    });
  }
  if (potential_out) *potential_out = std::move(psi);
  return f;
}

void ParticleRun::step() {
  auto kick = [&](const std::vector<Vec3>& f) {
    for (std::size_t i = 0; i < p_.size(); ++i) {
      for (int a = 0; a < 3; ++a) p_.v[i][a] += 0.5 * dt_ * f[i][a];
    }
  };
  kick(forces(nullptr));
  for (std::size_t i = 0; i < p_.size(); ++i) {
    for (int a = 0; a < 3; ++a) p_.x[i][a] = wrap(p_.x[i][a] + dt_ * p_.v[i][a] / mass_, grid_.length());
  }
  kick(forces(nullptr));
  t_ += dt_;
}

void ParticleRun::advance(int count, int log_every) {
  for (int s = 1; s <= count; ++s) {
    step();
    if (log_every > 0 && s % log_every == 0) record();
  }
}

void ParticleRun::record() {
  ParticleLogRow row;
  row.t = t_;
  for (std::size_t i = 0; i < p_.size(); ++i) {
    row.mass += p_.w[i];
    double v2 = 0.0;
    for (int a = 0; a < 3; ++a) {
      row.momentum[a] += p_.w[i] * p_.v[i][a];
      v2 += p_.v[i][a] * p_.v[i][a];
    }
    row.kinetic += p_.w[i] * v2 / (2.0 * mass_);
  }
  Field psi;
  forces(&psi);
  Field rho = deposit_density(p_, grid_);
  double s = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) s += rho[i] * psi[i];
  row.potential = 0.5 * s * grid_.cell_volume();
  row.energy = row.kinetic + row.potential;
  log_.push_back(row);
}

}  // namespace mfvl
