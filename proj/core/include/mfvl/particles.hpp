#pragma once

#include <cstdint>
#include <vector>

#include "mfvl/coulomb.hpp"
#include "mfvl/kernel.hpp"

namespace mfvl {

/// Weighted particle sample of a phase-space density on the periodic box.
struct ParticleEnsemble {
  std::vector<Vec3> x;
  std::vector<Vec3> v;
  std::vector<double> w;

  std::size_t size() const { return x.size(); }
};

/// Isotropic Gaussian sample in x and v with total weight 1.
ParticleEnsemble sample_gaussian_ensemble(std::size_t count, const Vec3& centre, double sigma_x, double sigma_v,
                                          std::uint64_t seed);

/// Cloud-in-cell density on a d = 3 grid.
Field deposit_density(const ParticleEnsemble& p, const GridSpec& grid);

struct ParticleLogRow {
  double t = 0.0;
  double mass = 0.0;
  Vec3 momentum{0.0, 0.0, 0.0};
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
};

/// Particle-mesh surrogate for d = 3 Vlasov dynamics (kick-drift-kick with
/// CIC deposit and interpolation, spectral field solve). Diagnostics only.
class ParticleRun {
 public:
  ParticleRun(ParticleEnsemble p, GridSpec grid, KernelSpec kernel, double dt, double mass = 1.0);

  const ParticleEnsemble& particles() const { return p_; }
  double time() const { return t_; }
  const std::vector<ParticleLogRow>& log() const { return log_; }

  void step();
  void advance(int count, int log_every = 1);
  void record();

 private:
  std::vector<Vec3> forces(Field* potential_out) const;

  ParticleEnsemble p_;
  GridSpec grid_;
  KernelSpec kernel_;
  double dt_;
  double mass_;
  double t_ = 0.0;
  std::vector<double> multiplier_;
  std::vector<ParticleLogRow> log_;
};

}  // namespace mfvl
