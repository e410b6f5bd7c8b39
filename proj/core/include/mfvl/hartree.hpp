#pragma once

#include <vector>

#include "mfvl/kernel.hpp"
#include "mfvl/operators.hpp"

namespace mfvl {

struct HartreeEnergy {
  double kinetic = 0.0;    // tr(-ε²Δ ω)
  double potential = 0.0;  // (N/2) ⟨ϱ̄, V * ϱ̄⟩
  double total() const { return kinetic + potential; }
};

struct HartreeLogRow {
  double t = 0.0;
  double trace = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double orthonormality_defect = 0.0;
  double min_occupation = 0.0;
  double max_occupation = 0.0;
};

/// Normalized density ϱ̄ = ϱ / N (unit mass when tr ω = N).
Field normalized_density(const LowRankState& state);
/// Mean field U = V * ϱ̄.
Field mean_field(const LowRankState& state, const KernelSpec& kernel);
HartreeEnergy hartree_energy(const LowRankState& state, const KernelSpec& kernel);

/// Orbital-wise evolution of iε∂_t φ_k = (-ε²Δ + V * ϱ̄_t) φ_k with frozen
/// occupations, by Strang splitting: half kinetic step, potential step with
/// the density of the half-stepped orbitals, half kinetic step. The potential
/// step leaves |φ_k| unchanged, so the scheme is exactly time-reversible.
class HartreeRun {
 public:
  HartreeRun(LowRankState state, KernelSpec kernel, double dt);

  const LowRankState& state() const { return state_; }
  const KernelSpec& kernel() const { return kernel_; }
  double time() const { return t_; }
  double dt() const { return dt_; }
  const std::vector<HartreeLogRow>& log() const { return log_; }

  /// One Strang step of size `dt` (negative values step backwards).
  /// Throws NumericalError if the trace drifts by more than 1e-10 N or an
  /// orbital norm by more than 1e-10.
  void step(double dt);
  void step() { step(dt_); }
  /// `count` steps of the configured dt, logging every `log_every` steps.
  void advance(int count, int log_every = 1);
  /// Appends a conservation-log row for the current state.
  void record();

 private:
  void prepare_kinetic(double dt);

  LowRankState state_;
  KernelSpec kernel_;
  double dt_;
  double t_ = 0.0;
  std::vector<double> multiplier_;
  std::vector<double> k2_;
  double kinetic_dt_ = 0.0;
  std::vector<cplx> kinetic_phase_;
  std::vector<double> norms0_;
  std::vector<HartreeLogRow> log_;
};

/// Free function form of one step.
HartreeRun hartree_step(HartreeRun run);

}  // namespace mfvl
