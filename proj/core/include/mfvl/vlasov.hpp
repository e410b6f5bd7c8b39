#pragma once

#include <array>
#include <vector>

#include "mfvl/grid.hpp"
#include "mfvl/kernel.hpp"
#include "mfvl/operators.hpp"
#include "mfvl/transforms.hpp"

namespace mfvl {

/// Kinetic mass for which Vlasov characteristics match the Hartree generator
/// -ε²Δ + U (symbol |v|² + U, hence dx/dt = 2v).
inline constexpr double kHartreeMatchedMass = 0.5;

struct VlasovLogRow {
  double t = 0.0;
  double mass = 0.0;
  std::array<double, 3> momentum{0.0, 0.0, 0.0};
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double l2 = 0.0;
  std::array<double, 7> moments{};
  /// max over |β| = k of sup |∂^β f|, k = 0, 1, 2 (all 2d phase-space
  /// variables, mixed derivatives included). A proxy for flow regularity.
  std::array<double, 3> derivative_sup{0.0, 0.0, 0.0};
};

/// Ψ = V * ϱ with ϱ = ∫ f dv.
Field vlasov_potential(const PhaseSpaceField& f, const KernelSpec& kernel);

/// Conserved quantities of ∂_t f + (v/m)·∇_x f - ∇Ψ·∇_v f = 0.
VlasovLogRow vlasov_diagnostics(const PhaseSpaceField& f, const KernelSpec& kernel, double mass, double t = 0.0);

/// Semi-Lagrangian Strang scheme with trigonometric interpolation:
/// half x-advection, field solve, full v-advection, half x-advection.
class VlasovRun {
 public:
  /// `self_consistent = false` freezes the field at zero (free transport).
  VlasovRun(PhaseSpaceField f, KernelSpec kernel, double dt, double mass = 1.0, bool self_consistent = true);

  const PhaseSpaceField& f() const { return f_; }
  const KernelSpec& kernel() const { return kernel_; }
  double time() const { return t_; }
  double dt() const { return dt_; }
  double mass() const { return mass_; }
  const std::vector<VlasovLogRow>& log() const { return log_; }

  /// Throws NumericalError if max|v|/m dt > L_x/4 or max|∇Ψ| dt > L_v/4.
  void step(double dt);
  void step() { step(dt_); }
  void advance(int count, int log_every = 1);
  void record();

 private:
  void advect_x(double tau);
  void advect_v(const std::vector<Field>& force, double tau);

  PhaseSpaceField f_;
  KernelSpec kernel_;
  double dt_;
  double mass_;
  bool self_consistent_;
  double t_ = 0.0;
  std::vector<double> multiplier_;
  std::vector<VlasovLogRow> log_;
};

VlasovRun vlasov_step(VlasovRun run);

/// ‖(v/m)·∇_x f - ∇Ψ·∇_v f‖_{L²}; zero for stationary solutions.
double steady_state_residual(const PhaseSpaceField& f, const KernelSpec& kernel, double mass = 1.0);

/// Residuals of the Weyl-quantized Vlasov equation at the middle snapshot,
/// using a central difference over snapshots spaced `spacing` apart (d = 1).
struct WeylVlasovResidual {
  /// tr|iε∂_t ω̃ - [-ε²Δ, ω̃] - A|, A(x;y) = ∇Ũ((x+y)/2)(x-y) ω̃(x;y).
  double weyl = 0.0;
  /// tr|iε∂_t ω̃ - [-ε²Δ + Ũ, ω̃]|, which equals tr|B| up to the O(spacing²) error.
  double hartree = 0.0;
};
WeylVlasovResidual weyl_vlasov_residual(const std::vector<PhaseSpaceField>& snapshots, double spacing,
                                        const TransformPlan& plan, const KernelSpec& kernel);

/// Kernel [-ε²Δ, ω] by spectral differentiation of both kernel indices (d = 1).
DenseOperator kinetic_commutator(const DenseOperator& omega, double eps);

/// Values of a periodic field at the midpoints x_j + (x_i - x_j)_min / 2,
/// obtained by spectral upsampling to a grid of spacing h/2 (d = 1).
/// Returned as an n x n matrix indexed (i, j).
Eigen::MatrixXd midpoint_values(const Field& u);

}  // namespace mfvl
