#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfvl/kernel.hpp"
#include "mfvl/operators.hpp"

namespace mfvl {

/// Built-in radial shapes s(u) of a squared radius u:
///   gaussian            exp(-u/2)
///   bump                exp(1 - 1/(1-u)) for u < 1, else 0
///   polynomial-cutoff   (1-u)^4 for u < 1, else 0
enum class ShapeKind { gaussian, bump, polynomial_cutoff };

std::string to_string(ShapeKind kind);
/// Throws ValidationError for unknown names.
ShapeKind parse_shape_kind(const std::string& name);
double shape_value(ShapeKind kind, double u);
/// ds/du.
double shape_derivative(ShapeKind kind, double u);
/// Squared radius beyond which the shape is zero or below 1e-16.
double shape_support(ShapeKind kind);

/// Phase-space weight M(q, p) = A s(|q - q0|²/a² + |p - p0|²/b²), with A
/// fixed by ∬ M = 1 on the quadrature nodes.
struct WeightFunction {
  ShapeKind shape = ShapeKind::bump;
  std::vector<double> q0{0.0};
  std::vector<double> p0{0.0};
  /// Defaults keep A below 1/(2π) in d = 1, so the default state is fermionic.
  double q_radius = 2.5;
  double p_radius = 2.5;

  double unnormalized(const double* q, const double* p) const;
};

struct CoherentSpec {
  WeightFunction M;
  double eps = 0.1;
  /// Gaussian width δ of the coherent states; <= 0 selects auto_delta.
  double delta = 0.0;
  /// Node spacings; <= 0 selects δ/2 and 2πε/(10δ).
  double dq = 0.0;
  double dp = 0.0;
};

struct CoherentResult {
  LowRankState state;
  /// Eigenvalue mass moved by clipping into [0, 1], before renormalization.
  double clipped_mass = 0.0;
  /// Quadrature trace before rescaling to N.
  double raw_trace = 0.0;
  /// Single-node case: the node weight needed for tr ω = N (the returned
  /// state is the normalized projector with occupation 1).
  double required_single_weight = 0.0;
  /// Normalization constant A of M and ∬|∇_p M| (fine quadrature).
  double amplitude = 0.0;
  double grad_p_l1 = 0.0;
  std::size_t nodes = 0;
};

/// f_{q,p}(x) = ε^{-d/2} e^{i p·x/ε} G(x - q), G(x) = e^{-|x|²/2δ²}/(πδ²)^{d/4} (unit L² norm),
/// with x - q taken as a minimal image; ‖f‖² = ε^{-d}.
ComplexField coherent_state(const GridSpec& grid, const double* q, const double* p, double delta, double eps);

/// One quadrature node with its total weight c = w M(q, p).
struct CoherentNode {
  std::array<double, 3> q{0.0, 0.0, 0.0};
  std::array<double, 3> p{0.0, 0.0, 0.0};
  double weight = 0.0;
};

/// Tensor node set of a spec (dq x dp spacing, centred on (q0, p0), covering
/// supp M) with weights normalized so Σ c = 1. Also returns A.
std::vector<CoherentNode> coherent_nodes(const CoherentSpec& spec, int d, double* amplitude = nullptr);

/// Σ_j c_j |f_j⟩⟨f_j| canonicalized as below, for an explicit node list.
CoherentResult coherent_superposition(const std::vector<CoherentNode>& nodes, const GridSpec& grid, double eps,
                                      double delta);

/// sqrt(ε) clamped to the resolvable window 3h <= δ <= ε/(6 h_v) = L/(12π);
/// throws ValidationError if the window is empty.
double auto_delta(double eps, const GridSpec& grid);

/// ω_N = Σ_j w_j M(q_j, p_j) |f_j⟩⟨f_j| canonicalized to orthonormal
/// orbitals, rescaled to tr ω = N = ε^{-d}, and clipped to [0, 1].
/// Throws NumericalError if the clipped mass exceeds 1e-3 N.
CoherentResult coherent_superposition(const CoherentSpec& spec, const GridSpec& grid);

/// Rank-1 coherent projector |f⟩⟨f|/‖f‖² with occupation 1 and N = 1.
LowRankState coherent_projector(const GridSpec& grid, const double* q, const double* p, double delta, double eps);

/// ∬ |∇_p M| dq dp of the normalized weight, by midpoint quadrature with
/// `resolution` cells per axis (d = 1).
double weight_grad_p_l1(const WeightFunction& M, double amplitude, int resolution = 2000);

struct FermiSeaResult {
  LowRankState state;
  /// True if modes at the Fermi surface had to be chosen by lexicographic order.
  bool tie_broken = false;
  double fermi_radius = 0.0;
};

/// Plane waves e^{ik·x}/L^{d/2} on the N lowest |k|, occupation 1, ε = N^{-1/d}.
FermiSeaResult fermi_sea(const GridSpec& grid, int N);

struct SteadySpec {
  ShapeKind phi = ShapeKind::gaussian;
  /// Energy scale T in Φ(E) = s(E / T).
  double energy_scale = 1.0;
  /// Width of the regularizing Gaussian G (mollifier of the interaction).
  double g_width = 0.25;
  double damping = 0.5;
  double tolerance = 1e-11;
  int max_iterations = 2000;
  /// With `normalize`, f is scaled to this mass; otherwise f = amplitude Φ(H).
  double target_mass = 1.0;
  bool normalize = true;
  double amplitude = 1.0;
  /// Width of the Gaussian density used to seed the potential.
  double seed_width = 1.0;
  double kinetic_mass = 1.0;
};

struct SteadyResult {
  bool converged = false;
  int iterations = 0;
  /// Final sup-norm change of the potential.
  double fixed_point_residual = 0.0;
  /// steady_state_residual of the returned f under `effective_kernel`.
  double steady_residual = 0.0;
  /// |∬ f - ∬ A Φ(H(Ψ))| for the converged potential.
  double self_consistency_error = 0.0;
  PhaseSpaceField f;
  Field potential;
  KernelSpec effective_kernel;
};

/// Damped Picard iteration for f = A Φ(|v|²/(2m) + Ψ_G), Ψ_G = (V * G) * ϱ.
/// The returned state is stationary for the mollified kernel V * G, which is
/// reported as `effective_kernel`. Requires gamma = -1. On non-convergence f
/// is left empty and only diagnostics are filled.
SteadyResult steady_state(const SteadySpec& spec, const KernelSpec& kernel, const GridSpec& xgrid,
                          const GridSpec& vgrid);

/// Energy profile Φ(E) of a steady spec.
double steady_profile(const SteadySpec& spec, double energy);

}  // namespace mfvl
