#pragma once

#include <Eigen/Dense>

#include "mfvl/grid.hpp"
#include "mfvl/linalg.hpp"

namespace mfvl {

/// ω = Σ_k λ_k |φ_k⟩⟨φ_k| with orbitals orthonormal under the h^d-weighted
/// inner product. Orbitals are stored as columns of an n^d x K matrix.
struct LowRankState {
  GridSpec grid;
  double eps = 1.0;
  double particles = 1.0;
  MatrixXc orbitals;
  Eigen::VectorXd occupations;

  Eigen::Index rank() const { return orbitals.cols(); }
  double trace() const { return occupations.sum(); }
  ComplexField orbital(Eigen::Index k) const;
  /// max |h^d Φ†Φ - I|.
  double orthonormality_defect() const;
  /// Checks shapes, 0 <= λ <= 1, orthonormality (1e-10) and Σλ = N (1e-8 N).
  void validate() const;
};

/// Full kernel A_ij ≈ A(x_i; x_j). The ℓ² matrix of the operator is h^d A.
struct DenseOperator {
  GridSpec grid;
  MatrixXc kernel;
  bool hermitian = false;

  MatrixXc matrix() const { return grid.cell_volume() * kernel; }
};

/// Largest grid (n^d) for which dense operators are materialized.
inline constexpr std::size_t kMaxDenseSize = 8192;

Field density(const LowRankState& state);
DenseOperator materialize(const LowRankState& state);

/// h^d Σ A_ii.
cplx trace(const DenseOperator& a);

struct TraceNormResult {
  double value = 0.0;
  bool from_singular_values = false;
};
/// Σ |eig(h^d A)|. Operators flagged hermitian tolerate a defect of 1e-8 and
/// are symmetrized; unflagged ones must be hermitian to 1e-10. Otherwise the
/// singular values are summed and the result is flagged.
TraceNormResult trace_norm(const DenseOperator& a);
/// Eigenvalues of the hermitian part of h^d A.
Eigen::VectorXd operator_eigenvalues(const DenseOperator& a);

/// tr|ω_a - ω_b| through the low-rank reduction.
double trace_distance(const LowRankState& a, const LowRankState& b);
/// tr|ω_a - B| with B dense.
double trace_distance(const LowRankState& a, const DenseOperator& b);

/// [x_axis, ω] as a dense kernel (x_i - y_i)_min ω(x; y), using the
/// minimal-image coordinate difference on the torus.
DenseOperator position_commutator(const DenseOperator& omega, int axis);
DenseOperator position_commutator(const LowRankState& omega, int axis);

/// Spectrum of i[x_axis, ω] computed in the span of {x φ_k, φ_k}.
/// Uses the plain coordinate x, so states must decay before the box edge;
/// a warning is emitted otherwise.
LowRankSpectrum commutator_spectrum(const LowRankState& omega, int axis);
double commutator_trace_norm(const LowRankState& omega, int axis);

/// Spectrum of i[g, ω] for a real multiplication operator g given by its
/// node values.
LowRankSpectrum multiplication_commutator_spectrum(const LowRankState& omega, const Eigen::VectorXd& g);

/// Diagonal of |[x_axis, ω]| as a field: the commutator density.
Field commutator_density(const LowRankState& omega, int axis);
Field commutator_density(const DenseOperator& omega, int axis);

/// Diagonal |A|(x; x) of the absolute value of a hermitian dense operator.
/// Throws NumericalError on diagonal entries below -1e-10.
Field absolute_diagonal(const DenseOperator& a);

/// Fraction of orbital mass within 2h of the box boundary (max over orbitals).
double boundary_mass(const LowRankState& state);

}  // namespace mfvl
