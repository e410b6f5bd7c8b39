#include "mfvl/operators.hpp"

#include <cmath>
#include <sstream>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {

Eigen::VectorXd coordinates(const GridSpec& grid, int axis) {
  require(axis >= 0 && axis < grid.dim(), "axis out of range");
  Eigen::VectorXd x(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) x[static_cast<Eigen::Index>(i)] = grid.position(i)[axis];
  return x;
}

void require_dense_size(const GridSpec& grid) {
  require(grid.size() <= kMaxDenseSize, "grid too large for dense operators");
}

Field diagonal_from_spectrum(const GridSpec& grid, const Eigen::VectorXd& values, const MatrixXc& vectors) {
  Field out(grid);
  const double inv_w = 1.0 / grid.cell_volume();
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    const double mu = std::abs(values[j]);
    if (mu == 0.0) continue;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) out[static_cast<std::size_t>(i)] += mu * std::norm(vectors(i, j));
  }
  for (auto& v : out.values) v *= inv_w;
  return out;
}

}  // namespace

ComplexField LowRankState::orbital(Eigen::Index k) const {
  ComplexField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = orbitals(static_cast<Eigen::Index>(i), k);
  return f;
}

double LowRankState::orthonormality_defect() const {
  if (rank() == 0) return 0.0;
  MatrixXc g = grid.cell_volume() * (orbitals.adjoint() * orbitals);
  g -= MatrixXc::Identity(rank(), rank());
  return g.cwiseAbs().maxCoeff();
}

void LowRankState::validate() const {
  require(orbitals.rows() == static_cast<Eigen::Index>(grid.size()), "orbital length does not match the grid");
  require(occupations.size() == orbitals.cols(), "one occupation per orbital is required");
  require(eps > 0.0, "eps must be positive");
  for (Eigen::Index k = 0; k < occupations.size(); ++k) {
    require(occupations[k] >= 0.0 && occupations[k] <= 1.0, "occupations must lie in [0, 1]");
  }
  const double defect = orthonormality_defect();
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "orbitals are not orthonormal (defect " << defect << ")";
    throw ValidationError(msg.str());
  }
  require(std::abs(trace() - particles) <= 1e-8 * std::max(1.0, particles), "occupations must sum to N");
}

Field density(const LowRankState& state) {
  Field rho(state.grid);
  for (Eigen::Index k = 0; k < state.rank(); ++k) {
    const double lambda = state.occupations[k];
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += lambda * std::norm(state.orbitals(static_cast<Eigen::Index>(i), k));
  }
  return rho;
}

DenseOperator materialize(const LowRankState& state) {
  require_dense_size(state.grid);
  DenseOperator a;
  a.grid = state.grid;
  a.hermitian = true;
  a.kernel = state.orbitals * state.occupations.asDiagonal() * state.orbitals.adjoint();
  return a;
}

cplx trace(const DenseOperator& a) { return a.kernel.diagonal().sum() * a.grid.cell_volume(); }

TraceNormResult trace_norm(const DenseOperator& a) {
  TraceNormResult r;
  const double defect = hermiticity_defect(a.kernel);
  const double tol = a.hermitian ? 1e-8 : 1e-10;
  MatrixXc m = a.matrix();
  if (defect <= tol) {
    m = 0.5 * (m + m.adjoint()).eval();
    r.value = hermitian_eigenvalues(std::move(m)).cwiseAbs().sum();
  } else {
    r.value = singular_values(std::move(m)).sum();
    r.from_singular_values = true;
  }
  return r;
}

Eigen::VectorXd operator_eigenvalues(const DenseOperator& a) {
  MatrixXc m = a.matrix();
  m = 0.5 * (m + m.adjoint()).eval();
  return hermitian_eigenvalues(std::move(m));
}

double trace_distance(const LowRankState& a, const LowRankState& b) {
  require(a.grid == b.grid, "states live on different grids");
  const Eigen::Index ka = a.rank();
  const Eigen::Index kb = b.rank();
  MatrixXc u(a.orbitals.rows(), ka + kb);
  u << a.orbitals, b.orbitals;
  u *= std::sqrt(a.grid.cell_volume());
  MatrixXc core = MatrixXc::Zero(ka + kb, ka + kb);
  for (Eigen::Index k = 0; k < ka; ++k) core(k, k) = a.occupations[k];
  for (Eigen::Index k = 0; k < kb; ++k) core(ka + k, ka + k) = -b.occupations[k];
  return low_rank_spectrum(u, core).values.cwiseAbs().sum();
}

double trace_distance(const LowRankState& a, const DenseOperator& b) {
  require(a.grid == b.grid, "operators live on different grids");
  DenseOperator diff = materialize(a);
  diff.kernel -= b.kernel;
  diff.hermitian = b.hermitian;
  return trace_norm(diff).value;
}

DenseOperator position_commutator(const DenseOperator& omega, int axis) {
  const Eigen::VectorXd x = coordinates(omega.grid, axis);
  const double L = omega.grid.length();
  DenseOperator c;
  c.grid = omega.grid;
  c.hermitian = false;
  c.kernel.resize(omega.kernel.rows(), omega.kernel.cols());
  for (Eigen::Index j = 0; j < c.kernel.cols(); ++j) {
    for (Eigen::Index i = 0; i < c.kernel.rows(); ++i) {
      c.kernel(i, j) = minimal_image(x[i] - x[j], L) * omega.kernel(i, j);
    }
  }
  return c;
}

double boundary_mass(const LowRankState& state) {
  const int n = state.grid.points();
  std::vector<bool> near(state.grid.size(), false);
  for (std::size_t i = 0; i < near.size(); ++i) {
    auto idx = state.grid.unravel(i);
    for (int a = 0; a < state.grid.dim(); ++a) {
      if (idx[a] <= 2 || idx[a] >= n - 2) near[i] = true;
    }
  }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < state.rank(); ++k) {
    double m = 0.0;
    for (std::size_t i = 0; i < near.size(); ++i) {
      if (near[i]) m += std::norm(state.orbitals(static_cast<Eigen::Index>(i), k));
    }
    worst = std::max(worst, m * state.grid.cell_volume());
  }
  return worst;
}

namespace {
void check_boundary(const LowRankState& state) {
  const double m = boundary_mass(state);
  if (m > 1e-6) {
    std::ostringstream msg;
    msg << "orbital mass near the box boundary is " << m << "; position multiplication wraps around";
    warn(msg.str());
  }
}
}  // namespace

DenseOperator position_commutator(const LowRankState& omega, int axis) {
  check_boundary(omega);
  return position_commutator(materialize(omega), axis);
}

LowRankSpectrum multiplication_commutator_spectrum(const LowRankState& omega, const Eigen::VectorXd& g) {
  require(g.size() == omega.orbitals.rows(), "multiplier length does not match the grid");
  const Eigen::Index k = omega.rank();
  MatrixXc u(omega.orbitals.rows(), 2 * k);
  u.leftCols(k) = g.asDiagonal() * omega.orbitals;
  u.rightCols(k) = omega.orbitals;
  u *= std::sqrt(omega.grid.cell_volume());
  // i[g, ω] = U [[0, iΛ], [-iΛ, 0]] U†
  MatrixXc core = MatrixXc::Zero(2 * k, 2 * k);
  for (Eigen::Index j = 0; j < k; ++j) {
    core(j, k + j) = cplx(0.0, omega.occupations[j]);
    core(k + j, j) = cplx(0.0, -omega.occupations[j]);
  }
  return low_rank_spectrum(u, core);
}

LowRankSpectrum commutator_spectrum(const LowRankState& omega, int axis) {
  check_boundary(omega);
  return multiplication_commutator_spectrum(omega, coordinates(omega.grid, axis));
}

double commutator_trace_norm(const LowRankState& omega, int axis) {
  return commutator_spectrum(omega, axis).values.cwiseAbs().sum();
}

Field commutator_density(const LowRankState& omega, int axis) {
  auto spec = commutator_spectrum(omega, axis);
  return diagonal_from_spectrum(omega.grid, spec.values, spec.vectors);
}

Field absolute_diagonal(const DenseOperator& a) {
  MatrixXc m = a.matrix();
  m = 0.5 * (m + m.adjoint()).eval();
  auto eig = hermitian_eigen(std::move(m));
  Field diag = diagonal_from_spectrum(a.grid, eig.values, eig.vectors);
  for (double v : diag.values) {
    if (v < -1e-10) throw NumericalError("negative diagonal in operator absolute value");
  }
  return diag;
}

Field commutator_density(const DenseOperator& omega, int axis) {
  DenseOperator c = position_commutator(omega, axis);
  c.kernel *= cplx(0.0, 1.0);
  c.hermitian = true;
  return absolute_diagonal(c);
}

}  // namespace mfvl
