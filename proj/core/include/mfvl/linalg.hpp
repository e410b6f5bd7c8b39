#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mfvl {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

struct HermitianEigen {
  Eigen::VectorXd values;  // ascending
  MatrixXc vectors;        // columns, orthonormal in C^n
};

/// Eigenvalues of a hermitian matrix (lower triangle is read). LAPACK zheevd.
Eigen::VectorXd hermitian_eigenvalues(MatrixXc a);
/// Full eigendecomposition of a hermitian matrix.
HermitianEigen hermitian_eigen(MatrixXc a);
/// Singular values (descending). LAPACK zgesdd.
Eigen::VectorXd singular_values(MatrixXc a);

/// ‖A - A†‖_F / ‖A‖_F (0 for the zero matrix).
double hermiticity_defect(const MatrixXc& a);

/// Spectral data of the hermitian operator U B U† restricted to range(U),
/// where the columns of U live in C^n with plain Euclidean inner product.
/// The reduction goes through a QR factorization of U and an eigensolve of
/// R B R†, so the cost is O(n r^2) instead of O(n^3).
struct LowRankSpectrum {
  Eigen::VectorXd values;
  MatrixXc vectors;  // n x r', orthonormal columns
};
LowRankSpectrum low_rank_spectrum(const MatrixXc& u, const MatrixXc& b);

}  // namespace mfvl
