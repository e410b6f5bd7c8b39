#include "mfvl/linalg.hpp"

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include <string>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {

lapack_complex_double* as_lapack(MatrixXc& a) { return reinterpret_cast<lapack_complex_double*>(a.data()); }

Eigen::VectorXd zheevd(MatrixXc& a, char jobz) {
  require(a.rows() == a.cols(), "eigensolver needs a square matrix");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, jobz, 'L', n, as_lapack(a), n, w.data());
  if (info != 0) throw NumericalError("zheevd failed with info = " + std::to_string(info));
  return w;
}

}  // namespace

Eigen::VectorXd hermitian_eigenvalues(MatrixXc a) { return zheevd(a, 'N'); }

HermitianEigen hermitian_eigen(MatrixXc a) {
  HermitianEigen out;
  out.values = zheevd(a, 'V');
  out.vectors = std::move(a);
  return out;
}

Eigen::VectorXd singular_values(MatrixXc a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(m, n));
  if (s.size() == 0) return s;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, as_lapack(a), m, s.data(), nullptr, 1,
                                   nullptr, 1);
  if (info != 0) throw NumericalError("zgesdd failed with info = " + std::to_string(info));
  return s;
}

double hermiticity_defect(const MatrixXc& a) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / norm;
}

LowRankSpectrum low_rank_spectrum(const MatrixXc& u, const MatrixXc& b) {
  require(b.rows() == u.cols() && b.cols() == u.cols(), "low-rank core has the wrong shape");
  LowRankSpectrum out;
  if (u.cols() == 0) {
    out.vectors = MatrixXc(u.rows(), 0);
    return out;
  }
  Eigen::HouseholderQR<MatrixXc> qr(u);
  const Eigen::Index r = std::min(u.rows(), u.cols());
  MatrixXc rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  MatrixXc core = rmat * b * rmat.adjoint();
  core = 0.5 * (core + core.adjoint()).eval();
  auto eig = hermitian_eigen(core);
  MatrixXc q = qr.householderQ() * MatrixXc::Identity(u.rows(), r);
  out.values = eig.values;
  out.vectors = q * eig.vectors;
  return out;
}

}  // namespace mfvl
