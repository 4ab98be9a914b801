#include "stabcert/eig.hpp"

#include <algorithm>

#ifdef STABCERT_HAVE_LAPACKE
#include <lapacke.h>
#else
#include <Eigen/Eigenvalues>
#endif

namespace stabcert {

namespace {

void check_square(const Matrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("matrix must be square");
}

}  // namespace

#ifdef STABCERT_HAVE_LAPACKE

EigResult symmetric_eig(const Matrix& s) {
  check_square(s);
  const lapack_int n = static_cast<lapack_int>(s.rows());
  EigResult out;
  out.vectors = (s + s.transpose()) / 2.0;
  out.values.resize(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, out.vectors.data(), n,
                     out.values.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed with info=" + std::to_string(info));
  }
  return out;
}

double smallest_eigenvalue(const Matrix& s) {
  check_square(s);
  const lapack_int n = static_cast<lapack_int>(s.rows());
  Matrix work = (s + s.transpose()) / 2.0;
  Vector values(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n,
                                         work.data(), n, values.data());
  if (info != 0) {
    throw NumericalError("dsyevd failed with info=" + std::to_string(info));
  }
  return values(0);
}

#else

EigResult symmetric_eig(const Matrix& s) {
  check_square(s);
  Eigen::SelfAdjointEigenSolver<Matrix> es((s + s.transpose()) / 2.0);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigensolver did not converge");
  }
  return EigResult{es.eigenvalues(), es.eigenvectors()};
}

double smallest_eigenvalue(const Matrix& s) {
  return symmetric_eig(s).values(0);
}

#endif

Matrix project_psd(const Matrix& s) {
  EigResult e = symmetric_eig(s);
  if (e.values(e.values.size() - 1) <= 0.0) {
    return Matrix::Zero(s.rows(), s.cols());
  }
  if (e.values(0) >= 0.0) return (s + s.transpose()) / 2.0;
  Vector clamped = e.values.cwiseMax(0.0);
  return e.vectors * clamped.asDiagonal() * e.vectors.transpose();
}

Matrix clamp_spectrum(const Matrix& s, double lo, double hi) {
  EigResult e = symmetric_eig(s);
  if (e.values(0) >= lo && e.values(e.values.size() - 1) <= hi) {
    return (s + s.transpose()) / 2.0;
  }
  Vector clamped = e.values.cwiseMax(lo).cwiseMin(hi);
  return e.vectors * clamped.asDiagonal() * e.vectors.transpose();
}

}  // namespace stabcert
