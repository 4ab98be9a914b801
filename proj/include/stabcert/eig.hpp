#pragma once

#include "stabcert/types.hpp"

namespace stabcert {

/// Full eigendecomposition of a symmetric matrix. Eigenvalues ascending;
/// eigenvectors are the matching columns of `vectors`.
struct EigResult {
  Vector values;
  Matrix vectors;
};

EigResult symmetric_eig(const Matrix& s);

/// Smallest eigenvalue only (same backend, values-only path).
double smallest_eigenvalue(const Matrix& s);

/// Frobenius-nearest positive semidefinite matrix: eigenvalues clamped at 0.
Matrix project_psd(const Matrix& s);

/// Eigenvalues clamped into [lo, hi]; project_psd is the lo=0, hi=inf case.
Matrix clamp_spectrum(const Matrix& s, double lo, double hi);

}  // namespace stabcert
