#pragma once

#include "asketch/common.hpp"

namespace asketch {

// First six entries of v, zero-padded when v is shorter.  Both error metrics
// below fix six terms, so estimates from models with m < 6 are padded.
Vector first_six(const Vector& v);

// Relative l2 error of the first six eigenvalue estimates:
// sqrt(sum (ref_i - est_i)^2 / sum ref_i^2).  Both inputs must have length 6.
double eigenvalue_error(const Vector& reference, const Vector& estimate);

// Spectral-norm distance between the projectors onto two n-dimensional
// subspaces, computed as the sine of the largest principal angle:
// sigma_max(estimate - reference (reference' estimate)).  Both arguments are
// m x n with orthonormal columns; the result lies in [0, 1].
double subspace_error(const Matrix& reference, const Matrix& estimate);

}  // namespace asketch
