#pragma once

#include "cstrph/types.hpp"

namespace cstrph {

/// Smallest eigenvalue of the symmetric part of `m`.
double min_symmetric_eigenvalue(const Matrix& m);

/// Spectral norm of the symmetric part of `m` (largest |eigenvalue|).
double symmetric_spectral_norm(const Matrix& m);

/// PSD test: smallest eigenvalue >= -rel_tol * scale, where scale defaults to
/// the spectral norm of `m` itself.
bool is_positive_semidefinite(const Matrix& m, double rel_tol = 1e-12, double scale = -1.0);

}  // namespace cstrph
