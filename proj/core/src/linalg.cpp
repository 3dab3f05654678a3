#include "cstrph/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace cstrph {

namespace {

Vector symmetric_eigenvalues(const Matrix& m)
{
    if (m.size() == 0) return Vector();
    const Matrix sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

}  // namespace

double min_symmetric_eigenvalue(const Matrix& m)
{
    const Vector ev = symmetric_eigenvalues(m);
    return ev.size() == 0 ? 0.0 : ev.minCoeff();
}

double symmetric_spectral_norm(const Matrix& m)
{
    const Vector ev = symmetric_eigenvalues(m);
    return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

bool is_positive_semidefinite(const Matrix& m, double rel_tol, double scale)
{
    const Vector ev = symmetric_eigenvalues(m);
    if (ev.size() == 0) return true;
    if (scale < 0.0) scale = ev.cwiseAbs().maxCoeff();
    return ev.minCoeff() >= -rel_tol * scale;
}

}  // namespace cstrph
