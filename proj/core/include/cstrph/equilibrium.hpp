#pragma once

#include "cstrph/network.hpp"
#include "cstrph/types.hpp"

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace cstrph {

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Stability { Stable, Unstable, Marginal };

std::string to_string(Stability s);

/// |max Re lambda| below this is classified marginal.
inline constexpr double kMarginalTol = 1e-9;

struct Classification {
    Stability stability = Stability::Marginal;
    Eigen::VectorXcd eigenvalues;
    double max_real = 0.0;
};

struct SteadyState {
    double T = 0.0;
    Vector N;
    double U = 0.0;
    double q = 0.0;
    double Qdot_required = 0.0;
    Stability classification = Stability::Marginal;
    Eigen::VectorXcd eigenvalues;
    double max_real = 0.0;
    double residual = 0.0;  // scaled drift residual at (x, (q, Qdot_required))

    Vector x() const;
};

struct MassBalanceOptions {
    int max_iterations = 200;
    double tolerance = 1e-13;  // scaled by q * sum(c_in)
};

/// Steady mass balance 0 = dz (r_b - r_f) V + q (c_in - N/V) at fixed T, by
/// damped Newton from N = V c_in.
Vector mass_balance_steady(const ReactionNetwork& net, double T, double q,
                           const MassBalanceOptions& opts = {});

/// Net steady heat balance q (U_in - U(N(T), T)) / V + lambda (T_w - T).
double energy_residual(const ReactionNetwork& net, double T, double q, double T_w);

struct ScanOptions {
    int grid_points = 2000;
    double bisection_tol = 1e-6;  // K
};

/// All steady states in [T_lo, T_hi] under flow q and jacket temperature T_w.
/// Classification uses the jacket closure Qdot = lambda (T_w - T(x)).
std::vector<SteadyState> steady_states(const ReactionNetwork& net, double q, double T_w,
                                       double T_lo, double T_hi, const ScanOptions& opts = {});

using DriftFunction = std::function<Vector(const Vector&)>;

/// Central finite-difference Jacobian with h_i = 1e-6 max(|x_i|, 1).
Matrix drift_jacobian(const DriftFunction& f, const Vector& x);

Classification classify(const DriftFunction& f, const Vector& x);

/// Deterministic drift with the input held fixed.
Classification classify(const ReactionNetwork& net, const Vector& x, const InputVector& u);

/// Deterministic drift with the jacket closure Qdot = lambda (T_w - T(x)).
Classification classify_jacket(const ReactionNetwork& net, const Vector& x, double q, double T_w);

}  // namespace cstrph
