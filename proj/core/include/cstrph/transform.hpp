#pragma once

#include "cstrph/network.hpp"
#include "cstrph/phs.hpp"
#include "cstrph/thermo.hpp"
#include "cstrph/types.hpp"

namespace cstrph {

/// Operating point the availability Hamiltonian is centred on.
struct Setpoint {
    Vector x_star;        // (U*, N*)
    double T_star = 0.0;
    Vector pi_star;       // dS/dx at x*: (1/T*, -mu*^T/T*)
    double S_star = 0.0;
    double V_star = 0.0;
    InputVector u_star;   // nominal (q*, Qdot*)
    double residual = 0.0;  // scaled deterministic drift residual at (x*, u*)

    double U_star() const { return x_star(0); }
    Vector N_star() const { return x_star.tail(x_star.size() - 1); }
};

/// Tolerance on the scaled drift residual for a setpoint to count as steady.
inline constexpr double kSetpointResidualTol = 1e-8;

/// ||drift(x, u)|| with components divided by (|U|, N_j); rho plays no role.
double scaled_drift_residual(const ReactionNetwork& net, const Vector& x, const InputVector& u);

/// Setpoint with N* from the steady mass balance at (T*, q*) and Qdot* from
/// the steady energy balance. Throws ConvergenceError if the solve fails.
Setpoint make_setpoint(const ReactionNetwork& net, double T_star, double q_star);

/// Setpoint at a prescribed (N*, T*). q* is the least-squares fit of the steady
/// mass balance, Qdot* closes the energy balance, and `residual` reports how far
/// the pair is from an exact steady state.
Setpoint setpoint_at_state(const ReactionNetwork& net, const Vector& N_star, double T_star);

/// A(x) = S(x*) - S(x) + pi*^T (x - x*)
double availability(const ReactionNetwork& net, const Setpoint& sp, const Vector& x);

/// grad A = grad(-S)(x) + pi*
Vector availability_gradient(const ReactionNetwork& net, const Setpoint& sp, const Vector& x);

/// Hessian of A, identical to the Hessian of -S.
Matrix availability_hessian(const ReactionNetwork& net, const Vector& x);

/// Availability Hamiltonian bound to a setpoint.
class AvailabilityHamiltonian {
public:
    AvailabilityHamiltonian(ReactionNetwork net, Setpoint sp);

    double value(const Vector& x) const;
    Vector gradient(const Vector& x) const;
    Matrix hessian(const Vector& x) const;
    const Setpoint& setpoint() const { return sp_; }
    ScalarField field() const;

private:
    ReactionNetwork net_;
    Setpoint sp_;
};

/// y_bar = g^T grad A + delta u, with g and delta from the original structure.
Eigen::Vector2d transformed_output(const ReactionNetwork& net, const Setpoint& sp, const Vector& x,
                                   const InputVector& u);

/// ||R(x) pi*||_2: the gap between (J - R) grad(-S) and (J - R) grad A.
double equivalence_residual(const ReactionNetwork& net, const Setpoint& sp, const Vector& x,
                            DampingMode mode = DampingMode::Literal);

}  // namespace cstrph
