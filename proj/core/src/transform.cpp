#include "cstrph/transform.hpp"

#include "cstrph/equilibrium.hpp"

#include <cmath>
#include <stdexcept>

namespace cstrph {

double scaled_drift_residual(const ReactionNetwork& net, const Vector& x, const InputVector& u)
{
    const ThermoState state = ThermoState::from_vector(net, x);
    const Vector drift = assemble(net, state, u).sde.drift;
    Vector scaled(drift.size());
    scaled(0) = drift(0) / (x(0) != 0.0 ? std::abs(x(0)) : 1.0);
    for (Eigen::Index j = 1; j < x.size(); ++j) scaled(j) = drift(j) / x(j);
    return scaled.norm();
}

namespace {

Setpoint build_setpoint(const ReactionNetwork& net, const Vector& N, double T, double q)
{
    const ThermoState state = ThermoState::from_temperature(net, N, T);
    Setpoint sp;
    sp.x_star = state.x();
    sp.T_star = state.T();
    sp.pi_star = entropy_costate(state);
    sp.S_star = state.S();
    sp.V_star = net.reactor.V;
    const double open_energy = assemble(net, state, InputVector{q, 0.0}).sde.drift(0);
    sp.u_star = InputVector{q, -open_energy};
    sp.residual = scaled_drift_residual(net, sp.x_star, sp.u_star);
    return sp;
}

}  // namespace

Setpoint make_setpoint(const ReactionNetwork& net, double T_star, double q_star)
{
    if (!(T_star > 0.0)) throw std::invalid_argument("T_star must be positive");
    if (!(q_star >= 0.0)) throw std::invalid_argument("q_star must be non-negative");
    const Vector N = mass_balance_steady(net, T_star, q_star);
    return build_setpoint(net, N, T_star, q_star);
}

Setpoint setpoint_at_state(const ReactionNetwork& net, const Vector& N_star, double T_star)
{
    if (!(T_star > 0.0)) throw std::invalid_argument("T_star must be positive");
    const ThermoState state = ThermoState::from_temperature(net, N_star, T_star);
    const PhsEvaluation e = evaluate_structure(net, state);
    const auto p = N_star.size();
    const Vector reaction = -(e.R * neg_entropy_gradient(state)).tail(p);
    const Vector dilution = e.g.col(0).tail(p);
    const double dd = dilution.squaredNorm();
    const double q = dd > 0.0 ? -dilution.dot(reaction) / dd : 0.0;
    return build_setpoint(net, N_star, T_star, q);
}

double availability(const ReactionNetwork& net, const Setpoint& sp, const Vector& x)
{
    const ThermoState state = ThermoState::from_vector(net, x);
    return sp.S_star - state.S() + sp.pi_star.dot(x - sp.x_star);
}

Vector availability_gradient(const ReactionNetwork& net, const Setpoint& sp, const Vector& x)
{
    return neg_entropy_gradient(ThermoState::from_vector(net, x)) + sp.pi_star;
}

Matrix availability_hessian(const ReactionNetwork& net, const Vector& x)
{
    return neg_entropy_hessian(net, ThermoState::from_vector(net, x));
}

AvailabilityHamiltonian::AvailabilityHamiltonian(ReactionNetwork net, Setpoint sp)
    : net_(std::move(net)), sp_(std::move(sp))
{
}

double AvailabilityHamiltonian::value(const Vector& x) const { return availability(net_, sp_, x); }

Vector AvailabilityHamiltonian::gradient(const Vector& x) const
{
    return availability_gradient(net_, sp_, x);
}

Matrix AvailabilityHamiltonian::hessian(const Vector& x) const
{
    return availability_hessian(net_, x);
}

ScalarField AvailabilityHamiltonian::field() const
{
    ScalarField f;
    f.value = [self = *this](const Vector& x) { return self.value(x); };
    f.gradient = [self = *this](const Vector& x) { return self.gradient(x); };
    f.hessian = [self = *this](const Vector& x) { return self.hessian(x); };
    return f;
}

Eigen::Vector2d transformed_output(const ReactionNetwork& net, const Setpoint& sp, const Vector& x,
                                   const InputVector& u)
{
    const ThermoState state = ThermoState::from_vector(net, x);
    const PhsEvaluation e = evaluate_structure(net, state);
    const Vector grad = neg_entropy_gradient(state) + sp.pi_star;
    return e.g.transpose() * grad + e.delta * u.as_vector();
}

double equivalence_residual(const ReactionNetwork& net, const Setpoint& sp, const Vector& x,
                            DampingMode mode)
{
    const ThermoState state = ThermoState::from_vector(net, x);
    return (damping_matrix(net, state, mode) * sp.pi_star).norm();
}

}  // namespace cstrph
