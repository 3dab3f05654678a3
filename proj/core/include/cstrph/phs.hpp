#pragma once

#include "cstrph/network.hpp"
#include "cstrph/thermo.hpp"
#include "cstrph/types.hpp"

#include <functional>

namespace cstrph {

/// How the per-reaction damping coefficient (r_f - r_b) / (dz^T mu) is formed.
enum class DampingMode {
    /// The literal quotient. Inside the band |dz^T mu| <= kAffinityGuard the
    /// removable singularity is replaced by its log-mean limit.
    Literal,
    /// log-mean(r_f, r_b) / (R T), which assumes dz^T mu = R T ln(r_f / r_b).
    /// Only reproduces the mass balances for detailed-balance-consistent kinetics.
    LogMean,
};

inline constexpr double kAffinityGuard = 1e-9;

/// Forward and backward mass-action rates in mol/m^3/s, one entry per reaction.
struct RateVector {
    Vector forward;
    Vector backward;

    Vector net() const { return forward - backward; }
};

/// Structure matrices of the disturbed port-Hamiltonian CSTR at one state.
struct PhsEvaluation {
    Matrix J;      // (p+1)x(p+1), zero for the CSTR
    Matrix R;      // (p+1)x(p+1)
    Matrix g;      // (p+1)x2
    Vector a;      // (p+1) process-noise port
    Matrix gamma;  // (p+1)x2 input-noise port, equal to g
    Matrix sigma;  // 2x2 diag(rho2, rho3)
    Matrix delta;  // 2x2 feedthrough
    double M = 0.0;
    double theta = 0.0;
};

/// Ito drift and diffusion; diffusion columns map (dw1, dw2, dw3).
struct SdeFields {
    Vector drift;
    Matrix diffusion;
};

struct Assembly {
    PhsEvaluation phs;
    SdeFields sde;
    Vector grad_H;  // gradient of -S at the state
};

/// dz = z - z' (reactant minus product coefficients) as a p x l matrix, one
/// column per reaction. Species balances read dN = dz (r_b - r_f) V dt + ...
Matrix stoichiometry_change(const ReactionNetwork& net);

/// Arrhenius mass-action rates with c_j = N_j / V. Does not need a valid
/// thermodynamic state (zero mole numbers are fine).
RateVector reaction_rates(const ReactionNetwork& net, const Vector& N, double T);
RateVector reaction_rates(const ReactionNetwork& net, const ThermoState& state);

/// Inlet internal energy U_in = V c_in^T h(T_in) - P V, so that
/// (U_in - U)/V = c_in^T h(T_in) - N^T h(T)/V is the convective enthalpy flux density.
double inlet_internal_energy(const ReactionNetwork& net);

/// (a - b) / ln(a/b) with its limits: logmean(a, a) = a, logmean(a, 0) = 0.
double log_mean(double a, double b);

Matrix damping_matrix(const ReactionNetwork& net, const ThermoState& state,
                      DampingMode mode = DampingMode::Literal);

/// Input-independent structure at a state.
PhsEvaluation evaluate_structure(const ReactionNetwork& net, const ThermoState& state,
                                 DampingMode mode = DampingMode::Literal);

/// Drift (J - R) dH + g u and diffusion [a, gamma diag(u) sigma] for a structure.
SdeFields sde_fields(const PhsEvaluation& phs, const Vector& grad_H, const InputVector& u);

Assembly assemble(const ReactionNetwork& net, const ThermoState& state, const InputVector& u,
                  DampingMode mode = DampingMode::Literal);

struct NormCondition {
    bool holds = false;
    double lhs = 0.0;              // rho2^4 M^2 + rho3^4
    double rhs = 0.0;              // 4 theta^2
    double delta_frobenius = 0.0;  // ||delta||_F
};

/// Weak-disturbance condition under which delta is a valid feedthrough (||delta||_F < 1).
NormCondition check_norm_condition(const ReactionNetwork& net, const ThermoState& state);

/// Twice differentiable scalar function of the state x = (U, N).
struct ScalarField {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<Matrix(const Vector&)> hessian;
};

/// The port-Hamiltonian storage H = -S.
ScalarField neg_entropy_field(const ReactionNetwork& net);

/// Ito generator L[V] = dV^T f + 1/2 tr{V'' D D^T}.
double generator(const ScalarField& field, const Vector& x, const SdeFields& sde);
double generator(const ReactionNetwork& net, const ScalarField& field, const ThermoState& state,
                 const InputVector& u, DampingMode mode = DampingMode::Literal);

struct Theorem1Report {
    bool cond_trace = false;
    bool cond_delta = false;
    double trace_lhs = 0.0;  // 1/2 tr{H'' a a^T}
    double trace_rhs = 0.0;  // dH^T R dH
    double delta_min_eigenvalue = 0.0;
    Matrix delta_margin;     // delta - 1/2 sigma sigma^T o (gamma^T H'' gamma)
};

/// Necessary and sufficient stochastic-passivity conditions of a disturbed
/// port-Hamiltonian system with respect to the storage `H`.
Theorem1Report check_theorem1(const ReactionNetwork& net, const ThermoState& state,
                              const ScalarField& H, DampingMode mode = DampingMode::Literal);

struct Theorem2Report {
    bool holds = false;
    double lhs = 0.0;  // 1/2 rho1^2 V* sum(W)
    double rhs = 0.0;  // sum_i (r_f,i - r_b,i) dz_i^T mu / T
    Matrix W;
};

/// Reaction-noise condition for passivity of the availability-transformed CSTR.
Theorem2Report check_theorem2(const ReactionNetwork& net, const ThermoState& state, double V_star);

/// Port data needed to close two systems in negative feedback.
struct PortSystem {
    Matrix J;
    Matrix R;
    Matrix g;
    Matrix delta;
};

struct Interconnection {
    Matrix J;
    Matrix R;
};

PortSystem port_system(const PhsEvaluation& phs);

/// Negative feedback u1 = -y2, u2 = y1. Requires ||delta_i||_F < 1.
Interconnection interconnect(const PortSystem& sys1, const PortSystem& sys2);

}  // namespace cstrph
