#pragma once

#include "cstrph/network.hpp"
#include "cstrph/types.hpp"

namespace cstrph {

/// Smallest admissible mole number in thermodynamic evaluations (log terms).
inline constexpr double kThermoMolesFloor = 1e-12;

/// Extensive state x = (U, N_1..N_p) with the intensive quantities derived
/// from it. Construction validates the domain; a ThermoState is always
/// internally consistent.
class ThermoState {
public:
    /// Throws DomainError if any N_j <= kThermoMolesFloor or the implied T <= 0.
    static ThermoState from_extensive(const ReactionNetwork& net, double U, const Vector& N);
    static ThermoState from_vector(const ReactionNetwork& net, const Vector& x);
    static ThermoState from_temperature(const ReactionNetwork& net, const Vector& N, double T);

    double U() const { return U_; }
    const Vector& N() const { return N_; }
    double T() const { return T_; }
    const Vector& h() const { return h_; }
    const Vector& mu_over_T() const { return mu_over_T_; }
    double S() const { return S_; }
    /// theta = T^2 N^T C_P
    double theta() const { return theta_; }
    double total_moles() const { return N_.sum(); }

    /// x = (U, N^T)^T
    Vector x() const;

private:
    ThermoState() = default;

    double U_ = 0.0;
    Vector N_;
    double T_ = 0.0;
    Vector h_;
    Vector mu_over_T_;
    double S_ = 0.0;
    double theta_ = 0.0;
};

/// T = (U + PV - N^T h_ref) / (N^T C_P) + T_ref
double temperature(const ReactionNetwork& net, double U, const Vector& N);

/// U = N^T [C_P (T - T_ref) + h_ref] - PV
double internal_energy(const ReactionNetwork& net, const Vector& N, double T);

/// Molar enthalpies h_j = C_Pj (T - T_ref) + h_ref,j.
Vector enthalpy(const ReactionNetwork& net, double T);

/// mu_j / T = -C_Pj ln(T/T_ref) + R ln(N_j / sum N) - s_ref,j + h_j / T
Vector chem_potential_over_T(const ReactionNetwork& net, const Vector& N, double T);

/// S = sum_j N_j [C_Pj ln(T/T_ref) + s_ref,j - R ln(N_j / sum N)]
double entropy(const ReactionNetwork& net, const Vector& N, double T);

/// Gradient of -S with respect to x = (U, N): (-1/T, mu^T/T)^T.
Vector neg_entropy_gradient(const ThermoState& state);

/// Hessian of -S with respect to x:
///   [[ 1/theta,   -h^T/theta                                  ],
///    [ -h/theta,  h h^T/theta - R/(sum N) 1 1^T + diag(R/N_j) ]]
Matrix neg_entropy_hessian(const ReactionNetwork& net, const ThermoState& state);

/// Entropy costate pi = dS/dx = (1/T, -mu^T/T)^T.
Vector entropy_costate(const ThermoState& state);

}  // namespace cstrph
