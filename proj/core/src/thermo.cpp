#include "cstrph/thermo.hpp"

#include <cmath>
#include <sstream>

namespace cstrph {

namespace {

Vector cp_vector(const ReactionNetwork& net)
{
    Vector cp(net.num_species());
    for (std::size_t j = 0; j < net.num_species(); ++j) cp(j) = net.species[j].cp;
    return cp;
}

Vector href_vector(const ReactionNetwork& net)
{
    Vector h(net.num_species());
    for (std::size_t j = 0; j < net.num_species(); ++j) h(j) = net.species[j].h_ref;
    return h;
}

void require_positive_moles(const Vector& N)
{
    for (Eigen::Index j = 0; j < N.size(); ++j) {
        if (!(N(j) > kThermoMolesFloor)) {
            std::ostringstream os;
            os << "mole number N[" << j << "] = " << N(j) << " is outside the thermodynamic domain";
            throw DomainError(os.str());
        }
    }
}

void require_size(const ReactionNetwork& net, const Vector& N)
{
    if (static_cast<std::size_t>(N.size()) != net.num_species())
        throw std::invalid_argument("mole vector length does not match the species count");
}

}  // namespace

double temperature(const ReactionNetwork& net, double U, const Vector& N)
{
    require_size(net, N);
    const auto& rc = net.reactor;
    const double heat_capacity = N.dot(cp_vector(net));
    if (!(heat_capacity > 0.0)) throw DomainError("N^T C_P must be positive");
    const double T = (U + rc.P * rc.V - N.dot(href_vector(net))) / heat_capacity + rc.T_ref;
    if (!(T > 0.0) || !std::isfinite(T)) {
        std::ostringstream os;
        os << "state (U = " << U << ") implies non-positive temperature " << T;
        throw DomainError(os.str());
    }
    return T;
}

double internal_energy(const ReactionNetwork& net, const Vector& N, double T)
{
    require_size(net, N);
    return N.dot(enthalpy(net, T)) - net.reactor.P * net.reactor.V;
}

Vector enthalpy(const ReactionNetwork& net, double T)
{
    return cp_vector(net) * (T - net.reactor.T_ref) + href_vector(net);
}

Vector chem_potential_over_T(const ReactionNetwork& net, const Vector& N, double T)
{
    require_size(net, N);
    require_positive_moles(N);
    if (!(T > 0.0)) throw DomainError("temperature must be positive");
    const double R = net.reactor.R_gas;
    const double n = N.sum();
    const double log_T = std::log(T / net.reactor.T_ref);
    const Vector h = enthalpy(net, T);
    Vector out(N.size());
    for (Eigen::Index j = 0; j < N.size(); ++j) {
        const auto& sp = net.species[static_cast<std::size_t>(j)];
        out(j) = -sp.cp * log_T + R * std::log(N(j) / n) - sp.s_ref + h(j) / T;
    }
    return out;
}

double entropy(const ReactionNetwork& net, const Vector& N, double T)
{
    require_size(net, N);
    require_positive_moles(N);
    if (!(T > 0.0)) throw DomainError("temperature must be positive");
    const double R = net.reactor.R_gas;
    const double n = N.sum();
    const double log_T = std::log(T / net.reactor.T_ref);
    double S = 0.0;
    for (Eigen::Index j = 0; j < N.size(); ++j) {
        const auto& sp = net.species[static_cast<std::size_t>(j)];
        S += N(j) * (sp.cp * log_T + sp.s_ref - R * std::log(N(j) / n));
    }
    return S;
}

ThermoState ThermoState::from_extensive(const ReactionNetwork& net, double U, const Vector& N)
{
    require_size(net, N);
    require_positive_moles(N);
    ThermoState s;
    s.U_ = U;
    s.N_ = N;
    s.T_ = temperature(net, U, N);
    s.h_ = enthalpy(net, s.T_);
    s.mu_over_T_ = chem_potential_over_T(net, N, s.T_);
    s.S_ = entropy(net, N, s.T_);
    s.theta_ = s.T_ * s.T_ * N.dot(cp_vector(net));
    return s;
}

ThermoState ThermoState::from_vector(const ReactionNetwork& net, const Vector& x)
{
    if (static_cast<std::size_t>(x.size()) != net.num_species() + 1)
        throw std::invalid_argument("state vector length must be species count + 1");
    return from_extensive(net, x(0), x.tail(x.size() - 1));
}

ThermoState ThermoState::from_temperature(const ReactionNetwork& net, const Vector& N, double T)
{
    return from_extensive(net, internal_energy(net, N, T), N);
}

Vector ThermoState::x() const
{
    Vector out(N_.size() + 1);
    out(0) = U_;
    out.tail(N_.size()) = N_;
    return out;
}

Vector neg_entropy_gradient(const ThermoState& state)
{
    const auto p = state.N().size();
    Vector g(p + 1);
    g(0) = -1.0 / state.T();
    g.tail(p) = state.mu_over_T();
    return g;
}

Vector entropy_costate(const ThermoState& state) { return -neg_entropy_gradient(state); }

Matrix neg_entropy_hessian(const ReactionNetwork& net, const ThermoState& state)
{
    const auto p = state.N().size();
    const double R = net.reactor.R_gas;
    const double theta = state.theta();
    const Vector& h = state.h();
    const Vector& N = state.N();

    Matrix H(p + 1, p + 1);
    H(0, 0) = 1.0 / theta;
    H.block(0, 1, 1, p) = -h.transpose() / theta;
    H.block(1, 0, p, 1) = -h / theta;
    Matrix lower = h * h.transpose() / theta;
    lower.array() -= R / N.sum();
    lower.diagonal().array() += R / N.array();
    H.block(1, 1, p, p) = lower;
    return H;
}

}  // namespace cstrph
