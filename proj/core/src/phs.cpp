#include "cstrph/phs.hpp"

#include "cstrph/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cstrph {

Matrix stoichiometry_change(const ReactionNetwork& net)
{
    const auto p = static_cast<Eigen::Index>(net.num_species());
    const auto l = static_cast<Eigen::Index>(net.num_reactions());
    Matrix dz(p, l);
    for (Eigen::Index i = 0; i < l; ++i) {
        const auto& rx = net.reactions[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            dz(j, i) = static_cast<double>(rx.reactant_stoich[sj] - rx.product_stoich[sj]);
        }
    }
    return dz;
}

RateVector reaction_rates(const ReactionNetwork& net, const Vector& N, double T)
{
    if (static_cast<std::size_t>(N.size()) != net.num_species())
        throw std::invalid_argument("mole vector length does not match the species count");
    const double V = net.reactor.V;
    const double R = net.reactor.R_gas;
    const auto l = static_cast<Eigen::Index>(net.num_reactions());
    RateVector r{Vector(l), Vector(l)};
    for (Eigen::Index i = 0; i < l; ++i) {
        const auto& rx = net.reactions[static_cast<std::size_t>(i)];
        double fwd = rx.k0f * std::exp(-rx.Ef / (R * T));
        double bwd = rx.k0b * std::exp(-rx.Eb / (R * T));
        for (std::size_t j = 0; j < net.num_species(); ++j) {
            const double c = N(static_cast<Eigen::Index>(j)) / V;
            if (rx.reactant_stoich[j] != 0) fwd *= std::pow(c, rx.reactant_stoich[j]);
            if (rx.product_stoich[j] != 0) bwd *= std::pow(c, rx.product_stoich[j]);
        }
        r.forward(i) = fwd;
        r.backward(i) = bwd;
    }
    return r;
}

RateVector reaction_rates(const ReactionNetwork& net, const ThermoState& state)
{
    return reaction_rates(net, state.N(), state.T());
}

double inlet_internal_energy(const ReactionNetwork& net)
{
    const auto& rc = net.reactor;
    const Vector c_in = Eigen::Map<const Vector>(net.inlet.c_in.data(),
                                                 static_cast<Eigen::Index>(net.inlet.c_in.size()));
    return rc.V * c_in.dot(enthalpy(net, net.inlet.T_in)) - rc.P * rc.V;
}

double log_mean(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) return 0.0;
    if (a == b) return a;
    const double x = a / b - 1.0;
    if (std::abs(x) < 1e-4) return b * (1.0 + x / 2.0 - x * x / 12.0);
    return (a - b) / std::log(a / b);
}

namespace {

Vector c_in_vector(const ReactionNetwork& net)
{
    return Eigen::Map<const Vector>(net.inlet.c_in.data(),
                                    static_cast<Eigen::Index>(net.inlet.c_in.size()));
}

// Per-reaction coefficient multiplying dz dz^T in the lower block of R.
double damping_coefficient(const ReactionNetwork& net, double rf, double rb, double affinity_over_T,
                           double T, DampingMode mode)
{
    const double V = net.reactor.V;
    const double logmean_limit = V * log_mean(rf, rb) / net.reactor.R_gas;
    if (mode == DampingMode::LogMean) return logmean_limit;
    if (std::abs(affinity_over_T * T) <= kAffinityGuard) return logmean_limit;
    return V * (rf - rb) / affinity_over_T;
}

}  // namespace

Matrix damping_matrix(const ReactionNetwork& net, const ThermoState& state, DampingMode mode)
{
    const auto p = static_cast<Eigen::Index>(net.num_species());
    const Matrix dz = stoichiometry_change(net);
    const RateVector r = reaction_rates(net, state);
    Matrix R = Matrix::Zero(p + 1, p + 1);
    for (Eigen::Index i = 0; i < dz.cols(); ++i) {
        const Vector dzi = dz.col(i);
        const double a = dzi.dot(state.mu_over_T());
        const double coef =
            damping_coefficient(net, r.forward(i), r.backward(i), a, state.T(), mode);
        R.block(1, 1, p, p) += coef * dzi * dzi.transpose();
    }
    return R;
}

PhsEvaluation evaluate_structure(const ReactionNetwork& net, const ThermoState& state,
                                 DampingMode mode)
{
    const auto p = static_cast<Eigen::Index>(net.num_species());
    const double V = net.reactor.V;
    const double R_gas = net.reactor.R_gas;
    const auto& noise = net.noise;
    const Vector c_in = c_in_vector(net);
    const Vector& N = state.N();
    const Vector& h = state.h();
    const double theta = state.theta();

    PhsEvaluation e;
    e.theta = theta;
    e.J = Matrix::Zero(p + 1, p + 1);
    e.R = damping_matrix(net, state, mode);

    const double energy_flux = (inlet_internal_energy(net) - state.U()) / V;
    const Vector dc = c_in - N / V;
    e.g = Matrix::Zero(p + 1, 2);
    e.g(0, 0) = energy_flux;
    e.g(0, 1) = 1.0;
    e.g.block(1, 0, p, 1) = dc;
    e.gamma = e.g;

    const Matrix dz = stoichiometry_change(net);
    const RateVector r = reaction_rates(net, state);
    e.a = Vector::Zero(p + 1);
    e.a.tail(p) = dz * (r.backward - r.forward) * (noise.rho1 * V);

    Matrix Q = h * h.transpose();
    Q.array() -= theta * R_gas / N.sum();
    Q.diagonal().array() += theta * R_gas / N.array();
    e.M = dc.dot(Q * dc) - 2.0 * energy_flux * h.dot(dc) + energy_flux * energy_flux;

    e.sigma = Matrix::Zero(2, 2);
    e.sigma(0, 0) = noise.rho2;
    e.sigma(1, 1) = noise.rho3;
    e.delta = Matrix::Zero(2, 2);
    e.delta(0, 0) = 0.5 * noise.rho2 * noise.rho2 * e.M / theta;
    e.delta(1, 1) = 0.5 * noise.rho3 * noise.rho3 / theta;
    return e;
}

SdeFields sde_fields(const PhsEvaluation& phs, const Vector& grad_H, const InputVector& u)
{
    SdeFields f;
    f.drift = (phs.J - phs.R) * grad_H + phs.g * u.as_vector();
    const auto n = phs.a.size();
    f.diffusion = Matrix(n, 3);
    f.diffusion.col(0) = phs.a;
    f.diffusion.col(1) = phs.gamma.col(0) * (u.q * phs.sigma(0, 0));
    f.diffusion.col(2) = phs.gamma.col(1) * (u.Qdot * phs.sigma(1, 1));
    return f;
}

Assembly assemble(const ReactionNetwork& net, const ThermoState& state, const InputVector& u,
                  DampingMode mode)
{
    Assembly out;
    out.phs = evaluate_structure(net, state, mode);
    out.grad_H = neg_entropy_gradient(state);
    out.sde = sde_fields(out.phs, out.grad_H, u);
    return out;
}

NormCondition check_norm_condition(const ReactionNetwork& net, const ThermoState& state)
{
    const PhsEvaluation e = evaluate_structure(net, state);
    const double r2 = net.noise.rho2;
    const double r3 = net.noise.rho3;
    NormCondition c;
    c.lhs = std::pow(r2, 4) * e.M * e.M + std::pow(r3, 4);
    c.rhs = 4.0 * e.theta * e.theta;
    c.holds = c.lhs < c.rhs;
    c.delta_frobenius = e.delta.norm();
    return c;
}

ScalarField neg_entropy_field(const ReactionNetwork& net)
{
    ScalarField f;
    f.value = [net](const Vector& x) { return -ThermoState::from_vector(net, x).S(); };
    f.gradient = [net](const Vector& x) {
        return neg_entropy_gradient(ThermoState::from_vector(net, x));
    };
    f.hessian = [net](const Vector& x) {
        return neg_entropy_hessian(net, ThermoState::from_vector(net, x));
    };
    return f;
}

double generator(const ScalarField& field, const Vector& x, const SdeFields& sde)
{
    const Matrix DDt = sde.diffusion * sde.diffusion.transpose();
    return field.gradient(x).dot(sde.drift) + 0.5 * (field.hessian(x).cwiseProduct(DDt)).sum();
}

double generator(const ReactionNetwork& net, const ScalarField& field, const ThermoState& state,
                 const InputVector& u, DampingMode mode)
{
    const Assembly a = assemble(net, state, u, mode);
    return generator(field, state.x(), a.sde);
}

Theorem1Report check_theorem1(const ReactionNetwork& net, const ThermoState& state,
                              const ScalarField& H, DampingMode mode)
{
    const PhsEvaluation e = evaluate_structure(net, state, mode);
    const Vector x = state.x();
    const Vector dH = H.gradient(x);
    const Matrix Hxx = H.hessian(x);

    Theorem1Report rep;
    rep.trace_lhs = 0.5 * e.a.dot(Hxx * e.a);
    rep.trace_rhs = dH.dot(e.R * dH);
    rep.cond_trace = rep.trace_lhs <= rep.trace_rhs;

    const Matrix ss = e.sigma * e.sigma.transpose();
    const Matrix curvature = 0.5 * ss.cwiseProduct(e.gamma.transpose() * Hxx * e.gamma);
    rep.delta_margin = e.delta - curvature;
    rep.delta_min_eigenvalue = min_symmetric_eigenvalue(rep.delta_margin);
    const double scale =
        std::max(symmetric_spectral_norm(e.delta), symmetric_spectral_norm(curvature));
    rep.cond_delta = is_positive_semidefinite(rep.delta_margin, 1e-12, scale);
    return rep;
}

Theorem2Report check_theorem2(const ReactionNetwork& net, const ThermoState& state, double V_star)
{
    const double R_gas = net.reactor.R_gas;
    const Vector& N = state.N();
    const Vector& h = state.h();
    const double theta = state.theta();
    const Matrix dz = stoichiometry_change(net);
    const RateVector r = reaction_rates(net, state);

    const Vector Delta = dz * (r.backward - r.forward);
    Matrix K = h * h.transpose() / theta;
    K.array() -= R_gas / N.sum();
    K.diagonal().array() += R_gas / N.array();

    Theorem2Report rep;
    rep.W = K.cwiseProduct(Delta * Delta.transpose());
    rep.lhs = 0.5 * net.noise.rho1 * net.noise.rho1 * V_star * rep.W.sum();
    double rhs = 0.0;
    for (Eigen::Index i = 0; i < dz.cols(); ++i)
        rhs += (r.forward(i) - r.backward(i)) * dz.col(i).dot(state.mu_over_T());
    rep.rhs = rhs;
    rep.holds = rep.lhs <= rep.rhs;
    return rep;
}

PortSystem port_system(const PhsEvaluation& phs) { return {phs.J, phs.R, phs.g, phs.delta}; }

Interconnection interconnect(const PortSystem& s1, const PortSystem& s2)
{
    const auto m = s1.g.cols();
    if (s2.g.cols() != m || s1.delta.rows() != m || s2.delta.rows() != m)
        throw std::invalid_argument("port dimensions of the interconnected systems differ");
    if (!(s1.delta.norm() < 1.0) || !(s2.delta.norm() < 1.0))
        throw std::invalid_argument("interconnection requires ||delta||_F < 1 for both systems");

    const Matrix I = Matrix::Identity(m, m);
    const Eigen::FullPivLU<Matrix> luA(I + s1.delta * s2.delta);
    const Eigen::FullPivLU<Matrix> luB(I + s2.delta * s1.delta);
    if (!luA.isInvertible() || !luB.isInvertible())
        throw std::runtime_error("feedthrough loop I + delta1 delta2 is singular");
    const Matrix Ainv = luA.inverse();
    const Matrix Binv = luB.inverse();

    const auto n1 = s1.g.rows();
    const auto n2 = s2.g.rows();
    Matrix G = Matrix::Zero(n1 + n2, 2 * m);
    G.block(0, 0, n1, m) = s1.g;
    G.block(n1, m, n2, m) = s2.g;

    Matrix Jmid = Matrix::Zero(2 * m, 2 * m);
    Jmid.block(0, m, m, m) = -Binv;
    Jmid.block(m, 0, m, m) = Ainv;
    Matrix Rmid = Matrix::Zero(2 * m, 2 * m);
    Rmid.block(0, 0, m, m) = s2.delta * Ainv;
    Rmid.block(m, m, m, m) = s1.delta * Binv;

    Interconnection out;
    out.J = G * Jmid * G.transpose();
    out.J.block(0, 0, n1, n1) += s1.J;
    out.J.block(n1, n1, n2, n2) += s2.J;
    out.R = G * Rmid * G.transpose();
    out.R.block(0, 0, n1, n1) += s1.R;
    out.R.block(n1, n1, n2, n2) += s2.R;
    return out;
}

}  // namespace cstrph
