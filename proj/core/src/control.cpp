#include "cstrph/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cstrph {

ControllerGains::ControllerGains(const Eigen::Matrix2d& K) : K_(K)
{
    if (!K.allFinite()) throw std::invalid_argument("gain matrix must be finite");
    if (K(0, 1) != K(1, 0)) throw std::invalid_argument("gain matrix must be symmetric");
    // Sylvester's criterion for 2x2.
    if (!(K(0, 0) > 0.0) || !(K.determinant() > 0.0))
        throw std::invalid_argument("gain matrix must be positive definite");
}

ControllerGains ControllerGains::diagonal(double k1, double k2)
{
    Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
    K(0, 0) = k1;
    K(1, 1) = k2;
    return ControllerGains(K);
}

double jacket_temperature(const ReactionNetwork& net, double Qdot, double T)
{
    const double lambda = net.reactor.lambda;
    if (!(lambda > 0.0))
        throw std::invalid_argument("jacket temperature is undefined for lambda = 0");
    return Qdot / lambda + T;
}

namespace {

ControlAction control_from_structure(const ReactionNetwork& net, const Setpoint& sp,
                                     const ControllerGains& gains, const ThermoState& state,
                                     const PhsEvaluation& e, const ControlOptions& opts)
{
    const Eigen::Matrix2d& K = gains.K();
    const Eigen::Matrix2d delta = e.delta;
    const Eigen::Matrix2d A = Eigen::Matrix2d::Identity() + K * delta;
    const double det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (!(std::abs(det) >= 1e-300)) throw SingularFeedthrough("I + K delta is singular");
    Eigen::Matrix2d Ainv;
    Ainv << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
    Ainv /= det;

    const Vector grad = neg_entropy_gradient(state) + sp.pi_star;
    const Eigen::Vector2d y0 = e.g.transpose() * grad;
    const Eigen::Vector2d u = -Ainv * (K * y0);

    ControlAction act;
    act.unclamped = InputVector::from_vector(u);
    act.u = act.unclamped;
    if (opts.clamp_flow) {
        const double q = std::clamp(act.u.q, 0.0, opts.q_max);
        act.saturated = q != act.u.q;
        act.u.q = q;
    }
    if (net.reactor.lambda > 0.0) act.T_w = jacket_temperature(net, act.u.Qdot, state.T());
    return act;
}

}  // namespace

ControlAction control_law(const ReactionNetwork& net, const Setpoint& sp,
                          const ControllerGains& gains, const ThermoState& state,
                          const ControlOptions& opts)
{
    return control_from_structure(net, sp, gains, state, evaluate_structure(net, state), opts);
}

ClosedLoopEvaluation closed_loop(const ReactionNetwork& net, const Setpoint& sp,
                                 const ControllerGains& gains, const ThermoState& state,
                                 const ControlOptions& opts, DampingMode mode)
{
    ClosedLoopEvaluation out;
    out.assembly.phs = evaluate_structure(net, state, mode);
    out.assembly.grad_H = neg_entropy_gradient(state);
    out.action = control_from_structure(net, sp, gains, state, out.assembly.phs, opts);
    out.assembly.sde = sde_fields(out.assembly.phs, out.assembly.grad_H, out.action.u);
    return out;
}

SdeFields closed_loop_drift(const ReactionNetwork& net, const Setpoint& sp,
                            const ControllerGains& gains, const ThermoState& state,
                            const ControlOptions& opts)
{
    return closed_loop(net, sp, gains, state, opts).assembly.sde;
}

}  // namespace cstrph
