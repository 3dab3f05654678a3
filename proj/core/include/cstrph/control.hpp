#pragma once

#include "cstrph/network.hpp"
#include "cstrph/phs.hpp"
#include "cstrph/thermo.hpp"
#include "cstrph/transform.hpp"
#include "cstrph/types.hpp"

#include <optional>

namespace cstrph {

/// Raised when I + K delta cannot be inverted.
class SingularFeedthrough : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Symmetric positive definite 2x2 proportional gain.
class ControllerGains {
public:
    /// Throws std::invalid_argument unless K is 2x2, symmetric and positive definite.
    explicit ControllerGains(const Eigen::Matrix2d& K);
    static ControllerGains diagonal(double k1, double k2);

    const Eigen::Matrix2d& K() const { return K_; }

private:
    Eigen::Matrix2d K_;
};

struct ControlOptions {
    bool clamp_flow = true;
    double q_max = 1e-2;  // m^3/s
};

struct ControlAction {
    InputVector u;             // applied input
    InputVector unclamped;     // raw controller output
    std::optional<double> T_w; // absent when lambda = 0
    bool saturated = false;
};

/// u = -(I + K delta)^-1 K g^T grad A, then the optional flow clamp.
ControlAction control_law(const ReactionNetwork& net, const Setpoint& sp,
                          const ControllerGains& gains, const ThermoState& state,
                          const ControlOptions& opts = {});

/// T_w = Qdot / lambda + T. Throws std::invalid_argument if lambda <= 0.
double jacket_temperature(const ReactionNetwork& net, double Qdot, double T);

struct ClosedLoopEvaluation {
    ControlAction action;
    Assembly assembly;
};

/// Assembly with the state feedback substituted into drift and input noise.
ClosedLoopEvaluation closed_loop(const ReactionNetwork& net, const Setpoint& sp,
                                 const ControllerGains& gains, const ThermoState& state,
                                 const ControlOptions& opts = {},
                                 DampingMode mode = DampingMode::Literal);

SdeFields closed_loop_drift(const ReactionNetwork& net, const Setpoint& sp,
                            const ControllerGains& gains, const ThermoState& state,
                            const ControlOptions& opts = {});

}  // namespace cstrph
