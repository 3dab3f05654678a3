#pragma once

#include "cstrph/control.hpp"
#include "cstrph/network.hpp"
#include "cstrph/transform.hpp"
#include "cstrph/types.hpp"

namespace cstrph::case_study {

/// A <=> B reactor with the built-in parameter set.
ReactionNetwork network();

/// Config-file text equivalent to network().
std::string network_text();

inline constexpr double kT0 = 342.0;
inline constexpr double kNA0 = 1.0;
inline constexpr double kNB0 = 1.0;
inline constexpr double kTw0 = 299.97;
inline constexpr double kQ0 = 9.15e-4;

inline constexpr double kTStar = 331.9;
inline constexpr double kNAStar = 1.3;
inline constexpr double kNBStar = 0.7;
inline constexpr double kUStar = 1157.5;
inline constexpr double kQStar = 9.15e-6;
inline constexpr double kVStar = 0.001;

inline constexpr double kK1 = 1.64e-7;
inline constexpr double kK2 = 27430.0;

/// Initial state (U(0), N_A(0), N_B(0)) at T(0).
Vector initial_state(const ReactionNetwork& net);

/// Setpoint centred on the tabulated (N*, T*).
Setpoint setpoint(const ReactionNetwork& net);

ControllerGains gains();

}  // namespace cstrph::case_study
