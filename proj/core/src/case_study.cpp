#include "cstrph/case_study.hpp"

#include "cstrph/thermo.hpp"

namespace cstrph::case_study {

std::string network_text()
{
    return "# A <=> B jacketed reactor\n"
           "[species]\n"
           "A cp=75.24 h_ref=0 s_ref=50.6\n"
           "B cp=60 h_ref=-4575 s_ref=180.2\n"
           "\n"
           "[reactions]\n"
           "A -> B k0f=1.2e9 Ef=72331.8 k0b=1.33e8 Eb=74826\n"
           "\n"
           "[reactor]\n"
           "V=0.001 P=1e5 T_ref=300 lambda=0.05808 R_gas=8.314\n"
           "\n"
           "[inlet]\n"
           "T_in=310 c_A=2000 c_B=0\n"
           "\n"
           "[noise]\n"
           "rho1=0.1 rho2=5e-7 rho3=0.05\n";
}

ReactionNetwork network() { return parse_network(network_text()); }

Vector initial_state(const ReactionNetwork& net)
{
    Vector N(2);
    N << kNA0, kNB0;
    return ThermoState::from_temperature(net, N, kT0).x();
}

Setpoint setpoint(const ReactionNetwork& net)
{
    Vector N(2);
    N << kNAStar, kNBStar;
    return setpoint_at_state(net, N, kTStar);
}

ControllerGains gains() { return ControllerGains::diagonal(kK1, kK2); }

}  // namespace cstrph::case_study
