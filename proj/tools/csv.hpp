#pragma once

#include "cstrph/equilibrium.hpp"
#include "cstrph/network.hpp"
#include "cstrph/sim.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace cstrph::cli {

/// 17 significant digits, '.' decimal point regardless of locale.
std::string format_number(double v);

void write_row(std::ostream& os, const std::vector<std::string>& cells);

void write_trajectory_csv(std::ostream& os, const ReactionNetwork& net, const Trajectory& tr);

void write_summary_csv(std::ostream& os, const EnsembleStats& stats);

void write_equilibria_csv(std::ostream& os, const ReactionNetwork& net,
                          const std::vector<SteadyState>& states);

}  // namespace cstrph::cli
