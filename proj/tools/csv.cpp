#include "csv.hpp"

#include <cmath>
#include <cstdio>

namespace cstrph::cli {

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    // snprintf honours LC_NUMERIC; the CSV contract is '.' only.
    for (char* c = buf; *c; ++c)
        if (*c == ',') *c = '.';
    return buf;
}

void write_row(std::ostream& os, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

void write_trajectory_csv(std::ostream& os, const ReactionNetwork& net, const Trajectory& tr)
{
    std::vector<std::string> header{"t"};
    for (const auto& n : series_names(net)) header.push_back(n);
    header.emplace_back("events");
    write_row(os, header);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        std::vector<std::string> row{format_number(tr.times[k])};
        const Vector r = record_row(tr, k);
        for (Eigen::Index i = 0; i < r.size(); ++i) row.push_back(format_number(r(i)));
        row.push_back(tr.record_events[k]);
        write_row(os, row);
    }
}

void write_summary_csv(std::ostream& os, const EnsembleStats& stats)
{
    std::vector<std::string> header{"t"};
    for (const auto& c : stats.columns) {
        header.push_back("mean_" + c);
        header.push_back("std_" + c);
    }
    write_row(os, header);
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        std::vector<std::string> row{format_number(stats.times[k])};
        for (Eigen::Index c = 0; c < stats.mean.cols(); ++c) {
            row.push_back(format_number(stats.mean(ki, c)));
            row.push_back(format_number(stats.std(ki, c)));
        }
        write_row(os, row);
    }
    write_row(os, {"stabilization_probability", format_number(stats.stabilization_probability)});
}

void write_equilibria_csv(std::ostream& os, const ReactionNetwork& net,
                          const std::vector<SteadyState>& states)
{
    std::vector<std::string> header{"T"};
    for (const auto& sp : net.species) header.push_back("N_" + sp.name);
    for (const char* c : {"U", "Qdot_required", "classification", "max_re", "residual"})
        header.emplace_back(c);
    write_row(os, header);
    for (const auto& s : states) {
        std::vector<std::string> row{format_number(s.T)};
        for (Eigen::Index j = 0; j < s.N.size(); ++j) row.push_back(format_number(s.N(j)));
        row.push_back(format_number(s.U));
        row.push_back(format_number(s.Qdot_required));
        row.push_back(to_string(s.classification));
        row.push_back(format_number(s.max_real));
        row.push_back(format_number(s.residual));
        write_row(os, row);
    }
}

}  // namespace cstrph::cli
