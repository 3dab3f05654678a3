#include "commands.hpp"

#include "csv.hpp"

#include "cstrph/case_study.hpp"
#include "cstrph/control.hpp"
#include "cstrph/equilibrium.hpp"
#include "cstrph/network.hpp"
#include "cstrph/phs.hpp"
#include "cstrph/sim.hpp"
#include "cstrph/transform.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace cstrph::cli {

namespace {

/// Bad flags or files; maps to kExitInput.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string network;
    std::string out;
    std::uint64_t seed = 42;
    std::optional<double> rho1, rho2, rho3;
    double scale_rho1 = 1.0, scale_rho2 = 1.0, scale_rho3 = 1.0;
};

struct SetpointOptions {
    double T_star = case_study::kTStar;
    std::vector<double> N_star;
    std::optional<double> q_star;
};

struct StateOptions {
    std::optional<double> T;
    std::vector<double> N;
};

struct CheckOptions {
    bool strict = true;
    bool csv = false;
};

struct EquilibriaOptions {
    std::optional<double> q;
    std::optional<double> T_w;
    double T_min = 250.0;
    double T_max = 500.0;
    int grid = 2000;
};

struct SimulateOptions {
    std::string mode = "closed_loop";
    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t n_traj = 64;
    std::size_t record_every = 10;
    unsigned threads = 0;
    double open_loop_until = 0.0;
    std::optional<double> q_open, Qdot_open;
    double K1 = case_study::kK1;
    double K2 = case_study::kK2;
    bool no_clamp = false;
    double q_max = 1e-2;
    double ball = 0.05;
    std::optional<std::size_t> write_trajectories;
};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

Vector to_vector(const std::vector<double>& v)
{
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ReactionNetwork load(const GlobalOptions& g)
{
    ReactionNetwork net;
    if (g.network.empty()) {
        net = case_study::network();
    } else {
        try {
            net = load_network_file(g.network);
        } catch (const ParseError& e) {
            throw InputError(g.network + ":" + std::to_string(e.line()) + ":" +
                             std::to_string(e.column()) + ": " + e.message());
        } catch (const InvalidNetwork& e) {
            std::string msg = g.network + ": invalid network";
            for (const auto& d : e.diagnostics()) msg += "\n  " + d.to_string();
            throw InputError(msg);
        } catch (const std::runtime_error& e) {
            throw InputError(e.what());
        }
    }
    if (g.rho1) net.noise.rho1 = *g.rho1;
    if (g.rho2) net.noise.rho2 = *g.rho2;
    if (g.rho3) net.noise.rho3 = *g.rho3;
    net.noise.rho1 *= g.scale_rho1;
    net.noise.rho2 *= g.scale_rho2;
    net.noise.rho3 *= g.scale_rho3;
    const auto diags = validate(net);
    if (!diags.empty()) {
        std::string msg = "invalid network after overrides";
        for (const auto& d : diags) msg += "\n  " + d.to_string();
        throw InputError(msg);
    }
    return net;
}

Setpoint resolve_setpoint(const ReactionNetwork& net, const SetpointOptions& o)
{
    const auto p = net.num_species();
    try {
        if (o.q_star) {
            if (!o.N_star.empty()) throw InputError("--N-star and --q-star are exclusive");
            return make_setpoint(net, o.T_star, *o.q_star);
        }
        std::vector<double> N = o.N_star;
        if (N.empty()) {
            if (p != 2) throw InputError("--N-star or --q-star is required for this network");
            N = {case_study::kNAStar, case_study::kNBStar};
        }
        if (N.size() != p) throw InputError("--N-star needs one value per species");
        return setpoint_at_state(net, to_vector(N), o.T_star);
    } catch (const DomainError& e) {
        throw InputError(std::string("setpoint: ") + e.what());
    } catch (const ConvergenceError& e) {
        throw InputError(std::string("setpoint: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("setpoint: ") + e.what());
    }
}

Vector resolve_state(const ReactionNetwork& net, const StateOptions& o)
{
    const auto p = net.num_species();
    std::vector<double> N = o.N;
    if (N.empty()) {
        if (p != 2) throw InputError("--N0 is required for this network");
        N = {case_study::kNA0, case_study::kNB0};
    }
    if (N.size() != p) throw InputError("--N0 needs one value per species");
    try {
        return ThermoState::from_temperature(net, to_vector(N), o.T.value_or(case_study::kT0)).x();
    } catch (const DomainError& e) {
        throw InputError(std::string("initial state: ") + e.what());
    }
}

std::filesystem::path out_dir(const GlobalOptions& g)
{
    std::filesystem::path dir = g.out.empty() ? std::filesystem::path(".") : std::filesystem::path(g.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + path.string() + "'");
    f << content;
}

struct CheckReport {
    NormCondition norm;
    Theorem1Report thm1;
    Theorem2Report thm2;
    double equivalence = 0.0;

    bool all_hold() const
    {
        return norm.holds && thm1.cond_trace && thm1.cond_delta && thm2.holds;
    }
};

CheckReport run_checks(const ReactionNetwork& net, const Setpoint& sp, const Vector& x)
{
    const ThermoState s = ThermoState::from_vector(net, x);
    CheckReport r;
    r.norm = check_norm_condition(net, s);
    r.thm1 = check_theorem1(net, s, AvailabilityHamiltonian(net, sp).field());
    r.thm2 = check_theorem2(net, s, sp.V_star);
    r.equivalence = equivalence_residual(net, sp, x);
    return r;
}

std::string check_csv(const CheckReport& r)
{
    std::ostringstream os;
    write_row(os, {"norm_holds", "norm_lhs", "norm_rhs", "delta_frobenius", "thm1_trace_holds",
                   "thm1_trace_lhs", "thm1_trace_rhs", "thm1_delta_holds",
                   "thm1_delta_min_eig", "thm2_holds", "thm2_lhs", "thm2_rhs",
                   "equivalence_residual"});
    write_row(os, {std::to_string(r.norm.holds), format_number(r.norm.lhs),
                   format_number(r.norm.rhs), format_number(r.norm.delta_frobenius),
                   std::to_string(r.thm1.cond_trace), format_number(r.thm1.trace_lhs),
                   format_number(r.thm1.trace_rhs), std::to_string(r.thm1.cond_delta),
                   format_number(r.thm1.delta_min_eigenvalue), std::to_string(r.thm2.holds),
                   format_number(r.thm2.lhs), format_number(r.thm2.rhs),
                   format_number(r.equivalence)});
    return os.str();
}

void print_check(std::ostream& out, const CheckReport& r)
{
    out << "norm_condition     " << pass_fail(r.norm.holds) << "  rho2^4 M^2 + rho3^4 = "
        << fmt(r.norm.lhs) << " < 4 theta^2 = " << fmt(r.norm.rhs)
        << "  ||delta||_F = " << fmt(r.norm.delta_frobenius) << "\n";
    out << "passivity_trace    " << pass_fail(r.thm1.cond_trace) << "  1/2 tr{H'' a a^T} = "
        << fmt(r.thm1.trace_lhs) << " <= dH^T R dH = " << fmt(r.thm1.trace_rhs) << "\n";
    out << "passivity_delta    " << pass_fail(r.thm1.cond_delta)
        << "  min eig = " << fmt(r.thm1.delta_min_eigenvalue) << "\n";
    out << "reaction_noise     " << pass_fail(r.thm2.holds) << "  lhs = " << fmt(r.thm2.lhs)
        << " <= rhs = " << fmt(r.thm2.rhs) << "\n";
    out << "equivalence_resid  " << fmt(r.equivalence) << "\n";
}

void print_setpoint(std::ostream& out, const ReactionNetwork& net, const Setpoint& sp)
{
    out << "setpoint  T* = " << fmt(sp.T_star) << " K  U* = " << fmt(sp.U_star()) << " J  N* = (";
    for (Eigen::Index j = 0; j < sp.N_star().size(); ++j)
        out << (j ? ", " : "") << net.species[static_cast<std::size_t>(j)].name << " "
            << fmt(sp.N_star()(j));
    out << ")  q* = " << fmt(sp.u_star.q) << "  Qdot* = " << fmt(sp.u_star.Qdot)
        << "  residual = " << fmt(sp.residual) << "\n";
}

int cmd_check(std::ostream& out, const GlobalOptions& g, const SetpointOptions& so,
              const StateOptions& st, const CheckOptions& co)
{
    const ReactionNetwork net = load(g);
    const Setpoint sp = resolve_setpoint(net, so);
    const Vector x = resolve_state(net, st);
    const CheckReport r = run_checks(net, sp, x);
    if (co.csv) {
        out << check_csv(r);
    } else {
        print_setpoint(out, net, sp);
        print_check(out, r);
    }
    if (!g.out.empty()) write_file(out_dir(g) / "check.csv", check_csv(r));
    return co.strict && !r.all_hold() ? kExitCondition : kExitOk;
}

int cmd_equilibria(std::ostream& out, const GlobalOptions& g, const EquilibriaOptions& eo)
{
    const ReactionNetwork net = load(g);
    if (!eo.T_w) throw InputError("--Tw is required");
    const double q = eo.q.value_or(case_study::kQStar);
    std::vector<SteadyState> states;
    try {
        ScanOptions so;
        so.grid_points = eo.grid;
        states = steady_states(net, q, *eo.T_w, eo.T_min, eo.T_max, so);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    std::ostringstream os;
    write_equilibria_csv(os, net, states);
    if (g.out.empty())
        out << os.str();
    else
        write_file(out_dir(g) / "equilibria.csv", os.str());
    return kExitOk;
}

SimConfig make_sim_config(const GlobalOptions& g, const SimulateOptions& o, const Setpoint& sp)
{
    SimConfig cfg;
    try {
        cfg.mode = parse_sim_mode(o.mode);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    cfg.dt = o.dt;
    cfg.t_end = o.t_end;
    cfg.seed = g.seed;
    cfg.n_traj = o.n_traj;
    cfg.record_every = o.record_every;
    cfg.threads = o.threads;
    cfg.open_loop_until = o.open_loop_until;
    cfg.open_loop_input = InputVector{o.q_open.value_or(sp.u_star.q),
                                      o.Qdot_open.value_or(sp.u_star.Qdot)};
    cfg.control.clamp_flow = !o.no_clamp;
    cfg.control.q_max = o.q_max;
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    return cfg;
}

int run_simulation(std::ostream& out, const GlobalOptions& g, const ReactionNetwork& net,
                   const Setpoint& sp, const Vector& x0, const SimulateOptions& o)
{
    const SimConfig cfg = make_sim_config(g, o, sp);
    std::optional<ControllerGains> gains;
    try {
        gains.emplace(ControllerGains::diagonal(o.K1, o.K2));
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    EnsembleOptions eo;
    eo.ball_radius = o.ball;
    const EnsembleResult res = ensemble(net, sp, *gains, x0, cfg, eo);

    const auto dir = out_dir(g);
    const std::size_t n_write = std::min(o.write_trajectories.value_or(cfg.n_traj), cfg.n_traj);
    for (std::size_t i = 0; i < n_write; ++i) {
        std::ostringstream os;
        write_trajectory_csv(os, net, res.trajectories[i]);
        char name[48];
        std::snprintf(name, sizeof name, "trajectory_%04zu.csv", i);
        write_file(dir / name, os.str());
    }
    std::ostringstream os;
    write_summary_csv(os, res.stats);
    write_file(dir / "summary.csv", os.str());

    const auto& st = res.stats;
    const auto last = st.mean.rows() - 1;
    const auto T_col = static_cast<Eigen::Index>(net.num_species()) + 1;
    out << "trajectories " << st.n_traj << "  aborted " << st.n_aborted << "\n";
    if (last >= 0)
        out << "t = " << fmt(st.times.back()) << "  mean T = " << fmt(st.mean(last, T_col))
            << " K  (T* = " << fmt(sp.T_star) << ")\n";
    out << "stabilization_probability " << fmt(st.stabilization_probability) << "  (radius "
        << fmt(o.ball) << " mol)\n";
    for (const auto& tr : res.trajectories)
        if (tr.aborted)
            out << "abort at step " << tr.abort_step << ": " << tr.abort_reason << "\n";
    return st.n_aborted > 0 ? kExitAbort : kExitOk;
}

int cmd_simulate(std::ostream& out, const GlobalOptions& g, const SetpointOptions& so,
                 const StateOptions& st, const SimulateOptions& o)
{
    const ReactionNetwork net = load(g);
    const Setpoint sp = resolve_setpoint(net, so);
    const Vector x0 = resolve_state(net, st);
    return run_simulation(out, g, net, sp, x0, o);
}

int cmd_casestudy(std::ostream& out, const GlobalOptions& g, const SimulateOptions& o,
                  const CheckOptions& co)
{
    if (!g.network.empty()) throw InputError("casestudy uses the built-in configuration");
    const ReactionNetwork net = load(g);
    const Setpoint sp = case_study::setpoint(net);
    const Vector x0 = case_study::initial_state(net);
    const auto dir = out_dir(g);
    write_file(dir / "network.cfg", serialize_network(net));

    print_setpoint(out, net, sp);
    const CheckReport r = run_checks(net, sp, x0);
    print_check(out, r);
    write_file(dir / "check.csv", check_csv(r));

    // Jacket temperature that makes T* a steady state under the setpoint's own input.
    const double q = sp.u_star.q;
    const double T_w = jacket_temperature(net, sp.u_star.Qdot, sp.T_star);
    const auto states = steady_states(net, q, T_w, 250.0, 500.0);
    std::ostringstream eq;
    write_equilibria_csv(eq, net, states);
    write_file(dir / "equilibria.csv", eq.str());
    out << "steady states at q = " << fmt(q) << ", T_w = " << fmt(T_w) << ":";
    for (const auto& s : states) out << "  " << fmt(s.T) << " K " << to_string(s.classification);
    out << "\n";

    const int sim = run_simulation(out, g, net, sp, x0, o);
    if (sim != kExitOk) return sim;
    return co.strict && !r.all_hold() ? kExitCondition : kExitOk;
}

void add_setpoint_options(CLI::App* sub, SetpointOptions& so)
{
    sub->add_option("--T-star", so.T_star, "Setpoint temperature (K)")->capture_default_str();
    sub->add_option("--N-star", so.N_star, "Setpoint mole numbers, one per species (mol)")
        ->delimiter(',');
    sub->add_option("--q-star", so.q_star,
                    "Solve N* from the steady mass balance at this flow instead (m^3/s)");
}

void add_state_options(CLI::App* sub, StateOptions& st)
{
    sub->add_option("--T0", st.T, "State temperature (K)");
    sub->add_option("--N0", st.N, "State mole numbers, one per species (mol)")->delimiter(',');
}

void add_sim_options(CLI::App* sub, SimulateOptions& o)
{
    sub->add_option("--mode", o.mode, "closed_loop | open_loop | deterministic | isolated")
        ->capture_default_str();
    sub->add_option("--dt", o.dt, "Step size (s)")->capture_default_str();
    sub->add_option("--t-end", o.t_end, "Horizon (s)")->capture_default_str();
    sub->add_option("--n-traj", o.n_traj, "Number of trajectories")->capture_default_str();
    sub->add_option("--record-every", o.record_every, "Steps between records")
        ->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads, 0 = hardware")->capture_default_str();
    sub->add_option("--open-loop-until", o.open_loop_until,
                    "Apply the open-loop input until this time (s)")
        ->capture_default_str();
    sub->add_option("--q-open", o.q_open, "Open-loop flow (m^3/s), default q*");
    sub->add_option("--Qdot-open", o.Qdot_open, "Open-loop heat flow (J/s), default Qdot*");
    sub->add_option("--K1", o.K1, "Flow gain")->capture_default_str();
    sub->add_option("--K2", o.K2, "Heat gain")->capture_default_str();
    sub->add_flag("--no-clamp", o.no_clamp, "Do not clamp q to [0, q_max]");
    sub->add_option("--q-max", o.q_max, "Flow clamp upper bound (m^3/s)")->capture_default_str();
    sub->add_option("--ball", o.ball, "Terminal ball radius around N* (mol)")
        ->capture_default_str();
    sub->add_option("--write-trajectories", o.write_trajectories,
                    "Number of per-trajectory CSV files to write (default all)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic port-Hamiltonian CSTR: checks, equilibria and simulation"};
    app.name("cstrph");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--network", g.network, "Network config file (default: built-in case study)");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
    app.add_option("--rho1", g.rho1, "Override reaction noise intensity");
    app.add_option("--rho2", g.rho2, "Override flow noise intensity");
    app.add_option("--rho3", g.rho3, "Override heat-exchange noise intensity");
    app.add_option("--scale-rho1", g.scale_rho1, "Multiply rho1")->capture_default_str();
    app.add_option("--scale-rho2", g.scale_rho2, "Multiply rho2")->capture_default_str();
    app.add_option("--scale-rho3", g.scale_rho3, "Multiply rho3")->capture_default_str();

    SetpointOptions so;
    StateOptions st;
    CheckOptions co;
    EquilibriaOptions eo;
    SimulateOptions sim;

    auto* check = app.add_subcommand("check", "Evaluate the passivity and noise conditions");
    add_setpoint_options(check, so);
    add_state_options(check, st);
    check->add_flag("--strict,!--no-strict", co.strict, "Exit 2 when a condition fails")
        ->capture_default_str();
    check->add_flag("--csv", co.csv, "Print the machine-readable row instead of the report");

    auto* equilibria = app.add_subcommand("equilibria", "Scan for steady states");
    equilibria->add_option("--q", eo.q, "Flow (m^3/s), default q*");
    equilibria->add_option("--Tw", eo.T_w, "Jacket temperature (K)");
    equilibria->add_option("--Tmin", eo.T_min, "Scan lower bound (K)")->capture_default_str();
    equilibria->add_option("--Tmax", eo.T_max, "Scan upper bound (K)")->capture_default_str();
    equilibria->add_option("--grid", eo.grid, "Scan grid points")->capture_default_str();

    auto* simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo ensemble");
    add_setpoint_options(simulate_cmd, so);
    add_state_options(simulate_cmd, st);
    add_sim_options(simulate_cmd, sim);

    auto* casestudy = app.add_subcommand("casestudy", "Reproduce the built-in case study");
    add_sim_options(casestudy, sim);
    casestudy->add_flag("--strict,!--no-strict", co.strict, "Exit 2 when a condition fails")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*check) return cmd_check(out, g, so, st, co);
        if (*equilibria) return cmd_equilibria(out, g, eo);
        if (*simulate_cmd) return cmd_simulate(out, g, so, st, sim);
        if (*casestudy) return cmd_casestudy(out, g, sim, co);
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitAbort;
    }
    return kExitInput;
}

}  // namespace cstrph::cli
