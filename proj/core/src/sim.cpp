#include "cstrph/sim.hpp"

#include "cstrph/thermo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cstrph {

std::string to_string(SimMode m)
{
    switch (m) {
    case SimMode::ClosedLoop: return "closed_loop";
    case SimMode::OpenLoop: return "open_loop";
    case SimMode::Deterministic: return "deterministic";
    case SimMode::Isolated: return "isolated";
    }
    return "closed_loop";
}

SimMode parse_sim_mode(const std::string& s)
{
    if (s == "closed_loop") return SimMode::ClosedLoop;
    if (s == "open_loop") return SimMode::OpenLoop;
    if (s == "deterministic") return SimMode::Deterministic;
    if (s == "isolated") return SimMode::Isolated;
    throw std::invalid_argument("unknown simulation mode '" + s + "'");
}

std::string to_string(SimEvent::Kind k)
{
    switch (k) {
    case SimEvent::Kind::FloorHit: return "floor_hit";
    case SimEvent::Kind::Saturation: return "saturation";
    case SimEvent::Kind::StepRetry: return "step_retry";
    case SimEvent::Kind::Abort: return "abort";
    }
    return "abort";
}

void SimConfig::validate() const
{
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(t_end >= dt)) throw std::invalid_argument("t_end must be at least dt");
    if (n_traj == 0) throw std::invalid_argument("n_traj must be at least 1");
    if (record_every == 0) throw std::invalid_argument("record_every must be at least 1");
}

std::size_t SimConfig::num_steps() const
{
    return static_cast<std::size_t>(std::llround(t_end / dt));
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index)
{
    std::uint64_t s = seed;
    std::uint64_t t = splitmix64(s) ^ (index * 0xD1B54A32D192ED03ULL);
    return std::mt19937_64(splitmix64(t));
}

WienerStream::WienerStream(std::uint64_t seed, std::uint64_t index)
    : rng_(trajectory_rng(seed, index))
{
}

std::array<double, 3> WienerStream::next(double dt)
{
    const double s = std::sqrt(dt);
    std::array<double, 3> w{};
    for (double& v : w) v = normal_(rng_) * s;
    return w;
}

namespace {

class SimulationAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using InputRule = std::function<InputVector(const ThermoState&, std::vector<SimEvent>&)>;

// One unguarded EM step plus the floor clamp; false if T would leave the domain.
bool attempt(const ReactionNetwork& net, const Vector& x, double dt,
             const std::array<double, 3>& dW, const InputRule& rule, DampingMode mode,
             Vector& out, std::vector<SimEvent>& events)
{
    const ThermoState s = ThermoState::from_vector(net, x);
    const InputVector u = rule(s, events);
    const SdeFields f = assemble(net, s, u, mode).sde;
    const Eigen::Vector3d w(dW[0], dW[1], dW[2]);
    out = x + f.drift * dt + f.diffusion * w;
    if (!out.allFinite()) throw SimulationAbort("non-finite state after step");
    for (Eigen::Index j = 1; j < out.size(); ++j) {
        if (out(j) < kMolesFloor) {
            std::ostringstream os;
            os << "N_" << net.species[static_cast<std::size_t>(j - 1)].name << "=" << out(j);
            events.push_back({SimEvent::Kind::FloorHit, 0, os.str()});
            out(j) = kMolesFloor;
        }
    }
    try {
        temperature(net, out(0), out.tail(out.size() - 1));
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

StepResult guarded_step(const ReactionNetwork& net, const Vector& x, double dt,
                        const std::array<double, 3>& dW, const InputRule& rule, DampingMode mode)
{
    StepResult r;
    if (attempt(net, x, dt, dW, rule, mode, r.x, r.events)) return r;
    for (int k = 1; k <= kMaxHalvings; ++k) {
        const double n = std::ldexp(1.0, k);
        const std::array<double, 3> sub{dW[0] / n, dW[1] / n, dW[2] / n};
        std::vector<SimEvent> ev;
        Vector y = x;
        bool ok = true;
        for (long i = 0; i < static_cast<long>(n) && ok; ++i) {
            Vector next;
            ok = attempt(net, y, dt / n, sub, rule, mode, next, ev);
            y = next;
        }
        if (ok) {
            r.x = y;
            r.events = std::move(ev);
            r.events.push_back(
                {SimEvent::Kind::StepRetry, 0, "substeps=" + std::to_string(1L << k)});
            return r;
        }
    }
    throw DomainError("temperature non-positive after " + std::to_string(kMaxHalvings) +
                      " step halvings");
}

InputRule fixed_rule(const InputVector& u)
{
    return [u](const ThermoState&, std::vector<SimEvent>&) { return u; };
}

InputRule feedback_rule(const ReactionNetwork& net, const Setpoint& sp,
                        const ControllerGains& gains, const ControlOptions& opts)
{
    return [&net, &sp, &gains, opts](const ThermoState& s, std::vector<SimEvent>&) {
        return control_law(net, sp, gains, s, opts).u;
    };
}

}  // namespace

StepResult step_em(const ReactionNetwork& net, const Vector& x, const InputVector& u, double dt,
                   const std::array<double, 3>& dW, DampingMode mode)
{
    return guarded_step(net, x, dt, dW, fixed_rule(u), mode);
}

StepResult step_em(const ReactionNetwork& net, const Setpoint& sp, const ControllerGains& gains,
                   const Vector& x, double dt, const std::array<double, 3>& dW,
                   const ControlOptions& opts, DampingMode mode)
{
    return guarded_step(net, x, dt, dW, feedback_rule(net, sp, gains, opts), mode);
}

std::vector<std::string> series_names(const ReactionNetwork& net)
{
    std::vector<std::string> names{"U"};
    for (const auto& sp : net.species) names.push_back("N_" + sp.name);
    for (const char* n : {"T", "S", "H_bar", "q", "Qdot", "T_w"}) names.emplace_back(n);
    return names;
}

Vector record_row(const Trajectory& tr, std::size_t k)
{
    const Vector& x = tr.states[k];
    Vector row(x.size() + 6);
    row.head(x.size()) = x;
    row.tail(6) << tr.T[k], tr.S[k], tr.H_bar[k], tr.q[k], tr.Qdot[k], tr.T_w[k];
    return row;
}

Trajectory simulate(const ReactionNetwork& net_in, const Setpoint& sp, const ControllerGains& gains,
                    const Vector& x0, const SimConfig& cfg, std::uint64_t index)
{
    cfg.validate();
    ReactionNetwork net = net_in;
    if (cfg.mode == SimMode::Deterministic || cfg.mode == SimMode::Isolated) net.noise = NoiseSpec{};

    Trajectory tr;
    WienerStream wiener(cfg.seed, index);
    const std::size_t steps = cfg.num_steps();
    Vector x = x0;
    std::vector<SimEvent> pending;
    bool was_saturated = false;

    auto controlled = [&](double t) {
        if (cfg.mode == SimMode::Isolated || cfg.mode == SimMode::OpenLoop) return false;
        return !(t < cfg.open_loop_until);
    };
    auto fixed_input = [&]() {
        return cfg.mode == SimMode::Isolated ? InputVector{} : cfg.open_loop_input;
    };

    auto record = [&](std::size_t k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const ThermoState s = ThermoState::from_vector(net, x);
        InputVector u = fixed_input();
        if (controlled(t)) u = control_law(net, sp, gains, s, cfg.control).u;
        tr.times.push_back(t);
        tr.states.push_back(x);
        tr.T.push_back(s.T());
        tr.S.push_back(s.S());
        tr.H_bar.push_back(availability(net, sp, x));
        tr.q.push_back(u.q);
        tr.Qdot.push_back(u.Qdot);
        tr.T_w.push_back(net.reactor.lambda > 0.0 ? jacket_temperature(net, u.Qdot, s.T())
                                                  : std::nan(""));
        std::string joined;
        for (const auto& e : pending) {
            if (!joined.empty()) joined += ';';
            joined += to_string(e.kind) + "@" + std::to_string(e.step);
            if (!e.detail.empty()) joined += ":" + e.detail;
        }
        tr.record_events.push_back(joined);
        pending.clear();
    };

    auto log = [&](SimEvent e, std::size_t k) {
        e.step = k;
        tr.events.push_back(e);
        pending.push_back(e);
    };

    std::size_t current = 0;
    try {
        record(0);
        for (std::size_t k = 0; k < steps; ++k) {
            current = k;
            const double t = static_cast<double>(k) * cfg.dt;
            const std::array<double, 3> dW = wiener.next(cfg.dt);
            StepResult r;
            if (controlled(t)) {
                const ThermoState s = ThermoState::from_vector(net, x);
                const ControlAction act = control_law(net, sp, gains, s, cfg.control);
                if (act.saturated && !was_saturated) {
                    std::ostringstream os;
                    os << "q=" << act.unclamped.q;
                    log({SimEvent::Kind::Saturation, 0, os.str()}, k);
                }
                was_saturated = act.saturated;
                r = guarded_step(net, x, cfg.dt, dW, feedback_rule(net, sp, gains, cfg.control),
                                 cfg.damping);
            } else {
                was_saturated = false;
                r = guarded_step(net, x, cfg.dt, dW, fixed_rule(fixed_input()), cfg.damping);
            }
            for (const auto& e : r.events) log(e, k);
            x = r.x;
            if ((k + 1) % cfg.record_every == 0 || k + 1 == steps) record(k + 1);
        }
    } catch (const std::exception& ex) {
        tr.aborted = true;
        tr.abort_step = current;
        tr.abort_reason = ex.what();
        log({SimEvent::Kind::Abort, 0, ex.what()}, tr.abort_step);
    }
    return tr;
}

EnsembleStats aggregate(const ReactionNetwork& net, const Setpoint& sp,
                        const std::vector<Trajectory>& trajs, const EnsembleOptions& opts)
{
    EnsembleStats st;
    st.columns = series_names(net);
    st.n_traj = trajs.size();
    const Vector N_star = sp.N_star();

    std::vector<const Trajectory*> used;
    std::size_t longest = 0;
    const Trajectory* grid = nullptr;
    for (const auto& tr : trajs) {
        if (tr.aborted) ++st.n_aborted;
        st.terminal_errors.push_back(
            tr.aborted || tr.states.empty()
                ? std::nan("")
                : (tr.states.back().tail(N_star.size()) - N_star).norm());
        if (tr.aborted && opts.exclude_aborted) continue;
        used.push_back(&tr);
        if (tr.times.size() > longest) {
            longest = tr.times.size();
            grid = &tr;
        }
    }
    const auto cols = static_cast<Eigen::Index>(st.columns.size());
    st.mean = Matrix::Zero(static_cast<Eigen::Index>(longest), cols);
    st.std = Matrix::Zero(static_cast<Eigen::Index>(longest), cols);
    if (grid) st.times = grid->times;
    for (std::size_t k = 0; k < longest; ++k) {
        const auto ki = static_cast<Eigen::Index>(k);
        std::size_t n = 0;
        Vector sum = Vector::Zero(cols);
        for (const Trajectory* tr : used) {
            if (tr->times.size() <= k) continue;
            sum += record_row(*tr, k);
            ++n;
        }
        st.contributors.push_back(n);
        const Vector mean = sum / static_cast<double>(n);
        Vector ss = Vector::Zero(cols);
        for (const Trajectory* tr : used) {
            if (tr->times.size() <= k) continue;
            ss += (record_row(*tr, k) - mean).array().square().matrix();
        }
        st.mean.row(ki) = mean.transpose();
        if (n > 1) st.std.row(ki) = (ss / static_cast<double>(n - 1)).cwiseSqrt().transpose();
    }
    st.stabilization_probability = terminal_ball_probability(trajs, sp, opts.ball_radius);
    return st;
}

EnsembleResult ensemble(const ReactionNetwork& net, const Setpoint& sp, const ControllerGains& gains,
                        const Vector& x0, const SimConfig& cfg, const EnsembleOptions& opts)
{
    cfg.validate();
    EnsembleResult out;
    out.trajectories.resize(cfg.n_traj);
    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.n_traj));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < cfg.n_traj; i = next++)
            out.trajectories[i] = simulate(net, sp, gains, x0, cfg, i);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    out.stats = aggregate(net, sp, out.trajectories, opts);
    return out;
}

double stability_estimate(const std::vector<Trajectory>& trajs, const Setpoint& sp, double eps)
{
    if (trajs.empty()) return 0.0;
    Vector scale = sp.x_star.cwiseAbs();
    if (scale(0) == 0.0) scale(0) = 1.0;
    std::size_t inside = 0;
    for (const auto& tr : trajs) {
        if (tr.aborted || tr.states.empty()) continue;
        double sup = 0.0;
        for (const auto& x : tr.states)
            sup = std::max(sup, ((x - sp.x_star).array() / scale.array()).matrix().norm());
        if (sup < eps) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(trajs.size());
}

double terminal_ball_probability(const std::vector<Trajectory>& trajs, const Setpoint& sp,
                                 double radius)
{
    if (trajs.empty()) return 0.0;
    const Vector N_star = sp.N_star();
    std::size_t inside = 0;
    for (const auto& tr : trajs) {
        if (tr.aborted || tr.states.empty()) continue;
        if ((tr.states.back().tail(N_star.size()) - N_star).norm() <= radius) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(trajs.size());
}

}  // namespace cstrph
