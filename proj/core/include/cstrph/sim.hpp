#pragma once

#include "cstrph/control.hpp"
#include "cstrph/network.hpp"
#include "cstrph/phs.hpp"
#include "cstrph/transform.hpp"
#include "cstrph/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace cstrph {

enum class SimMode {
    ClosedLoop,     // controller, full noise
    OpenLoop,       // fixed input, full noise
    Deterministic,  // controller, rho = 0
    Isolated,       // u = 0, rho = 0
};

std::string to_string(SimMode m);
/// Accepts closed_loop, open_loop, deterministic, isolated.
SimMode parse_sim_mode(const std::string& s);

/// Mole numbers below this are clamped after a step.
inline constexpr double kMolesFloor = 1e-9;
inline constexpr int kMaxHalvings = 20;

struct SimConfig {
    double dt = 1e-3;
    double t_end = 10.0;
    std::uint64_t seed = 42;
    std::size_t n_traj = 1;
    std::size_t record_every = 10;
    SimMode mode = SimMode::ClosedLoop;
    /// Input used in OpenLoop mode, and in the controlled modes while t < open_loop_until.
    InputVector open_loop_input;
    double open_loop_until = 0.0;
    unsigned threads = 0;  // 0: hardware concurrency
    ControlOptions control;
    DampingMode damping = DampingMode::Literal;

    /// Throws std::invalid_argument on dt <= 0, t_end < dt or n_traj == 0.
    void validate() const;
    std::size_t num_steps() const;
};

struct SimEvent {
    enum class Kind { FloorHit, Saturation, StepRetry, Abort };
    Kind kind;
    std::size_t step = 0;
    std::string detail;
};

std::string to_string(SimEvent::Kind k);

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> T, S, H_bar, q, Qdot, T_w;
    std::vector<std::string> record_events;  // events since the previous record, ';'-joined
    std::vector<SimEvent> events;
    bool aborted = false;
    std::size_t abort_step = 0;
    std::string abort_reason;
};

/// Independent generator for trajectory `index` of an ensemble seeded with `seed`.
std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index);

/// Wiener increments of one trajectory: three standard normals per step scaled
/// by sqrt(dt), drawn in the order (w1, w2, w3).
class WienerStream {
public:
    WienerStream(std::uint64_t seed, std::uint64_t index);
    std::array<double, 3> next(double dt);

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

struct StepResult {
    Vector x;
    std::vector<SimEvent> events;
};

/// One Euler-Maruyama step x + f dt + D dW under a fixed input, followed by the
/// domain guard. Throws DomainError if the state cannot be kept valid.
StepResult step_em(const ReactionNetwork& net, const Vector& x, const InputVector& u, double dt,
                   const std::array<double, 3>& dW, DampingMode mode = DampingMode::Literal);

/// Controlled step: the input is recomputed from the feedback law at every substep.
StepResult step_em(const ReactionNetwork& net, const Setpoint& sp, const ControllerGains& gains,
                   const Vector& x, double dt, const std::array<double, 3>& dW,
                   const ControlOptions& opts = {}, DampingMode mode = DampingMode::Literal);

Trajectory simulate(const ReactionNetwork& net, const Setpoint& sp, const ControllerGains& gains,
                    const Vector& x0, const SimConfig& cfg, std::uint64_t index = 0);

/// Names of the recorded series, in CSV column order after t.
std::vector<std::string> series_names(const ReactionNetwork& net);

/// Recorded row k as numbers in series_names order.
Vector record_row(const Trajectory& tr, std::size_t k);

struct EnsembleStats {
    std::vector<double> times;
    std::vector<std::string> columns;
    Matrix mean;  // checkpoints x columns
    Matrix std;   // sample standard deviation (0 for a single contributor)
    std::vector<std::size_t> contributors;  // per checkpoint
    std::size_t n_traj = 0;
    std::size_t n_aborted = 0;
    double stabilization_probability = 0.0;
    std::vector<double> terminal_errors;  // ||N(t_end) - N*|| per trajectory, NaN if aborted
};

struct EnsembleOptions {
    double ball_radius = 0.05;     // mol, terminal ball around N*
    bool exclude_aborted = false;  // drop aborted runs from mean/std entirely
};

struct EnsembleResult {
    std::vector<Trajectory> trajectories;
    EnsembleStats stats;
};

/// Runs cfg.n_traj trajectories, trajectory i on trajectory_rng(cfg.seed, i).
EnsembleResult ensemble(const ReactionNetwork& net, const Setpoint& sp, const ControllerGains& gains,
                        const Vector& x0, const SimConfig& cfg, const EnsembleOptions& opts = {});

EnsembleStats aggregate(const ReactionNetwork& net, const Setpoint& sp,
                        const std::vector<Trajectory>& trajs, const EnsembleOptions& opts = {});

/// Fraction of trajectories whose recorded states, scaled by (|U*|, N*), stay
/// strictly inside the eps-ball around x* over the whole window.
double stability_estimate(const std::vector<Trajectory>& trajs, const Setpoint& sp, double eps);

/// Fraction of trajectories with ||N(t_end) - N*|| <= radius; aborted runs count as misses.
double terminal_ball_probability(const std::vector<Trajectory>& trajs, const Setpoint& sp,
                                 double radius);

}  // namespace cstrph
