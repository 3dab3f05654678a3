#include "cstrph/case_study.hpp"
#include "cstrph/sim.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace cstrph;

namespace {

struct Fixture {
    ReactionNetwork net = case_study::network();
    Setpoint sp = case_study::setpoint(net);
    ControllerGains K = case_study::gains();
    Vector x0 = case_study::initial_state(net);
};

bool same(const Trajectory& a, const Trajectory& b)
{
    if (a.times != b.times || a.states.size() != b.states.size()) return false;
    for (std::size_t k = 0; k < a.states.size(); ++k)
        if (record_row(a, k) != record_row(b, k)) return false;
    return a.record_events == b.record_events;
}

}  // namespace

TEST(Sim, ConfigValidation)
{
    SimConfig c;
    EXPECT_NO_THROW(c.validate());
    c.dt = 0.0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.t_end = 1e-4;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = SimConfig{};
    c.n_traj = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    EXPECT_EQ(SimConfig{}.num_steps(), 10000u);
}

TEST(Sim, ModeNames)
{
    for (auto m : {SimMode::ClosedLoop, SimMode::OpenLoop, SimMode::Deterministic, SimMode::Isolated})
        EXPECT_EQ(parse_sim_mode(to_string(m)), m);
    EXPECT_THROW(parse_sim_mode("chaotic"), std::invalid_argument);
}

TEST(Sim, WienerStreamIsReproducibleAndIndependent)
{
    WienerStream a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    for (int k = 0; k < 100; ++k) {
        const auto wa = a.next(1e-3);
        EXPECT_EQ(wa, b.next(1e-3));
        EXPECT_NE(wa, c.next(1e-3));
        EXPECT_NE(wa, d.next(1e-3));
    }
}

TEST(Sim, WienerIncrementVariance)
{
    WienerStream w(7, 3);
    const double dt = 0.01;
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int k = 0; k < n; ++k)
        for (double v : w.next(dt)) {
            sum += v;
            sq += v * v;
        }
    EXPECT_NEAR(sum / (3 * n), 0.0, 5e-3 * std::sqrt(dt) * 10);
    EXPECT_NEAR(sq / (3 * n) / dt, 1.0, 0.03);
}

TEST(Sim, StepFixedPointAtClosedSystemEquilibrium)
{
    const auto net = oracle::consistent_ab();
    const double T = 330.0;
    const Vector x = oracle::state(net, oracle::consistent_ab_equilibrium(2.0, T), T);
    auto quiet = net;
    quiet.noise = NoiseSpec{};
    const StepResult r = step_em(quiet, x, InputVector{}, 1e-3, {0.0, 0.0, 0.0});
    EXPECT_LT(oracle::rel_err(r.x, x), 1e-15);
}

TEST(Sim, StepMatchesEulerOnRawBalances)
{
    Fixture f;
    oracle::StateSampler s(50);
    for (int k = 0; k < 20; ++k) {
        const Vector x = s.sample(f.net);
        const InputVector u{s.uniform(0, 1e-5), s.uniform(-3, 3)};
        const std::array<double, 3> dW{s.uniform(-0.03, 0.03), s.uniform(-0.03, 0.03),
                                       s.uniform(-0.03, 0.03)};
        const double dt = 1e-3;
        const StepResult r = step_em(f.net, x, u, dt, dW);
        const Vector expected = x + oracle::drift(f.net, x, u.q, u.Qdot) * dt +
                                oracle::diffusion(f.net, x, u.q, u.Qdot) *
                                    Eigen::Vector3d(dW[0], dW[1], dW[2]);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            EXPECT_LT(oracle::rel_err(r.x(i), expected(i)), 1e-12);
    }
}

TEST(Sim, FloorClampIsLogged)
{
    Fixture f;
    auto net = f.net;
    net.noise = NoiseSpec{};
    Vector N(2);
    N << 1.0, 1.0;
    const Vector x = oracle::state(net, N, 330.0);
    // An outflow of twice the reactor volume in one step drains B below the floor.
    const StepResult r = step_em(net, x, InputVector{2.0, 0.0}, 1e-3, {0.0, 0.0, 0.0});
    EXPECT_EQ(r.x(2), kMolesFloor);
    ASSERT_FALSE(r.events.empty());
    EXPECT_EQ(r.events.front().kind, SimEvent::Kind::FloorHit);
}

TEST(Sim, NegativeTemperatureTriggersSubstepping)
{
    Fixture f;
    auto net = f.net;
    net.noise = NoiseSpec{};
    // The heat gain is so large that one full step cools past absolute zero,
    // while half a step lands below T* where the feedback turns to heating.
    const ControllerGains K = ControllerGains::diagonal(case_study::kK1, 1e12);
    const StepResult r = step_em(net, f.sp, K, f.x0, 1e-3, {0.0, 0.0, 0.0});
    bool retried = false;
    for (const auto& e : r.events) retried |= e.kind == SimEvent::Kind::StepRetry;
    EXPECT_TRUE(retried);
    EXPECT_GT(oracle::temp(net, r.x), 0.0);
}

TEST(Sim, UnrecoverableStepThrows)
{
    Fixture f;
    auto net = f.net;
    net.noise = NoiseSpec{};
    // A constant heat draw is not helped by substepping.
    const double Qdot = -1e12;
    EXPECT_THROW(step_em(net, f.x0, InputVector{0.0, Qdot}, 1e-3, {0.0, 0.0, 0.0}), DomainError);
}

TEST(Sim, IsolatedRunObeysFirstAndSecondLaw)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::Isolated;
    cfg.record_every = 1;
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    ASSERT_FALSE(tr.aborted);
    ASSERT_EQ(tr.times.size(), cfg.num_steps() + 1);
    const double U0 = tr.states.front()(0);
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
        EXPECT_LT(std::abs(tr.states[k](0) - U0) / std::abs(U0), 1e-9);
        if (k) EXPECT_GE(tr.S[k], tr.S[k - 1]);
        EXPECT_EQ(tr.q[k], 0.0);
        EXPECT_EQ(tr.Qdot[k], 0.0);
    }
}

TEST(Sim, DeterministicClosedLoopConverges)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::Deterministic;
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    ASSERT_FALSE(tr.aborted);
    EXPECT_NEAR(tr.T.back(), 331.9, 0.1);
    EXPECT_LT((tr.states.back().tail(2) - f.sp.N_star()).norm(), 0.01);
    EXPECT_DOUBLE_EQ(tr.times.back(), 10.0);
}

TEST(Sim, DeterministicModeIsFirstOrderInDt)
{
    Fixture f;
    SimConfig a;
    a.mode = SimMode::Deterministic;
    a.t_end = 2.0;
    a.dt = 2e-3;
    a.record_every = 1000;
    SimConfig b = a;
    b.dt = 1e-3;
    SimConfig c = a;
    c.dt = 5e-4;
    const Vector xa = simulate(f.net, f.sp, f.K, f.x0, a).states.back();
    const Vector xb = simulate(f.net, f.sp, f.K, f.x0, b).states.back();
    const Vector xc = simulate(f.net, f.sp, f.K, f.x0, c).states.back();
    const double ratio = (xa - xb).norm() / (xb - xc).norm();
    EXPECT_NEAR(ratio, 2.0, 0.2);
}

TEST(Sim, SameSeedSameTrajectory)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 1.0;
    EXPECT_TRUE(same(simulate(f.net, f.sp, f.K, f.x0, cfg, 3), simulate(f.net, f.sp, f.K, f.x0, cfg, 3)));
    EXPECT_FALSE(same(simulate(f.net, f.sp, f.K, f.x0, cfg, 3), simulate(f.net, f.sp, f.K, f.x0, cfg, 4)));
}

TEST(Sim, RecordsIncludeEndpoint)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 0.105;
    cfg.record_every = 10;
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    ASSERT_EQ(tr.times.size(), 12u);
    EXPECT_DOUBLE_EQ(tr.times.back(), 0.105);
    EXPECT_EQ(tr.record_events.size(), tr.times.size());
}

TEST(Sim, OpenLoopUsesFixedInput)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::OpenLoop;
    cfg.t_end = 0.1;
    cfg.open_loop_input = {2e-6, -1.0};
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    for (std::size_t k = 0; k < tr.q.size(); ++k) {
        EXPECT_EQ(tr.q[k], 2e-6);
        EXPECT_EQ(tr.Qdot[k], -1.0);
    }
}

TEST(Sim, OpenLoopUntilSwitchesToController)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::Deterministic;
    cfg.t_end = 1.0;
    cfg.record_every = 100;
    cfg.open_loop_until = 0.5;
    cfg.open_loop_input = {9.15e-4, 0.0};
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    EXPECT_EQ(tr.q[0], 9.15e-4);
    EXPECT_EQ(tr.Qdot[4], 0.0);
    EXPECT_NE(tr.Qdot[5], 0.0);
    EXPECT_NE(tr.Qdot.back(), 0.0);
}

TEST(Sim, SaturationEventsAreLogged)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::Deterministic;
    cfg.t_end = 0.1;
    const ControllerGains big = ControllerGains::diagonal(1.0, case_study::kK2);
    const Trajectory tr = simulate(f.net, f.sp, big, f.x0, cfg);
    ASSERT_FALSE(tr.events.empty());
    EXPECT_EQ(tr.events.front().kind, SimEvent::Kind::Saturation);
    EXPECT_NE(tr.record_events[1].find("saturation@0"), std::string::npos);
}

TEST(Sim, AbortIsRecorded)
{
    Fixture f;
    SimConfig cfg;
    cfg.mode = SimMode::OpenLoop;
    cfg.t_end = 0.1;
    cfg.open_loop_input = {0.0, -1e12};
    const Trajectory tr = simulate(f.net, f.sp, f.K, f.x0, cfg);
    EXPECT_TRUE(tr.aborted);
    EXPECT_EQ(tr.abort_step, 0u);
    EXPECT_FALSE(tr.abort_reason.empty());
    EXPECT_EQ(tr.events.back().kind, SimEvent::Kind::Abort);
}

TEST(Sim, EnsembleOfOneEqualsTrajectory)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 0.5;
    const EnsembleResult r = ensemble(f.net, f.sp, f.K, f.x0, cfg);
    ASSERT_EQ(r.trajectories.size(), 1u);
    const Trajectory& tr = r.trajectories[0];
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        EXPECT_EQ(Vector(r.stats.mean.row(static_cast<Eigen::Index>(k)).transpose()), record_row(tr, k));
        EXPECT_TRUE(r.stats.std.row(static_cast<Eigen::Index>(k)).isZero(0.0));
    }
    EXPECT_EQ(r.stats.columns, series_names(f.net));
}

TEST(Sim, EnsembleIndependentOfThreadCount)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 0.5;
    cfg.n_traj = 8;
    cfg.threads = 1;
    const EnsembleResult a = ensemble(f.net, f.sp, f.K, f.x0, cfg);
    cfg.threads = 4;
    const EnsembleResult b = ensemble(f.net, f.sp, f.K, f.x0, cfg);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_TRUE(same(a.trajectories[i], b.trajectories[i]));
    EXPECT_EQ(a.stats.mean, b.stats.mean);
    EXPECT_EQ(a.stats.std, b.stats.std);
    EXPECT_TRUE(same(a.trajectories[5], simulate(f.net, f.sp, f.K, f.x0, cfg, 5)));
}

TEST(Sim, EnsembleStatsMatchManualMoments)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 0.2;
    cfg.n_traj = 5;
    const EnsembleResult r = ensemble(f.net, f.sp, f.K, f.x0, cfg);
    const std::size_t k = r.stats.times.size() - 1;
    const Eigen::Index T_col = 3;
    double mean = 0.0;
    for (const auto& tr : r.trajectories) mean += tr.T[k];
    mean /= 5.0;
    double var = 0.0;
    for (const auto& tr : r.trajectories) var += (tr.T[k] - mean) * (tr.T[k] - mean);
    var /= 4.0;
    EXPECT_NEAR(r.stats.mean(static_cast<Eigen::Index>(k), T_col), mean, 1e-12 * mean);
    EXPECT_NEAR(r.stats.std(static_cast<Eigen::Index>(k), T_col), std::sqrt(var), 1e-9 * std::sqrt(var) + 1e-15);
    EXPECT_EQ(r.stats.contributors[k], 5u);
}

TEST(Sim, StabilityEstimateTrivialCases)
{
    Fixture f;
    Trajectory at_star;
    at_star.times = {0.0, 1.0};
    at_star.states = {f.sp.x_star, f.sp.x_star};
    std::vector<Trajectory> trajs(3, at_star);
    EXPECT_EQ(stability_estimate(trajs, f.sp, 1e-6), 1.0);
    EXPECT_EQ(stability_estimate(trajs, f.sp, 0.0), 0.0);
    EXPECT_EQ(terminal_ball_probability(trajs, f.sp, 0.0), 1.0);
}

TEST(Sim, StabilityEstimateMonotoneInEpsilon)
{
    Fixture f;
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.n_traj = 6;
    const EnsembleResult r = ensemble(f.net, f.sp, f.K, f.x0, cfg);
    double prev = 0.0;
    for (double eps : {0.0, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        const double p = stability_estimate(r.trajectories, f.sp, eps);
        EXPECT_GE(p, prev);
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
        prev = p;
    }
    EXPECT_EQ(stability_estimate(r.trajectories, f.sp, 0.0), 0.0);
}

TEST(Sim, AbortedTrajectoriesCountAsMisses)
{
    Fixture f;
    Trajectory ok, bad;
    ok.times = {0.0};
    ok.states = {f.sp.x_star};
    bad = ok;
    bad.aborted = true;
    EXPECT_EQ(terminal_ball_probability({ok, bad}, f.sp, 0.05), 0.5);
    EXPECT_EQ(stability_estimate({ok, bad}, f.sp, 0.05), 0.5);
}
