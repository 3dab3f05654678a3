#include "cstrph/case_study.hpp"
#include "cstrph/control.hpp"
#include "cstrph/equilibrium.hpp"
#include "cstrph/phs.hpp"
#include "cstrph/sim.hpp"
#include "cstrph/transform.hpp"

#include <benchmark/benchmark.h>

using namespace cstrph;

namespace {

struct CaseStudy {
    ReactionNetwork net = case_study::network();
    Setpoint sp = case_study::setpoint(net);
    ControllerGains K = case_study::gains();
    Vector x0 = case_study::initial_state(net);
};

const CaseStudy& cs()
{
    static const CaseStudy c;
    return c;
}

void BM_Assemble(benchmark::State& state)
{
    const auto& c = cs();
    const ThermoState s = ThermoState::from_vector(c.net, c.x0);
    for (auto _ : state) benchmark::DoNotOptimize(assemble(c.net, s, c.sp.u_star));
}
BENCHMARK(BM_Assemble);

void BM_ControlLaw(benchmark::State& state)
{
    const auto& c = cs();
    const ThermoState s = ThermoState::from_vector(c.net, c.x0);
    for (auto _ : state) benchmark::DoNotOptimize(control_law(c.net, c.sp, c.K, s));
}
BENCHMARK(BM_ControlLaw);

void BM_ControlledStep(benchmark::State& state)
{
    const auto& c = cs();
    const std::array<double, 3> dW{1e-2, -2e-2, 5e-3};
    for (auto _ : state) benchmark::DoNotOptimize(step_em(c.net, c.sp, c.K, c.x0, 1e-3, dW));
}
BENCHMARK(BM_ControlledStep);

void BM_ConditionChecks(benchmark::State& state)
{
    const auto& c = cs();
    const ThermoState s = ThermoState::from_vector(c.net, c.x0);
    const ScalarField A = AvailabilityHamiltonian(c.net, c.sp).field();
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_norm_condition(c.net, s));
        benchmark::DoNotOptimize(check_theorem1(c.net, s, A));
        benchmark::DoNotOptimize(check_theorem2(c.net, s, c.sp.V_star));
    }
}
BENCHMARK(BM_ConditionChecks);

void BM_SteadyStateScan(benchmark::State& state)
{
    const auto& c = cs();
    const double T_w = jacket_temperature(c.net, c.sp.u_star.Qdot, c.sp.T_star);
    ScanOptions opts;
    opts.grid_points = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(steady_states(c.net, c.sp.u_star.q, T_w, 250.0, 500.0, opts));
}
BENCHMARK(BM_SteadyStateScan)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Ensemble(benchmark::State& state)
{
    const auto& c = cs();
    SimConfig cfg;
    cfg.t_end = 1.0;
    cfg.n_traj = 16;
    cfg.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(ensemble(c.net, c.sp, c.K, c.x0, cfg));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_traj * cfg.num_steps()));
}
BENCHMARK(BM_Ensemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
