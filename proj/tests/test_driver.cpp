#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "etsim/driver.hpp"

using namespace etsim;

namespace {

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

}  // namespace

TEST_CASE("equilibrium is a fixed point of the time march")
{
    auto cfg = DeviceConfig::equilibrium();
    cfg.run.mode = RunControl::Mode::Transient;
    cfg.grid.t_end = 100 * cfg.grid.dt;
    const auto traj = run_transient(cfg);
    CHECK(traj.steps() == 100);
    const State& s = traj.final_state();
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(std::abs(s.n[i] - 1.0) <= 1e-10);
        CHECK(std::abs(s.theta[i] - 1.0) <= 1e-10);
        CHECK(std::abs(s.v[i]) <= 1e-10);
    }
    for (const auto& r : traj.newton_reports) {
        CHECK(r.iterations == 0);
    }
}

TEST_CASE("zero end time returns only the initial state")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 0.2);
    cfg.run.mode = RunControl::Mode::Transient;
    cfg.grid.t_end = 0.0;
    const auto traj = run_transient(cfg);
    CHECK(traj.steps() == 0);
    REQUIRE(traj.snapshots.size() == 1);
    CHECK(traj.snapshots[0].n == initial_state(cfg).n);
}

TEST_CASE("first step of the biased diode stays within the temperature envelope")
{
    for (auto lattice : {LatticeProfile::cooling(), LatticeProfile::heating()}) {
        for (double volts : {0.2, 1.0}) {
            const auto cfg = DeviceConfig::ballistic(lattice, volts);
            const auto bounds = monitor_bounds(cfg);
            const auto result = step(initial_state(cfg), cfg);
            CHECK(result.state.t == doctest::Approx(cfg.grid.dt));
            CHECK(result.report.converged);
            for (std::size_t i = 0; i < result.state.size(); ++i) {
                CHECK(result.state.n[i] >= kDensityFloor);
                CHECK(result.state.theta[i] >= bounds.m - kTemperatureSlack);
                CHECK(result.state.theta[i] <= bounds.M + kTemperatureSlack);
            }
        }
    }
}

TEST_CASE("snapshot schedule")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::heating(), 0.2);
    cfg.run.mode = RunControl::Mode::Transient;
    cfg.grid.t_end = 150 * cfg.grid.dt;
    const auto traj = run_transient(cfg);
    CHECK(traj.steps() == 150);
    CHECK(traj.snapshot_steps == std::vector<std::size_t>{0, 1, 10, 100, 150});
    CHECK(traj.final_state().t == doctest::Approx(cfg.grid.t_end));
    CHECK(traj.monitor_log.size() == 150);
}

TEST_CASE("face currents")
{
    auto cfg = DeviceConfig::equilibrium();
    cfg.grid.N = 17;
    State s{std::vector<double>(17, 1.0), std::vector<double>(17, 1.0), std::vector<double>(17), 0.0};
    for (std::size_t i = 0; i < 17; ++i) {
        s.v[i] = cfg.grid.x(i);
    }
    const auto faces = current_density(s, cfg);
    REQUIRE(faces.size() == 16);
    for (double j : faces) {
        CHECK(j == doctest::Approx(1.0));
    }
    CHECK(flux_uniformity(faces) <= 1e-14);
    CHECK(mean_current(faces) == doctest::Approx(1.0));
    CHECK(flux_uniformity(std::vector<double>(4, 0.0)) == 0.0);

    // Pure diffusion: p = n theta rising linearly gives J = dp/dx.
    for (std::size_t i = 0; i < 17; ++i) {
        s.v[i] = 0.0;
        s.n[i] = 1.0 + 2.0 * cfg.grid.x(i);
    }
    for (double j : current_density(s, cfg)) {
        CHECK(j == doctest::Approx(2.0));
    }
}

TEST_CASE("runs are deterministic")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 1.0);
    cfg.run.mode = RunControl::Mode::Transient;
    cfg.grid.t_end = 40 * cfg.grid.dt;
    const auto a = run_transient(cfg);
    const auto b = run_transient(cfg);
    CHECK(a.final_state().n == b.final_state().n);
    CHECK(a.final_state().theta == b.final_state().theta);
    CHECK(a.final_state().v == b.final_state().v);
}

TEST_CASE("steady states are independent of the time step")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 0.2);
    const State fine = steady_state(cfg);
    cfg.grid.dt = 2.5e-4;
    const State coarse = steady_state(cfg);
    CHECK(max_abs_diff(fine.n, coarse.n) <= 1e-6);
    CHECK(max_abs_diff(fine.theta, coarse.theta) <= 1e-6);
    CHECK(max_abs_diff(fine.v, coarse.v) <= 1e-6);
}

TEST_CASE("steady state carries a uniform current")
{
    const auto cfg = DeviceConfig::ballistic(LatticeProfile::heating(), 0.2);
    const auto traj = run_to_steady_state(DiscreteProblem(cfg));
    CHECK(traj.reached_steady_state);
    CHECK(flux_uniformity(current_density(traj.final_state(), cfg)) <= 1e-6);
}

TEST_CASE("step limit raises NoSteadyState with the partial trajectory")
{
    auto cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 0.2);
    cfg.run.max_steps = 5;
    try {
        (void)run_to_steady_state(DiscreteProblem(cfg));
        FAIL("expected NoSteadyState");
    } catch (const NoSteadyState& e) {
        CHECK(e.partial().steps() == 5);
        CHECK_FALSE(e.partial().reached_steady_state);
    }
}

TEST_CASE("current-voltage sweep")
{
    const auto cfg = DeviceConfig::ballistic(LatticeProfile::heating(), 0.0);
    const auto points = iv_sweep(cfg, {0.0, 0.2, 0.2, 1.0});
    REQUIRE(points.size() == 4);
    for (const auto& p : points) {
        CHECK(p.ok);
    }
    CHECK(std::abs(points[0].current) <= 1e-10);
    CHECK(points[1].current == points[2].current);
    CHECK(points[1].current > 0.0);
    CHECK(points[3].current > points[1].current);
    CHECK(points[3].bias_scaled == doctest::Approx(38.68).epsilon(1e-3));
}

TEST_CASE("negative density aborts the run")
{
    auto cfg = DeviceConfig::equilibrium();
    cfg.grid.N = 11;
    cfg.grid.dt = 1e-6;
    cfg.grid.t_end = 1e-5;
    cfg.run.mode = RunControl::Mode::Transient;
    const DiscreteProblem problem(cfg);
    State start = initial_state(cfg);
    start.n[4] = -0.5;
    try {
        (void)run_transient(problem, start);
        FAIL("expected MonitorViolation");
    } catch (const MonitorViolation& e) {
        CHECK(e.quantity() == "n");
        CHECK(e.node() == 4);
        CHECK(e.value() < 0.0);
        CHECK(e.time() == doctest::Approx(1e-6));
    }

    cfg.monitor.enforce = false;
    CHECK_NOTHROW((void)run_transient(DiscreteProblem(cfg), start));
}
