#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "etsim/assembly.hpp"
#include "etsim/model.hpp"
#include "etsim/newton.hpp"

namespace etsim {

/// Extremes of n and theta over all nodes of one state, with their locations.
struct MonitorRecord {
    double t = 0.0;
    double min_n = 0.0;
    double max_n = 0.0;
    double min_theta = 0.0;
    double max_theta = 0.0;
    std::size_t argmin_n = 0;
    std::size_t argmax_n = 0;
    std::size_t argmin_theta = 0;
    std::size_t argmax_theta = 0;
};

MonitorRecord record_monitors(const State& s);

struct Trajectory {
    std::vector<State> snapshots;
    std::vector<std::size_t> snapshot_steps;
    std::vector<NewtonReport> newton_reports;  // one per step
    std::vector<int> dt_halvings;              // one per step
    std::vector<MonitorRecord> monitor_log;    // one per step
    bool reached_steady_state = false;

    [[nodiscard]] std::size_t steps() const noexcept { return monitor_log.size(); }
    [[nodiscard]] const State& final_state() const { return snapshots.back(); }
};

/// Newton failed on every attempted subdivision of a time step.
class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    [[nodiscard]] double time() const noexcept { return t_; }

private:
    double t_;
};

/// A hard monitor (n >= 0 or m <= theta <= M) was violated.
class MonitorViolation : public std::runtime_error {
public:
    MonitorViolation(const std::string& what, std::string quantity, std::size_t node, double t,
                     double value)
        : std::runtime_error(what), quantity_(std::move(quantity)), node_(node), t_(t), value_(value)
    {
    }
    [[nodiscard]] const std::string& quantity() const noexcept { return quantity_; }
    [[nodiscard]] std::size_t node() const noexcept { return node_; }
    [[nodiscard]] double time() const noexcept { return t_; }
    [[nodiscard]] double value() const noexcept { return value_; }

private:
    std::string quantity_;
    std::size_t node_;
    double t_;
    double value_;
};

class NoSteadyState : public std::runtime_error {
public:
    NoSteadyState(const std::string& what, Trajectory partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    [[nodiscard]] const Trajectory& partial() const noexcept { return partial_; }

private:
    Trajectory partial_;
};

inline constexpr double kDensityFloor = -1e-12;
inline constexpr double kTemperatureSlack = 1e-8;

struct StepResult {
    State state;
    NewtonReport report;  // merged over sub-steps when the step was subdivided
    int halvings = 0;
};

/// Advances one time step of size cfg.grid.dt from state_km1. If Newton
/// fails, the step is re-run as 2, 4, ... sub-steps up to
/// cfg.run.max_dt_halvings times before StepFailure is raised.
StepResult step(const State& state_km1, const DiscreteProblem& problem);
StepResult step(const State& state_km1, const DeviceConfig& cfg);

/// Marches to cfg.grid.t_end. Snapshots are taken at step 0, at steps
/// 10^j and at the final step.
Trajectory run_transient(const DiscreteProblem& problem);
Trajectory run_transient(const DiscreteProblem& problem, State initial);
Trajectory run_transient(const DeviceConfig& cfg);

/// Marches until max(|n^k - n^{k-1}|, |theta^k - theta^{k-1}|) / dt falls to
/// cfg.run.steady_tol, recording the same snapshot schedule. Throws
/// NoSteadyState after cfg.run.max_steps steps.
Trajectory run_to_steady_state(const DiscreteProblem& problem);
State steady_state(const DeviceConfig& cfg);

/// Face currents J_{i+1/2} = (p_{i+1} - p_i)/dx + (n_{i+1} + n_i)(V_{i+1} - V_i)/(2 dx).
std::vector<double> current_density(const State& state, const DeviceConfig& cfg);

/// max_i |J_i - mean J| / mean |J|; zero for an identically vanishing current.
double flux_uniformity(const std::vector<double>& faces);
double mean_current(const std::vector<double>& faces);

struct IvPoint {
    double bias_volts = 0.0;
    double bias_scaled = 0.0;
    double current = 0.0;
    double flux_uniformity = 0.0;
    std::size_t newton_iters_total = 0;
    bool ok = false;
    std::string status;
};

/// Steady state and mean face current for each bias. Points run
/// concurrently; a failing point is recorded and the sweep continues.
std::vector<IvPoint> iv_sweep(const DeviceConfig& cfg, const std::vector<double>& biases_volts);

}  // namespace etsim
