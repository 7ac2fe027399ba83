#include "etsim/driver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

namespace etsim {

namespace {

bool is_power_of_ten(std::size_t k)
{
    if (k == 0) {
        return false;
    }
    while (k % 10 == 0) {
        k /= 10;
    }
    return k == 1;
}

NewtonReport merge(NewtonReport into, const NewtonReport& next)
{
    if (into.residual_history.empty()) {
        return next;
    }
    into.iterations += next.iterations;
    into.residual_history.insert(into.residual_history.end(), next.residual_history.begin(),
                                 next.residual_history.end());
    into.converged = into.converged && next.converged;
    return into;
}

State solve_level(const State& old, double t_new, const DiscreteProblem& problem, NewtonReport& report)
{
    auto residual = [&](const std::vector<double>& u) {
        return assemble_residual(unpack(u, t_new), old, problem);
    };
    auto jacobian = [&](const std::vector<double>& u) {
        return assemble_jacobian(unpack(u, t_new), old, problem);
    };
    NewtonResult result = newton_solve(residual, jacobian, pack(old), problem.config().newton);
    report = merge(std::move(report), result.report);
    return unpack(result.solution, t_new);
}

StepResult advance(const State& old, double t_target, const DiscreteProblem& problem)
{
    const int max_halvings = problem.config().run.max_dt_halvings;
    std::string last_error;
    for (int halvings = 0; halvings <= max_halvings; ++halvings) {
        const std::size_t pieces = std::size_t{1} << halvings;
        const double h = (t_target - old.t) / static_cast<double>(pieces);
        try {
            NewtonReport report;
            State current = old;
            for (std::size_t j = 1; j <= pieces; ++j) {
                const double t_new = j == pieces ? t_target : old.t + static_cast<double>(j) * h;
                current = solve_level(current, t_new, problem, report);
            }
            return {std::move(current), std::move(report), halvings};
        } catch (const NoConvergence& e) {
            last_error = e.what();
        } catch (const SingularMatrixError& e) {
            last_error = e.what();
        }
    }
    std::ostringstream msg;
    msg << "time step to t = " << t_target << " failed after " << max_halvings
        << " step halvings: " << last_error;
    throw StepFailure(msg.str(), t_target);
}

void enforce_monitors(const MonitorRecord& rec, const MonitorBounds& bounds)
{
    auto fail = [&](const char* quantity, std::size_t node, double value, const char* relation,
                    double limit) {
        std::ostringstream msg;
        msg << "monitor violation: " << quantity << " = " << value << " at node " << node
            << ", t = " << rec.t << " (" << relation << ' ' << limit << ')';
        throw MonitorViolation(msg.str(), quantity, node, rec.t, value);
    };
    if (rec.min_n < kDensityFloor) {
        fail("n", rec.argmin_n, rec.min_n, "expected >=", kDensityFloor);
    }
    if (rec.min_theta < bounds.m - kTemperatureSlack) {
        fail("theta", rec.argmin_theta, rec.min_theta, "expected >=", bounds.m - kTemperatureSlack);
    }
    if (rec.max_theta > bounds.M + kTemperatureSlack) {
        fail("theta", rec.argmax_theta, rec.max_theta, "expected <=", bounds.M + kTemperatureSlack);
    }
}

double rate_of_change(const State& now, const State& before, double dt)
{
    double change = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
        change = std::max(change, std::abs(now.n[i] - before.n[i]));
        change = std::max(change, std::abs(now.theta[i] - before.theta[i]));
    }
    return change / dt;
}

enum class StopRule { FinalTime, SteadyState };

Trajectory march(const DiscreteProblem& problem, State initial, StopRule rule)
{
    const DeviceConfig& cfg = problem.config();
    const double dt = cfg.grid.dt;
    const bool check = cfg.monitor.enforce;
    const MonitorBounds bounds = monitor_bounds(cfg);

    std::size_t total_steps = cfg.run.max_steps;
    if (rule == StopRule::FinalTime) {
        total_steps = static_cast<std::size_t>(std::llround(cfg.grid.t_end / dt));
    }

    const double t0 = initial.t;
    Trajectory traj;
    traj.snapshots.push_back(initial);
    traj.snapshot_steps.push_back(0);

    State current = std::move(initial);
    std::size_t k = 0;
    while (k < total_steps) {
        ++k;
        const double t_target = t0 + static_cast<double>(k) * dt;
        StepResult result = advance(current, t_target, problem);

        MonitorRecord rec = record_monitors(result.state);
        traj.monitor_log.push_back(rec);
        traj.newton_reports.push_back(std::move(result.report));
        traj.dt_halvings.push_back(result.halvings);
        if (check) {
            enforce_monitors(rec, bounds);
        }

        const bool steady = rule == StopRule::SteadyState &&
                            rate_of_change(result.state, current, dt) <= cfg.run.steady_tol;
        current = std::move(result.state);

        if (steady) {
            traj.reached_steady_state = true;
            break;
        }
        if (is_power_of_ten(k) && k != total_steps) {
            traj.snapshots.push_back(current);
            traj.snapshot_steps.push_back(k);
        }
    }

    if (rule == StopRule::SteadyState && !traj.reached_steady_state) {
        std::ostringstream msg;
        msg << "no steady state within " << cfg.run.max_steps << " steps (t = " << current.t << ')';
        traj.snapshots.push_back(current);
        traj.snapshot_steps.push_back(k);
        throw NoSteadyState(msg.str(), std::move(traj));
    }
    if (k > 0) {
        traj.snapshots.push_back(std::move(current));
        traj.snapshot_steps.push_back(k);
    }
    return traj;
}

}  // namespace

MonitorRecord record_monitors(const State& s)
{
    MonitorRecord rec;
    rec.t = s.t;
    if (s.size() == 0) {
        return rec;
    }
    const auto [min_n, max_n] = std::minmax_element(s.n.begin(), s.n.end());
    const auto [min_t, max_t] = std::minmax_element(s.theta.begin(), s.theta.end());
    rec.min_n = *min_n;
    rec.max_n = *max_n;
    rec.min_theta = *min_t;
    rec.max_theta = *max_t;
    rec.argmin_n = static_cast<std::size_t>(min_n - s.n.begin());
    rec.argmax_n = static_cast<std::size_t>(max_n - s.n.begin());
    rec.argmin_theta = static_cast<std::size_t>(min_t - s.theta.begin());
    rec.argmax_theta = static_cast<std::size_t>(max_t - s.theta.begin());
    return rec;
}

StepResult step(const State& state_km1, const DiscreteProblem& problem)
{
    return advance(state_km1, state_km1.t + problem.config().grid.dt, problem);
}

StepResult step(const State& state_km1, const DeviceConfig& cfg)
{
    return step(state_km1, DiscreteProblem(cfg));
}

Trajectory run_transient(const DiscreteProblem& problem, State initial)
{
    return march(problem, std::move(initial), StopRule::FinalTime);
}

Trajectory run_transient(const DiscreteProblem& problem)
{
    return run_transient(problem, initial_state(problem.config()));
}

Trajectory run_transient(const DeviceConfig& cfg)
{
    cfg.validate();
    return run_transient(DiscreteProblem(cfg));
}

Trajectory run_to_steady_state(const DiscreteProblem& problem)
{
    return march(problem, initial_state(problem.config()), StopRule::SteadyState);
}

State steady_state(const DeviceConfig& cfg)
{
    cfg.validate();
    return run_to_steady_state(DiscreteProblem(cfg)).final_state();
}

std::vector<double> current_density(const State& state, const DeviceConfig& cfg)
{
    const std::size_t N = state.size();
    if (N < 2) {
        return {};
    }
    const double inv_dx = 1.0 / cfg.grid.dx();
    std::vector<double> faces(N - 1);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double dp = state.n[i + 1] * state.theta[i + 1] - state.n[i] * state.theta[i];
        const double drift = 0.5 * (state.n[i + 1] + state.n[i]) * (state.v[i + 1] - state.v[i]);
        faces[i] = (dp + drift) * inv_dx;
    }
    return faces;
}

double mean_current(const std::vector<double>& faces)
{
    if (faces.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (double j : faces) {
        sum += j;
    }
    return sum / static_cast<double>(faces.size());
}

double flux_uniformity(const std::vector<double>& faces)
{
    if (faces.empty()) {
        return 0.0;
    }
    const double mean = mean_current(faces);
    double deviation = 0.0;
    double magnitude = 0.0;
    for (double j : faces) {
        deviation = std::max(deviation, std::abs(j - mean));
        magnitude += std::abs(j);
    }
    magnitude /= static_cast<double>(faces.size());
    if (magnitude == 0.0) {
        return 0.0;
    }
    return deviation / magnitude;
}

std::vector<IvPoint> iv_sweep(const DeviceConfig& cfg, const std::vector<double>& biases_volts)
{
    cfg.validate();
    auto solve_point = [&cfg](double volts) {
        IvPoint point;
        point.bias_volts = volts;
        point.bias_scaled = scale_voltage(volts, cfg.scaled);
        try {
            if (!std::isfinite(volts)) {
                throw std::invalid_argument("bias is not finite");
            }
            DeviceConfig local = cfg;
            local.bias_scaled = point.bias_scaled;
            const Trajectory traj = run_to_steady_state(DiscreteProblem(local));
            const auto faces = current_density(traj.final_state(), local);
            point.current = mean_current(faces);
            point.flux_uniformity = flux_uniformity(faces);
            for (const auto& report : traj.newton_reports) {
                point.newton_iters_total += static_cast<std::size_t>(report.iterations);
            }
            point.ok = true;
            point.status = "ok";
        } catch (const std::exception& e) {
            point.ok = false;
            point.status = e.what();
        }
        return point;
    };

    std::vector<std::future<IvPoint>> pending;
    pending.reserve(biases_volts.size());
    for (double volts : biases_volts) {
        pending.push_back(std::async(std::launch::async, solve_point, volts));
    }
    std::vector<IvPoint> points;
    points.reserve(pending.size());
    for (auto& f : pending) {
        points.push_back(f.get());
    }
    return points;
}

}  // namespace etsim
