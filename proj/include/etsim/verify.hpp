#pragma once

// Verification harness: manufactured solutions with convergence studies, and
// auditing of recorded trajectories against the envelope bounds.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "etsim/assembly.hpp"
#include "etsim/driver.hpp"
#include "etsim/model.hpp"

namespace etsim {

/// n* = 1 + a/2 sin(pi x) e^{-t}, theta* = 1 + a/4 cos(pi x) e^{-t},
/// V* = a x (1 - x) e^{-t}.
struct ManufacturedSolution {
    double amplitude = 0.3;

    [[nodiscard]] double n(double x, double t) const;
    [[nodiscard]] double theta(double x, double t) const;
    [[nodiscard]] double v(double x, double t) const;

    [[nodiscard]] State exact_state(const Grid1D& grid, double t) const;
    [[nodiscard]] BoundaryData boundary(double t) const;
};

/// Sources that make the manufactured solution solve the continuous system
///   dn/dt - d/dx(d(n theta)/dx + n dV/dx) = f_n
///   kappa0 d/dx(n theta dtheta/dx) - n/tau (theta - theta_L) = f_theta
///   -lambda^2 d2V/dx2 - (n - C) = f_V
/// with all derivatives taken analytically. Doping and lattice temperature
/// come from `cfg`.
MmsForcing analytic_forcing(const ManufacturedSolution& ms, const DeviceConfig& cfg);

/// Sources built from the discrete spatial stencils applied to the exact
/// nodal values, so that the semi-discrete system is solved exactly by the
/// manufactured solution and only the time-integration error remains.
MmsForcing semidiscrete_forcing(const ManufacturedSolution& ms, const DeviceConfig& cfg);

enum class StudyMode { Spatial, Temporal };

std::string to_string(StudyMode mode);

struct ConvergenceLevel {
    std::size_t N = 0;
    double dt = 0.0;
    std::size_t steps = 0;
    std::array<double, 3> error_l2{};   // n, theta, V over interior nodes
    std::array<double, 3> error_max{};
};

struct ConvergenceReport {
    StudyMode mode = StudyMode::Spatial;
    Scheme scheme = Scheme::ConsistentTrapezoidal;
    double amplitude = 0.0;
    double t_end = 0.0;
    std::vector<ConvergenceLevel> levels;
    // One entry per consecutive pair of levels; NaN where an error vanishes.
    std::vector<std::array<double, 3>> order_l2;
    std::vector<std::array<double, 3>> order_max;

    /// True when every observed L2 order lies in [lo, hi], or when all errors
    /// are at rounding level (zero-amplitude runs).
    [[nodiscard]] bool orders_within(double lo, double hi) const;
    [[nodiscard]] double max_error() const;
};

inline constexpr double kMmsEndTime = 0.1;

/// Template for manufactured-solution runs: C = 1, theta_L = 1, GaAs
/// scaling, monitors disabled.
DeviceConfig mms_template(Scheme scheme);

/// Runs the analytically forced problem to t = 0.1 on N - 1 = (base_N - 1) 2^j
/// intervals, j = 0..levels-1, with dt = dx^2.
ConvergenceReport mms_spatial_order(std::size_t base_N, std::size_t levels, const DeviceConfig& tmpl,
                                    double amplitude);

/// Runs the semi-discretely forced problem to t = 0.1 with dt = base_dt / 2^j
/// on the template's grid.
ConvergenceReport mms_temporal_order(double base_dt, std::size_t levels, const DeviceConfig& tmpl,
                                     double amplitude);

/// Largest entrywise discrepancy between the analytic Jacobian and central
/// differences of the residual with step h, each entry measured relative to
/// max(|J_ij|, max_k |J_ik|).
double jacobian_fd_error(const State& state_k, const State& state_km1, const DiscreteProblem& problem,
                         double h = 1e-7);

struct MonitorFinding {
    std::string quantity;  // "n", "theta", "n-lower-envelope", "n-upper-envelope"
    std::size_t node = 0;
    double t = 0.0;
    double value = 0.0;
    double limit = 0.0;
};

struct MonitorAudit {
    bool hard_pass = true;
    bool soft_pass = true;
    std::vector<MonitorFinding> hard_violations;
    std::vector<MonitorFinding> soft_violations;
};

/// Hard checks: n >= -1e-12 and m - 1e-8 <= theta <= M + 1e-8. Soft checks:
/// k0 e^{-alpha t} <= n <= K0 e^{beta t}. Never throws.
MonitorAudit audit_monitors(const Trajectory& traj, const MonitorBounds& bounds);

void to_json(nlohmann::json& j, const ConvergenceReport& report);
std::string format_table(const ConvergenceReport& report);
std::string to_csv(const ConvergenceReport& report);

}  // namespace etsim
