#pragma once

// The discrete device problem: grid, doping and lattice temperature profiles,
// boundary and initial data, and the envelope constants that bound the
// solution of the continuous model.

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "etsim/newton.hpp"
#include "etsim/scaling.hpp"

namespace etsim {

/// Uniform grid on [0, 1] with N nodes and a fixed time step.
struct Grid1D {
    std::size_t N = 201;
    double dt = 1.25e-4;
    double t_end = 1.0;

    [[nodiscard]] double dx() const noexcept { return 1.0 / static_cast<double>(N - 1); }
    /// x_i = i / (N - 1); exact at both endpoints.
    [[nodiscard]] double x(std::size_t i) const noexcept
    {
        return static_cast<double>(i) / static_cast<double>(N - 1);
    }
    [[nodiscard]] std::vector<double> nodes() const;

    void validate() const;
};

/// Piecewise-linear table of (x, value) samples over [0, 1].
struct Table {
    std::vector<double> x;
    std::vector<double> values;

    [[nodiscard]] double interpolate(double at) const;
    void validate(const char* what) const;

    /// Reads a two-column CSV file (x,value). A non-numeric first line is
    /// treated as a header.
    static Table from_csv(const std::string& path);
};

struct DopingProfile {
    enum class Kind { BallisticDiode, Constant, Tabulated };

    Kind kind = Kind::BallisticDiode;
    double constant = 1.0;
    Table table;

    static DopingProfile ballistic_diode() { return {}; }
    static DopingProfile uniform(double c) { return {Kind::Constant, c, {}}; }
    static DopingProfile tabulated(Table t) { return {Kind::Tabulated, 1.0, std::move(t)}; }

    void validate() const;
};

struct LatticeProfile {
    enum class Kind { Cooling, Heating, Constant, Tabulated };

    Kind kind = Kind::Cooling;
    double constant = 1.0;
    Table table;

    static LatticeProfile cooling() { return {Kind::Cooling, 1.0, {}}; }
    static LatticeProfile heating() { return {Kind::Heating, 1.0, {}}; }
    static LatticeProfile uniform(double c) { return {Kind::Constant, c, {}}; }
    static LatticeProfile tabulated(Table t) { return {Kind::Tabulated, 1.0, std::move(t)}; }

    void validate() const;
};

/// Scaled doping C(x); throws std::domain_error for x outside [0, 1].
double doping_at(const DopingProfile& profile, double x);
/// Scaled lattice temperature theta_L(x); throws std::domain_error for x outside [0, 1].
double lattice_at(const LatticeProfile& profile, double x);

enum class Scheme {
    ConsistentTrapezoidal,  // trapezoidal rule with weight 1/2 on both flux terms
    PaperLiteral,           // diffusion terms of both levels at full weight
    ImplicitEuler,          // level-k fluxes only; first-order reference
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Inputs to the density envelope that have no values for the device runs.
struct MonitorConfig {
    double kappa1 = 1.0;
    double n_star_lo = 1.0;
    double n_star_hi = 1.0;
    bool enforce = true;  // abort runs on hard-monitor violations
};

struct RunControl {
    enum class Mode { Transient, Steady };

    Mode mode = Mode::Steady;  // march to t_end, or until the steady criterion holds
    std::size_t max_steps = 1'000'000;
    double steady_tol = 1e-8;  // max-norm of the discrete time derivative
    int max_dt_halvings = 4;
};

struct DeviceConfig {
    Grid1D grid;
    DopingProfile doping;
    LatticeProfile lattice;
    double bias_scaled = 0.0;
    ScaledParams scaled;
    Scheme scheme = Scheme::ConsistentTrapezoidal;
    NewtonOptions newton;
    MonitorConfig monitor;
    RunControl run;

    void validate() const;

    /// Reference device: ballistic diode, GaAs scaling, N = 201, dt = 1.25e-4.
    static DeviceConfig ballistic(LatticeProfile lattice, double bias_volts);
    /// C = 1, theta_L = 1, U = 0: the uniform equilibrium.
    static DeviceConfig equilibrium();
};

/// Nodal state (n, theta, V) at scaled time t.
struct State {
    std::vector<double> n;
    std::vector<double> theta;
    std::vector<double> v;
    double t = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return n.size(); }
};

/// Dirichlet values at x = 0 and x = 1 for one variable.
struct BoundaryPair {
    double left = 0.0;
    double right = 0.0;
};

struct BoundaryData {
    BoundaryPair n;
    BoundaryPair theta;
    BoundaryPair v;
};

/// n_D = C, theta_D = theta_L at the contacts, V(0) = 0, V(1) = U.
BoundaryData boundary_data(const DeviceConfig& cfg);

/// n = n_I = C, theta = theta_L, V linear between the boundary values.
State initial_state(const DeviceConfig& cfg);

struct MonitorBounds {
    double m = 0.0;
    double M = 0.0;
    double k0 = 0.0;
    double K0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Envelope constants for the density and temperature bounds, on grid nodes:
/// M = max(sup theta_L, sup theta_D), m = min(inf theta_L, inf theta_D),
/// K0 = max(n^*, sup n_I, sup n_D, sup C), k0 = min(n_*, inf n_I, inf n_D),
/// alpha = sup theta_L / tau + 1 / lambda^2, beta = M / (tau kappa1).
MonitorBounds monitor_bounds(const DeviceConfig& cfg, double kappa1, double n_star_lo,
                             double n_star_hi);
MonitorBounds monitor_bounds(const DeviceConfig& cfg);

void to_json(nlohmann::json& j, const DeviceConfig& cfg);
/// Accepts optional sections; absent ones keep the ballistic-diode defaults.
/// Relative CSV paths for tabulated profiles resolve against `base_dir`.
DeviceConfig device_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");

}  // namespace etsim
