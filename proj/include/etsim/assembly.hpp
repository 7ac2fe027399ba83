#pragma once

// Discrete nonlinear system for one time step.
//
// Unknowns are interleaved per node as (n_i, V_i, theta_i), so unknown
// 3i + k holds variable k of node i. Residual rows follow the same layout:
// row 3i is the continuity equation, row 3i + 1 the Poisson equation and row
// 3i + 2 the temperature equation at node i. All three stencils couple only
// nodes i - 1, i, i + 1, which bounds both bandwidths by 5.
//
// Continuity, interior node (trapezoidal weights w_D = w_A = 1/2):
//   (n_i^k - n_i^{k-1}) / dt - w_D (D_i^k + D_i^{k-1}) - w_A (A_i^k + A_i^{k-1}) - f_n
//   D_i = (p_{i+1} - 2 p_i + p_{i-1}) / dx^2,                 p = n theta
//   A_i = [(n_{i+1} + n_i)(V_{i+1} - V_i) - (n_i + n_{i-1})(V_i - V_{i-1})] / (2 dx^2)
// Temperature:
//   kappa0 / (2 dx^2) [(p_{i+1} + p_i)(theta_{i+1} - theta_i)
//                      - (p_i + p_{i-1})(theta_i - theta_{i-1})]
//   - (n_i / tau)(theta_i - theta_L,i) - f_theta
// Poisson:
//   -lambda^2 (V_{i+1} - 2 V_i + V_{i-1}) / dx^2 - (n_i - C_i) - f_V
//
// The time step is the difference of the two states' time stamps.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "etsim/banded.hpp"
#include "etsim/model.hpp"

namespace etsim {

inline constexpr std::size_t kVarN = 0;
inline constexpr std::size_t kVarV = 1;
inline constexpr std::size_t kVarTheta = 2;
inline constexpr std::size_t kVarsPerNode = 3;
inline constexpr std::size_t kBandwidth = 5;

[[nodiscard]] constexpr std::size_t unknown_index(std::size_t node, std::size_t var) noexcept
{
    return kVarsPerNode * node + var;
}

/// Source terms added to the right-hand sides, used to manufacture exact
/// solutions. Empty functions contribute nothing. `boundary`, when set,
/// replaces the configured Dirichlet data with time-dependent values.
struct MmsForcing {
    using Source = std::function<double(double x, double t)>;

    Source f_n;
    Source f_theta;
    Source f_v;
    std::function<BoundaryData(double t)> boundary;
};

/// Configuration plus nodal samples of the doping and lattice profiles.
class DiscreteProblem {
public:
    explicit DiscreteProblem(DeviceConfig cfg, MmsForcing forcing = {});

    [[nodiscard]] const DeviceConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const MmsForcing& forcing() const noexcept { return forcing_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return cfg_.grid.N; }
    [[nodiscard]] std::size_t unknowns() const noexcept { return kVarsPerNode * cfg_.grid.N; }
    [[nodiscard]] std::span<const double> x() const noexcept { return x_; }
    [[nodiscard]] std::span<const double> doping() const noexcept { return doping_; }
    [[nodiscard]] std::span<const double> lattice() const noexcept { return lattice_; }

    [[nodiscard]] BoundaryData boundary(double t) const;

    /// Time at which the continuity source is sampled for a step ending at t_k.
    [[nodiscard]] double continuity_source_time(double t_k, double dt) const noexcept;

private:
    DeviceConfig cfg_;
    MmsForcing forcing_;
    BoundaryData static_bc_;
    std::vector<double> x_;
    std::vector<double> doping_;
    std::vector<double> lattice_;
};

std::vector<double> residual_continuity(const State& state_k, const State& state_km1,
                                        const DiscreteProblem& problem);
std::vector<double> residual_temperature(const State& state_k, const DiscreteProblem& problem);
std::vector<double> residual_poisson(const State& state_k, const DiscreteProblem& problem);

/// All three families interleaved into one vector of length 3N.
std::vector<double> assemble_residual(const State& state_k, const State& state_km1,
                                      const DiscreteProblem& problem);

/// Exact Jacobian of assemble_residual with respect to the level-k unknowns.
BandedMatrix assemble_jacobian(const State& state_k, const State& state_km1,
                               const DiscreteProblem& problem);

std::vector<double> pack(const State& s);
State unpack(std::span<const double> u, double t);

}  // namespace etsim
