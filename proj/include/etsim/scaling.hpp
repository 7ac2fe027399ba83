#pragma once

// Conversion of SI device parameters into the dimensionless numbers consumed
// by the solver: squared Debye length, energy relaxation time, heat
// conductivity prefactor, reference time and thermal voltage.

#include <nlohmann/json_fwd.hpp>

namespace etsim {

/// Raw device constants in SI units. Defaults reproduce the GaAs ballistic
/// diode parameter table.
struct PhysicalParams {
    double k_B = 1.3807e-23;     // J/K
    double eps0 = 8.8542e-12;    // F/m
    double eps_r = 11.7;
    double m0 = 9.11e-31;        // kg
    double q = 1.602e-19;        // C
    double C_max = 1.0e24;       // 1/m^3
    double T0 = 300.0;           // K
    double L = 75.0e-9;          // m
    double m_eff_ratio = 0.067;  // m_n = m_eff_ratio * m0
    double tau0 = 0.9e-12;       // s
    double kappa0_scaled = 4.88e-2;

    [[nodiscard]] double effective_mass() const { return m_eff_ratio * m0; }

    /// Throws std::invalid_argument naming the first offending field.
    void validate() const;

    static PhysicalParams gaas() { return {}; }
};

struct ScaledParams {
    double lambda2 = 0.0;    // squared scaled Debye length
    double tau = 0.0;        // scaled energy relaxation time
    double kappa0 = 0.0;     // heat-conductivity prefactor
    double t_star = 0.0;     // reference time [s]
    double u_thermal = 0.0;  // thermal voltage k_B T0 / q [V]

    void validate() const;
};

/// t* = sqrt(m_n L^2 / (k_B T0)), tau = tau0 / t*,
/// lambda^2 = eps0 eps_r k_B T0 / (q^2 C_max L^2).
ScaledParams compute_scaled(const PhysicalParams& p);

double scale_voltage(double volts, const ScaledParams& s);
double unscale_voltage(double scaled, const ScaledParams& s);

// JSON mapping. Parsing a PhysicalParams object requires every field; a
// missing one raises std::invalid_argument naming it.
void to_json(nlohmann::json& j, const PhysicalParams& p);
void from_json(const nlohmann::json& j, PhysicalParams& p);
void to_json(nlohmann::json& j, const ScaledParams& s);
void from_json(const nlohmann::json& j, ScaledParams& s);

}  // namespace etsim
