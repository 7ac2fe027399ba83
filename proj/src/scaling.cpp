#include "etsim/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace etsim {

namespace {

void require_positive(double value, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument(std::string("parameter '") + name +
                                    "' must be finite and strictly positive");
    }
}

double required_field(const nlohmann::json& j, const char* name)
{
    auto it = j.find(name);
    if (it == j.end()) {
        throw std::invalid_argument(std::string("missing field '") + name + "'");
    }
    if (!it->is_number()) {
        throw std::invalid_argument(std::string("field '") + name + "' must be a number");
    }
    return it->get<double>();
}

}  // namespace

void PhysicalParams::validate() const
{
    require_positive(k_B, "k_B");
    require_positive(eps0, "eps0");
    require_positive(eps_r, "eps_r");
    require_positive(m0, "m0");
    require_positive(q, "q");
    require_positive(C_max, "C_max");
    require_positive(T0, "T0");
    require_positive(L, "L");
    require_positive(m_eff_ratio, "m_eff_ratio");
    require_positive(tau0, "tau0");
    require_positive(kappa0_scaled, "kappa0_scaled");
    if (eps_r < 1.0) {
        throw std::invalid_argument("parameter 'eps_r' must be >= 1");
    }
    if (m_eff_ratio > 1.0) {
        throw std::invalid_argument("parameter 'm_eff_ratio' must lie in (0, 1]");
    }
}

void ScaledParams::validate() const
{
    require_positive(lambda2, "lambda2");
    require_positive(tau, "tau");
    require_positive(kappa0, "kappa0");
    require_positive(t_star, "t_star");
    require_positive(u_thermal, "u_thermal");
}

ScaledParams compute_scaled(const PhysicalParams& p)
{
    p.validate();
    const double thermal_energy = p.k_B * p.T0;

    ScaledParams s;
    s.t_star = std::sqrt(p.effective_mass() * p.L * p.L / thermal_energy);
    s.tau = p.tau0 / s.t_star;
    s.lambda2 = p.eps0 * p.eps_r * thermal_energy / (p.q * p.q * p.C_max * p.L * p.L);
    s.kappa0 = p.kappa0_scaled;
    s.u_thermal = thermal_energy / p.q;
    return s;
}

double scale_voltage(double volts, const ScaledParams& s) { return volts / s.u_thermal; }

double unscale_voltage(double scaled, const ScaledParams& s) { return scaled * s.u_thermal; }

void to_json(nlohmann::json& j, const PhysicalParams& p)
{
    j = nlohmann::json{{"k_B", p.k_B},
                       {"eps0", p.eps0},
                       {"eps_r", p.eps_r},
                       {"m0", p.m0},
                       {"q", p.q},
                       {"C_max", p.C_max},
                       {"T0", p.T0},
                       {"L", p.L},
                       {"m_eff_ratio", p.m_eff_ratio},
                       {"tau0", p.tau0},
                       {"kappa0_scaled", p.kappa0_scaled}};
}

void from_json(const nlohmann::json& j, PhysicalParams& p)
{
    if (!j.is_object()) {
        throw std::invalid_argument("physical parameters must be a JSON object");
    }
    p.k_B = required_field(j, "k_B");
    p.eps0 = required_field(j, "eps0");
    p.eps_r = required_field(j, "eps_r");
    p.m0 = required_field(j, "m0");
    p.q = required_field(j, "q");
    p.C_max = required_field(j, "C_max");
    p.T0 = required_field(j, "T0");
    p.L = required_field(j, "L");
    p.m_eff_ratio = required_field(j, "m_eff_ratio");
    p.tau0 = required_field(j, "tau0");
    p.kappa0_scaled = required_field(j, "kappa0_scaled");
}

void to_json(nlohmann::json& j, const ScaledParams& s)
{
    j = nlohmann::json{{"lambda2", s.lambda2},
                       {"tau", s.tau},
                       {"kappa0", s.kappa0},
                       {"t_star", s.t_star},
                       {"u_thermal", s.u_thermal}};
}

void from_json(const nlohmann::json& j, ScaledParams& s)
{
    if (!j.is_object()) {
        throw std::invalid_argument("scaled parameters must be a JSON object");
    }
    s.lambda2 = required_field(j, "lambda2");
    s.tau = required_field(j, "tau");
    s.kappa0 = required_field(j, "kappa0");
    s.t_star = required_field(j, "t_star");
    s.u_thermal = required_field(j, "u_thermal");
}

}  // namespace etsim
