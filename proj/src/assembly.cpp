#include "etsim/assembly.hpp"

#include <stdexcept>
#include <string>

namespace etsim {

namespace {

struct FluxWeights {
    double diffusion_new;
    double diffusion_old;
    double drift_new;
    double drift_old;
};

FluxWeights weights_for(Scheme scheme)
{
    switch (scheme) {
    case Scheme::ConsistentTrapezoidal:
        return {0.5, 0.5, 0.5, 0.5};
    case Scheme::PaperLiteral:
        return {1.0, 1.0, 0.5, 0.5};
    case Scheme::ImplicitEuler:
        return {1.0, 0.0, 1.0, 0.0};
    }
    return {0.5, 0.5, 0.5, 0.5};
}

void check_state(const State& s, const DiscreteProblem& problem, const char* which)
{
    const std::size_t N = problem.nodes();
    if (s.n.size() != N || s.theta.size() != N || s.v.size() != N) {
        throw std::invalid_argument(std::string(which) + " state does not match the grid (" +
                                    std::to_string(N) + " nodes)");
    }
}

double time_step(const State& state_k, const State& state_km1)
{
    const double dt = state_k.t - state_km1.t;
    if (!(dt > 0.0)) {
        throw std::invalid_argument("time levels must be strictly increasing");
    }
    return dt;
}

// Second difference of p = n theta, divided by dx^2.
double diffusion(const State& s, std::size_t i, double inv_dx2)
{
    const double p_left = s.n[i - 1] * s.theta[i - 1];
    const double p_mid = s.n[i] * s.theta[i];
    const double p_right = s.n[i + 1] * s.theta[i + 1];
    return (p_right - 2.0 * p_mid + p_left) * inv_dx2;
}

// Discrete divergence of n grad V with face densities averaged.
double drift(const State& s, std::size_t i, double inv_dx2)
{
    const double right = (s.n[i + 1] + s.n[i]) * (s.v[i + 1] - s.v[i]);
    const double left = (s.n[i] + s.n[i - 1]) * (s.v[i] - s.v[i - 1]);
    return 0.5 * (right - left) * inv_dx2;
}

}  // namespace

DiscreteProblem::DiscreteProblem(DeviceConfig cfg, MmsForcing forcing)
    : cfg_(std::move(cfg)), forcing_(std::move(forcing))
{
    cfg_.grid.validate();
    static_bc_ = boundary_data(cfg_);
    const std::size_t N = cfg_.grid.N;
    x_.resize(N);
    doping_.resize(N);
    lattice_.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        x_[i] = cfg_.grid.x(i);
        doping_[i] = doping_at(cfg_.doping, x_[i]);
        lattice_[i] = lattice_at(cfg_.lattice, x_[i]);
    }
}

BoundaryData DiscreteProblem::boundary(double t) const
{
    return forcing_.boundary ? forcing_.boundary(t) : static_bc_;
}

double DiscreteProblem::continuity_source_time(double t_k, double dt) const noexcept
{
    return cfg_.scheme == Scheme::ImplicitEuler ? t_k : t_k - 0.5 * dt;
}

std::vector<double> residual_continuity(const State& state_k, const State& state_km1,
                                        const DiscreteProblem& problem)
{
    check_state(state_k, problem, "level-k");
    check_state(state_km1, problem, "level-(k-1)");
    const double dt = time_step(state_k, state_km1);
    const std::size_t N = problem.nodes();
    const double dx = problem.config().grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const FluxWeights w = weights_for(problem.config().scheme);
    const auto& f_n = problem.forcing().f_n;
    const double t_source = problem.continuity_source_time(state_k.t, dt);
    const auto xs = problem.x();

    std::vector<double> r(N);
    const BoundaryData bc = problem.boundary(state_k.t);
    r[0] = state_k.n[0] - bc.n.left;
    r[N - 1] = state_k.n[N - 1] - bc.n.right;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        double value = (state_k.n[i] - state_km1.n[i]) / dt;
        value -= w.diffusion_new * diffusion(state_k, i, inv_dx2);
        value -= w.drift_new * drift(state_k, i, inv_dx2);
        if (w.diffusion_old != 0.0) {
            value -= w.diffusion_old * diffusion(state_km1, i, inv_dx2);
        }
        if (w.drift_old != 0.0) {
            value -= w.drift_old * drift(state_km1, i, inv_dx2);
        }
        if (f_n) {
            value -= f_n(xs[i], t_source);
        }
        r[i] = value;
    }
    return r;
}

std::vector<double> residual_temperature(const State& state_k, const DiscreteProblem& problem)
{
    check_state(state_k, problem, "level-k");
    const std::size_t N = problem.nodes();
    const double dx = problem.config().grid.dx();
    const double g = problem.config().scaled.kappa0 / (2.0 * dx * dx);
    const double inv_tau = 1.0 / problem.config().scaled.tau;
    const auto& f_theta = problem.forcing().f_theta;
    const auto xs = problem.x();
    const auto theta_l = problem.lattice();
    const auto& n = state_k.n;
    const auto& th = state_k.theta;

    std::vector<double> r(N);
    const BoundaryData bc = problem.boundary(state_k.t);
    r[0] = th[0] - bc.theta.left;
    r[N - 1] = th[N - 1] - bc.theta.right;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double p_left = n[i - 1] * th[i - 1];
        const double p_mid = n[i] * th[i];
        const double p_right = n[i + 1] * th[i + 1];
        double value = g * ((p_right + p_mid) * (th[i + 1] - th[i]) -
                            (p_mid + p_left) * (th[i] - th[i - 1]));
        value -= n[i] * inv_tau * (th[i] - theta_l[i]);
        if (f_theta) {
            value -= f_theta(xs[i], state_k.t);
        }
        r[i] = value;
    }
    return r;
}

std::vector<double> residual_poisson(const State& state_k, const DiscreteProblem& problem)
{
    check_state(state_k, problem, "level-k");
    const std::size_t N = problem.nodes();
    const double dx = problem.config().grid.dx();
    const double coeff = problem.config().scaled.lambda2 / (dx * dx);
    const auto& f_v = problem.forcing().f_v;
    const auto xs = problem.x();
    const auto doping = problem.doping();
    const auto& v = state_k.v;

    std::vector<double> r(N);
    const BoundaryData bc = problem.boundary(state_k.t);
    r[0] = v[0] - bc.v.left;
    r[N - 1] = v[N - 1] - bc.v.right;
    for (std::size_t i = 1; i + 1 < N; ++i) {
        double value = -coeff * (v[i + 1] - 2.0 * v[i] + v[i - 1]);
        value -= state_k.n[i] - doping[i];
        if (f_v) {
            value -= f_v(xs[i], state_k.t);
        }
        r[i] = value;
    }
    return r;
}

std::vector<double> assemble_residual(const State& state_k, const State& state_km1,
                                      const DiscreteProblem& problem)
{
    const auto rn = residual_continuity(state_k, state_km1, problem);
    const auto rv = residual_poisson(state_k, problem);
    const auto rt = residual_temperature(state_k, problem);
    std::vector<double> r(problem.unknowns());
    for (std::size_t i = 0; i < problem.nodes(); ++i) {
        r[unknown_index(i, kVarN)] = rn[i];
        r[unknown_index(i, kVarV)] = rv[i];
        r[unknown_index(i, kVarTheta)] = rt[i];
    }
    return r;
}

BandedMatrix assemble_jacobian(const State& state_k, const State& state_km1,
                               const DiscreteProblem& problem)
{
    check_state(state_k, problem, "level-k");
    check_state(state_km1, problem, "level-(k-1)");
    const double dt = time_step(state_k, state_km1);
    const DeviceConfig& cfg = problem.config();
    const std::size_t N = problem.nodes();
    const double dx = cfg.grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const FluxWeights w = weights_for(cfg.scheme);
    const double g = cfg.scaled.kappa0 / (2.0 * dx * dx);
    const double inv_tau = 1.0 / cfg.scaled.tau;
    const double poisson = cfg.scaled.lambda2 * inv_dx2;
    const auto theta_l = problem.lattice();
    const auto& n = state_k.n;
    const auto& th = state_k.theta;
    const auto& v = state_k.v;

    BandedMatrix jac(problem.unknowns(), kBandwidth, kBandwidth);

    for (std::size_t var : {kVarN, kVarV, kVarTheta}) {
        jac.at(unknown_index(0, var), unknown_index(0, var)) = 1.0;
        jac.at(unknown_index(N - 1, var), unknown_index(N - 1, var)) = 1.0;
    }

    for (std::size_t i = 1; i + 1 < N; ++i) {
        const std::size_t l = i - 1;
        const std::size_t r = i + 1;

        // Continuity: R = dn/dt - wD D - wA A.
        {
            const std::size_t row = unknown_index(i, kVarN);
            const double cd = w.diffusion_new * inv_dx2;
            const double ca = w.drift_new * 0.5 * inv_dx2;
            const double dv_right = v[r] - v[i];
            const double dv_left = v[i] - v[l];

            jac.at(row, unknown_index(l, kVarN)) = -cd * th[l] + ca * dv_left;
            jac.at(row, unknown_index(i, kVarN)) = 1.0 / dt + 2.0 * cd * th[i] - ca * (dv_right - dv_left);
            jac.at(row, unknown_index(r, kVarN)) = -cd * th[r] - ca * dv_right;

            jac.at(row, unknown_index(l, kVarTheta)) = -cd * n[l];
            jac.at(row, unknown_index(i, kVarTheta)) = 2.0 * cd * n[i];
            jac.at(row, unknown_index(r, kVarTheta)) = -cd * n[r];

            jac.at(row, unknown_index(l, kVarV)) = -ca * (n[i] + n[l]);
            jac.at(row, unknown_index(i, kVarV)) = ca * ((n[r] + n[i]) + (n[i] + n[l]));
            jac.at(row, unknown_index(r, kVarV)) = -ca * (n[r] + n[i]);
        }

        // Poisson: R = -lambda^2 (V_{i+1} - 2 V_i + V_{i-1}) / dx^2 - (n_i - C_i).
        {
            const std::size_t row = unknown_index(i, kVarV);
            jac.at(row, unknown_index(l, kVarV)) = -poisson;
            jac.at(row, unknown_index(i, kVarV)) = 2.0 * poisson;
            jac.at(row, unknown_index(r, kVarV)) = -poisson;
            jac.at(row, unknown_index(i, kVarN)) = -1.0;
        }

        // Temperature: R = g [E_+ - E_-] - (n_i / tau)(theta_i - theta_L,i).
        {
            const std::size_t row = unknown_index(i, kVarTheta);
            const double p_left = n[l] * th[l];
            const double p_mid = n[i] * th[i];
            const double p_right = n[r] * th[r];
            const double dth_right = th[r] - th[i];
            const double dth_left = th[i] - th[l];
            const double face_right = p_right + p_mid;
            const double face_left = p_mid + p_left;

            jac.at(row, unknown_index(l, kVarTheta)) = g * (-n[l] * dth_left + face_left);
            jac.at(row, unknown_index(i, kVarTheta)) =
                g * (n[i] * dth_right - face_right - n[i] * dth_left - face_left) - n[i] * inv_tau;
            jac.at(row, unknown_index(r, kVarTheta)) = g * (n[r] * dth_right + face_right);

            jac.at(row, unknown_index(l, kVarN)) = -g * th[l] * dth_left;
            jac.at(row, unknown_index(i, kVarN)) =
                g * th[i] * (dth_right - dth_left) - (th[i] - theta_l[i]) * inv_tau;
            jac.at(row, unknown_index(r, kVarN)) = g * th[r] * dth_right;
        }
    }
    return jac;
}

std::vector<double> pack(const State& s)
{
    std::vector<double> u(kVarsPerNode * s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        u[unknown_index(i, kVarN)] = s.n[i];
        u[unknown_index(i, kVarV)] = s.v[i];
        u[unknown_index(i, kVarTheta)] = s.theta[i];
    }
    return u;
}

State unpack(std::span<const double> u, double t)
{
    if (u.size() % kVarsPerNode != 0) {
        throw std::invalid_argument("unknown vector length is not a multiple of 3");
    }
    const std::size_t N = u.size() / kVarsPerNode;
    State s;
    s.n.resize(N);
    s.theta.resize(N);
    s.v.resize(N);
    s.t = t;
    for (std::size_t i = 0; i < N; ++i) {
        s.n[i] = u[unknown_index(i, kVarN)];
        s.v[i] = u[unknown_index(i, kVarV)];
        s.theta[i] = u[unknown_index(i, kVarTheta)];
    }
    return s;
}

}  // namespace etsim
