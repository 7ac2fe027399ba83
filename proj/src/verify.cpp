#include "etsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace etsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Closed forms and their derivatives at one point.
struct Jet {
    double n, n_x, n_xx, n_t;
    double th, th_x, th_xx;
    double v, v_x, v_xx;
};

Jet evaluate(double a, double x, double t)
{
    const double e = std::exp(-t);
    const double s = std::sin(kPi * x);
    const double c = std::cos(kPi * x);
    Jet j{};
    j.n = 1.0 + 0.5 * a * s * e;
    j.n_x = 0.5 * a * kPi * c * e;
    j.n_xx = -0.5 * a * kPi * kPi * s * e;
    j.n_t = -0.5 * a * s * e;
    j.th = 1.0 + 0.25 * a * c * e;
    j.th_x = -0.25 * a * kPi * s * e;
    j.th_xx = -0.25 * a * kPi * kPi * c * e;
    j.v = a * x * (1.0 - x) * e;
    j.v_x = a * (1.0 - 2.0 * x) * e;
    j.v_xx = -2.0 * a * e;
    return j;
}

double order(double coarse, double fine)
{
    if (!(coarse > 0.0) || !(fine > 0.0)) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::log2(coarse / fine);
}

// Rounding-level error below which an amplitude-free run counts as exact.
constexpr double kExactLevel = 1e-13;

ConvergenceLevel measure(const DiscreteProblem& problem, const ManufacturedSolution& ms)
{
    const DeviceConfig& cfg = problem.config();
    State initial = ms.exact_state(cfg.grid, 0.0);
    const Trajectory traj = run_transient(problem, std::move(initial));
    const State& final = traj.final_state();
    const State exact = ms.exact_state(cfg.grid, final.t);

    ConvergenceLevel level;
    level.N = cfg.grid.N;
    level.dt = cfg.grid.dt;
    level.steps = traj.steps();
    const double dx = cfg.grid.dx();
    std::array<double, 3> sum{};
    for (std::size_t i = 1; i + 1 < final.size(); ++i) {
        const std::array<double, 3> e = {final.n[i] - exact.n[i], final.theta[i] - exact.theta[i],
                                         final.v[i] - exact.v[i]};
        for (std::size_t k = 0; k < 3; ++k) {
            sum[k] += e[k] * e[k];
            level.error_max[k] = std::max(level.error_max[k], std::abs(e[k]));
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        level.error_l2[k] = std::sqrt(dx * sum[k]);
    }
    return level;
}

void fill_orders(ConvergenceReport& report)
{
    for (std::size_t j = 0; j + 1 < report.levels.size(); ++j) {
        std::array<double, 3> l2{};
        std::array<double, 3> mx{};
        for (std::size_t k = 0; k < 3; ++k) {
            l2[k] = order(report.levels[j].error_l2[k], report.levels[j + 1].error_l2[k]);
            mx[k] = order(report.levels[j].error_max[k], report.levels[j + 1].error_max[k]);
        }
        report.order_l2.push_back(l2);
        report.order_max.push_back(mx);
    }
}

ConvergenceReport run_levels(std::vector<DiscreteProblem> problems, const ManufacturedSolution& ms)
{
    std::vector<std::future<ConvergenceLevel>> pending;
    pending.reserve(problems.size());
    for (const auto& problem : problems) {
        pending.push_back(std::async(std::launch::async, [&problem, &ms] { return measure(problem, ms); }));
    }
    ConvergenceReport report;
    for (auto& f : pending) {
        report.levels.push_back(f.get());
    }
    fill_orders(report);
    return report;
}

nlohmann::json number_or_null(double value)
{
    return std::isfinite(value) ? nlohmann::json(value) : nlohmann::json(nullptr);
}

}  // namespace

double ManufacturedSolution::n(double x, double t) const
{
    return 1.0 + 0.5 * amplitude * std::sin(kPi * x) * std::exp(-t);
}

double ManufacturedSolution::theta(double x, double t) const
{
    return 1.0 + 0.25 * amplitude * std::cos(kPi * x) * std::exp(-t);
}

double ManufacturedSolution::v(double x, double t) const
{
    return amplitude * x * (1.0 - x) * std::exp(-t);
}

State ManufacturedSolution::exact_state(const Grid1D& grid, double t) const
{
    State s;
    s.t = t;
    s.n.resize(grid.N);
    s.theta.resize(grid.N);
    s.v.resize(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double x = grid.x(i);
        s.n[i] = n(x, t);
        s.theta[i] = theta(x, t);
        s.v[i] = v(x, t);
    }
    return s;
}

BoundaryData ManufacturedSolution::boundary(double t) const
{
    return {{n(0.0, t), n(1.0, t)}, {theta(0.0, t), theta(1.0, t)}, {v(0.0, t), v(1.0, t)}};
}

MmsForcing analytic_forcing(const ManufacturedSolution& ms, const DeviceConfig& cfg)
{
    const double a = ms.amplitude;
    const ScaledParams sp = cfg.scaled;
    MmsForcing f;
    f.f_n = [a](double x, double t) {
        const Jet j = evaluate(a, x, t);
        const double p_xx = j.n_xx * j.th + 2.0 * j.n_x * j.th_x + j.n * j.th_xx;
        const double drift_x = j.n_x * j.v_x + j.n * j.v_xx;
        return j.n_t - p_xx - drift_x;
    };
    f.f_theta = [a, sp, lattice = cfg.lattice](double x, double t) {
        const Jet j = evaluate(a, x, t);
        const double p = j.n * j.th;
        const double p_x = j.n_x * j.th + j.n * j.th_x;
        const double heat_flux_x = p_x * j.th_x + p * j.th_xx;
        return sp.kappa0 * heat_flux_x - j.n / sp.tau * (j.th - lattice_at(lattice, x));
    };
    f.f_v = [a, sp, doping = cfg.doping](double x, double t) {
        const Jet j = evaluate(a, x, t);
        return -sp.lambda2 * j.v_xx - (j.n - doping_at(doping, x));
    };
    f.boundary = [ms](double t) { return ms.boundary(t); };
    return f;
}

MmsForcing semidiscrete_forcing(const ManufacturedSolution& ms, const DeviceConfig& cfg)
{
    const double dx = cfg.grid.dx();
    const double inv_dx2 = 1.0 / (dx * dx);
    const ScaledParams sp = cfg.scaled;
    MmsForcing f;
    f.f_n = [ms, dx, inv_dx2](double x, double t) {
        const double a = ms.amplitude;
        const double n_t = -0.5 * a * std::sin(kPi * x) * std::exp(-t);
        const double nl = ms.n(x - dx, t), nm = ms.n(x, t), nr = ms.n(x + dx, t);
        const double tl = ms.theta(x - dx, t), tm = ms.theta(x, t), tr = ms.theta(x + dx, t);
        const double vl = ms.v(x - dx, t), vm = ms.v(x, t), vr = ms.v(x + dx, t);
        const double diffusion = (nr * tr - 2.0 * nm * tm + nl * tl) * inv_dx2;
        const double drift = 0.5 * ((nr + nm) * (vr - vm) - (nm + nl) * (vm - vl)) * inv_dx2;
        return n_t - diffusion - drift;
    };
    f.f_theta = [ms, dx, inv_dx2, sp, lattice = cfg.lattice](double x, double t) {
        const double nl = ms.n(x - dx, t), nm = ms.n(x, t), nr = ms.n(x + dx, t);
        const double tl = ms.theta(x - dx, t), tm = ms.theta(x, t), tr = ms.theta(x + dx, t);
        const double pl = nl * tl, pm = nm * tm, pr = nr * tr;
        const double conduction =
            0.5 * sp.kappa0 * inv_dx2 * ((pr + pm) * (tr - tm) - (pm + pl) * (tm - tl));
        return conduction - nm / sp.tau * (tm - lattice_at(lattice, x));
    };
    f.f_v = [ms, dx, inv_dx2, sp, doping = cfg.doping](double x, double t) {
        const double laplacian = (ms.v(x + dx, t) - 2.0 * ms.v(x, t) + ms.v(x - dx, t)) * inv_dx2;
        return -sp.lambda2 * laplacian - (ms.n(x, t) - doping_at(doping, x));
    };
    f.boundary = [ms](double t) { return ms.boundary(t); };
    return f;
}

std::string to_string(StudyMode mode) { return mode == StudyMode::Spatial ? "spatial" : "temporal"; }

bool ConvergenceReport::orders_within(double lo, double hi) const
{
    if (max_error() <= kExactLevel) {
        return true;
    }
    if (order_l2.empty()) {
        return false;
    }
    for (const auto& pair : order_l2) {
        for (double p : pair) {
            if (!(p >= lo && p <= hi)) {
                return false;
            }
        }
    }
    return true;
}

double ConvergenceReport::max_error() const
{
    double worst = 0.0;
    for (const auto& level : levels) {
        for (std::size_t k = 0; k < 3; ++k) {
            worst = std::max({worst, level.error_l2[k], level.error_max[k]});
        }
    }
    return worst;
}

DeviceConfig mms_template(Scheme scheme)
{
    DeviceConfig cfg = DeviceConfig::equilibrium();
    cfg.scheme = scheme;
    cfg.monitor.enforce = false;
    cfg.run.mode = RunControl::Mode::Transient;
    cfg.grid.t_end = kMmsEndTime;
    return cfg;
}

ConvergenceReport mms_spatial_order(std::size_t base_N, std::size_t levels, const DeviceConfig& tmpl,
                                    double amplitude)
{
    if (base_N < 3 || levels < 1) {
        throw std::invalid_argument("spatial study needs base_N >= 3 and at least one level");
    }
    const ManufacturedSolution ms{amplitude};
    std::vector<DiscreteProblem> problems;
    for (std::size_t j = 0; j < levels; ++j) {
        DeviceConfig cfg = tmpl;
        cfg.grid.N = (base_N - 1) * (std::size_t{1} << j) + 1;
        cfg.grid.dt = cfg.grid.dx() * cfg.grid.dx();
        cfg.grid.t_end = kMmsEndTime;
        cfg.monitor.enforce = false;
        cfg.validate();
        problems.emplace_back(cfg, analytic_forcing(ms, cfg));
    }
    ConvergenceReport report = run_levels(std::move(problems), ms);
    report.mode = StudyMode::Spatial;
    report.scheme = tmpl.scheme;
    report.amplitude = amplitude;
    report.t_end = kMmsEndTime;
    return report;
}

ConvergenceReport mms_temporal_order(double base_dt, std::size_t levels, const DeviceConfig& tmpl,
                                     double amplitude)
{
    if (!(base_dt > 0.0) || levels < 1) {
        throw std::invalid_argument("temporal study needs base_dt > 0 and at least one level");
    }
    const ManufacturedSolution ms{amplitude};
    std::vector<DiscreteProblem> problems;
    for (std::size_t j = 0; j < levels; ++j) {
        DeviceConfig cfg = tmpl;
        cfg.grid.dt = base_dt / static_cast<double>(std::size_t{1} << j);
        cfg.grid.t_end = kMmsEndTime;
        cfg.monitor.enforce = false;
        cfg.validate();
        problems.emplace_back(cfg, semidiscrete_forcing(ms, cfg));
    }
    ConvergenceReport report = run_levels(std::move(problems), ms);
    report.mode = StudyMode::Temporal;
    report.scheme = tmpl.scheme;
    report.amplitude = amplitude;
    report.t_end = kMmsEndTime;
    return report;
}

double jacobian_fd_error(const State& state_k, const State& state_km1, const DiscreteProblem& problem,
                         double h)
{
    const BandedMatrix jac = assemble_jacobian(state_k, state_km1, problem);
    const std::size_t size = jac.size();
    std::vector<double> row_scale(size, 0.0);
    for (std::size_t r = 0; r < size; ++r) {
        for (std::size_t c = 0; c < size; ++c) {
            row_scale[r] = std::max(row_scale[r], std::abs(jac(r, c)));
        }
    }

    const std::vector<double> base = pack(state_k);
    double worst = 0.0;
    for (std::size_t c = 0; c < size; ++c) {
        std::vector<double> plus = base;
        std::vector<double> minus = base;
        plus[c] += h;
        minus[c] -= h;
        const auto f_plus = assemble_residual(unpack(plus, state_k.t), state_km1, problem);
        const auto f_minus = assemble_residual(unpack(minus, state_k.t), state_km1, problem);
        for (std::size_t r = 0; r < size; ++r) {
            const double fd = (f_plus[r] - f_minus[r]) / (2.0 * h);
            const double exact = jac(r, c);
            const double scale = std::max(std::abs(exact), row_scale[r]);
            if (scale == 0.0) {
                worst = std::max(worst, std::abs(fd));
            } else {
                worst = std::max(worst, std::abs(exact - fd) / scale);
            }
        }
    }
    return worst;
}

MonitorAudit audit_monitors(const Trajectory& traj, const MonitorBounds& bounds)
{
    MonitorAudit audit;
    for (const auto& rec : traj.monitor_log) {
        if (rec.min_n < kDensityFloor) {
            audit.hard_violations.push_back({"n", rec.argmin_n, rec.t, rec.min_n, kDensityFloor});
        }
        if (rec.min_theta < bounds.m - kTemperatureSlack) {
            audit.hard_violations.push_back(
                {"theta", rec.argmin_theta, rec.t, rec.min_theta, bounds.m - kTemperatureSlack});
        }
        if (rec.max_theta > bounds.M + kTemperatureSlack) {
            audit.hard_violations.push_back(
                {"theta", rec.argmax_theta, rec.t, rec.max_theta, bounds.M + kTemperatureSlack});
        }
        const double lower = bounds.k0 * std::exp(-bounds.alpha * rec.t);
        const double upper = bounds.K0 * std::exp(bounds.beta * rec.t);
        if (rec.min_n < lower) {
            audit.soft_violations.push_back({"n-lower-envelope", rec.argmin_n, rec.t, rec.min_n, lower});
        }
        if (rec.max_n > upper) {
            audit.soft_violations.push_back({"n-upper-envelope", rec.argmax_n, rec.t, rec.max_n, upper});
        }
    }
    audit.hard_pass = audit.hard_violations.empty();
    audit.soft_pass = audit.soft_violations.empty();
    return audit;
}

void to_json(nlohmann::json& j, const ConvergenceReport& report)
{
    static constexpr const char* kNames[3] = {"n", "theta", "V"};
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& level : report.levels) {
        nlohmann::json entry = {{"N", level.N}, {"dt", level.dt}, {"steps", level.steps}};
        for (std::size_t k = 0; k < 3; ++k) {
            entry["error_l2"][kNames[k]] = level.error_l2[k];
            entry["error_max"][kNames[k]] = level.error_max[k];
        }
        levels.push_back(entry);
    }
    nlohmann::json orders = nlohmann::json::array();
    for (std::size_t p = 0; p < report.order_l2.size(); ++p) {
        nlohmann::json entry;
        for (std::size_t k = 0; k < 3; ++k) {
            entry["l2"][kNames[k]] = number_or_null(report.order_l2[p][k]);
            entry["max"][kNames[k]] = number_or_null(report.order_max[p][k]);
        }
        orders.push_back(entry);
    }
    j = nlohmann::json{{"mode", to_string(report.mode)},
                       {"scheme", to_string(report.scheme)},
                       {"amplitude", report.amplitude},
                       {"t_end", report.t_end},
                       {"levels", levels},
                       {"orders", orders}};
}

std::string format_table(const ConvergenceReport& report)
{
    std::ostringstream out;
    out << to_string(report.mode) << " convergence, scheme " << to_string(report.scheme)
        << ", amplitude " << report.amplitude << '\n';
    char line[256];
    std::snprintf(line, sizeof line, "%6s %11s %11s %11s %11s %7s %7s %7s\n", "N", "dt", "err_n",
                  "err_theta", "err_V", "p_n", "p_theta", "p_V");
    out << line;
    for (std::size_t j = 0; j < report.levels.size(); ++j) {
        const auto& level = report.levels[j];
        std::array<double, 3> p{NAN, NAN, NAN};
        if (j > 0) {
            p = report.order_l2[j - 1];
        }
        std::snprintf(line, sizeof line, "%6zu %11.4e %11.4e %11.4e %11.4e %7.3f %7.3f %7.3f\n", level.N,
                      level.dt, level.error_l2[0], level.error_l2[1], level.error_l2[2], p[0], p[1], p[2]);
        out << line;
    }
    return out.str();
}

std::string to_csv(const ConvergenceReport& report)
{
    std::ostringstream out;
    out << "N,dt,steps,err_l2_n,err_l2_theta,err_l2_V,err_max_n,err_max_theta,err_max_V,"
           "order_l2_n,order_l2_theta,order_l2_V\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t j = 0; j < report.levels.size(); ++j) {
        const auto& level = report.levels[j];
        out << level.N << ',' << num(level.dt) << ',' << level.steps;
        for (double e : level.error_l2) {
            out << ',' << num(e);
        }
        for (double e : level.error_max) {
            out << ',' << num(e);
        }
        for (std::size_t k = 0; k < 3; ++k) {
            out << ',';
            if (j > 0) {
                out << num(report.order_l2[j - 1][k]);
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace etsim
