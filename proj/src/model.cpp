#include "etsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace etsim {

namespace {

void check_unit_interval(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream msg;
        msg << "position " << x << " outside [0, 1]";
        throw std::domain_error(msg.str());
    }
}

}  // namespace

std::vector<double> Grid1D::nodes() const
{
    std::vector<double> xs(N);
    for (std::size_t i = 0; i < N; ++i) {
        xs[i] = x(i);
    }
    return xs;
}

void Grid1D::validate() const
{
    if (N < 3) {
        throw std::invalid_argument("grid needs at least 3 nodes, got " + std::to_string(N));
    }
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be positive");
    }
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw std::invalid_argument("final time must be non-negative");
    }
}

double Table::interpolate(double at) const
{
    check_unit_interval(at);
    if (at <= x.front()) {
        return values.front();
    }
    if (at >= x.back()) {
        return values.back();
    }
    const auto upper = std::upper_bound(x.begin(), x.end(), at);
    const auto k = static_cast<std::size_t>(upper - x.begin());
    const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - w) * values[k - 1] + w * values[k];
}

void Table::validate(const char* what) const
{
    if (x.size() < 2 || x.size() != values.size()) {
        throw std::invalid_argument(std::string(what) + " table needs at least two (x, value) rows");
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i > 0 && !(x[i] > x[i - 1])) {
            throw std::invalid_argument(std::string(what) + " table x must be strictly increasing");
        }
        if (!(values[i] > 0.0)) {
            throw std::invalid_argument(std::string(what) + " table values must be strictly positive");
        }
    }
    if (x.front() > 0.0 || x.back() < 1.0) {
        throw std::invalid_argument(std::string(what) + " table must cover [0, 1]");
    }
}

Table Table::from_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open table file '" + path + "'");
    }
    Table table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream fields(line);
        double x = 0.0;
        double value = 0.0;
        if (!(fields >> x >> value)) {
            if (line_no == 1) {
                continue;  // header
            }
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'x,value'");
        }
        table.x.push_back(x);
        table.values.push_back(value);
    }
    return table;
}

void DopingProfile::validate() const
{
    switch (kind) {
    case Kind::BallisticDiode:
        return;
    case Kind::Constant:
        if (!(constant > 0.0)) {
            throw std::invalid_argument("constant doping must be strictly positive");
        }
        return;
    case Kind::Tabulated:
        table.validate("doping");
        return;
    }
}

void LatticeProfile::validate() const
{
    switch (kind) {
    case Kind::Cooling:
    case Kind::Heating:
        return;
    case Kind::Constant:
        if (!(constant > 0.0)) {
            throw std::invalid_argument("constant lattice temperature must be strictly positive");
        }
        return;
    case Kind::Tabulated:
        table.validate("lattice");
        return;
    }
}

double doping_at(const DopingProfile& profile, double x)
{
    check_unit_interval(x);
    switch (profile.kind) {
    case DopingProfile::Kind::BallisticDiode:
        return 1.0 + 0.25 * (std::tanh(100.0 * x - 60.0) - std::tanh(100.0 * x - 40.0));
    case DopingProfile::Kind::Constant:
        return profile.constant;
    case DopingProfile::Kind::Tabulated:
        return profile.table.interpolate(x);
    }
    return 0.0;
}

double lattice_at(const LatticeProfile& profile, double x)
{
    check_unit_interval(x);
    const double s = x - 0.5;
    switch (profile.kind) {
    case LatticeProfile::Kind::Cooling:
        return 0.5 * s * s + 0.5;
    case LatticeProfile::Kind::Heating:
        return 1.75 - 3.0 * s * s;
    case LatticeProfile::Kind::Constant:
        return profile.constant;
    case LatticeProfile::Kind::Tabulated:
        return profile.table.interpolate(x);
    }
    return 0.0;
}

std::string to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::ConsistentTrapezoidal:
        return "consistent-trapezoidal";
    case Scheme::PaperLiteral:
        return "paper-literal";
    case Scheme::ImplicitEuler:
        return "implicit-euler";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& name)
{
    if (name == "consistent-trapezoidal") {
        return Scheme::ConsistentTrapezoidal;
    }
    if (name == "paper-literal") {
        return Scheme::PaperLiteral;
    }
    if (name == "implicit-euler") {
        return Scheme::ImplicitEuler;
    }
    throw std::invalid_argument("unknown scheme '" + name +
                                "' (expected consistent-trapezoidal, paper-literal or implicit-euler)");
}

void DeviceConfig::validate() const
{
    grid.validate();
    doping.validate();
    lattice.validate();
    scaled.validate();
    newton.validate();
    if (!std::isfinite(bias_scaled)) {
        throw std::invalid_argument("bias must be finite");
    }
    if (!(monitor.kappa1 > 0.0)) {
        throw std::invalid_argument("monitor kappa1 must be positive");
    }
    if (!(monitor.n_star_lo > 0.0) || !(monitor.n_star_hi > 0.0)) {
        throw std::invalid_argument("monitor density thresholds must be positive");
    }
    if (run.max_steps == 0) {
        throw std::invalid_argument("run max_steps must be positive");
    }
    if (!(run.steady_tol > 0.0)) {
        throw std::invalid_argument("run steady_tol must be positive");
    }
    if (run.max_dt_halvings < 0) {
        throw std::invalid_argument("run max_dt_halvings must be non-negative");
    }
}

DeviceConfig DeviceConfig::ballistic(LatticeProfile lattice, double bias_volts)
{
    DeviceConfig cfg;
    cfg.lattice = std::move(lattice);
    cfg.scaled = compute_scaled(PhysicalParams::gaas());
    cfg.bias_scaled = scale_voltage(bias_volts, cfg.scaled);
    return cfg;
}

DeviceConfig DeviceConfig::equilibrium()
{
    DeviceConfig cfg = ballistic(LatticeProfile::uniform(1.0), 0.0);
    cfg.doping = DopingProfile::uniform(1.0);
    return cfg;
}

BoundaryData boundary_data(const DeviceConfig& cfg)
{
    BoundaryData bc;
    bc.n = {doping_at(cfg.doping, 0.0), doping_at(cfg.doping, 1.0)};
    bc.theta = {lattice_at(cfg.lattice, 0.0), lattice_at(cfg.lattice, 1.0)};
    bc.v = {0.0, cfg.bias_scaled};
    return bc;
}

State initial_state(const DeviceConfig& cfg)
{
    const std::size_t N = cfg.grid.N;
    const BoundaryData bc = boundary_data(cfg);
    State s;
    s.n.resize(N);
    s.theta.resize(N);
    s.v.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        const double x = cfg.grid.x(i);
        s.n[i] = doping_at(cfg.doping, x);
        s.theta[i] = lattice_at(cfg.lattice, x);
        s.v[i] = bc.v.left + x * (bc.v.right - bc.v.left);
    }
    s.t = 0.0;
    return s;
}

MonitorBounds monitor_bounds(const DeviceConfig& cfg, double kappa1, double n_star_lo,
                             double n_star_hi)
{
    if (!(kappa1 > 0.0)) {
        throw std::invalid_argument("kappa1 must be positive");
    }
    const BoundaryData bc = boundary_data(cfg);

    double lattice_min = INFINITY;
    double lattice_max = -INFINITY;
    double doping_min = INFINITY;
    double doping_max = -INFINITY;
    for (std::size_t i = 0; i < cfg.grid.N; ++i) {
        const double x = cfg.grid.x(i);
        const double theta_l = lattice_at(cfg.lattice, x);
        const double c = doping_at(cfg.doping, x);
        lattice_min = std::min(lattice_min, theta_l);
        lattice_max = std::max(lattice_max, theta_l);
        doping_min = std::min(doping_min, c);
        doping_max = std::max(doping_max, c);
    }
    // The initial density equals the doping, so sup/inf n_I coincide with those of C.
    const double initial_min = doping_min;
    const double initial_max = doping_max;

    MonitorBounds b;
    b.M = std::max({lattice_max, bc.theta.left, bc.theta.right});
    b.m = std::min({lattice_min, bc.theta.left, bc.theta.right});
    b.K0 = std::max({n_star_hi, initial_max, bc.n.left, bc.n.right, doping_max});
    b.k0 = std::min({n_star_lo, initial_min, bc.n.left, bc.n.right});
    b.alpha = lattice_max / cfg.scaled.tau + 1.0 / cfg.scaled.lambda2;
    b.beta = b.M / (cfg.scaled.tau * kappa1);
    return b;
}

MonitorBounds monitor_bounds(const DeviceConfig& cfg)
{
    return monitor_bounds(cfg, cfg.monitor.kappa1, cfg.monitor.n_star_lo, cfg.monitor.n_star_hi);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json table_to_json(const Table& t)
{
    nlohmann::json points = nlohmann::json::array();
    for (std::size_t i = 0; i < t.x.size(); ++i) {
        points.push_back({t.x[i], t.values[i]});
    }
    return points;
}

Table table_from_json(const nlohmann::json& j, const std::string& base_dir, const char* what)
{
    if (j.contains("points")) {
        Table t;
        for (const auto& point : j.at("points")) {
            if (!point.is_array() || point.size() != 2) {
                throw std::invalid_argument(std::string(what) + " points must be [x, value] pairs");
            }
            t.x.push_back(point[0].get<double>());
            t.values.push_back(point[1].get<double>());
        }
        return t;
    }
    if (j.contains("csv")) {
        std::filesystem::path path = j.at("csv").get<std::string>();
        if (path.is_relative()) {
            path = std::filesystem::path(base_dir) / path;
        }
        return Table::from_csv(path.string());
    }
    throw std::invalid_argument(std::string(what) + " tabulated profile needs 'points' or 'csv'");
}

std::string damping_name(Damping d) { return d == Damping::None ? "none" : "armijo"; }

Damping damping_from_string(const std::string& name)
{
    if (name == "none") {
        return Damping::None;
    }
    if (name == "armijo") {
        return Damping::Armijo;
    }
    throw std::invalid_argument("unknown damping '" + name + "' (expected none or armijo)");
}

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

}  // namespace

void to_json(nlohmann::json& j, const DeviceConfig& cfg)
{
    nlohmann::json doping;
    switch (cfg.doping.kind) {
    case DopingProfile::Kind::BallisticDiode:
        doping = {{"kind", "ballistic-diode"}};
        break;
    case DopingProfile::Kind::Constant:
        doping = {{"kind", "constant"}, {"value", cfg.doping.constant}};
        break;
    case DopingProfile::Kind::Tabulated:
        doping = {{"kind", "tabulated"}, {"points", table_to_json(cfg.doping.table)}};
        break;
    }

    nlohmann::json lattice;
    switch (cfg.lattice.kind) {
    case LatticeProfile::Kind::Cooling:
        lattice = {{"kind", "cooling"}};
        break;
    case LatticeProfile::Kind::Heating:
        lattice = {{"kind", "heating"}};
        break;
    case LatticeProfile::Kind::Constant:
        lattice = {{"kind", "constant"}, {"value", cfg.lattice.constant}};
        break;
    case LatticeProfile::Kind::Tabulated:
        lattice = {{"kind", "tabulated"}, {"points", table_to_json(cfg.lattice.table)}};
        break;
    }

    j = nlohmann::json{
        {"grid", {{"N", cfg.grid.N}, {"dt", cfg.grid.dt}, {"t_end", cfg.grid.t_end}}},
        {"doping", doping},
        {"lattice", lattice},
        {"bias_scaled", cfg.bias_scaled},
        {"bias_volts", unscale_voltage(cfg.bias_scaled, cfg.scaled)},
        {"scaled", cfg.scaled},
        {"scheme", to_string(cfg.scheme)},
        {"newton",
         {{"tol_residual", cfg.newton.tol_residual},
          {"max_iter", cfg.newton.max_iter},
          {"damping", damping_name(cfg.newton.damping)},
          {"backtrack_factor", cfg.newton.backtrack_factor},
          {"min_step", cfg.newton.min_step},
          {"step_tol", cfg.newton.step_tol}}},
        {"monitor",
         {{"kappa1", cfg.monitor.kappa1},
          {"n_star_lo", cfg.monitor.n_star_lo},
          {"n_star_hi", cfg.monitor.n_star_hi},
          {"enforce", cfg.monitor.enforce}}},
        {"run",
         {{"mode", cfg.run.mode == RunControl::Mode::Steady ? "steady" : "transient"},
          {"max_steps", cfg.run.max_steps},
          {"steady_tol", cfg.run.steady_tol},
          {"max_dt_halvings", cfg.run.max_dt_halvings}}},
    };
}

DeviceConfig device_config_from_json(const nlohmann::json& j, const std::string& base_dir)
{
    if (!j.is_object()) {
        throw std::invalid_argument("device configuration must be a JSON object");
    }
    DeviceConfig cfg = DeviceConfig::ballistic(LatticeProfile::cooling(), 0.0);

    if (auto it = j.find("grid"); it != j.end()) {
        if (auto n = it->find("N"); n != it->end()) {
            const auto nodes = n->get<long long>();
            if (nodes < 3) {
                throw std::invalid_argument("grid needs at least 3 nodes, got " + std::to_string(nodes));
            }
            cfg.grid.N = static_cast<std::size_t>(nodes);
        }
        read_if(*it, "dt", cfg.grid.dt);
        read_if(*it, "t_end", cfg.grid.t_end);
    }

    if (auto it = j.find("doping"); it != j.end()) {
        const auto kind = it->at("kind").get<std::string>();
        if (kind == "ballistic-diode") {
            cfg.doping = DopingProfile::ballistic_diode();
        } else if (kind == "constant") {
            cfg.doping = DopingProfile::uniform(it->at("value").get<double>());
        } else if (kind == "tabulated") {
            cfg.doping = DopingProfile::tabulated(table_from_json(*it, base_dir, "doping"));
        } else {
            throw std::invalid_argument("unknown doping kind '" + kind + "'");
        }
    }

    if (auto it = j.find("lattice"); it != j.end()) {
        const auto kind = it->at("kind").get<std::string>();
        if (kind == "cooling") {
            cfg.lattice = LatticeProfile::cooling();
        } else if (kind == "heating") {
            cfg.lattice = LatticeProfile::heating();
        } else if (kind == "constant") {
            cfg.lattice = LatticeProfile::uniform(it->at("value").get<double>());
        } else if (kind == "tabulated") {
            cfg.lattice = LatticeProfile::tabulated(table_from_json(*it, base_dir, "lattice"));
        } else {
            throw std::invalid_argument("unknown lattice kind '" + kind + "'");
        }
    }

    if (auto it = j.find("scaled"); it != j.end()) {
        cfg.scaled = it->get<ScaledParams>();
    } else if (auto phys = j.find("physical"); phys != j.end()) {
        cfg.scaled = compute_scaled(phys->get<PhysicalParams>());
    }

    // A resolved scaled bias takes precedence over a bias in volts.
    if (auto it = j.find("bias_scaled"); it != j.end()) {
        cfg.bias_scaled = it->get<double>();
    } else if (auto volts = j.find("bias_volts"); volts != j.end()) {
        cfg.bias_scaled = scale_voltage(volts->get<double>(), cfg.scaled);
    }

    if (auto it = j.find("scheme"); it != j.end()) {
        cfg.scheme = scheme_from_string(it->get<std::string>());
    }

    if (auto it = j.find("newton"); it != j.end()) {
        read_if(*it, "tol_residual", cfg.newton.tol_residual);
        read_if(*it, "max_iter", cfg.newton.max_iter);
        read_if(*it, "backtrack_factor", cfg.newton.backtrack_factor);
        read_if(*it, "min_step", cfg.newton.min_step);
        read_if(*it, "step_tol", cfg.newton.step_tol);
        if (auto d = it->find("damping"); d != it->end()) {
            cfg.newton.damping = damping_from_string(d->get<std::string>());
        }
    }

    if (auto it = j.find("monitor"); it != j.end()) {
        read_if(*it, "kappa1", cfg.monitor.kappa1);
        read_if(*it, "n_star_lo", cfg.monitor.n_star_lo);
        read_if(*it, "n_star_hi", cfg.monitor.n_star_hi);
        read_if(*it, "enforce", cfg.monitor.enforce);
    }

    if (auto it = j.find("run"); it != j.end()) {
        if (auto mode = it->find("mode"); mode != it->end()) {
            const auto name = mode->get<std::string>();
            if (name == "steady") {
                cfg.run.mode = RunControl::Mode::Steady;
            } else if (name == "transient") {
                cfg.run.mode = RunControl::Mode::Transient;
            } else {
                throw std::invalid_argument("unknown run mode '" + name + "' (expected steady or transient)");
            }
        }
        read_if(*it, "max_steps", cfg.run.max_steps);
        read_if(*it, "steady_tol", cfg.run.steady_tol);
        read_if(*it, "max_dt_halvings", cfg.run.max_dt_halvings);
    }

    cfg.validate();
    return cfg;
}

}  // namespace etsim
