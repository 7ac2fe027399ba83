#include "etsim/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "etsim/driver.hpp"
#include "etsim/verify.hpp"

#ifndef ETSIM_VERSION
#define ETSIM_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace etsim::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write '" + path.string() + "'");
    }
    file << text;
    if (!file) {
        throw std::runtime_error("write failed for '" + path.string() + "'");
    }
}

void prepare_dir(const std::string& dir)
{
    if (dir.empty()) {
        throw std::invalid_argument("output directory must not be empty");
    }
    fs::create_directories(dir);
}

std::string profile_csv(const State& s, const Grid1D& grid)
{
    std::string text = "x,n,theta,V\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        text += format_number(grid.x(i));
        text += ',';
        text += format_number(s.n[i]);
        text += ',';
        text += format_number(s.theta[i]);
        text += ',';
        text += format_number(s.v[i]);
        text += '\n';
    }
    return text;
}

std::string monitors_csv(const Trajectory& traj)
{
    std::string text = "t,min_n,max_n,min_theta,max_theta\n";
    for (const auto& rec : traj.monitor_log) {
        text += format_number(rec.t);
        text += ',';
        text += format_number(rec.min_n);
        text += ',';
        text += format_number(rec.max_n);
        text += ',';
        text += format_number(rec.min_theta);
        text += ',';
        text += format_number(rec.max_theta);
        text += '\n';
    }
    return text;
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c == '\n' ? ' ' : c;
    }
    quoted += '"';
    return quoted;
}

nlohmann::json manifest(const nlohmann::json& config, const std::string& command, double wall_seconds)
{
    nlohmann::json m;
    m["command"] = command;
    m["version"] = version();
    m["config"] = config;
    if (config.contains("scheme")) {
        m["scheme"] = config.at("scheme");
    }
    m["timings"] = {{"wall_seconds", wall_seconds}};
    return m;
}

void apply_overrides(DeviceConfig& cfg, const std::optional<std::string>& scheme,
                     const std::optional<std::size_t>& max_steps)
{
    if (scheme) {
        cfg.scheme = scheme_from_string(*scheme);
    }
    if (max_steps) {
        cfg.run.max_steps = *max_steps;
    }
    cfg.validate();
}

}  // namespace

std::string version() { return ETSIM_VERSION; }

std::string format_number(double value)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

nlohmann::json parse_json(const std::string& text, const std::string& origin)
{
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < limit; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        std::string detail = e.what();
        if (auto pos = detail.find("syntax error"); pos != std::string::npos) {
            detail = detail.substr(pos);
        }
        std::ostringstream msg;
        msg << origin << ':' << line << ':' << column << ": " << detail;
        throw std::invalid_argument(msg.str());
    }
}

nlohmann::json load_json_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_json(buffer.str(), path);
}

DeviceConfig load_device_config(const std::string& path)
{
    nlohmann::json j = load_json_file(path);
    if (j.is_object() && j.contains("config") && j.at("config").is_object()) {
        j = j.at("config");
    }
    const std::string base = fs::path(path).parent_path().string();
    try {
        return device_config_from_json(j, base.empty() ? "." : base);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

std::vector<double> parse_biases(const std::string& list)
{
    std::vector<double> biases;
    std::stringstream stream(list);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) {
            continue;
        }
        const auto last = item.find_last_not_of(" \t");
        const std::string token = item.substr(first, last - first + 1);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != token.size() || !std::isfinite(value)) {
            throw std::invalid_argument("invalid bias '" + token + "'");
        }
        biases.push_back(value);
    }
    return biases;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    DeviceConfig cfg;
    try {
        cfg = load_device_config(opts.config_path);
        apply_overrides(cfg, opts.scheme, opts.max_steps);
        prepare_dir(opts.out_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    Trajectory traj;
    try {
        const DiscreteProblem problem(cfg);
        traj = cfg.run.mode == RunControl::Mode::Steady ? run_to_steady_state(problem)
                                                         : run_transient(problem);
    } catch (const MonitorViolation& e) {
        err << "error: " << e.what() << '\n';
        return kExitMonitor;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    try {
        const fs::path dir(opts.out_dir);
        nlohmann::json outputs = nlohmann::json::array();
        for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
            const std::string name = "profiles_t" + std::to_string(traj.snapshot_steps[s]) + ".csv";
            write_text(dir / name, profile_csv(traj.snapshots[s], cfg.grid));
            outputs.push_back({{"file", name}, {"step", traj.snapshot_steps[s]}, {"t", traj.snapshots[s].t}});
        }
        write_text(dir / "monitors.csv", monitors_csv(traj));

        int max_iterations = 0;
        for (const auto& report : traj.newton_reports) {
            max_iterations = std::max(max_iterations, report.iterations);
        }
        nlohmann::json m = manifest(nlohmann::json(cfg), "simulate", seconds_since(start));
        m["steps"] = traj.steps();
        m["reached_steady_state"] = traj.reached_steady_state;
        m["max_newton_iterations"] = max_iterations;
        m["profiles"] = outputs;
        write_text(dir / "manifest.json", m.dump(2) + "\n");

        if (!opts.quiet) {
            const State& last = traj.final_state();
            out << "simulate: " << traj.steps() << " steps, t = " << last.t
                << (traj.reached_steady_state ? " (steady state)" : "") << ", "
                << traj.snapshots.size() << " profiles written to " << opts.out_dir << '\n';
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    DeviceConfig cfg;
    std::vector<double> biases;
    try {
        biases = parse_biases(opts.biases);
        if (biases.empty()) {
            err << "usage: etsim sweep --config FILE --biases V1,V2,... --out DIR (bias list is empty)\n";
            return kExitError;
        }
        cfg = load_device_config(opts.config_path);
        apply_overrides(cfg, opts.scheme, opts.max_steps);
        prepare_dir(opts.out_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    const std::vector<IvPoint> points = iv_sweep(cfg, biases);
    try {
        std::string text = "bias_volts,bias_scaled,current,flux_uniformity,newton_iters_total,status\n";
        bool all_ok = true;
        for (const auto& p : points) {
            text += format_number(p.bias_volts) + ',' + format_number(p.bias_scaled) + ',' +
                    format_number(p.current) + ',' + format_number(p.flux_uniformity) + ',' +
                    std::to_string(p.newton_iters_total) + ',' + csv_field(p.status) + '\n';
            all_ok = all_ok && p.ok;
            if (!p.ok) {
                err << "warning: bias " << p.bias_volts << " V failed: " << p.status << '\n';
            }
        }
        const fs::path dir(opts.out_dir);
        write_text(dir / "iv.csv", text);
        nlohmann::json m = manifest(nlohmann::json(cfg), "sweep", seconds_since(start));
        m["biases_volts"] = biases;
        m["all_points_ok"] = all_ok;
        write_text(dir / "manifest.json", m.dump(2) + "\n");
        if (!opts.quiet) {
            out << "sweep: " << points.size() << " bias points written to " << (dir / "iv.csv").string()
                << '\n';
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

int cmd_mms(const MmsOptions& opts, std::ostream& out, std::ostream& err)
{
    const auto start = Clock::now();
    Scheme scheme{};
    StudyMode mode{};
    try {
        scheme = scheme_from_string(opts.scheme);
        if (opts.mode == "spatial") {
            mode = StudyMode::Spatial;
        } else if (opts.mode == "temporal") {
            mode = StudyMode::Temporal;
        } else {
            throw std::invalid_argument("unknown mode '" + opts.mode + "' (expected spatial or temporal)");
        }
        if (!(opts.amplitude >= 0.0 && opts.amplitude < 1.0)) {
            throw std::invalid_argument("amplitude must lie in [0, 1)");
        }
        prepare_dir(opts.out_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    // Expected order: first order in time for implicit Euler, second otherwise.
    const double expected = (scheme == Scheme::ImplicitEuler && mode == StudyMode::Temporal) ? 1.0 : 2.0;
    const double lo = opts.order_lo.value_or(expected - 0.1);
    const double hi = opts.order_hi.value_or(expected + 0.1);

    ConvergenceReport report;
    try {
        DeviceConfig tmpl = mms_template(scheme);
        if (mode == StudyMode::Spatial) {
            report = mms_spatial_order(opts.base_n, opts.levels, tmpl, opts.amplitude);
        } else {
            tmpl.grid.N = opts.temporal_n;
            report = mms_temporal_order(opts.base_dt, opts.levels, tmpl, opts.amplitude);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    const bool pass = report.orders_within(lo, hi);
    try {
        const fs::path dir(opts.out_dir);
        nlohmann::json j = report;
        j["window"] = {lo, hi};
        j["within_window"] = pass;
        write_text(dir / "convergence.json", j.dump(2) + "\n");
        write_text(dir / "convergence.csv", to_csv(report));
        nlohmann::json settings = {{"scheme", opts.scheme},     {"mode", opts.mode},
                                   {"amplitude", opts.amplitude}, {"base_n", opts.base_n},
                                   {"levels", opts.levels},       {"base_dt", opts.base_dt},
                                   {"temporal_n", opts.temporal_n}, {"window", {lo, hi}}};
        write_text(dir / "manifest.json", manifest(settings, "mms", seconds_since(start)).dump(2) + "\n");
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }

    if (!opts.quiet) {
        out << format_table(report);
        out << "observed orders " << (pass ? "within" : "OUTSIDE") << " [" << lo << ", " << hi << "]\n";
    }
    return pass ? kExitOk : kExitError;
}

int cmd_scale(const ScaleOptions& opts, std::ostream& out, std::ostream& err)
{
    try {
        PhysicalParams params = PhysicalParams::gaas();
        if (opts.params_path) {
            nlohmann::json j = load_json_file(*opts.params_path);
            if (j.is_object() && j.contains("physical")) {
                j = j.at("physical");
            }
            params = j.get<PhysicalParams>();
        }
        const ScaledParams scaled = compute_scaled(params);
        out << nlohmann::json(scaled).dump(2) << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Transient energy-transport simulator for 1D semiconductor devices", "etsim"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Time-march one device configuration");
    simulate->add_option("--config", sim.config_path, "Device configuration or run manifest (JSON)")
        ->required();
    simulate->add_option("--out", sim.out_dir, "Output directory")->required();
    simulate->add_option("--scheme", sim.scheme, "consistent-trapezoidal | paper-literal | implicit-euler");
    simulate->add_option("--max-steps", sim.max_steps, "Step limit for steady-state runs");
    simulate->add_flag("--quiet", sim.quiet, "Suppress progress output");

    SweepOptions swp;
    auto* sweep = app.add_subcommand("sweep", "Steady-state current for a list of biases");
    sweep->add_option("--config", swp.config_path, "Device configuration (JSON)")->required();
    sweep->add_option("--biases", swp.biases, "Comma-separated biases in volts")->required();
    sweep->add_option("--out", swp.out_dir, "Output directory")->required();
    sweep->add_option("--scheme", swp.scheme, "Override the configured scheme");
    sweep->add_option("--max-steps", swp.max_steps, "Step limit per bias point");
    sweep->add_flag("--quiet", swp.quiet, "Suppress progress output");

    MmsOptions mms;
    auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study");
    mms_cmd->add_option("--scheme", mms.scheme, "Scheme under test")->capture_default_str();
    mms_cmd->add_option("--mode", mms.mode, "spatial | temporal")->capture_default_str();
    mms_cmd->add_option("--out", mms.out_dir, "Output directory")->required();
    mms_cmd->add_option("--amplitude", mms.amplitude, "Manufactured amplitude a in [0, 1)")
        ->capture_default_str();
    mms_cmd->add_option("--base-n", mms.base_n, "Coarsest node count (spatial)")->capture_default_str();
    mms_cmd->add_option("--levels", mms.levels, "Number of refinement levels")->capture_default_str();
    mms_cmd->add_option("--base-dt", mms.base_dt, "Coarsest time step (temporal)")->capture_default_str();
    mms_cmd->add_option("--n", mms.temporal_n, "Node count (temporal)")->capture_default_str();
    mms_cmd->add_option("--order-min", mms.order_lo, "Lower end of the accepted order window");
    mms_cmd->add_option("--order-max", mms.order_hi, "Upper end of the accepted order window");
    mms_cmd->add_flag("--quiet", mms.quiet, "Suppress the table");

    ScaleOptions scl;
    auto* scale = app.add_subcommand("scale", "Print scaled parameters for a physical parameter file");
    scale->add_option("params", scl.params_path, "Physical parameters (JSON); GaAs defaults if omitted");
    scale->add_option("--config", scl.params_path, "Same as the positional argument");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitError;
    }

    if (simulate->parsed()) {
        return cmd_simulate(sim, out, err);
    }
    if (sweep->parsed()) {
        return cmd_sweep(swp, out, err);
    }
    if (mms_cmd->parsed()) {
        return cmd_mms(mms, out, err);
    }
    return cmd_scale(scl, out, err);
}

}  // namespace etsim::cli
