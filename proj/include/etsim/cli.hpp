#pragma once

// Command-line front end. Each subcommand returns a process exit code:
// 0 success, 1 usage / parse / solver error, 2 monitor violation.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "etsim/model.hpp"

namespace etsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitMonitor = 2;

std::string version();

/// Parses JSON text, reporting syntax errors as "<origin>:<line>:<column>: <message>".
nlohmann::json parse_json(const std::string& text, const std::string& origin);
nlohmann::json load_json_file(const std::string& path);

/// Loads a device configuration. A run manifest (an object with a "config"
/// member) is accepted in place of a plain configuration.
DeviceConfig load_device_config(const std::string& path);

/// Parses "0.2,1.0" into volts; throws std::invalid_argument on bad entries.
std::vector<double> parse_biases(const std::string& list);

/// %.17g formatting used for every CSV number.
std::string format_number(double value);

struct SimulateOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::string> scheme;
    std::optional<std::size_t> max_steps;
    bool quiet = false;
};

struct SweepOptions {
    std::string config_path;
    std::string out_dir;
    std::string biases;
    std::optional<std::string> scheme;
    std::optional<std::size_t> max_steps;
    bool quiet = false;
};

struct MmsOptions {
    std::string scheme = "consistent-trapezoidal";
    std::string mode = "spatial";
    std::string out_dir;
    double amplitude = 0.3;
    std::size_t base_n = 51;
    std::size_t levels = 4;
    double base_dt = 4e-3;
    std::size_t temporal_n = 801;
    std::optional<double> order_lo;
    std::optional<double> order_hi;
    bool quiet = false;
};

struct ScaleOptions {
    std::optional<std::string> params_path;
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_mms(const MmsOptions& opts, std::ostream& out, std::ostream& err);
int cmd_scale(const ScaleOptions& opts, std::ostream& out, std::ostream& err);

/// Full argument parsing and dispatch.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace etsim::cli
