#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "igp/analysis.hpp"
#include "igp/model.hpp"

namespace igp {

// User-input errors (file syntax, unknown keys, malformed values). Reported
// distinctly from numerical failures by the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulateOptions {
    double t_end = 500.0;
    double sample_interval = 0.01;
};

struct SweepOptions {
    std::string parameter = "c";
    double from = 0.0;
    double to = 1.0;
    double step = 0.05;
    double transient = 2000.0;
    double sample = 1000.0;
    double lle_threshold = 0.01;
    bool refine = true;
};

struct LyapunovOptions {
    double total_time = 3000.0;
    double transient_fraction = 0.2;
};

struct RunConfig {
    ModelParams model;
    State initial{1.0, 1.0, 1.0};
    SolverOptions solver;
    SimulateOptions simulate;
    SweepOptions sweep;
    LyapunovOptions lyapunov;

    void apply(const std::string& section, const std::string& key, const std::string& value,
               const std::string& where);
    void validate() const;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& value, const std::string& where) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError(where + ": expected a number, got '" + value + "'");
    return v;
}

inline long long parse_int(const std::string& value, const std::string& where) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError(where + ": expected an integer, got '" + value + "'");
    return v;
}

inline bool parse_bool(const std::string& value, const std::string& where) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(where + ": expected true/false, got '" + value + "'");
}

}  // namespace detail

inline void RunConfig::apply(const std::string& section, const std::string& key,
                             const std::string& value, const std::string& where) {
    auto num = [&] { return detail::parse_double(value, where); };
    if (section == "model") {
        try {
            model.*param_field(key) = num();
        } catch (const std::invalid_argument&) {
            throw ConfigError(where + ": unknown model parameter '" + key + "'");
        }
        return;
    }
    if (section == "initial") {
        if (key == "x") initial[0] = num();
        else if (key == "y") initial[1] = num();
        else if (key == "z") initial[2] = num();
        else throw ConfigError(where + ": unknown key '" + key + "' in [initial]");
        return;
    }
    if (section == "solver") {
        if (key == "rel_tol") solver.rel_tol = num();
        else if (key == "abs_tol") solver.abs_tol = num();
        else if (key == "max_step") solver.max_step = num();
        else if (key == "initial_step") solver.initial_step = num();
        else if (key == "max_steps") solver.max_steps = detail::parse_int(value, where);
        else throw ConfigError(where + ": unknown key '" + key + "' in [solver]");
        return;
    }
    if (section == "simulate") {
        if (key == "t_end") simulate.t_end = num();
        else if (key == "sample_interval") simulate.sample_interval = num();
        else throw ConfigError(where + ": unknown key '" + key + "' in [simulate]");
        return;
    }
    if (section == "sweep") {
        if (key == "parameter") sweep.parameter = value;
        else if (key == "from") sweep.from = num();
        else if (key == "to") sweep.to = num();
        else if (key == "step") sweep.step = num();
        else if (key == "transient") sweep.transient = num();
        else if (key == "sample") sweep.sample = num();
        else if (key == "lle_threshold") sweep.lle_threshold = num();
        else if (key == "refine") sweep.refine = detail::parse_bool(value, where);
        else throw ConfigError(where + ": unknown key '" + key + "' in [sweep]");
        return;
    }
    if (section == "lyapunov") {
        if (key == "total_time") lyapunov.total_time = num();
        else if (key == "transient_fraction") lyapunov.transient_fraction = num();
        else throw ConfigError(where + ": unknown key '" + key + "' in [lyapunov]");
        return;
    }
    throw ConfigError(where + ": unknown section '" + section + "'");
}

inline void RunConfig::validate() const {
    try {
        model.validate();
        solver.validate();
        detail::validate_state(initial);
        param_field(sweep.parameter);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    if (!(simulate.t_end > 0.0)) throw ConfigError("simulate.t_end must be positive");
    if (!(simulate.sample_interval > 0.0))
        throw ConfigError("simulate.sample_interval must be positive");
    if (!(sweep.step > 0.0)) throw ConfigError("sweep.step must be positive");
    if (!(sweep.to >= sweep.from)) throw ConfigError("sweep.to must be >= sweep.from");
    if (!(sweep.transient > 0.0) || !(sweep.sample > 0.0))
        throw ConfigError("sweep.transient and sweep.sample must be positive");
    if (!(sweep.lle_threshold > 0.0)) throw ConfigError("sweep.lle_threshold must be positive");
    if (!(lyapunov.total_time > 0.0)) throw ConfigError("lyapunov.total_time must be positive");
    if (!(lyapunov.transient_fraction >= 0.0 && lyapunov.transient_fraction < 1.0))
        throw ConfigError("lyapunov.transient_fraction must lie in [0, 1)");
}

// INI-style file: [section] headers, key = value lines, # or ; comments.
// Unknown sections or keys are errors, reported with file and line number.
inline void load_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = path + ":" + std::to_string(lineno);
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + ": malformed section header '" + line + "'");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError(where + ": empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + ": missing key");
        if (section.empty())
            throw ConfigError(where + ": key '" + key + "' appears before any [section]");
        cfg.apply(section, key, value, where);
    }
}

namespace detail {

// Every key name is unique across sections, so bare-key overrides are
// unambiguous.
inline const char* section_of(const std::string& key) {
    static const struct { const char* section; const char* key; } table[] = {
        {"model", "b1"}, {"model", "b2"}, {"model", "b3"}, {"model", "c"},
        {"model", "a11"}, {"model", "a12"}, {"model", "a13"}, {"model", "a21"},
        {"model", "a23"}, {"model", "a31"}, {"model", "a32"},
        {"initial", "x"}, {"initial", "y"}, {"initial", "z"},
        {"solver", "rel_tol"}, {"solver", "abs_tol"}, {"solver", "max_step"},
        {"solver", "initial_step"}, {"solver", "max_steps"},
        {"simulate", "t_end"}, {"simulate", "sample_interval"},
        {"sweep", "parameter"}, {"sweep", "from"}, {"sweep", "to"}, {"sweep", "step"},
        {"sweep", "transient"}, {"sweep", "sample"}, {"sweep", "lle_threshold"},
        {"sweep", "refine"},
        {"lyapunov", "total_time"}, {"lyapunov", "transient_fraction"},
    };
    for (const auto& e : table)
        if (key == e.key) return e.section;
    return nullptr;
}

}  // namespace detail

// Command-line override of one config entry, written key=value or
// section.key=value.
inline void apply_override(RunConfig& cfg, const std::string& assignment) {
    const std::string where = "--set " + assignment;
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError(where + ": expected key=value");
    std::string lhs = detail::trim(assignment.substr(0, eq));
    const std::string value = detail::trim(assignment.substr(eq + 1));
    std::size_t dot = lhs.find('.');
    if (dot != std::string::npos) {
        if (dot == 0 || dot + 1 >= lhs.size())
            throw ConfigError(where + ": expected key=value or section.key=value");
        cfg.apply(lhs.substr(0, dot), lhs.substr(dot + 1), value, where);
        return;
    }
    const char* section = detail::section_of(lhs);
    if (!section) throw ConfigError(where + ": unknown key '" + lhs + "'");
    cfg.apply(section, lhs, value, where);
}

// Uniform grid from..to inclusive; the endpoint is snapped onto `to` so that
// accumulated rounding never drops or duplicates it.
inline std::vector<double> make_grid(double from, double to, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
    if (!(to >= from)) throw std::invalid_argument("grid end must be >= start");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step * (1.0 + 1e-12)));
    grid.reserve(count + 2);
    for (std::size_t k = 0; k <= count; ++k) grid.push_back(from + static_cast<double>(k) * step);
    if (to - grid.back() > 1e-9 * step) grid.push_back(to);
    else grid.back() = to;
    return grid;
}

inline SweepSpec to_sweep_spec(const RunConfig& cfg) {
    SweepSpec spec;
    spec.parameter = cfg.sweep.parameter;
    spec.grid = make_grid(cfg.sweep.from, cfg.sweep.to, cfg.sweep.step);
    spec.base = cfg.model;
    spec.initial = cfg.initial;
    spec.transient = cfg.sweep.transient;
    spec.sample = cfg.sweep.sample;
    spec.lle_threshold = cfg.sweep.lle_threshold;
    spec.solver = cfg.solver;
    return spec;
}

}  // namespace igp
