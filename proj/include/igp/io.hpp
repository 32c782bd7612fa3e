#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "igp/analysis.hpp"
#include "igp/integrate.hpp"

namespace igp {

// 17 significant digits: enough to round-trip any double exactly.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace detail

inline void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto out = detail::open_out(path);
    out << "t,x,y,z\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        out << fmt17(traj.times[k]) << ',' << fmt17(traj.states(0, col)) << ','
            << fmt17(traj.states(1, col)) << ',' << fmt17(traj.states(2, col)) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Long-format extrema table. Variables that settled to a point contribute a
// single `point` row holding the final state instead of max/min rows.
inline void write_sweep_extrema_csv(const std::string& path, const std::string& parameter,
                                    const std::vector<SweepRecord>& records) {
    auto out = detail::open_out(path);
    out << "param,value,variable,extremum_kind,extremum_value\n";
    static const char* names[3] = {"x", "y", "z"};
    for (const auto& rec : records) {
        if (rec.failed) continue;
        for (int var = 0; var < 3; ++var) {
            const auto& maxima = rec.extrema.maxima[var];
            const auto& minima = rec.extrema.minima[var];
            if (maxima.empty() && minima.empty()) {
                out << parameter << ',' << fmt17(rec.value) << ',' << names[var]
                    << ",point," << fmt17(rec.final_state[var]) << '\n';
                continue;
            }
            for (double v : maxima)
                out << parameter << ',' << fmt17(rec.value) << ',' << names[var]
                    << ",max," << fmt17(v) << '\n';
            for (double v : minima)
                out << parameter << ',' << fmt17(rec.value) << ',' << names[var]
                    << ",min," << fmt17(v) << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_sweep_summary_csv(const std::string& path, const std::string& parameter,
                                    const std::vector<SweepRecord>& records) {
    auto out = detail::open_out(path);
    out << "param,value,lle,verdict\n";
    for (const auto& rec : records) {
        if (rec.failed) {
            out << parameter << ',' << fmt17(rec.value) << ",nan,failed\n";
            continue;
        }
        out << parameter << ',' << fmt17(rec.value) << ',' << fmt17(rec.lle) << ','
            << to_string(rec.verdict) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Plain-text run manifest: `[section]` headers and `key = value` lines in
// insertion order.
class Manifest {
public:
    void section(const std::string& name) { lines_.push_back("[" + name + "]"); }
    void put(const std::string& key, const std::string& value) {
        lines_.push_back(key + " = " + value);
    }
    void put(const std::string& key, double value) { put(key, fmt17(value)); }
    void put(const std::string& key, long long value) { put(key, std::to_string(value)); }
    void put(const std::string& key, int value) { put(key, std::to_string(value)); }

    void write(const std::string& path) const {
        auto out = detail::open_out(path);
        for (const auto& line : lines_) out << line << '\n';
        if (!out) throw std::runtime_error("write failed: " + path);
    }

private:
    std::vector<std::string> lines_;
};

}  // namespace igp
