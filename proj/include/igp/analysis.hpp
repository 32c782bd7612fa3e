#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "igp/integrate.hpp"
#include "igp/model.hpp"

namespace igp {

struct ExtremaLists {
    std::array<std::vector<double>, 3> maxima;
    std::array<std::vector<double>, 3> minima;

    // max minus min over all recorded extrema of one variable; 0 when fewer
    // than two extrema exist
    double spread(int var) const {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        int n = 0;
        for (double v : maxima[var]) { lo = std::min(lo, v); hi = std::max(hi, v); ++n; }
        for (double v : minima[var]) { lo = std::min(lo, v); hi = std::max(hi, v); ++n; }
        return n >= 2 ? hi - lo : 0.0;
    }
};

// Strict local extrema of each variable over the post-transient samples.
inline ExtremaLists attractor_extrema(const Trajectory& traj, double transient) {
    const auto n = traj.times.size();
    std::size_t begin = 0;
    while (begin < n && traj.times[begin] < transient) ++begin;
    if (begin >= n) throw std::domain_error("trajectory has no samples past the transient");

    ExtremaLists out;
    for (int var = 0; var < 3; ++var) {
        for (std::size_t k = begin + 1; k + 1 < n; ++k) {
            const double prev = traj.states(var, static_cast<Eigen::Index>(k - 1));
            const double cur = traj.states(var, static_cast<Eigen::Index>(k));
            const double next = traj.states(var, static_cast<Eigen::Index>(k + 1));
            if (cur > prev && cur > next) out.maxima[var].push_back(cur);
            else if (cur < prev && cur < next) out.minima[var].push_back(cur);
        }
    }
    return out;
}

namespace detail {

inline double lle_from_logs(const std::vector<double>& log_norms, double tau,
                            double transient) {
    double sum = 0.0;
    std::size_t kept = 0;
    for (std::size_t k = 0; k < log_norms.size(); ++k) {
        if ((k + 1) * tau > transient) {
            sum += log_norms[k];
            ++kept;
        }
    }
    if (kept == 0)
        throw std::invalid_argument("no renormalization windows past the transient");
    return sum / (static_cast<double>(kept) * tau);
}

}  // namespace detail

// Benettin estimate of the largest Lyapunov exponent: average tangent
// log-growth per unit time over the post-transient windows. A negative
// transient_time selects the default, the first 20% of the run.
inline double largest_lyapunov(const ModelParams& p, const State& s0, double total_time,
                               const SolverOptions& opts = {}, double transient_time = -1.0) {
    if (transient_time < 0.0) transient_time = 0.2 * total_time;
    const TangentRun run =
        integrate_with_tangent(p, s0, State(1.0, 0.0, 0.0), total_time, opts,
                               /*sample_dt=*/1.0);
    return detail::lle_from_logs(run.log_norms, run.tau, transient_time);
}

enum class Verdict { StablePoint, Periodic, Chaotic };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::StablePoint: return "stable-point";
        case Verdict::Periodic: return "periodic";
        case Verdict::Chaotic: return "chaotic";
    }
    return "?";
}

struct SweepSpec {
    std::string parameter = "c";
    std::vector<double> grid;  // strictly increasing
    ModelParams base;
    State initial{1.0, 1.0, 1.0};
    double transient = 2000.0;
    double sample = 1000.0;
    double lle_threshold = 0.01;
    SolverOptions solver;

    void validate() const {
        base.validate();
        solver.validate();
        detail::validate_state(initial);
        param_field(parameter);  // throws on unknown names
        if (grid.empty()) throw std::invalid_argument("sweep grid must be nonempty");
        for (std::size_t i = 1; i < grid.size(); ++i)
            if (!(grid[i] > grid[i - 1]))
                throw std::invalid_argument("sweep grid must be strictly increasing");
        if (!(transient > 0.0) || !(sample > 0.0))
            throw std::invalid_argument("transient and sample times must be positive");
        if (!(lle_threshold > 0.0))
            throw std::invalid_argument("lle_threshold must be positive");
    }
};

struct SweepRecord {
    double value = 0;
    ExtremaLists extrema;
    State final_state = State::Zero();  // attractor sample for converged grid points
    double lle = 0;
    Verdict verdict = Verdict::Periodic;
    bool failed = false;
    std::string error;
};

namespace detail {

inline constexpr double kSpreadTol = 1e-4;

inline SweepRecord sweep_point(const SweepSpec& spec, double value) {
    SweepRecord rec;
    rec.value = value;
    try {
        ModelParams p = spec.base;
        p.*param_field(spec.parameter) = value;
        p.validate();
        const double total = spec.transient + spec.sample;
        const Trajectory traj = integrate(p, spec.initial, total, spec.solver);
        rec.extrema = attractor_extrema(traj, spec.transient);
        rec.final_state = traj.states.col(traj.states.cols() - 1);
        rec.lle = largest_lyapunov(p, spec.initial, total, spec.solver, spec.transient);
        if (rec.lle > spec.lle_threshold) {
            rec.verdict = Verdict::Chaotic;
        } else if (rec.lle < -spec.lle_threshold &&
                   rec.extrema.spread(0) < kSpreadTol &&
                   rec.extrema.spread(1) < kSpreadTol &&
                   rec.extrema.spread(2) < kSpreadTol) {
            rec.verdict = Verdict::StablePoint;
        } else {
            rec.verdict = Verdict::Periodic;
        }
    } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
    }
    return rec;
}

}  // namespace detail

// One record per grid value, computed independently (worker pool of `jobs`
// threads) and returned in grid order. Output is identical for any worker
// count: the pipeline contains no randomness and each record is written to its
// own slot. Per-point failures are recorded in the record, not thrown.
inline std::vector<SweepRecord> sweep(const SweepSpec& spec, int jobs = 1) {
    spec.validate();
    const std::size_t n = spec.grid.size();
    std::vector<SweepRecord> records(n);
    const int workers =
        std::max(1, std::min<int>(jobs, static_cast<int>(n)));

    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            records[i] = detail::sweep_point(spec, spec.grid[i]);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                records[i] = detail::sweep_point(spec, spec.grid[i]);
        });
    }
    for (auto& th : pool) th.join();
    return records;
}

struct ThresholdInterval {
    bool found = false;
    double lower = 0;
    double upper = 0;
};

// Bisection refinement of the last chaotic -> non-chaotic verdict change along
// a grid. `chaotic_at` classifies an arbitrary parameter value; the flags are
// the grid verdicts. Exposed for stubbed tests.
inline ThresholdInterval refine_verdict_change(const std::vector<double>& grid,
                                               const std::vector<bool>& chaotic_flags,
                                               const std::function<bool(double)>& chaotic_at,
                                               int max_iters = 12) {
    if (grid.size() != chaotic_flags.size())
        throw std::invalid_argument("grid/flag size mismatch");
    ThresholdInterval out;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (chaotic_flags[i] && !chaotic_flags[i + 1]) {
            out.found = true;
            out.lower = grid[i];
            out.upper = grid[i + 1];
        }
    }
    if (!out.found) return out;
    for (int it = 0; it < max_iters; ++it) {
        const double mid = (out.lower + out.upper) / 2.0;
        if (chaotic_at(mid)) out.lower = mid;
        else out.upper = mid;
    }
    return out;
}

// Threshold location over already-computed sweep records (failed points are
// skipped when scanning for the verdict change).
inline ThresholdInterval locate_threshold(const SweepSpec& spec,
                                          const std::vector<SweepRecord>& records,
                                          int max_iters = 12) {
    std::vector<double> grid;
    std::vector<bool> flags;
    for (const auto& r : records) {
        if (r.failed) continue;
        grid.push_back(r.value);
        flags.push_back(r.verdict == Verdict::Chaotic);
    }
    return refine_verdict_change(
        grid, flags,
        [&spec](double v) {
            return detail::sweep_point(spec, v).verdict == Verdict::Chaotic;
        },
        max_iters);
}

inline ThresholdInterval locate_threshold(const SweepSpec& spec, double lle_threshold,
                                          int jobs = 1) {
    SweepSpec s = spec;
    s.lle_threshold = lle_threshold;
    return locate_threshold(s, sweep(s, jobs));
}

}  // namespace igp
