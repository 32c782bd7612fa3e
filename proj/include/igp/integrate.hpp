#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "igp/dopri5.hpp"
#include "igp/model.hpp"

namespace igp {

struct Trajectory {
    std::vector<double> times;   // strictly increasing sample times
    Eigen::Matrix3Xd states;     // column j = state at times[j], componentwise >= 0
};

namespace detail {

inline std::vector<double> sample_times(double t_end, double dt) {
    std::vector<double> ts;
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt * (1.0 + 1e-12)));
    ts.reserve(n + 2);
    for (std::size_t k = 0; k <= n; ++k) ts.push_back(k * dt);
    if (ts.back() < t_end * (1.0 - 1e-12)) ts.push_back(t_end);
    else ts.back() = std::min(ts.back(), t_end);
    return ts;
}

// Collects dense-output samples at fixed times as integration progresses. Only
// the first three components (the state) are stored; interpolated values are
// clamped to the orthant.
template <int N>
class TrajectorySink {
public:
    TrajectorySink(std::vector<double> times, Eigen::Matrix3Xd& out)
        : times_(std::move(times)), out_(out) {
        out_.resize(3, static_cast<Eigen::Index>(times_.size()));
    }

    void take_initial(const Eigen::Matrix<double, N, 1>& y0) {
        out_.col(0) = y0.template head<3>().cwiseMax(0.0);
        next_ = 1;
    }

    void operator()(const DenseSegment<N>& seg) {
        const double t1 = seg.t0 + seg.h;
        while (next_ < times_.size() && times_[next_] <= t1 * (1.0 + 1e-15)) {
            out_.col(static_cast<Eigen::Index>(next_)) =
                seg.eval(std::min(times_[next_], t1)).template head<3>().cwiseMax(0.0);
            ++next_;
        }
    }

    std::vector<double> take_times() { return std::move(times_); }

private:
    std::vector<double> times_;
    Eigen::Matrix3Xd& out_;
    std::size_t next_ = 1;
};

}  // namespace detail

// Adaptive trajectory integration from t = 0 with dense output sampled every
// sample_dt time units (plus the exact endpoint).
inline Trajectory integrate(const ModelParams& p, const State& s0, double t_end,
                            const SolverOptions& opts = {}, double sample_dt = 0.01) {
    p.validate();
    detail::validate_state(s0);
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("t_end must be positive");
    if (!(sample_dt > 0.0) || !std::isfinite(sample_dt))
        throw std::invalid_argument("sample_dt must be positive");

    const auto rhs = [&p](double, const Eigen::Vector3d& y) {
        return detail::vector_field_raw(y, p);
    };
    Dopri5<3, decltype(rhs)> solver(rhs, opts, 3);
    solver.start(0.0, s0);

    Trajectory traj;
    detail::TrajectorySink<3> sink(detail::sample_times(t_end, sample_dt), traj.states);
    sink.take_initial(s0);
    solver.advance_to(t_end, sink);
    traj.times = sink.take_times();
    return traj;
}

struct TangentRun {
    Trajectory trajectory;
    std::vector<double> log_norms;  // ln ||v|| at each window end, before renormalization
    double tau = 1.0;               // renormalization window length
};

// Joint integration of the state with the variational system dv/dt = J(s(t)) v.
// The tangent vector is normalized upfront (the log-growth rate is scale
// invariant) and renormalized to unit length every tau = 1 time unit, logging
// ln ||v|| first.
inline TangentRun integrate_with_tangent(const ModelParams& p, const State& s0, const State& v0,
                                         double t_end, const SolverOptions& opts = {},
                                         double sample_dt = 0.01) {
    p.validate();
    detail::validate_state(s0);
    if (!v0.allFinite() || !(v0.norm() > 0.0))
        throw std::invalid_argument("tangent seed must be nonzero");
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("t_end must be positive");

    using Vec6 = Eigen::Matrix<double, 6, 1>;
    const auto rhs = [&p](double, const Vec6& w) {
        Vec6 dw;
        dw.head<3>() = detail::vector_field_raw(w.head<3>(), p);
        dw.tail<3>() = detail::jacobian_raw(w.head<3>(), p) * w.tail<3>();
        return dw;
    };
    Dopri5<6, decltype(rhs)> solver(rhs, opts, 3);

    Vec6 w0;
    w0.head<3>() = s0;
    w0.tail<3>() = v0.normalized();
    solver.start(0.0, w0);

    TangentRun run;
    run.tau = 1.0;
    detail::TrajectorySink<6> sink(detail::sample_times(t_end, sample_dt),
                                   run.trajectory.states);
    sink.take_initial(w0);

    const auto n_windows = static_cast<std::size_t>(std::floor(t_end / run.tau * (1.0 + 1e-12)));
    run.log_norms.reserve(n_windows);
    for (std::size_t k = 1; k <= n_windows; ++k) {
        solver.advance_to(k * run.tau, sink);
        const double norm = solver.state().tail<3>().norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw IntegrationError("tangent vector degenerated", solver.time());
        run.log_norms.push_back(std::log(norm));
        solver.state().tail<3>() /= norm;
    }
    if (solver.time() < t_end) solver.advance_to(t_end, sink);
    run.trajectory.times = sink.take_times();
    return run;
}

}  // namespace igp
