#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace igp {

struct SolverOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double max_step = 0.1;
    double initial_step = 1e-3;
    std::int64_t max_steps = 10'000'000;

    void validate() const {
        if (!(rel_tol >= 1e-14) || !std::isfinite(rel_tol))
            throw std::invalid_argument("rel_tol must be >= 1e-14");
        if (!(abs_tol > 0.0) || !std::isfinite(abs_tol))
            throw std::invalid_argument("abs_tol must be positive");
        if (!(max_step > 0.0) || !std::isfinite(max_step))
            throw std::invalid_argument("max_step must be positive");
        if (!(initial_step > 0.0) || !std::isfinite(initial_step))
            throw std::invalid_argument("initial_step must be positive");
        if (max_steps <= 0) throw std::invalid_argument("max_steps must be positive");
    }
};

class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double t)
        : std::runtime_error(what + " at t = " + std::to_string(t)), t_reached(t) {}
    double t_reached;
};

namespace dp5 {
// Dormand-Prince 4(5) tableau with the quintic dense-output weights.
inline constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
inline constexpr double a21 = 0.2, a31 = 3.0 / 40.0, a32 = 9.0 / 40.0, a41 = 44.0 / 45.0,
                        a42 = -56.0 / 15.0, a43 = 32.0 / 9.0, a51 = 19372.0 / 6561.0,
                        a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0,
                        a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0, a71 = 35.0 / 384.0,
                        a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                        a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
inline constexpr double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;
inline constexpr double expo1 = 0.2 - beta * 0.75;
}  // namespace dp5

// Quintic Hermite interpolant over one accepted step [t0, t0 + h].
template <int N>
struct DenseSegment {
    using Vec = Eigen::Matrix<double, N, 1>;
    double t0 = 0, h = 0;
    Vec r1, r2, r3, r4, r5;

    Vec eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

// Explicit embedded 4(5) pair with PI stepsize control, FSAL, dense output and
// an orthant guard: the first `nonneg` components may not go negative; a step
// landing within -abs_tol of zero is clamped, anything deeper is retried with
// half the step.
template <int N, typename RHS>
class Dopri5 {
public:
    using Vec = Eigen::Matrix<double, N, 1>;

    Dopri5(RHS rhs, const SolverOptions& opts, int nonneg = 0)
        : rhs_(std::move(rhs)), opts_(opts), nonneg_(nonneg) {
        opts_.validate();
    }

    void start(double t0, const Vec& y0) {
        t_ = t0;
        y_ = y0;
        h_ = std::min(opts_.initial_step, opts_.max_step);
        facold_ = 1e-4;
        steps_ = 0;
    }

    double time() const { return t_; }
    const Vec& state() const { return y_; }
    Vec& state() { return y_; }  // mutable for tangent renormalization
    std::int64_t steps() const { return steps_; }

    // Advance to exactly t_target, invoking on_step(segment) after every
    // accepted step.
    template <typename OnStep>
    void advance_to(double t_target, OnStep&& on_step) {
        if (!(t_target >= t_)) throw std::invalid_argument("integration must move forward");
        Vec k1 = rhs_(t_, y_);
        Vec k2, k3, k4, k5, k6, k7, y_new, err_vec;

        while (t_ < t_target) {
            if (steps_ >= opts_.max_steps)
                throw IntegrationError("step budget exhausted", t_);
            if (h_ < 1e-14) throw IntegrationError("step size underflow", t_);

            bool last = false;
            double h = std::min(h_, opts_.max_step);
            if (t_ + 1.01 * h >= t_target) {
                last = true;
                h = t_target - t_;
            }
            ++steps_;

            y_new = y_ + h * dp5::a21 * k1;
            k2 = rhs_(t_ + dp5::c2 * h, y_new);
            y_new = y_ + h * (dp5::a31 * k1 + dp5::a32 * k2);
            k3 = rhs_(t_ + dp5::c3 * h, y_new);
            y_new = y_ + h * (dp5::a41 * k1 + dp5::a42 * k2 + dp5::a43 * k3);
            k4 = rhs_(t_ + dp5::c4 * h, y_new);
            y_new = y_ + h * (dp5::a51 * k1 + dp5::a52 * k2 + dp5::a53 * k3 + dp5::a54 * k4);
            k5 = rhs_(t_ + dp5::c5 * h, y_new);
            y_new = y_ + h * (dp5::a61 * k1 + dp5::a62 * k2 + dp5::a63 * k3 + dp5::a64 * k4 +
                              dp5::a65 * k5);
            k6 = rhs_(t_ + h, y_new);
            y_new = y_ + h * (dp5::a71 * k1 + dp5::a73 * k3 + dp5::a74 * k4 + dp5::a75 * k5 +
                              dp5::a76 * k6);
            k7 = rhs_(t_ + h, y_new);

            err_vec = h * (dp5::e1 * k1 + dp5::e3 * k3 + dp5::e4 * k4 + dp5::e5 * k5 +
                           dp5::e6 * k6 + dp5::e7 * k7);
            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    opts_.abs_tol +
                    opts_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
                const double q = err_vec[i] / sc;
                err += q * q;
            }
            err = std::sqrt(err / N);

            if (!y_new.allFinite() || !std::isfinite(err)) {
                h_ = h / 2.0;
                continue;
            }
            const double fac11 = std::pow(err, dp5::expo1);
            if (err > 1.0) {
                h_ = h / std::min(1.0 / dp5::facl, fac11 / dp5::safe);
                continue;
            }

            // orthant guard on the leading components
            bool clamped = false;
            bool reject_neg = false;
            for (int i = 0; i < nonneg_; ++i) {
                if (y_new[i] < 0.0) {
                    if (y_new[i] >= -opts_.abs_tol) {
                        y_new[i] = 0.0;
                        clamped = true;
                    } else {
                        reject_neg = true;
                    }
                }
            }
            if (reject_neg) {
                h_ = h / 2.0;
                continue;
            }
            if (clamped) k7 = rhs_(t_ + h, y_new);  // keep FSAL consistent

            // stabilized step growth (Lund / PI control)
            double fac = fac11 / std::pow(facold_, dp5::beta);
            fac = std::max(1.0 / dp5::facr, std::min(1.0 / dp5::facl, fac / dp5::safe));
            facold_ = std::max(err, 1e-4);

            DenseSegment<N> seg;
            seg.t0 = t_;
            seg.h = h;
            seg.r1 = y_;
            seg.r2 = y_new - y_;
            seg.r3 = h * k1 - seg.r2;
            seg.r4 = seg.r2 - h * k7 - seg.r3;
            seg.r5 = h * (dp5::d1 * k1 + dp5::d3 * k3 + dp5::d4 * k4 + dp5::d5 * k5 +
                          dp5::d6 * k6 + dp5::d7 * k7);

            y_ = y_new;
            k1 = k7;
            t_ = last ? t_target : t_ + h;
            if (!last) h_ = h / fac;  // a clamped final step keeps the prior h

            on_step(static_cast<const DenseSegment<N>&>(seg));
        }
    }

private:
    RHS rhs_;
    SolverOptions opts_;
    int nonneg_;
    double t_ = 0;
    Vec y_ = Vec::Zero();
    double h_ = 0;
    double facold_ = 1e-4;
    std::int64_t steps_ = 0;
};

}  // namespace igp
