#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "igp/model.hpp"

namespace igp {

enum class EquilibriumKind { E0, E1, E2, E3, E4 };
enum class Stability { Stable, Unstable, Marginal, NotAssessed };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::E0: return "E0";
        case EquilibriumKind::E1: return "E1";
        case EquilibriumKind::E2: return "E2";
        case EquilibriumKind::E3: return "E3";
        case EquilibriumKind::E4: return "E4";
    }
    return "?";
}

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::Unstable: return "unstable";
        case Stability::Marginal: return "marginal";
        case Stability::NotAssessed: return "not-assessed";
    }
    return "?";
}

struct Equilibrium {
    EquilibriumKind kind = EquilibriumKind::E0;
    State point = State::Zero();
    bool feasible = false;
    Stability stability = Stability::NotAssessed;
    bool degenerate = false;  // E2 with z2 = 0 collapses onto E1
};

// Selection surfaces of the closed-form stability conditions, reported next to
// the spectral classification.
struct BoundaryStabilityReport {
    Stability classification = Stability::NotAssessed;  // from the Jacobian spectrum
    Eigen::Vector3cd eigenvalues;
    bool condition_holds = false;  // the closed-form inequality for this point
    std::string condition;         // the inequality, rendered with numbers
};

struct RouthHurwitzReport {
    std::array<double, 8> V{};  // V[0] = V1, ..., V[7] = V8
    double sigma1 = 0, sigma2 = 0, sigma3 = 0;
    bool hurwitz = false;  // sigma1 > 0, sigma3 > 0, sigma1 sigma2 > sigma3
};

namespace detail {

// Per-capita system g(s) = (dx/x, dy/y, dz/z); its positive roots are the
// coexistence equilibria.
inline Eigen::Vector3d per_capita(const Eigen::Vector3d& s, const ModelParams& p) {
    const double x = s[0], y = s[1], z = s[2];
    const double u = x + p.c * y;
    const double v = y + p.c * x;
    return {p.b1 - p.a11 * x - p.a12 * y - p.a13 * x * z / u,
            -p.b2 + p.a21 * x - p.a23 * y * z / v,
            -p.b3 + p.a31 * x * x / u + p.a32 * y * y / v};
}

inline Eigen::Matrix3d per_capita_jacobian(const Eigen::Vector3d& s, const ModelParams& p) {
    const double x = s[0], y = s[1], z = s[2];
    const double u = x + p.c * y;
    const double v = y + p.c * x;
    Eigen::Matrix3d J;
    J(0, 0) = -p.a11 - p.a13 * z * p.c * y / (u * u);
    J(0, 1) = -p.a12 + p.a13 * z * p.c * x / (u * u);
    J(0, 2) = -p.a13 * x / u;
    J(1, 0) = p.a21 + p.a23 * z * p.c * y / (v * v);
    J(1, 1) = -p.a23 * z * p.c * x / (v * v);
    J(1, 2) = -p.a23 * y / v;
    J(2, 0) = p.a31 * x * (x + 2.0 * p.c * y) / (u * u) - p.a32 * p.c * y * y / (v * v);
    J(2, 1) = -p.a31 * p.c * x * x / (u * u) + p.a32 * y * (y + 2.0 * p.c * x) / (v * v);
    J(2, 2) = 0.0;
    return J;
}

// Coexistence point of the c = 0 system, where the per-capita equations are
// linear. Empty when the system is singular or the solution leaves the open
// orthant.
inline std::optional<Eigen::Vector3d> linear_coexistence_c0(const ModelParams& p) {
    Eigen::Matrix3d A;
    A << p.a11, p.a12, p.a13, p.a21, 0.0, -p.a23, p.a31, p.a32, 0.0;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(A);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::Vector3d s = lu.solve(Eigen::Vector3d(p.b1, p.b2, p.b3));
    if (!s.allFinite() || !(s.minCoeff() > 0.0)) return std::nullopt;
    return s;
}

inline Stability classify_spectrum(const Eigen::Vector3cd& eig) {
    double max_re = eig.real().maxCoeff();
    const double scale = 1.0 + eig.cwiseAbs().maxCoeff();
    if (max_re > 1e-9 * scale) return Stability::Unstable;
    if (max_re < -1e-9 * scale) return Stability::Stable;
    return Stability::Marginal;
}

inline Eigen::Vector3cd sorted_eigenvalues(const Eigen::Matrix3d& J) {
    Eigen::EigenSolver<Eigen::Matrix3d> es(J);
    Eigen::Vector3cd e = es.eigenvalues();
    // ascending real part, positive imaginary part first within a pair
    std::array<std::complex<double>, 3> v{e[0], e[1], e[2]};
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() > b.imag();
    });
    return Eigen::Vector3cd(v[0], v[1], v[2]);
}

// Damped Newton on the per-capita system from one start. Returns the root when
// the iteration converges, regardless of sign; the caller filters.
inline std::optional<Eigen::Vector3d> newton_per_capita(Eigen::Vector3d s,
                                                        const ModelParams& p) {
    const auto usable = [&](const Eigen::Vector3d& q) {
        return q.allFinite() && q[0] + p.c * q[1] > 0.0 && q[1] + p.c * q[0] > 0.0;
    };
    if (!usable(s)) return std::nullopt;
    Eigen::Vector3d f = per_capita(s, p);
    if (!f.allFinite()) return std::nullopt;
    for (int iter = 0; iter < 100; ++iter) {
        const double scale = 1.0 + s.norm();
        Eigen::PartialPivLU<Eigen::Matrix3d> lu(per_capita_jacobian(s, p));
        const Eigen::Vector3d step = lu.solve(-f);
        if (!step.allFinite()) return std::nullopt;

        double lambda = 1.0;
        Eigen::Vector3d s_new;
        Eigen::Vector3d f_new;
        bool improved = false;
        for (int halving = 0; halving <= 50; ++halving) {
            s_new = s + lambda * step;
            if (usable(s_new)) {
                f_new = per_capita(s_new, p);
                if (f_new.allFinite() && f_new.norm() < f.norm()) {
                    improved = true;
                    break;
                }
            }
            lambda /= 2.0;
        }
        if (!improved) {
            // stagnated; accept only if already at the residual target
            return f.norm() <= 1e-10 * scale ? std::optional<Eigen::Vector3d>(s)
                                             : std::nullopt;
        }
        const double step_norm = (lambda * step).norm();
        s = s_new;
        f = f_new;
        if (step_norm < 1e-12 * (1.0 + s.norm()) && f.norm() <= 1e-10 * (1.0 + s.norm()))
            return s;
    }
    return std::nullopt;
}

}  // namespace detail

// Closed-form boundary equilibria with feasibility flags:
//   E0 = (0,0,0), E1 = (b1/a11, 0, 0), E2 = (b3/a31, 0, (b1 - a11 x2)/a13),
//   E3 = (b2/a21, (b1 - a11 x3)/a12, 0).
// Components with a zero divisor mark the point infeasible rather than computed.
inline std::array<Equilibrium, 4> boundary_equilibria(const ModelParams& p) {
    p.validate();
    std::array<Equilibrium, 4> out;

    out[0].kind = EquilibriumKind::E0;
    out[0].feasible = true;

    out[1].kind = EquilibriumKind::E1;
    out[1].point = State(p.b1 / p.a11, 0.0, 0.0);
    out[1].feasible = true;

    out[2].kind = EquilibriumKind::E2;
    if (p.a31 > 0.0 && p.a13 > 0.0) {
        const double x2 = p.b3 / p.a31;
        const double z2 = (p.b1 - p.a11 * x2) / p.a13;
        out[2].point = State(x2, 0.0, z2);
        out[2].feasible = z2 >= 0.0;
        out[2].degenerate = std::abs(z2) <= 1e-12;
    }

    out[3].kind = EquilibriumKind::E3;
    if (p.a21 > 0.0 && p.a12 > 0.0) {
        const double x3 = p.b2 / p.a21;
        const double y3 = (p.b1 - p.a11 * x3) / p.a12;
        out[3].point = State(x3, y3, 0.0);
        out[3].feasible = y3 >= 0.0;
    }
    return out;
}

// Spectral classification of a feasible boundary equilibrium, reported next to
// the closed-form inequality for the same point. The spectrum is authoritative.
inline BoundaryStabilityReport boundary_stability(const ModelParams& p, const Equilibrium& e) {
    if (!e.feasible) throw std::domain_error("boundary_stability requires a feasible point");

    BoundaryStabilityReport r;
    char buf[160];
    const double x = e.point[0], y = e.point[1];
    switch (e.kind) {
        case EquilibriumKind::E1: {
            const bool c1 = p.a21 * p.b1 < p.a11 * p.b2;
            const bool c2 = p.a31 * p.b1 < p.a11 * p.b3;
            r.condition_holds = c1 && c2;
            std::snprintf(buf, sizeof buf,
                          "a21 b1 < a11 b2 (%.6g < %.6g) and a31 b1 < a11 b3 (%.6g < %.6g)",
                          p.a21 * p.b1, p.a11 * p.b2, p.a31 * p.b1, p.a11 * p.b3);
            break;
        }
        case EquilibriumKind::E2: {
            r.condition_holds = p.a31 * p.b2 > p.a21 * p.b3;
            std::snprintf(buf, sizeof buf, "a31 b2 > a21 b3 (%.6g > %.6g)", p.a31 * p.b2,
                          p.a21 * p.b3);
            break;
        }
        case EquilibriumKind::E3: {
            const double thr = p.a31 * x * x / (x + p.c * y) + p.a32 * y * y / (y + p.c * x);
            r.condition_holds = p.b3 > thr;
            std::snprintf(buf, sizeof buf,
                          "b3 > a31 x3^2/(x3+c y3) + a32 y3^2/(y3+c x3) (%.6g > %.6g)", p.b3,
                          thr);
            break;
        }
        default:
            throw std::domain_error("boundary_stability accepts E1, E2 or E3");
    }
    r.condition = buf;
    r.eigenvalues = detail::sorted_eigenvalues(detail::jacobian_raw(e.point, p));
    r.classification = detail::classify_spectrum(r.eigenvalues);
    return r;
}

// Strictly positive root of the per-capita system, by damped Newton iteration
// over a deterministic multi-start schedule: the caller's guess, the c = 0
// linear solution, the centroid of the feasible boundary equilibria, then 20
// log-uniform points in [1e-2, 1e2]^3 from a fixed seed. For c = 0 the system
// is linear and solved exactly. Empty result when every start fails.
inline std::optional<Equilibrium> solve_coexistence(const ModelParams& p,
                                                    std::optional<State> guess = std::nullopt) {
    p.validate();

    const auto accept = [&](const Eigen::Vector3d& s) {
        Equilibrium e;
        e.kind = EquilibriumKind::E4;
        e.point = s;
        e.feasible = true;
        e.stability =
            detail::classify_spectrum(detail::sorted_eigenvalues(detail::jacobian_raw(s, p)));
        return e;
    };

    if (p.c == 0.0) {
        const auto s = detail::linear_coexistence_c0(p);
        if (!s) return std::nullopt;
        return accept(*s);
    }

    std::vector<Eigen::Vector3d> starts;
    if (guess) starts.push_back(*guess);
    if (const auto s = detail::linear_coexistence_c0(p)) starts.push_back(*s);
    {
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        int n = 0;
        for (const auto& e : boundary_equilibria(p))
            if (e.feasible) {
                centroid += e.point;
                ++n;
            }
        if (n > 0) starts.push_back(centroid / n);
    }
    std::mt19937 rng(20240615u);
    std::uniform_real_distribution<double> expo(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        Eigen::Vector3d s;
        for (int i = 0; i < 3; ++i) s[i] = std::pow(10.0, expo(rng));
        starts.push_back(s);
    }

    for (const auto& start : starts) {
        const auto root = detail::newton_per_capita(start, p);
        if (root && root->minCoeff() > 0.0) return accept(*root);
    }
    return std::nullopt;
}

// V1..V8 and sigma1..sigma3 at a strictly positive coexistence point,
//   sigma1 = V1 + V5
//   sigma2 = V1 V5 - V2 V4 + V3 V7 + V6 V8
//   sigma3 = V1 V6 V8 + V2 V6 V7 + V3 V4 V8 + V3 V5 V7,
// which agree with -tr J, the principal-minor sum and -det J because the third
// diagonal Jacobian entry vanishes at such a point.
inline RouthHurwitzReport routh_hurwitz(const ModelParams& p, const State& e4) {
    if (!e4.allFinite() || !(e4.minCoeff() > 0.0))
        throw std::domain_error("routh_hurwitz requires a strictly positive point");

    const double x = e4[0], y = e4[1], z = e4[2];
    const double u = x + p.c * y;
    const double v = y + p.c * x;

    RouthHurwitzReport r;
    r.V[0] = p.a11 * x + p.a13 * p.c * x * y * z / (u * u);
    r.V[1] = -p.a12 * x + p.a13 * p.c * x * x * z / (u * u);
    r.V[2] = p.a13 * x * x / u;
    r.V[3] = p.a21 * y + p.a23 * p.c * y * y * z / (v * v);
    r.V[4] = p.a23 * p.c * x * y * z / (v * v);
    r.V[5] = p.a23 * y * y / v;
    r.V[6] = (p.a31 * x * x * z + 2.0 * p.a31 * p.c * x * y * z) / (u * u) -
             p.a32 * p.c * y * y * z / (v * v);
    r.V[7] = -p.a31 * p.c * x * x * z / (u * u) +
             (p.a32 * y * y * z + 2.0 * p.a32 * p.c * x * y * z) / (v * v);

    const double V1 = r.V[0], V2 = r.V[1], V3 = r.V[2], V4 = r.V[3];
    const double V5 = r.V[4], V6 = r.V[5], V7 = r.V[6], V8 = r.V[7];
    r.sigma1 = V1 + V5;
    r.sigma2 = V1 * V5 - V2 * V4 + V3 * V7 + V6 * V8;
    r.sigma3 = V1 * V6 * V8 + V2 * V6 * V7 + V3 * V4 * V8 + V3 * V5 * V7;
    r.hurwitz = r.sigma1 > 0.0 && r.sigma3 > 0.0 && r.sigma1 * r.sigma2 > r.sigma3;
    return r;
}

// Spectrum of the full Jacobian at a state, ascending real part.
inline Eigen::Vector3cd equilibrium_spectrum(const ModelParams& p, const State& s) {
    return detail::sorted_eigenvalues(jacobian(s, p));
}

}  // namespace igp
