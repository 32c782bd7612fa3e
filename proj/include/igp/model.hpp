#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace igp {

// Population state: x = bottom prey, y = intermediate predator, z = top predator.
using State = Eigen::Vector3d;

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;

// Rate constants of the three-species model with predator switching.
// All nonnegative; a11 > 0 so the prey carrying capacity b1/a11 is finite.
// Defaults are the reference parameter set used throughout the tests.
struct ModelParams {
    double b1 = 5.0;    // prey intrinsic growth
    double b2 = 1.0;    // intermediate predator mortality
    double b3 = 1.25;   // top predator mortality
    double c = 1.0;     // switching intensity (0 = plain omnivory, 1 = full switching)
    double a11 = 0.4;   // prey self-limitation
    double a12 = 1.0;   // intermediate predation on prey
    double a13 = 1.5;   // top predation on prey
    double a21 = 1.0;   // intermediate assimilation from prey
    double a23 = 1.0;   // top predation on intermediate predator
    double a31 = 0.1;   // top assimilation from prey
    double a32 = 1.0;   // top assimilation from intermediate predator

    void validate() const {
        const struct { const char* name; double v; } fields[] = {
            {"b1", b1},   {"b2", b2},   {"b3", b3},   {"c", c},
            {"a11", a11}, {"a12", a12}, {"a13", a13}, {"a21", a21},
            {"a23", a23}, {"a31", a31}, {"a32", a32},
        };
        for (const auto& f : fields)
            if (!std::isfinite(f.v) || f.v < 0.0)
                throw std::invalid_argument(std::string("model parameter ") + f.name +
                                            " must be finite and nonnegative");
        if (!(a11 > 0.0))
            throw std::invalid_argument("model parameter a11 must be positive");
    }
};

// Member-pointer lookup for sweepable parameters.
inline double ModelParams::* param_field(const std::string& name) {
    const struct { const char* name; double ModelParams::* ptr; } table[] = {
        {"b1", &ModelParams::b1},   {"b2", &ModelParams::b2},
        {"b3", &ModelParams::b3},   {"c", &ModelParams::c},
        {"a11", &ModelParams::a11}, {"a12", &ModelParams::a12},
        {"a13", &ModelParams::a13}, {"a21", &ModelParams::a21},
        {"a23", &ModelParams::a23}, {"a31", &ModelParams::a31},
        {"a32", &ModelParams::a32},
    };
    for (const auto& e : table)
        if (name == e.name) return e.ptr;
    throw std::invalid_argument("unknown model parameter '" + name + "'");
}

namespace detail {

// Switched attack factors S1 = x^2/(x + c y), S2 = y^2/(y + c x) and their
// partials. Continuous on the closed orthant away from the line x = y = 0,
// which is patched to zero. c = 0 reduces exactly to S1 = x, S2 = y.
template <typename Scalar>
struct Switching {
    Scalar S1, dS1x, dS1y;
    Scalar S2, dS2x, dS2y;

    Switching(Scalar x, Scalar y, double c) {
        const Scalar zero(0), one(1);
        if (c == 0.0) {
            S1 = x; dS1x = one; dS1y = zero;
            S2 = y; dS2y = one; dS2x = zero;
            return;
        }
        if (x == zero) {
            S1 = zero; dS1x = zero; dS1y = zero;
        } else {
            const Scalar u = x + c * y;
            S1 = x * x / u;
            dS1x = x * (x + 2.0 * c * y) / (u * u);
            dS1y = -c * x * x / (u * u);
        }
        if (y == zero) {
            S2 = zero; dS2x = zero; dS2y = zero;
        } else {
            const Scalar v = y + c * x;
            S2 = y * y / v;
            dS2y = y * (y + 2.0 * c * x) / (v * v);
            dS2x = -c * y * y / (v * v);
        }
    }
};

// Unvalidated evaluation, usable on Runge-Kutta stage vectors that may stray
// slightly outside the orthant.
template <typename Derived>
Vec3<typename Derived::Scalar> vector_field_raw(const Eigen::MatrixBase<Derived>& s,
                                                const ModelParams& p) {
    using Scalar = typename Derived::Scalar;
    const Scalar x = s[0], y = s[1], z = s[2];
    Scalar S1, S2;
    if (p.c == 0.0) {
        S1 = x;
        S2 = y;
    } else {
        S1 = (x == Scalar(0)) ? Scalar(0) : x * x / (x + p.c * y);
        S2 = (y == Scalar(0)) ? Scalar(0) : y * y / (y + p.c * x);
    }
    Vec3<Scalar> d;
    d[0] = (p.b1 - p.a11 * x) * x - p.a12 * x * y - p.a13 * S1 * z;
    d[1] = -p.b2 * y + p.a21 * x * y - p.a23 * S2 * z;
    d[2] = (-p.b3 + p.a31 * S1 + p.a32 * S2) * z;
    return d;
}

template <typename Derived>
Mat3<typename Derived::Scalar> jacobian_raw(const Eigen::MatrixBase<Derived>& s,
                                            const ModelParams& p) {
    using Scalar = typename Derived::Scalar;
    const Scalar x = s[0], y = s[1], z = s[2];
    const Switching<Scalar> sw(x, y, p.c);
    Mat3<Scalar> J;
    J(0, 0) = p.b1 - 2.0 * p.a11 * x - p.a12 * y - p.a13 * z * sw.dS1x;
    J(0, 1) = -p.a12 * x - p.a13 * z * sw.dS1y;
    J(0, 2) = -p.a13 * sw.S1;
    J(1, 0) = p.a21 * y - p.a23 * z * sw.dS2x;
    J(1, 1) = -p.b2 + p.a21 * x - p.a23 * z * sw.dS2y;
    J(1, 2) = -p.a23 * sw.S2;
    J(2, 0) = z * (p.a31 * sw.dS1x + p.a32 * sw.dS2x);
    J(2, 1) = z * (p.a31 * sw.dS1y + p.a32 * sw.dS2y);
    J(2, 2) = -p.b3 + p.a31 * sw.S1 + p.a32 * sw.S2;
    return J;
}

template <typename Derived>
void validate_state(const Eigen::MatrixBase<Derived>& s) {
    using Scalar = typename Derived::Scalar;
    using std::isfinite;
    for (int i = 0; i < 3; ++i) {
        const Scalar v = s[i];
        if (!isfinite(v) || v < Scalar(0))
            throw std::domain_error("state must be finite and nonnegative");
    }
}

}  // namespace detail

// Right-hand side of the switched system,
//   dx = (b1 - a11 x) x - a12 x y - a13 x^2 z / (x + c y)
//   dy = -b2 y + a21 x y - a23 y^2 z / (y + c x)
//   dz = -b3 z + a31 x^2 z / (x + c y) + a32 y^2 z / (y + c x),
// written with the singularity-free factors x^2/(x+cy), y^2/(y+cx). The only
// remaining singular configuration, the line x = y = 0, is patched to the
// pointwise limit (0, 0, -b3 z).
template <typename Derived>
Vec3<typename Derived::Scalar> vector_field(const Eigen::MatrixBase<Derived>& s,
                                            const ModelParams& p) {
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
    detail::validate_state(s);
    return detail::vector_field_raw(s, p);
}

// Analytic Jacobian of vector_field. Defined everywhere on the closed orthant
// except the line x = y = 0, where the switching factors are not differentiable.
template <typename Derived>
Mat3<typename Derived::Scalar> jacobian(const Eigen::MatrixBase<Derived>& s,
                                        const ModelParams& p) {
    EIGEN_STATIC_ASSERT_VECTOR_SPECIFIC_SIZE(Derived, 3);
    detail::validate_state(s);
    if (s[0] == typename Derived::Scalar(0) && s[1] == typename Derived::Scalar(0))
        throw std::domain_error("jacobian undefined on the line x = y = 0");
    return detail::jacobian_raw(s, p);
}

}  // namespace igp
