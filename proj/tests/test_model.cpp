#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "igp/model.hpp"

using namespace igp;

namespace {

ModelParams reference() { return {}; }

// central finite difference of the vector field
Mat3<double> jacobian_fd(const State& s, const ModelParams& p, double h = 1e-7) {
    Mat3<double> J;
    for (int j = 0; j < 3; ++j) {
        State lo = s, hi = s;
        const double dh = h * std::max(1.0, std::abs(s[j]));
        hi[j] += dh;
        lo[j] -= dh;
        J.col(j) = (detail::vector_field_raw(hi, p) - detail::vector_field_raw(lo, p)) / (2 * dh);
    }
    return J;
}

}  // namespace

TEST_CASE("vector field matches hand-computed values at the reference parameters") {
    const ModelParams p = reference();

    Vec3<double> d = vector_field(State(1, 1, 1), p);
    CHECK(d[0] == doctest::Approx(2.85).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(-0.7).epsilon(1e-14));

    d = vector_field(State(2, 3, 0.5), p);
    CHECK(d[0] == doctest::Approx(1.8).epsilon(1e-14));
    CHECK(d[1] == doctest::Approx(2.1).epsilon(1e-14));
    CHECK(d[2] == doctest::Approx(0.315).epsilon(1e-14));

    ModelParams q = p;
    q.c = 0.7;
    d = vector_field(State(1.2, 0.4, 2.5), q);
    CHECK(d[0] == doctest::Approx(1.2953513513513504).epsilon(1e-13));
    CHECK(d[1] == doctest::Approx(-0.24258064516129041).epsilon(1e-13));
    CHECK(d[2] == doctest::Approx(-2.5591761115954665).epsilon(1e-13));
}

TEST_CASE("coordinate faces are invariant: a zero component has zero derivative") {
    const ModelParams p = reference();

    const Vec3<double> dx0 = vector_field(State(0.0, 0.7, 1.2), p);
    CHECK(dx0[0] == 0.0);
    CHECK(dx0[1] == doctest::Approx(-1.54).epsilon(1e-14));
    CHECK(dx0[2] == doctest::Approx(-0.66).epsilon(1e-14));

    const Vec3<double> dy0 = vector_field(State(0.3, 0.0, 2.0), p);
    CHECK(dy0[1] == 0.0);
    CHECK(dy0[0] == doctest::Approx(0.564).epsilon(1e-14));
    CHECK(dy0[2] == doctest::Approx(-2.44).epsilon(1e-14));

    const Vec3<double> dz0 = vector_field(State(0.5, 0.5, 0.0), p);
    CHECK(dz0[2] == 0.0);
}

TEST_CASE("the line x = y = 0 is patched to (0, 0, -b3 z)") {
    const ModelParams p = reference();
    const Vec3<double> d = vector_field(State(0.0, 0.0, 2.0), p);
    CHECK(d[0] == 0.0);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == -p.b3 * 2.0);
    CHECK_THROWS_AS((void)jacobian(State(0.0, 0.0, 2.0), p), std::domain_error);
}

TEST_CASE("c = 0 reduces exactly to the unswitched food web") {
    ModelParams p = reference();
    p.c = 0.0;
    std::mt19937 rng(7u);
    std::uniform_real_distribution<double> U(0.0, 5.0);
    for (int k = 0; k < 50; ++k) {
        const State s(U(rng), U(rng), U(rng));
        const Vec3<double> d = vector_field(s, p);
        const double x = s[0], y = s[1], z = s[2];
        CHECK(d[0] == (p.b1 - p.a11 * x) * x - p.a12 * x * y - p.a13 * x * z);
        CHECK(d[1] == -p.b2 * y + p.a21 * x * y - p.a23 * y * z);
        CHECK(d[2] == (-p.b3 + p.a31 * x + p.a32 * y) * z);
    }
}

TEST_CASE("analytic Jacobian agrees with central finite differences") {
    std::mt19937 rng(11u);
    std::uniform_real_distribution<double> U(0.05, 4.0);
    std::uniform_real_distribution<double> C(0.0, 1.5);
    for (int k = 0; k < 100; ++k) {
        ModelParams p;
        p.c = C(rng);
        const State s(U(rng), U(rng), U(rng));
        const Mat3<double> J = jacobian(s, p);
        const Mat3<double> Jfd = jacobian_fd(s, p);
        const double scale = 1.0 + Jfd.cwiseAbs().maxCoeff();
        CHECK((J - Jfd).cwiseAbs().maxCoeff() / scale < 1e-5);
    }
}

TEST_CASE("Jacobian stays finite on the open faces where one species is absent") {
    const ModelParams p = reference();
    CHECK(jacobian(State(0.0, 1.0, 1.0), p).allFinite());
    CHECK(jacobian(State(1.0, 0.0, 1.0), p).allFinite());
    const Mat3<double> J = jacobian(State(1.0, 0.0, 1.0), p);
    const Mat3<double> Jfd = jacobian_fd(State(1.0, 1e-8, 1.0), p, 1e-9);
    CHECK((J - Jfd).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("parameter and state validation") {
    ModelParams p;
    p.b2 = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.a11 = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = ModelParams{};
    p.c = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);

    CHECK_THROWS_AS((void)vector_field(State(-0.1, 1.0, 1.0), ModelParams{}), std::domain_error);
    CHECK_THROWS_AS(
        (void)vector_field(State(1.0, std::numeric_limits<double>::infinity(), 1.0), ModelParams{}),
        std::domain_error);
}

TEST_CASE("param_field resolves every sweepable name and rejects unknowns") {
    ModelParams p;
    p.*param_field("a13") = 9.5;
    CHECK(p.a13 == 9.5);
    p.*param_field("c") = 0.25;
    CHECK(p.c == 0.25);
    CHECK_THROWS_AS((void)param_field("a22"), std::invalid_argument);
}
