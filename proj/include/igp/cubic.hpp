#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace igp {

// Decomposition of the monic cubic
//   lambda^3 + sigma1 lambda^2 + sigma2 lambda + sigma3
// through the reduced coefficients 3A1 = sigma1, 3A2 = sigma2, A3 = sigma3 and
// the depressed form rho^3 + 3H rho + G = 0 reached by lambda = rho - A1.
struct CubicAnalysis {
    double A1 = 0, A2 = 0, A3 = 0;
    double H = 0;      // A2 - A1^2
    double G = 0;      // A3 - 3 A1 A2 + 2 A1^3
    double Delta = 0;  // G^2 + 4 H^3
    std::complex<double> R;  // cube root of (-G + sqrt(Delta))/2, principal branch
    double HoverR = 0;       // H/R on the real branch, 0 when H = 0
    // Real root (smallest imaginary magnitude) first, then the conjugate pair
    // with positive imaginary part leading; ascending real parts when all real.
    std::array<std::complex<double>, 3> roots{};
    bool one_real = false;    // exactly one real root (Delta > 0)
    bool degenerate = false;  // |Delta| under the repeated-root cutoff
};

// Sil'nikov saddle-focus conditions at a spectrum {gamma, alpha +/- i beta}:
// (i) beta != 0, (ii) gamma*alpha < 0, (iii) |gamma| > |alpha| >= 0, evaluated
// both on the roots and through the R/H expression translation.
struct SilnikovVerdict {
    bool applicable = false;  // cubic has exactly one real root
    bool marginal = false;    // near-degenerate cubic, forced non-chaotic
    double gamma = 0, alpha = 0, beta = 0;  // beta >= 0
    bool beta_nonzero = false;
    bool gamma_alpha_opposite = false;
    bool gamma_dominates = false;
    // expression form (valid when Delta > 0)
    double delta_value = 0;
    double r_plus_hr = 0;        // R + H/R; beta = (sqrt(3)/2)(R + H/R)
    double magnitude_gap = 0;    // |R - H/R - A1| - |R - H/R + 2 A1| / 2
    double sign_branch = 0;      // R - H/R + 2 A1 = -2 alpha; chaos needs sign opposite to A3
    bool delta_pos = false;
    bool r_plus_hr_nonzero = false;
    bool magnitude_gap_pos = false;
    bool sign_branch_ok = false;
    bool expression_chaotic = false;
    bool forms_agree = false;
    bool chaotic = false;  // root-form conditions (i)-(iii) all hold
};

namespace detail {

inline std::complex<double> eval_cubic(const CubicAnalysis& a, std::complex<double> r) {
    return ((r + 3.0 * a.A1) * r + 3.0 * a.A2) * r + a.A3;
}

inline void verify_roots(const CubicAnalysis& a) {
    for (const auto& r : a.roots) {
        const double m = std::abs(r);
        if (std::abs(eval_cubic(a, r)) > 1e-8 * (1.0 + m * m * m))
            throw std::runtime_error("cubic root failed residual verification");
    }
}

}  // namespace detail

inline CubicAnalysis cardano_roots(double sigma1, double sigma2, double sigma3) {
    if (!std::isfinite(sigma1) || !std::isfinite(sigma2) || !std::isfinite(sigma3))
        throw std::invalid_argument("cubic coefficients must be finite");

    CubicAnalysis a;
    a.A1 = sigma1 / 3.0;
    a.A2 = sigma2 / 3.0;
    a.A3 = sigma3;
    a.H = a.A2 - a.A1 * a.A1;
    a.G = a.A3 - 3.0 * a.A1 * a.A2 + 2.0 * a.A1 * a.A1 * a.A1;
    a.Delta = a.G * a.G + 4.0 * a.H * a.H * a.H;

    const double cut = 1e-12 * std::max(a.G * a.G, std::abs(4.0 * a.H * a.H * a.H));
    if (std::abs(a.Delta) <= cut) {
        // Repeated roots. H = G = 0 is the triple root -A1; otherwise the
        // depressed roots are 2R, -R, -R with R the real cube root of -G/2.
        a.degenerate = true;
        if (a.G == 0.0 && a.H == 0.0) {
            a.R = 0.0;
            a.roots = {std::complex<double>(-a.A1), std::complex<double>(-a.A1),
                       std::complex<double>(-a.A1)};
        } else {
            const double r = std::cbrt(-a.G / 2.0);
            a.R = r;
            a.HoverR = (r == 0.0) ? 0.0 : a.H / r;
            a.roots = {std::complex<double>(2.0 * r - a.A1), std::complex<double>(-r - a.A1),
                       std::complex<double>(-r - a.A1)};
        }
        detail::verify_roots(a);
        return a;
    }

    if (a.Delta > 0.0) {
        // One real root, one conjugate pair. Pick the cube-root argument that
        // avoids cancellation between -G and sqrt(Delta):
        //   (-G + sqrt(Delta))/2 = 2 H^3 / (sqrt(Delta) + G).
        const double sq = std::sqrt(a.Delta);
        double r;
        if (a.H == 0.0) {
            r = std::cbrt(-a.G);  // depressed cubic is rho^3 = -G
            a.HoverR = 0.0;
        } else if (a.G > 0.0) {
            r = std::cbrt(2.0 * a.H * a.H * a.H / (sq + a.G));
            a.HoverR = a.H / r;
        } else {
            r = std::cbrt((-a.G + sq) / 2.0);
            a.HoverR = a.H / r;
        }
        a.R = r;
        const double rho1 = r - a.HoverR;
        const double alpha = -rho1 / 2.0 - a.A1;
        const double beta = std::abs(std::sqrt(3.0) / 2.0 * (r + a.HoverR));
        a.roots = {std::complex<double>(rho1 - a.A1), {alpha, beta}, {alpha, -beta}};
        a.one_real = true;
        detail::verify_roots(a);
        return a;
    }

    // Delta < 0: three distinct real roots; trigonometric evaluation of the
    // principal complex cube root, rho_k = 2 sqrt(-H) cos((theta + 2 pi k)/3).
    const double m = std::sqrt(-a.H);
    const double theta = std::atan2(std::sqrt(-a.Delta) / 2.0, -a.G / 2.0);
    a.R = std::polar(m, theta / 3.0);
    std::array<double, 3> rho;
    for (int k = 0; k < 3; ++k)
        rho[k] = 2.0 * m * std::cos((theta + 2.0 * M_PI * k) / 3.0);
    std::sort(rho.begin(), rho.end());
    for (int k = 0; k < 3; ++k) a.roots[k] = rho[k] - a.A1;
    detail::verify_roots(a);
    return a;
}

inline SilnikovVerdict silnikov_check(const CubicAnalysis& a) {
    SilnikovVerdict v;
    v.delta_value = a.Delta;
    v.delta_pos = a.Delta > 0.0;
    if (a.degenerate) {
        v.marginal = true;
        return v;  // boundary spectrum, no open-condition certificate
    }
    if (!a.one_real) return v;  // three real roots: conditions inapplicable

    v.applicable = true;
    v.gamma = a.roots[0].real();
    v.alpha = a.roots[1].real();
    v.beta = a.roots[1].imag();
    v.beta_nonzero = v.beta != 0.0;
    v.gamma_alpha_opposite = v.gamma * v.alpha < 0.0;
    v.gamma_dominates = std::abs(v.gamma) > std::abs(v.alpha);
    v.chaotic = v.beta_nonzero && v.gamma_alpha_opposite && v.gamma_dominates;

    const double r = a.R.real();
    v.r_plus_hr = r + a.HoverR;
    v.magnitude_gap =
        std::abs(r - a.HoverR - a.A1) - std::abs(r - a.HoverR + 2.0 * a.A1) / 2.0;
    v.sign_branch = r - a.HoverR + 2.0 * a.A1;
    v.r_plus_hr_nonzero = v.r_plus_hr != 0.0;
    v.magnitude_gap_pos = v.magnitude_gap > 0.0;
    v.sign_branch_ok = v.sign_branch * a.A3 < 0.0;
    v.expression_chaotic =
        v.delta_pos && v.r_plus_hr_nonzero && v.magnitude_gap_pos && v.sign_branch_ok;

    // A focus pair on the imaginary axis (alpha = 0, where sign_branch = -2
    // alpha vanishes with it) puts both strict-inequality routes exactly on
    // their boundary; within rounding of it the sign is noise, not signal.
    const double spectrum_scale =
        std::max({std::abs(v.gamma), std::abs(v.alpha), std::abs(v.beta)});
    if (std::abs(v.alpha) <= 1e-12 * spectrum_scale) {
        v.marginal = true;
        v.chaotic = false;
        v.expression_chaotic = false;
    }
    v.forms_agree = v.expression_chaotic == v.chaotic;
    return v;
}

}  // namespace igp
