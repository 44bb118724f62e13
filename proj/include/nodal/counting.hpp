// Counting functions F with F(-inf) = -1, F(+inf) = +1 and the bounded
// rewriting of the 1d zero-count integrand -(1/2) F'(f'/f) (f'/f)'.
//
// Every admissible F counts the same zeros; the three tags differ only in
// how the integrand behaves numerically. The arctan form stays analytic,
// the sqrt form is the |f|/eta^3 density, the uniform-CDF form carries an
// indicator and converges only first-order under grid refinement.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jets.hpp"

namespace nodal {

enum class CountingFunction { sqrt_ratio, arctan, uniform_cdf };

inline const char* counting_name(CountingFunction f) {
    switch (f) {
        case CountingFunction::sqrt_ratio: return "sqrt";
        case CountingFunction::arctan: return "arctan";
        default: return "uniform_cdf";
    }
}

inline CountingFunction counting_from_name(const std::string& s) {
    if (s == "sqrt") return CountingFunction::sqrt_ratio;
    if (s == "arctan") return CountingFunction::arctan;
    if (s == "uniform_cdf") return CountingFunction::uniform_cdf;
    throw std::invalid_argument("unknown counting function: " + s);
}

// F evaluated at u as a plain function (limits -1/+1 at -inf/+inf).
inline double counting_F_of(CountingFunction tag, double u) {
    switch (tag) {
        case CountingFunction::sqrt_ratio: return u / std::sqrt(1.0 + u * u);
        case CountingFunction::arctan: return (2.0 / M_PI) * std::atan(u);
        default: return std::clamp(u, -1.0, 1.0);
    }
}

// F'(u)
inline double counting_dF_of(CountingFunction tag, double u) {
    switch (tag) {
        case CountingFunction::sqrt_ratio: {
            const double s = 1.0 + u * u;
            return 1.0 / (s * std::sqrt(s));
        }
        case CountingFunction::arctan: return (2.0 / M_PI) / (1.0 + u * u);
        default: return std::fabs(u) <= 1.0 ? 1.0 : 0.0;
    }
}

// F(f'/f) from the jet, written to stay stable as f -> 0 where possible.
// Used for interval boundary terms, where f != 0 is a precondition.
inline double counting_F(CountingFunction tag, const Jet<1>& J) {
    const double f = J.f, fp = J.grad[0];
    switch (tag) {
        case CountingFunction::sqrt_ratio:
            return sign0(f) * fp / std::sqrt(f * f + fp * fp);
        case CountingFunction::arctan:
            return (2.0 / M_PI) * std::atan(fp / f);
        default:
            return std::clamp(fp / f, -1.0, 1.0);
    }
}

// -(1/2) F'(f'/f) (f'/f)' rewritten per tag so the integrand stays bounded
// wherever eta > 0. Returns NaN only at an exact (f, f') = (0, 0) sample,
// which interval quadrature treats as a removable point.
inline double counting_integrand(CountingFunction tag, const Jet<1>& J) {
    const double f = J.f, fp = J.grad[0], fpp = J.hess[0];
    const double q = f * f + fp * fp;
    switch (tag) {
        case CountingFunction::sqrt_ratio:
            return -0.5 * (fpp * f - fp * fp) * std::fabs(f) / (q * std::sqrt(q));
        case CountingFunction::arctan:
            return (fp * fp - f * fpp) / (M_PI * q);
        default:
            if (std::fabs(fp) > std::fabs(f)) return 0.0;
            return 0.5 * (fp * fp - f * fpp) / (f * f);
    }
}

}  // namespace nodal
