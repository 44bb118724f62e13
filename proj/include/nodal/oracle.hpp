// Brute-force ground truths: sign-scan + bisection zero counting in 1d and
// the finite-eps band estimator (1/2eps) int 1_{|f|<eps} |grad f|.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fields.hpp"
#include "quadrature.hpp"

namespace nodal {

struct OracleResult {
    double value = 0.0;
    int m = 0;                    // finest grid used
    std::vector<double> history;  // value after each doubling, last == value
    bool capped = false;          // resolution cap reached before settling
};

namespace detail {

// nudge exact zeros to the positive side so each sign change is counted once
inline double nudged(double v) { return v == 0.0 ? 1e-300 : v; }

template <class Field>
double bisect_root(const Field& f, double lo, double hi, double vlo) {
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double vm = nudged(f.value({mid}));
        if ((vm > 0) == (vlo > 0))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

template <class Field>
int count_zeros_at(const Field& f, double a, double b, bool wrap, int m) {
    const double h = (b - a) / m;
    std::vector<double> v(m + 1);
    for (int i = 0; i < m; ++i) v[i] = nudged(f.value({a + i * h}));
    v[m] = wrap ? v[0] : nudged(f.value({b}));
    int count = 0;
    for (int i = 0; i < m; ++i)
        if ((v[i] > 0) != (v[i + 1] > 0)) ++count;
    return count;
}

}  // namespace detail

// Zeros of a 1d field on [a,b] (or on the torus when wrap = true): scan for
// sign changes, refine by bisection, double the scan resolution until the
// count is stable for two consecutive doublings.
template <class Field>
    requires FieldOf<Field, 1>
int count_zeros_bruteforce(const Field& field, double a, double b, bool wrap, int m_start = 256,
                           double eta_threshold = kDefaultEtaThreshold) {
    if (m_start < 64) throw std::invalid_argument("count_zeros_bruteforce: need m >= 64");
    const double eta = wrap ? min_eta_scan<1>(field, std::min(m_start, 1 << 12))
                            : min_eta_scan_interval(field, a, b, std::min(m_start, 1 << 12));
    if (eta <= eta_threshold) throw DegenerateRealization(eta);

    int m = m_start;
    int prev = detail::count_zeros_at(field, a, b, wrap, m);
    int stable = 0;
    for (int level = 0; level < 16 && stable < 2; ++level) {
        m *= 2;
        const int cur = detail::count_zeros_at(field, a, b, wrap, m);
        if (cur == prev)
            ++stable;
        else
            stable = 0;
        prev = cur;
    }
    return prev;
}

// Positions of the zeros, sorted; same scan/bisection machinery.
template <class Field>
    requires FieldOf<Field, 1>
std::vector<double> locate_zeros(const Field& field, double a, double b, int m_start = 1024,
                                 double eta_threshold = kDefaultEtaThreshold) {
    const double eta = min_eta_scan_interval(field, a, b, std::min(m_start, 1 << 12));
    if (eta <= eta_threshold) throw DegenerateRealization(eta);
    int m = m_start;
    int prev = -1, stable = 0;
    for (int level = 0; level < 16; ++level) {
        const int cur = detail::count_zeros_at(field, a, b, false, m);
        if (cur == prev) {
            if (++stable >= 2) break;
        } else
            stable = 0;
        prev = cur;
        m *= 2;
    }
    const double h = (b - a) / m;
    std::vector<double> roots;
    double vl = detail::nudged(field.value({a}));
    for (int i = 0; i < m; ++i) {
        const double x0 = a + i * h, x1 = (i + 1 == m) ? b : a + (i + 1) * h;
        const double vr = detail::nudged(field.value({x1}));
        if ((vl > 0) != (vr > 0)) roots.push_back(detail::bisect_root(field, x0, x1, vl));
        vl = vr;
    }
    return roots;
}

struct EpsEstimate {
    double value = 0.0;
    long band_nodes = 0;   // grid nodes inside {|f| < eps}
    bool undersampled = false;  // fewer than 100 band nodes
};

// (1/2eps) int 1_{|f|<eps} |grad f| over the torus at a fixed grid.
template <int D, class Field>
    requires FieldOf<Field, D>
EpsEstimate kacrice_eps(const Field& field, double eps, int m) {
    if (!(eps > 0.0)) throw std::invalid_argument("kacrice_eps: need eps > 0");
    quad::SlabSum acc(4096);
    long in_band = 0;
    visit_torus_jets<D>(field, m, [&](size_t, const Jet<D>& J) {
        if (std::fabs(J.f) < eps) {
            ++in_band;
            acc.push(std::sqrt(J.grad_norm2()));
        }
    });
    double cell = 1.0;
    for (int a = 0; a < D; ++a) cell *= quad::kTwoPi / m;
    EpsEstimate out;
    out.value = acc.total() * cell / (2.0 * eps);
    out.band_nodes = in_band;
    out.undersampled = in_band < 100;
    return out;
}

}  // namespace nodal
