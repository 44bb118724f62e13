// Uniform-grid integration on the torus [0,2pi)^d and on boxes, with
// grid-doubling refinement and an |I_2m - I_m| error estimate.
//
// On the torus the equispaced Riemann sum coincides with the trapezoid rule,
// so smooth periodic integrands converge spectrally; the piecewise-smooth
// integrands produced by the nodal-set formulas rely on the doubling loop.
// Accumulation is pairwise in node order, which makes every result
// independent of how callers parallelize around these routines.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace nodal::quad {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Options {
    int m_start = 0;    // 0 -> dimension default
    int m_max = 0;      // 0 -> dimension default
    double tol = 1e-6;  // stop when |I_2m - I_m| <= tol
};

inline constexpr int default_m_start(int d) { return d == 1 ? 64 : (d == 2 ? 64 : 32); }
inline constexpr int default_m_max(int d) {
    return d == 1 ? (1 << 14) : (d == 2 ? (1 << 11) : (1 << 8));
}

inline bool is_pow2(int m) { return m > 0 && (m & (m - 1)) == 0; }

struct Result {
    double value = 0.0;
    double error_estimate = 0.0;  // |I_2m - I_m| at the final doubling
    double error_total = 0.0;     // sum of the doubling differences (telescoped estimate)
    int m = 0;                    // finest points-per-axis used
    int levels = 0;
    bool tol_reached = false;
};

// Deterministic pairwise sum over a contiguous span.
inline double pairwise_sum(std::span<const double> v) {
    const size_t n = v.size();
    if (n <= 16) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

// Accumulates values in fixed-size slabs; combines slab sums pairwise at the
// end, so the grand total does not depend on how values were batched.
class SlabSum {
public:
    explicit SlabSum(size_t slab_capacity) : cap_(slab_capacity > 0 ? slab_capacity : 1) {
        buf_.reserve(cap_);
    }

    void push(double x) {
        buf_.push_back(x);
        if (buf_.size() >= cap_) flush();
    }
    void push_slab(std::span<const double> slab) { slabs_.push_back(pairwise_sum(slab)); }

    double total() {
        flush();
        return pairwise_sum(slabs_);
    }

private:
    void flush() {
        if (!buf_.empty()) {
            slabs_.push_back(pairwise_sum(buf_));
            buf_.clear();
        }
    }
    size_t cap_;
    std::vector<double> buf_;
    std::vector<double> slabs_;
};

// Runs eval(m) over doubling m until the difference of consecutive values
// drops below tol. When m_start == m_max, the estimate comes from m/2.
template <class Eval>
Result refine(Eval&& eval, int d, Options opt) {
    int m0 = opt.m_start > 0 ? opt.m_start : default_m_start(d);
    int m1 = opt.m_max > 0 ? opt.m_max : default_m_max(d);
    if (!is_pow2(m0) || !is_pow2(m1)) throw std::invalid_argument("quad: m must be a power of two");
    if (m0 < 8 || m1 < m0) throw std::invalid_argument("quad: need 8 <= m_start <= m_max");
    if (opt.tol <= 0.0) throw std::invalid_argument("quad: tol must be positive");

    Result r;
    if (m0 == m1) {
        const double coarse = eval(m0 / 2);
        r.value = eval(m0);
        r.error_estimate = std::fabs(r.value - coarse);
        r.error_total = r.error_estimate;
        r.m = m0;
        r.levels = 2;
        r.tol_reached = r.error_estimate <= opt.tol;
        return r;
    }
    double prev = eval(m0);
    int m = m0;
    r.levels = 1;
    while (m < m1) {
        m *= 2;
        const double cur = eval(m);
        ++r.levels;
        r.error_estimate = std::fabs(cur - prev);
        r.error_total += r.error_estimate;
        r.value = cur;
        r.m = m;
        if (r.error_estimate <= opt.tol) {
            r.tol_reached = true;
            return r;
        }
        prev = cur;
    }
    r.tol_reached = false;
    return r;
}

namespace detail {

// Equispaced nodes with a half-cell offset; by periodicity this is the same
// trapezoid-exact uniform sum, and it keeps nodes off the zero sets of the
// lattice-aligned analytic test fields.
template <int D, class G>
double torus_sum(G&& g, int m) {
    const double h = kTwoPi / m;
    std::array<double, D> x{};
    SlabSum acc{size_t(m)};
    std::vector<double> row(D >= 2 ? m : 0);
    if constexpr (D == 1) {
        std::vector<double> vals(m);
        for (int i = 0; i < m; ++i) vals[i] = g(std::array<double, 1>{(i + 0.5) * h});
        return pairwise_sum(vals) * h;
    } else if constexpr (D == 2) {
        for (int i = 0; i < m; ++i) {
            x[0] = (i + 0.5) * h;
            for (int j = 0; j < m; ++j) {
                x[1] = (j + 0.5) * h;
                row[j] = g(x);
            }
            acc.push_slab(row);
        }
        return acc.total() * h * h;
    } else {
        for (int i = 0; i < m; ++i) {
            x[0] = (i + 0.5) * h;
            for (int j = 0; j < m; ++j) {
                x[1] = (j + 0.5) * h;
                for (int k = 0; k < m; ++k) {
                    x[2] = (k + 0.5) * h;
                    row[k] = g(x);
                }
                acc.push_slab(row);
            }
        }
        return acc.total() * h * h * h;
    }
}

// Composite trapezoid over a box: m cells, m+1 nodes per axis.
template <int D, class G>
double box_sum(G&& g, const std::array<double, D>& a, const std::array<double, D>& b, int m) {
    std::array<double, D> h{};
    double cell = 1.0;
    for (int i = 0; i < D; ++i) {
        h[i] = (b[i] - a[i]) / m;
        cell *= h[i];
    }
    auto w1 = [m](int i) { return (i == 0 || i == m) ? 0.5 : 1.0; };
    std::array<double, D> x{};
    if constexpr (D == 1) {
        std::vector<double> vals(m + 1);
        for (int i = 0; i <= m; ++i) vals[i] = w1(i) * g(std::array<double, 1>{a[0] + i * h[0]});
        return pairwise_sum(vals) * cell;
    } else if constexpr (D == 2) {
        SlabSum acc(size_t(m + 1));
        std::vector<double> row(m + 1);
        for (int i = 0; i <= m; ++i) {
            x[0] = a[0] + i * h[0];
            for (int j = 0; j <= m; ++j) {
                x[1] = a[1] + j * h[1];
                row[j] = w1(i) * w1(j) * g(x);
            }
            acc.push_slab(row);
        }
        return acc.total() * cell;
    } else {
        SlabSum acc(size_t(m + 1));
        std::vector<double> row(m + 1);
        for (int i = 0; i <= m; ++i) {
            x[0] = a[0] + i * h[0];
            for (int j = 0; j <= m; ++j) {
                x[1] = a[1] + j * h[1];
                for (int k = 0; k <= m; ++k) {
                    x[2] = a[2] + k * h[2];
                    row[k] = w1(i) * w1(j) * w1(k) * g(x);
                }
                acc.push_slab(row);
            }
        }
        return acc.total() * cell;
    }
}

}  // namespace detail

// Integral of g over the torus [0,2pi)^D.
template <int D, class G>
Result integrate_periodic(G&& g, Options opt = {}) {
    return refine([&](int m) { return detail::torus_sum<D>(g, m); }, D, opt);
}

// Integral of g over the box prod [a_i, b_i].
template <int D, class G>
Result integrate_box(G&& g, const std::array<double, D>& a, const std::array<double, D>& b,
                     Options opt = {}) {
    for (int i = 0; i < D; ++i)
        if (!(a[i] < b[i])) throw std::invalid_argument("quad: box needs a_i < b_i");
    return refine([&](int m) { return detail::box_sum<D>(g, a, b, m); }, D, opt);
}

}  // namespace nodal::quad
