// Random trigonometric fields on the d-torus (period 2pi per coordinate).
//
// A field is a finite combination of separable modes
//     prod_a b_{t_a}(x_a),   b_0 = 1, b_{2k-1} = cos(k x), b_{2k} = sin(k x),
// stored as a dense coefficient tensor over the per-axis basis index
// t in [0, 2n+1). Derivatives of any order are exact. The sampled family
// puts lambda*a_0 on the constant mode and weighted independent Gaussians on
// the all-cosine modes with frequencies 1..n per axis.
//
// Grid evaluation factorizes axis by axis, so jets on an m^d grid cost
// O(B m^d) per component instead of O(B^d m^d), B = 2n+1.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jets.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace nodal {

template <int D>
struct RectGrid {
    std::array<std::vector<double>, D> coords;

    size_t size() const {
        size_t s = 1;
        for (const auto& c : coords) s *= c.size();
        return s;
    }
    // midpoint-offset nodes: no node can sit exactly on the zero set of the
    // lattice-aligned test fields (cos kx vanishes halfway between nodes)
    static RectGrid torus(int m) {
        RectGrid g;
        const double h = quad::kTwoPi / m;
        for (auto& c : g.coords) {
            c.resize(m);
            for (int i = 0; i < m; ++i) c[i] = (i + 0.5) * h;
        }
        return g;
    }
    // m cells => m+1 nodes per axis, endpoints included
    static RectGrid box(const std::array<double, D>& a, const std::array<double, D>& b, int m) {
        RectGrid g;
        for (int ax = 0; ax < D; ++ax) {
            g.coords[ax].resize(m + 1);
            const double h = (b[ax] - a[ax]) / m;
            for (int i = 0; i <= m; ++i) g.coords[ax][i] = a[ax] + i * h;
        }
        return g;
    }
};

namespace detail {

// Multi-orders of differentiation in the packing order of Jet / Jet3.
template <int D>
struct JetOrders;

template <>
struct JetOrders<1> {
    static constexpr int n2 = 3, n3 = 4;
    static constexpr int ord[4][1] = {{0}, {1}, {2}, {3}};
};
template <>
struct JetOrders<2> {
    static constexpr int n2 = 6, n3 = 10;
    static constexpr int ord[10][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1},
                                       {0, 2}, {3, 0}, {2, 1}, {1, 2}, {0, 3}};
};
template <>
struct JetOrders<3> {
    static constexpr int n2 = 10, n3 = 20;
    static constexpr int ord[20][3] = {
        {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {2, 0, 0}, {1, 1, 0}, {1, 0, 1},
        {0, 2, 0}, {0, 1, 1}, {0, 0, 2}, {3, 0, 0}, {2, 1, 0}, {2, 0, 1}, {1, 2, 0},
        {1, 1, 1}, {1, 0, 2}, {0, 3, 0}, {0, 2, 1}, {0, 1, 2}, {0, 0, 3}};
};

// d^o of the axis basis function t at x; exact sign/power bookkeeping.
inline double basis_deriv(int t, int order, double c, double s, int k) {
    if (t == 0) return order == 0 ? 1.0 : 0.0;
    double p = 1.0;
    for (int i = 0; i < order; ++i) p *= k;
    const bool is_cos = (t % 2 == 1);
    const int phase = order % 4;
    if (is_cos) {
        switch (phase) {
            case 0: return p * c;
            case 1: return -p * s;
            case 2: return -p * c;
            default: return p * s;
        }
    }
    switch (phase) {
        case 0: return p * s;
        case 1: return p * c;
        case 2: return -p * s;
        default: return -p * c;
    }
}

}  // namespace detail

template <int D>
class TrigField {
    static_assert(D >= 1 && D <= 3);

public:
    static constexpr int dim = D;
    using Point = std::array<double, D>;
    using WeightRule = std::function<double(const std::array<int, D>&)>;

    explicit TrigField(int n) : n_(n), B_(2 * n + 1) {
        if (n < 1) throw std::invalid_argument("TrigField: need n >= 1");
        size_t sz = 1;
        for (int a = 0; a < D; ++a) sz *= B_;
        coef_.assign(sz, 0.0);
    }

    // The sampled family: lambda*a_0 + sum_k w(k) G_k prod_a cos(k_a x_a),
    // k in {1..n}^d, G i.i.d. standard Gaussian. Default weight 1/sqrt(n^d).
    static TrigField sample(int n, double lambda, RandomStream& rng, WeightRule weights = {}) {
        if (lambda < 0.0) throw std::invalid_argument("TrigField: need lambda >= 0");
        TrigField f(n);
        double def = 1.0;
        for (int a = 0; a < D; ++a) def /= std::sqrt(double(n));
        f.coef_[0] = lambda * rng.normal();  // lambda * a_0 on the constant mode
        std::array<int, D> k{};
        for (int a = 0; a < D; ++a) k[a] = 1;
        for (;;) {
            const double w = weights ? weights(k) : def;
            std::array<int, D> t{};
            for (int a = 0; a < D; ++a) t[a] = 2 * k[a] - 1;
            f.coef_[f.flat(t)] = w * rng.normal();
            int a = D - 1;
            while (a >= 0 && ++k[a] > n) k[a--] = 1;
            if (a < 0) break;
        }
        return f;
    }

    // Single separable mode prod_a b(x_a): freq 0 means the constant factor,
    // otherwise cos(k x) or, when use_sin[a], sin(k x).
    static TrigField mode(int n, const std::array<int, D>& freq,
                          const std::array<bool, D>& use_sin = {}, double amplitude = 1.0) {
        TrigField f(n);
        std::array<int, D> t{};
        for (int a = 0; a < D; ++a) {
            if (freq[a] < 0 || freq[a] > n) throw std::invalid_argument("TrigField: bad frequency");
            t[a] = freq[a] == 0 ? 0 : (use_sin[a] ? 2 * freq[a] : 2 * freq[a] - 1);
        }
        f.coef_[f.flat(t)] = amplitude;
        return f;
    }

    int max_frequency() const { return n_; }
    int basis_size() const { return B_; }
    std::span<const double> coefficients() const { return coef_; }

    bool same_structure(const TrigField& o) const { return n_ == o.n_; }

    void set_coefficient(const std::array<int, D>& t, double v) { coef_[flat(t)] = v; }
    double coefficient(const std::array<int, D>& t) const { return coef_[flat(t)]; }
    double constant_coefficient() const { return coef_[0]; }

    TrigField& scale(double s) {
        for (double& c : coef_) c *= s;
        return *this;
    }

    // The field x -> f(x + s); per axis the (cos k, sin k) coefficient pairs
    // rotate by angle k s.
    TrigField translated(const Point& s) const {
        TrigField out = *this;
        for (int ax = 0; ax < D; ++ax) {
            if (s[ax] == 0.0) continue;
            size_t stride = 1;
            for (int a = ax + 1; a < D; ++a) stride *= B_;
            const size_t outer = out.coef_.size() / (stride * B_);
            for (size_t o = 0; o < outer; ++o)
                for (size_t inner = 0; inner < stride; ++inner) {
                    const size_t base = o * stride * B_ + inner;
                    for (int k = 1; k <= n_; ++k) {
                        double& A = out.coef_[base + size_t(2 * k - 1) * stride];
                        double& Bc = out.coef_[base + size_t(2 * k) * stride];
                        const double c = std::cos(k * s[ax]), sn = std::sin(k * s[ax]);
                        const double A2 = A * c + Bc * sn;
                        const double B2 = -A * sn + Bc * c;
                        A = A2;
                        Bc = B2;
                    }
                }
        }
        return out;
    }
    // this + s * other (same structure required)
    TrigField combined(double s, const TrigField& other) const {
        if (!same_structure(other)) throw std::invalid_argument("TrigField: structure mismatch");
        TrigField out = *this;
        for (size_t i = 0; i < coef_.size(); ++i) out.coef_[i] += s * other.coef_[i];
        return out;
    }

    double value(const Point& x) const {
        AxisVals av(*this, x, 0);
        return accumulate(av, 0, 0);
    }

    Jet<D> jet(const Point& x) const {
        AxisVals av(*this, x, 2);
        Jet<D> J;
        constexpr auto& ord = detail::JetOrders<D>::ord;
        J.f = accumulate_ord(av, ord[0]);
        for (int a = 0; a < D; ++a) J.grad[a] = accumulate_ord(av, ord[1 + a]);
        for (int s = 0; s < sym_count(D); ++s) J.hess[s] = accumulate_ord(av, ord[1 + D + s]);
        return J;
    }

    Jet3<D> jet3(const Point& x) const {
        AxisVals av(*this, x, 3);
        Jet3<D> J;
        constexpr auto& ord = detail::JetOrders<D>::ord;
        J.f = accumulate_ord(av, ord[0]);
        for (int a = 0; a < D; ++a) J.grad[a] = accumulate_ord(av, ord[1 + a]);
        for (int s = 0; s < sym_count(D); ++s) J.hess[s] = accumulate_ord(av, ord[1 + D + s]);
        for (int s = 0; s < tri_count(D); ++s)
            J.third[s] = accumulate_ord(av, ord[detail::JetOrders<D>::n2 + s]);
        return J;
    }

    // emit(flat_index, Jet) over the m^D torus grid, row-major node order.
    template <class F>
    void for_each_grid_jet(int m, F&& emit) const {
        eval_rect<2>(RectGrid<D>::torus(m), std::forward<F>(emit));
    }
    template <class F>
    void for_each_grid_jet3(int m, F&& emit) const {
        eval_rect<3>(RectGrid<D>::torus(m), std::forward<F>(emit));
    }

    std::vector<double> grid_values(int m) const { return rect_values(RectGrid<D>::torus(m)); }

    std::vector<double> rect_values(const RectGrid<D>& g) const {
        std::vector<double> out(g.size());
        eval_rect<0>(g, [&](size_t idx, double v) { out[idx] = v; });
        return out;
    }

    // MAXO = 0: emit(flat, double value)
    // MAXO = 2: emit(flat, const Jet<D>&)
    // MAXO = 3: emit(flat, const Jet3<D>&)
    template <int MAXO, class F>
    void eval_rect(const RectGrid<D>& g, F&& emit) const {
        constexpr int NORD = MAXO == 0 ? 1 : (MAXO == 2 ? detail::JetOrders<D>::n2
                                                        : detail::JetOrders<D>::n3);
        std::array<std::vector<double>, D> tabs;
        for (int a = 0; a < D; ++a) tabs[a] = axis_table(g.coords[a], MAXO);

        if constexpr (D == 1) {
            const auto& xs = g.coords[0];
            const size_t m = xs.size();
            std::array<std::vector<double>, NORD> rows;
            for (int q = 0; q < NORD; ++q) {
                rows[q].assign(m, 0.0);
                const int o = detail::JetOrders<1>::ord[q][0];
                for (int t = 0; t < B_; ++t) {
                    const double c = coef_[t];
                    if (c == 0.0) continue;
                    const double* tb = tabs[0].data() + (size_t(o) * B_ + t) * m;
                    for (size_t i = 0; i < m; ++i) rows[q][i] += c * tb[i];
                }
            }
            for (size_t i = 0; i < m; ++i) emit_node<MAXO>(emit, i, [&](int q) { return rows[q][i]; });
        } else if constexpr (D == 2) {
            const size_t mx = g.coords[0].size(), my = g.coords[1].size();
            constexpr auto& ord = detail::JetOrders<2>::ord;
            // BY[oy][tx][j] = sum_ty coef(tx,ty) * d^oy b_ty(y_j)
            std::array<std::vector<double>, MAXO + 1> BY;
            for (int oy = 0; oy <= MAXO; ++oy) {
                BY[oy].assign(size_t(B_) * my, 0.0);
                for (int tx = 0; tx < B_; ++tx) {
                    double* dst = BY[oy].data() + size_t(tx) * my;
                    for (int ty = 0; ty < B_; ++ty) {
                        const double c = coef_[size_t(tx) * B_ + ty];
                        if (c == 0.0) continue;
                        const double* tb = tabs[1].data() + (size_t(oy) * B_ + ty) * my;
                        for (size_t j = 0; j < my; ++j) dst[j] += c * tb[j];
                    }
                }
            }
            std::array<std::vector<double>, NORD> rows;
            for (auto& r : rows) r.assign(my, 0.0);
            for (size_t i = 0; i < mx; ++i) {
                for (int q = 0; q < NORD; ++q) {
                    const int ox = ord[q][0], oy = ord[q][1];
                    auto& row = rows[q];
                    std::fill(row.begin(), row.end(), 0.0);
                    for (int tx = 0; tx < B_; ++tx) {
                        const double w = tabs[0][(size_t(ox) * B_ + tx) * mx + i];
                        if (w == 0.0) continue;
                        const double* src = BY[oy].data() + size_t(tx) * my;
                        for (size_t j = 0; j < my; ++j) row[j] += w * src[j];
                    }
                }
                for (size_t j = 0; j < my; ++j)
                    emit_node<MAXO>(emit, i * my + j, [&](int q) { return rows[q][j]; });
            }
        } else {
            const size_t mx = g.coords[0].size(), my = g.coords[1].size(), mz = g.coords[2].size();
            constexpr auto& ord = detail::JetOrders<3>::ord;
            // distinct oz values and (oy,oz) pairs actually needed
            std::array<int, NORD> pair_of{};
            std::vector<std::array<int, 2>> pairs;
            for (int q = 0; q < NORD; ++q) {
                const std::array<int, 2> p{ord[q][1], ord[q][2]};
                int idx = -1;
                for (size_t u = 0; u < pairs.size(); ++u)
                    if (pairs[u] == p) idx = int(u);
                if (idx < 0) {
                    idx = int(pairs.size());
                    pairs.push_back(p);
                }
                pair_of[q] = idx;
            }
            // BZ[oz][(tx*B+ty)*mz + l]
            std::array<std::vector<double>, MAXO + 1> BZ;
            std::array<bool, MAXO + 1> need_oz{};
            for (const auto& p : pairs) need_oz[p[1]] = true;
            for (int oz = 0; oz <= MAXO; ++oz) {
                if (!need_oz[oz]) continue;
                BZ[oz].assign(size_t(B_) * B_ * mz, 0.0);
                for (int tx = 0; tx < B_; ++tx)
                    for (int ty = 0; ty < B_; ++ty) {
                        double* dst = BZ[oz].data() + (size_t(tx) * B_ + ty) * mz;
                        const double* crow = coef_.data() + (size_t(tx) * B_ + ty) * B_;
                        for (int tz = 0; tz < B_; ++tz) {
                            const double c = crow[tz];
                            if (c == 0.0) continue;
                            const double* tb = tabs[2].data() + (size_t(oz) * B_ + tz) * mz;
                            for (size_t l = 0; l < mz; ++l) dst[l] += c * tb[l];
                        }
                    }
            }
            // CYZ[p][(tx*my + j)*mz + l]
            std::vector<std::vector<double>> CYZ(pairs.size());
            for (size_t p = 0; p < pairs.size(); ++p) {
                const int oy = pairs[p][0], oz = pairs[p][1];
                CYZ[p].assign(size_t(B_) * my * mz, 0.0);
                for (int tx = 0; tx < B_; ++tx) {
                    const double* bz = BZ[oz].data() + size_t(tx) * B_ * mz;
                    double* dst = CYZ[p].data() + size_t(tx) * my * mz;
                    for (int ty = 0; ty < B_; ++ty) {
                        const double* src = bz + size_t(ty) * mz;
                        const double* tb = tabs[1].data() + (size_t(oy) * B_ + ty) * my;
                        for (size_t j = 0; j < my; ++j) {
                            const double w = tb[j];
                            if (w == 0.0) continue;
                            double* drow = dst + j * mz;
                            for (size_t l = 0; l < mz; ++l) drow[l] += w * src[l];
                        }
                    }
                }
            }
            std::array<std::vector<double>, NORD> sheet;
            for (auto& s : sheet) s.assign(my * mz, 0.0);
            for (size_t i = 0; i < mx; ++i) {
                for (int q = 0; q < NORD; ++q) {
                    auto& sh = sheet[q];
                    std::fill(sh.begin(), sh.end(), 0.0);
                    const int ox = ord[q][0];
                    const double* cz = CYZ[pair_of[q]].data();
                    for (int tx = 0; tx < B_; ++tx) {
                        const double w = tabs[0][(size_t(ox) * B_ + tx) * mx + i];
                        if (w == 0.0) continue;
                        const double* src = cz + size_t(tx) * my * mz;
                        for (size_t u = 0; u < my * mz; ++u) sh[u] += w * src[u];
                    }
                }
                const size_t base = i * my * mz;
                for (size_t u = 0; u < my * mz; ++u)
                    emit_node<MAXO>(emit, base + u, [&](int q) { return sheet[q][u]; });
            }
        }
    }

private:
    template <int MAXO, class F, class Get>
    static void emit_node(F&& emit, size_t flat, Get&& get) {
        if constexpr (MAXO == 0) {
            emit(flat, get(0));
        } else if constexpr (MAXO == 2) {
            Jet<D> J;
            J.f = get(0);
            for (int a = 0; a < D; ++a) J.grad[a] = get(1 + a);
            for (int s = 0; s < sym_count(D); ++s) J.hess[s] = get(1 + D + s);
            emit(flat, J);
        } else {
            Jet3<D> J;
            J.f = get(0);
            for (int a = 0; a < D; ++a) J.grad[a] = get(1 + a);
            for (int s = 0; s < sym_count(D); ++s) J.hess[s] = get(1 + D + s);
            for (int s = 0; s < tri_count(D); ++s) J.third[s] = get(detail::JetOrders<D>::n2 + s);
            emit(flat, J);
        }
    }

    // tab[(o*B + t)*m + i] = d^o b_t(x_i)
    std::vector<double> axis_table(const std::vector<double>& xs, int maxo) const {
        const size_t m = xs.size();
        std::vector<double> tab(size_t(maxo + 1) * B_ * m);
        for (size_t i = 0; i < m; ++i) {
            for (int o = 0; o <= maxo; ++o) tab[(size_t(o) * B_ + 0) * m + i] = o == 0 ? 1.0 : 0.0;
            for (int k = 1; k <= n_; ++k) {
                const double c = std::cos(k * xs[i]);
                const double s = std::sin(k * xs[i]);
                for (int o = 0; o <= maxo; ++o) {
                    tab[(size_t(o) * B_ + 2 * k - 1) * m + i] = detail::basis_deriv(2 * k - 1, o, c, s, k);
                    tab[(size_t(o) * B_ + 2 * k) * m + i] = detail::basis_deriv(2 * k, o, c, s, k);
                }
            }
        }
        return tab;
    }

    // Per-axis basis values/derivatives at a single point.
    struct AxisVals {
        int B;
        int maxo;
        std::array<std::vector<double>, D> v;  // v[a][(o*B)+t]
        AxisVals(const TrigField& f, const Point& x, int mo) : B(f.B_), maxo(mo) {
            for (int a = 0; a < D; ++a) {
                v[a].assign(size_t(mo + 1) * B, 0.0);
                for (int o = 0; o <= mo; ++o) v[a][size_t(o) * B + 0] = o == 0 ? 1.0 : 0.0;
                for (int k = 1; k <= f.n_; ++k) {
                    const double c = std::cos(k * x[a]);
                    const double s = std::sin(k * x[a]);
                    for (int o = 0; o <= mo; ++o) {
                        v[a][size_t(o) * B + 2 * k - 1] = detail::basis_deriv(2 * k - 1, o, c, s, k);
                        v[a][size_t(o) * B + 2 * k] = detail::basis_deriv(2 * k, o, c, s, k);
                    }
                }
            }
        }
    };

    double accumulate_ord(const AxisVals& av, const int* ord) const {
        double sum = 0.0;
        std::array<int, D> t{};
        for (size_t idx = 0; idx < coef_.size(); ++idx) {
            const double c = coef_[idx];
            if (c != 0.0) {
                double p = c;
                for (int a = 0; a < D; ++a) p *= av.v[a][size_t(ord[a]) * B_ + t[a]];
                sum += p;
            }
            for (int a = D - 1; a >= 0; --a) {  // row-major advance, last axis fastest
                if (++t[a] < B_) break;
                t[a] = 0;
            }
        }
        return sum;
    }

    double accumulate(const AxisVals& av, int, int) const {
        static constexpr int zero[D] = {};
        return accumulate_ord(av, zero);
    }

    size_t flat(const std::array<int, D>& t) const {
        size_t idx = 0;
        for (int a = 0; a < D; ++a) idx = idx * B_ + t[a];
        return idx;
    }

    int n_;
    int B_;
    std::vector<double> coef_;
};

}  // namespace nodal
