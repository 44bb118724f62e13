// Second-order jets (value, gradient, Hessian) of a scalar field at a point,
// parametrized over the scalar type so the same formula code runs on plain
// doubles and on forward tangents (see Dual below).
#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace nodal {

using std::size_t;

inline constexpr int sym_count(int d) { return d * (d + 1) / 2; }

// Packed index of the (i,j) entry of a symmetric d x d matrix, i <= j,
// row-major over the upper triangle.
inline constexpr int sym_index(int d, int i, int j) {
    if (i > j) {
        const int t = i;
        i = j;
        j = t;
    }
    return i * d - i * (i - 1) / 2 + (j - i);
}

// Number of distinct third-order partials in dimension d (multisets i<=j<=k).
inline constexpr int tri_count(int d) { return d * (d + 1) * (d + 2) / 6; }

inline constexpr int tri_index(int d, int i, int j, int k) {
    // sort (i,j,k)
    if (i > j) { const int t = i; i = j; j = t; }
    if (j > k) { const int t = j; j = k; k = t; }
    if (i > j) { const int t = i; i = j; j = t; }
    // lexicographic rank of (i,j,k), i<=j<=k, entries in [0,d)
    int r = 0;
    for (int a = 0; a < i; ++a) r += (d - a) * (d - a + 1) / 2;
    for (int b = i; b < j; ++b) r += d - b;
    return r + (k - j);
}

// sign with sign(0) = 0; the convention used wherever |.| is differentiated.
inline constexpr double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Forward tangent scalar: value v and directional derivative t.
// abs() uses a Borelian representative of the derivative with sign(0) = 0.
struct Dual {
    double v = 0.0;
    double t = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value), t(0.0) {}  // constants carry zero tangent
    constexpr Dual(double value, double tangent) : v(value), t(tangent) {}

    friend constexpr Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.t + b.t}; }
    friend constexpr Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.t - b.t}; }
    friend constexpr Dual operator-(Dual a) { return {-a.v, -a.t}; }
    friend constexpr Dual operator*(Dual a, Dual b) {
        return {a.v * b.v, a.t * b.v + a.v * b.t};
    }
    friend constexpr Dual operator/(Dual a, Dual b) {
        const double q = a.v / b.v;
        return {q, (a.t - q * b.t) / b.v};
    }
    Dual& operator+=(Dual o) { return *this = *this + o; }
    Dual& operator-=(Dual o) { return *this = *this - o; }
    Dual& operator*=(Dual o) { return *this = *this * o; }
};

inline Dual abs(Dual u) { return {std::fabs(u.v), sign0(u.v) * u.t}; }
using std::abs;

// u^e for u > 0 (used for the eta powers eta^-3, eta^-5 as (eta^2)^(-3/2), ...).
inline Dual rpow(Dual u, double e) {
    const double p = std::pow(u.v, e);
    return {p, e * p / u.v * u.t};
}
inline double rpow(double u, double e) { return std::pow(u, e); }

inline constexpr double value_of(double x) { return x; }
inline constexpr double value_of(Dual x) { return x.v; }

template <class T, int D>
struct JetT {
    using Vec = std::array<T, D>;

    T f{};
    std::array<T, D> grad{};
    std::array<T, sym_count(D)> hess{};  // packed symmetric, see sym_index

    T& h(int i, int j) { return hess[sym_index(D, i, j)]; }
    const T& h(int i, int j) const { return hess[sym_index(D, i, j)]; }

    T laplacian() const {
        T s = hess[sym_index(D, 0, 0)];
        for (int i = 1; i < D; ++i) s += hess[sym_index(D, i, i)];
        return s;
    }
    T grad_norm2() const {
        T s = grad[0] * grad[0];
        for (int i = 1; i < D; ++i) s += grad[i] * grad[i];
        return s;
    }
    T eta2() const { return f * f + grad_norm2(); }
};

template <int D>
using Jet = JetT<double, D>;

template <int D>
double eta_of(const Jet<D>& j) {
    return std::sqrt(j.eta2());
}

// Jet extended with the distinct third-order partials (trigonometric fields
// only; required by the nodal-volume method that takes a Laplacian of f/eta).
template <int D>
struct Jet3 : Jet<D> {
    std::array<double, tri_count(D)> third{};

    double t3(int i, int j, int k) const { return third[tri_index(D, i, j, k)]; }

    // components of grad(Laplacian f): sum_i d^3 f / dx_i dx_i dx_j
    std::array<double, D> grad_laplacian() const {
        std::array<double, D> g{};
        for (int j = 0; j < D; ++j) {
            double s = 0.0;
            for (int i = 0; i < D; ++i) s += t3(i, i, j);
            g[j] = s;
        }
        return g;
    }
};

// Pair a base jet with a tangent-direction jet, giving the dual-valued jet
// whose tangents are the hat field's values (the forward mode of the sharp
// operator: each Gaussian coordinate moves along its independent copy).
template <int D>
JetT<Dual, D> pair_jets(const Jet<D>& base, const Jet<D>& hat) {
    JetT<Dual, D> out;
    out.f = {base.f, hat.f};
    for (int i = 0; i < D; ++i) out.grad[i] = {base.grad[i], hat.grad[i]};
    for (int s = 0; s < sym_count(D); ++s) out.hess[s] = {base.hess[s], hat.hess[s]};
    return out;
}

}  // namespace nodal
