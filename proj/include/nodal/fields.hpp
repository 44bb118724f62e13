// Field-level helpers shared by the formula and oracle layers: the field
// concept, non-degeneracy scans, and the errors raised when a realization
// fails the eta > 0 requirement.
#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

#include "jets.hpp"
#include "quadrature.hpp"
#include "trig_field.hpp"

namespace nodal {

struct DegenerateRealization : std::runtime_error {
    explicit DegenerateRealization(double min_eta)
        : std::runtime_error("degenerate realization: grid min eta = " + std::to_string(min_eta)),
          min_eta_value(min_eta) {}
    double min_eta_value;
};

struct BoundaryZero : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kDefaultEtaThreshold = 1e-8;

template <class F, int D>
concept FieldOf = requires(const F f, std::array<double, D> x) {
    { f.jet(x) } -> std::convertible_to<Jet<D>>;
} && (F::dim == D);

template <class F>
constexpr bool has_grid_jets = requires(const F f) {
    f.for_each_grid_jet(8, [](size_t, const Jet<F::dim>&) {});
};

// Visit jets on the m^D torus grid through the field's fast path when it has
// one, otherwise pointwise.
template <int D, class Field, class Fn>
void visit_torus_jets(const Field& field, int m, Fn&& fn) {
    if constexpr (has_grid_jets<Field>) {
        field.for_each_grid_jet(m, std::forward<Fn>(fn));
    } else {
        const double h = quad::kTwoPi / m;
        std::array<double, D> x{};
        if constexpr (D == 1) {
            for (int i = 0; i < m; ++i) {
                x[0] = (i + 0.5) * h;
                fn(size_t(i), field.jet(x));
            }
        } else if constexpr (D == 2) {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) {
                    x = {(i + 0.5) * h, (j + 0.5) * h};
                    fn(size_t(i) * m + j, field.jet(x));
                }
        } else {
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int k = 0; k < m; ++k) {
                        x = {(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
                        fn((size_t(i) * m + j) * m + k, field.jet(x));
                    }
        }
    }
}

// Adapters turning closures into fields (analytic test cases, mostly).
template <int D, class Fn>
struct ValueField {
    static constexpr int dim = D;
    Fn fn;
    double value(const std::array<double, D>& x) const { return fn(x); }
};
template <int D, class Fn>
ValueField<D, Fn> make_value_field(Fn fn) {
    return {std::move(fn)};
}

template <int D, class Fn>
struct JetClosureField {
    static constexpr int dim = D;
    Fn fn;  // returns Jet<D>
    Jet<D> jet(const std::array<double, D>& x) const { return fn(x); }
    double value(const std::array<double, D>& x) const { return fn(x).f; }
};
template <int D, class Fn>
JetClosureField<D, Fn> make_jet_field(Fn fn) {
    return {std::move(fn)};
}

template <class F>
constexpr bool has_grid_jets3 = requires(const F f) {
    f.for_each_grid_jet3(8, [](size_t, const Jet3<F::dim>&) {});
};

template <class F, int D>
concept Field3Of = requires(const F f, std::array<double, D> x) {
    { f.jet3(x) } -> std::convertible_to<Jet3<D>>;
};

template <int D, class Field, class Fn>
void visit_torus_jets3(const Field& field, int m, Fn&& fn) {
    static_assert(Field3Of<Field, D>, "third derivatives unavailable for this field");
    if constexpr (has_grid_jets3<Field>) {
        field.for_each_grid_jet3(m, std::forward<Fn>(fn));
    } else {
        const double h = quad::kTwoPi / m;
        std::array<double, D> x{};
        size_t flat = 0;
        std::array<int, D> idx{};
        for (;;) {
            for (int a = 0; a < D; ++a) x[a] = (idx[a] + 0.5) * h;
            fn(flat++, field.jet3(x));
            int a = D - 1;
            while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
            if (a < 0) break;
        }
    }
}

template <class F, int D>
constexpr bool has_rect_jets = requires(const F f, const RectGrid<D>& g) {
    f.template eval_rect<2>(g, [](size_t, const Jet<D>&) {});
};

// Visit jets on an arbitrary rectilinear grid, row-major flat order.
template <int D, class Field, class Fn>
void visit_rect_jets(const Field& field, const RectGrid<D>& g, Fn&& fn) {
    if constexpr (has_rect_jets<Field, D>) {
        field.template eval_rect<2>(g, std::forward<Fn>(fn));
    } else {
        std::array<double, D> x{};
        std::array<size_t, D> idx{};
        size_t flat = 0;
        for (;;) {
            for (int a = 0; a < D; ++a) x[a] = g.coords[a][idx[a]];
            fn(flat++, field.jet(x));
            int a = D - 1;
            while (a >= 0 && ++idx[a] == g.coords[a].size()) idx[a--] = 0;
            if (a < 0) break;
        }
    }
}

// Smallest eta = sqrt(f^2 + |grad f|^2) over the m^D torus grid. A small
// value flags a realization whose zeros come numerically close to critical
// points; callers decide what to do with it.
template <int D, class Field>
    requires FieldOf<Field, D>
double min_eta_scan(const Field& field, int m) {
    if (m < 8) throw std::invalid_argument("min_eta_scan: need m >= 8");
    double min_eta2 = std::numeric_limits<double>::infinity();
    visit_torus_jets<D>(field, m, [&](size_t, const Jet<D>& J) {
        const double e2 = J.eta2();
        if (e2 < min_eta2) min_eta2 = e2;
    });
    return std::sqrt(min_eta2);
}

// Same scan over an interval [a,b] (1d fields, m+1 nodes).
template <class Field>
    requires FieldOf<Field, 1>
double min_eta_scan_interval(const Field& field, double a, double b, int m) {
    if (m < 8) throw std::invalid_argument("min_eta_scan: need m >= 8");
    double min_eta2 = std::numeric_limits<double>::infinity();
    const double h = (b - a) / m;
    for (int i = 0; i <= m; ++i) {
        const auto J = field.jet({a + i * h});
        const double e2 = J.eta2();
        if (e2 < min_eta2) min_eta2 = e2;
    }
    return std::sqrt(min_eta2);
}

}  // namespace nodal
