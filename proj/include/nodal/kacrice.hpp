// Closed Kac-Rice formulas: limit-free integral expressions for the number
// of zeros (d = 1) and the nodal volume H^{d-1}({f = 0}) of non-degenerate
// C^2 fields, evaluated by grid quadrature.
//
// Three torus volume forms are provided:
//   sign_form     two integrals, one carrying a sign(f) jump;
//   compact       -(1/2) int sign(f) Laplacian(f/eta), needs third derivatives;
//   nonsingular   three integrals whose integrands are |f|-Lipschitz in the
//                 jet, obtained from sign_form by one more integration by
//                 parts (third derivatives cancel).
//
// The nonsingular tail is implemented with the coefficients that the
// integration by parts actually produces, -(1/2) and -(3/4); the unit tests
// pin this against both the sign form and the marching oracles.
//
// The box formula adds face terms sign(f) d_i f / eta^q; q defaults to 1,
// the exponent that reduces to the interval formula in d = 1 and passes the
// analytic calibration cases (see tests and the validate driver).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "counting.hpp"
#include "fields.hpp"
#include "jets.hpp"
#include "quadrature.hpp"

namespace nodal {

enum class VolumeMethod { sign_form, compact, nonsingular };

inline const char* method_name(VolumeMethod m) {
    switch (m) {
        case VolumeMethod::sign_form: return "sign";
        case VolumeMethod::compact: return "compact";
        default: return "nonsingular";
    }
}

inline VolumeMethod method_from_name(const std::string& s) {
    if (s == "sign") return VolumeMethod::sign_form;
    if (s == "compact") return VolumeMethod::compact;
    if (s == "nonsingular") return VolumeMethod::nonsingular;
    throw std::invalid_argument("unknown volume method: " + s);
}

struct NodalEstimate {
    double value = 0.0;
    std::string method;
    int m = 0;                    // finest points-per-axis used
    double error_estimate = 0.0;  // |I_2m - I_m| at the final doubling
    double error_total = 0.0;     // telescoped sum of doubling differences
    double min_eta = 0.0;         // grid minimum of eta, for degeneracy audits
    bool tol_reached = false;
};

struct FormulaOptions {
    quad::Options quad{};
    double eta_threshold = kDefaultEtaThreshold;
    int boundary_exponent = 1;    // eta power in the box face terms
    double boundary_tol = 1e-12;  // |f| below this on a face/endpoint is a zero
};

namespace detail {

template <class T, int D>
T hess_quad(const JetT<T, D>& J, const typename JetT<T, D>::Vec& u,
            const typename JetT<T, D>::Vec& v) {
    T s{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += u[i] * J.h(i, j) * v[j];
    return s;
}

template <class T, int D>
typename JetT<T, D>::Vec hess_times(const JetT<T, D>& J, const typename JetT<T, D>::Vec& v) {
    typename JetT<T, D>::Vec out{};
    for (int i = 0; i < D; ++i) {
        T s{};
        for (int j = 0; j < D; ++j) s += J.h(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

template <class T, int D>
T hess_frob2(const JetT<T, D>& J) {
    T s{};
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) s += J.h(i, j) * J.h(i, j);
    return s;
}

// -(1/2) (f lap f - |grad f|^2) |f| / eta^3
template <class T, int D>
T vol_first(const JetT<T, D>& J) {
    return T(-0.5) * (J.f * J.laplacian() - J.grad_norm2()) * abs(J.f) * rpow(J.eta2(), -1.5);
}

// -(1/2) sign(f) (lap f |grad f|^2 - grad f' H grad f) / eta^3
template <class T, int D>
T vol_sign_tail(const JetT<T, D>& J) {
    const double sgn = sign0(value_of(J.f));
    const T quad_term = hess_quad(J, J.grad, J.grad);
    return T(-0.5 * sgn) * (J.laplacian() * J.grad_norm2() - quad_term) * rpow(J.eta2(), -1.5);
}

// The same quantity after the second integration by parts:
//   -(1/2) |f| (||H||_F^2 - (lap f)^2) / eta^3
//   -(3/4) |f| / eta^5 (lap f <grad f, grad eta^2> - grad f' H grad eta^2),
// grad eta^2 = 2 f grad f + 2 H grad f.
template <class T, int D>
T vol_nonsingular_tail(const JetT<T, D>& J) {
    const T lap = J.laplacian();
    const T af = abs(J.f);
    const T q = J.eta2();
    const T second = T(-0.5) * af * (hess_frob2(J) - lap * lap) * rpow(q, -1.5);
    const auto hg = hess_times(J, J.grad);
    std::array<T, D> w{};
    for (int i = 0; i < D; ++i) w[i] = T(2.0) * (J.f * J.grad[i] + hg[i]);
    T gw{};
    for (int i = 0; i < D; ++i) gw += J.grad[i] * w[i];
    const T third = T(-0.75) * af * rpow(q, -2.5) * (lap * gw - hess_quad(J, J.grad, w));
    return second + third;
}

template <class T, int D>
T vol_integrand(VolumeMethod method, const JetT<T, D>& J) {
    const T first = vol_first(J);
    if (method == VolumeMethod::sign_form) return first + vol_sign_tail(J);
    return first + vol_nonsingular_tail(J);
}

// Laplacian of f/eta from a third-order jet.
template <int D>
double lap_f_over_eta(const Jet3<D>& J) {
    const double q = J.eta2();
    const double lap = J.laplacian();
    const auto hg = hess_times(J, J.grad);
    std::array<double, D> w{};
    for (int i = 0; i < D; ++i) w[i] = 2.0 * (J.f * J.grad[i] + hg[i]);
    double gw = 0.0, w2 = 0.0;
    for (int i = 0; i < D; ++i) {
        gw += J.grad[i] * w[i];
        w2 += w[i] * w[i];
    }
    const auto glap = J.grad_laplacian();
    double g_glap = 0.0;
    for (int i = 0; i < D; ++i) g_glap += J.grad[i] * glap[i];
    const double lap_q = 2.0 * (J.grad_norm2() + J.f * lap + hess_frob2(J) + g_glap);
    return lap * rpow(q, -0.5) - gw * rpow(q, -1.5) + 0.75 * J.f * w2 * rpow(q, -2.5) -
           0.5 * J.f * lap_q * rpow(q, -1.5);
}

template <int D>
double vol_compact_integrand(const Jet3<D>& J) {
    return -0.5 * sign0(J.f) * lap_f_over_eta(J);
}

// Shared torus driver: refine the grid sum of g(jet), tracking min eta and
// failing fast on degeneracy.
template <int D, bool Jets3 = false, class Field, class G>
NodalEstimate torus_formula(const Field& field, G&& g, const FormulaOptions& opt,
                            std::string name) {
    double min_eta2 = std::numeric_limits<double>::infinity();
    auto eval = [&](int m) {
        quad::SlabSum acc(4096);
        auto node = [&](size_t, const auto& J) {
            const double e2 = J.eta2();
            if (e2 < min_eta2) min_eta2 = e2;
            acc.push(g(J));
        };
        if constexpr (Jets3) {
            if constexpr (Field3Of<Field, D>)
                visit_torus_jets3<D>(field, m, node);
            else
                throw std::invalid_argument("third derivatives unavailable for this field");
        } else {
            visit_torus_jets<D>(field, m, node);
        }
        if (std::sqrt(min_eta2) <= opt.eta_threshold)
            throw DegenerateRealization(std::sqrt(min_eta2));
        double cell = 1.0;
        for (int a = 0; a < D; ++a) cell *= quad::kTwoPi / m;
        return acc.total() * cell;
    };
    const auto r = quad::refine(eval, D, opt.quad);
    return {r.value,       std::move(name),     r.m, r.error_estimate, r.error_total,
            std::sqrt(min_eta2), r.tol_reached};
}

}  // namespace detail

// Number of zeros of a periodic 1d field over one period, as the closed
// integral for the chosen counting function.
template <class Field>
    requires FieldOf<Field, 1>
NodalEstimate count_zeros_periodic_1d(const Field& field, CountingFunction tag,
                                      const FormulaOptions& opt = {}) {
    return detail::torus_formula<1>(
        field, [tag](const Jet<1>& J) { return counting_integrand(tag, J); }, opt,
        std::string("count:") + counting_name(tag));
}

// Zeros of a C^2 (not necessarily periodic) field on [a,b], boundary terms
// plus the same integrand. Requires f(a) f(b) != 0; zeros of any finite
// order inside are each counted once, so an exact (f, f') = (0,0) node is a
// removable point of the integrand and is re-sampled a hair to the right.
template <class Field>
    requires FieldOf<Field, 1>
NodalEstimate count_zeros_interval_1d(const Field& field, double a, double b, CountingFunction tag,
                                      const FormulaOptions& opt = {}) {
    if (!(a < b)) throw std::invalid_argument("count_zeros_interval_1d: need a < b");
    const auto Ja = field.jet({a}), Jb = field.jet({b});
    if (std::fabs(Ja.f * Jb.f) <= opt.boundary_tol)
        throw BoundaryZero("boundary zero: f(a) f(b) vanishes within tolerance");
    const double boundary = 0.5 * (counting_F(tag, Jb) - counting_F(tag, Ja));

    double min_eta2 = std::numeric_limits<double>::infinity();
    auto eval = [&](int m) {
        const double h = (b - a) / m;
        quad::SlabSum acc(4096);
        for (int i = 0; i <= m; ++i) {
            const double x = a + i * h;
            auto J = field.jet({x});
            const double e2 = J.eta2();
            if (e2 < min_eta2) min_eta2 = e2;
            double v = counting_integrand(tag, J);
            if (!std::isfinite(v)) {  // exact higher-order zero on a node
                J = field.jet({x + 1e-3 * h});
                v = counting_integrand(tag, J);
                if (!std::isfinite(v)) throw DegenerateRealization(std::sqrt(e2));
            }
            acc.push(((i == 0 || i == m) ? 0.5 : 1.0) * v);
        }
        return acc.total() * h;
    };
    const auto r = quad::refine(eval, 1, opt.quad);
    return {boundary + r.value, std::string("count-interval:") + counting_name(tag), r.m,
            r.error_estimate,   r.error_total, std::sqrt(min_eta2), r.tol_reached};
}

// H^{d-1}({f = 0}) over the whole torus.
template <int D, class Field>
    requires FieldOf<Field, D>
NodalEstimate nodal_volume_torus(const Field& field, VolumeMethod method,
                                 const FormulaOptions& opt = {}) {
    const std::string name = std::string("volume:") + method_name(method);
    if (method == VolumeMethod::compact) {
        return detail::torus_formula<D, true>(
            field, [](const Jet3<D>& J) { return detail::vol_compact_integrand<D>(J); }, opt, name);
    }
    return detail::torus_formula<D>(
        field, [method](const Jet<D>& J) { return detail::vol_integrand<double, D>(method, J); },
        opt, name);
}

// H^{d-1}({f = 0}) restricted to a box: interior sign-form integrals plus
// the 2d face terms (1/2) [ int sign(f) d_i f / eta^q ]_{a_i}^{b_i}.
template <int D, class Field>
    requires FieldOf<Field, D>
NodalEstimate nodal_volume_box(const Field& field, const std::array<double, D>& a,
                               const std::array<double, D>& b, const FormulaOptions& opt = {}) {
    for (int i = 0; i < D; ++i)
        if (!(a[i] < b[i])) throw std::invalid_argument("nodal_volume_box: need a_i < b_i");
    const double qexp = opt.boundary_exponent;
    double min_eta2 = std::numeric_limits<double>::infinity();

    auto eval = [&](int m) {
        const auto grid = RectGrid<D>::box(a, b, m);
        std::array<size_t, D> sizes{};
        for (int i = 0; i < D; ++i) sizes[i] = grid.coords[i].size();
        double cell = 1.0;
        for (int i = 0; i < D; ++i) cell *= (b[i] - a[i]) / m;

        quad::SlabSum acc(4096);
        visit_rect_jets<D>(field, grid, [&](size_t flat, const Jet<D>& J) {
            const double e2 = J.eta2();
            if (e2 < min_eta2) min_eta2 = e2;
            double w = 1.0;
            size_t rem = flat;
            for (int ax = D - 1; ax >= 0; --ax) {
                const size_t i = rem % sizes[ax];
                rem /= sizes[ax];
                if (i == 0 || i + 1 == sizes[ax]) w *= 0.5;
            }
            acc.push(w * detail::vol_integrand<double, D>(VolumeMethod::sign_form, J));
        });
        if (std::sqrt(min_eta2) <= opt.eta_threshold)
            throw DegenerateRealization(std::sqrt(min_eta2));
        double total = acc.total() * cell;

        for (int ax = 0; ax < D; ++ax) {
            double face_cell = 1.0;
            for (int i = 0; i < D; ++i)
                if (i != ax) face_cell *= (b[i] - a[i]) / m;
            for (int side = 0; side < 2; ++side) {
                auto fgrid = grid;
                fgrid.coords[ax] = {side == 0 ? a[ax] : b[ax]};
                std::array<size_t, D> fsz{};
                for (int i = 0; i < D; ++i) fsz[i] = fgrid.coords[i].size();
                quad::SlabSum facc(4096);
                visit_rect_jets<D>(field, fgrid, [&](size_t flat, const Jet<D>& J) {
                    if (std::fabs(J.f) <= opt.boundary_tol)
                        throw BoundaryZero("zero on boundary face");
                    double w = 1.0;
                    size_t rem = flat;
                    for (int i = D - 1; i >= 0; --i) {
                        const size_t ii = rem % fsz[i];
                        rem /= fsz[i];
                        if (fsz[i] > 1 && (ii == 0 || ii + 1 == fsz[i])) w *= 0.5;
                    }
                    const double eta = std::sqrt(J.eta2());
                    facc.push(w * sign0(J.f) * J.grad[ax] / std::pow(eta, qexp));
                });
                total += (side == 0 ? -0.5 : 0.5) * facc.total() * face_cell;
            }
        }
        return total;
    };
    const auto r = quad::refine(eval, D, opt.quad);
    return {r.value,       "volume:box",        r.m, r.error_estimate, r.error_total,
            std::sqrt(min_eta2), r.tol_reached};
}

struct ZeroCountBounds {
    double bound_arctan = 0.0;         // (1/pi) int |f''|/eta + 2
    double bound_arctan_coarse = 0.0;  // 2 (max|f''| / min eta + 1)
    double bound_indicator = 0.0;      // (1/2) int 1_{|f'|<=|f|} |f''|/|f| + pi
};

// Upper bounds on the zero count of a periodic 1d field.
template <class Field>
    requires FieldOf<Field, 1>
ZeroCountBounds zero_count_bounds(const Field& field, const FormulaOptions& opt = {}) {
    double min_eta2 = std::numeric_limits<double>::infinity();
    double max_fpp = 0.0;
    double i_arc = 0.0, i_ind = 0.0;
    auto eval = [&](int m) {
        quad::SlabSum arc(4096), ind(4096);
        visit_torus_jets<1>(field, m, [&](size_t, const Jet<1>& J) {
            const double e2 = J.eta2();
            if (e2 < min_eta2) min_eta2 = e2;
            const double fpp = std::fabs(J.hess[0]);
            if (fpp > max_fpp) max_fpp = fpp;
            arc.push(fpp / std::sqrt(e2));
            ind.push(std::fabs(J.grad[0]) <= std::fabs(J.f) ? fpp / std::fabs(J.f) : 0.0);
        });
        if (std::sqrt(min_eta2) <= opt.eta_threshold)
            throw DegenerateRealization(std::sqrt(min_eta2));
        const double h = quad::kTwoPi / m;
        i_arc = arc.total() * h;
        i_ind = ind.total() * h;
        return i_arc + i_ind;
    };
    (void)quad::refine(eval, 1, opt.quad);
    ZeroCountBounds out;
    out.bound_arctan = i_arc / M_PI + 2.0;
    out.bound_arctan_coarse = 2.0 * (max_fpp / std::sqrt(min_eta2) + 1.0);
    out.bound_indicator = 0.5 * i_ind + M_PI;
    return out;
}

}  // namespace nodal
