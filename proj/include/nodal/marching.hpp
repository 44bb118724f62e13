// Level-set measurement oracles: marching squares (2d length) and marching
// cubes (3d area) with linear edge interpolation, on the torus or on a box,
// refined by grid doubling until the measure settles.
//
// Only the total measure is needed, so the ambiguous square/cube cases use
// the cheap midpoint rule (squares) and the standard 256-case table (cubes).
// A node value of exactly zero is classified on the positive side, which is
// the "perturb the level by 1e-15" convention: no crossing is counted twice.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fields.hpp"
#include "mc_tables.hpp"
#include "oracle.hpp"
#include "quadrature.hpp"

namespace nodal {

struct MarchingOptions {
    int m_start = 0;        // 0 -> 64 (2d) / 24 (3d)
    int m_cap = 0;          // 0 -> 2048 (2d) / 192 (3d)
    double rel_tol = 0.01;  // stop when |L(2m)-L(m)| <= rel_tol*|L(2m)|
};

namespace detail {

template <int D, class Field>
std::vector<double> sample_values(const Field& field, const RectGrid<D>& g) {
    if constexpr (requires { field.rect_values(g); }) {
        return field.rect_values(g);
    } else {
        std::vector<double> out(g.size());
        std::array<double, D> x{};
        if constexpr (D == 2) {
            const size_t my = g.coords[1].size();
            for (size_t i = 0; i < g.coords[0].size(); ++i)
                for (size_t j = 0; j < my; ++j) {
                    x = {g.coords[0][i], g.coords[1][j]};
                    out[i * my + j] = field.value(x);
                }
        } else {
            const size_t my = g.coords[1].size(), mz = g.coords[2].size();
            for (size_t i = 0; i < g.coords[0].size(); ++i)
                for (size_t j = 0; j < my; ++j)
                    for (size_t k = 0; k < mz; ++k) {
                        x = {g.coords[0][i], g.coords[1][j], g.coords[2][k]};
                        out[(i * my + j) * mz + k] = field.value(x);
                    }
        }
        return out;
    }
}

inline bool inside(double v) { return v < 0.0; }  // v == 0 counts as the positive side

// One marching-squares pass. Node (i,j) carries value vals[wrap(i)*stride + wrap(j)].
inline double squares_pass(const std::vector<double>& vals, int m, bool wrap,
                           const std::array<double, 2>& origin, const std::array<double, 2>& h) {
    const int stride = wrap ? m : m + 1;
    auto at = [&](int i, int j) { return vals[size_t(wrap ? i % m : i) * stride + (wrap ? j % m : j)]; };
    quad::SlabSum acc(4096);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const double v0 = at(i, j), v1 = at(i + 1, j), v2 = at(i + 1, j + 1), v3 = at(i, j + 1);
            int idx = 0;
            if (inside(v0)) idx |= 1;
            if (inside(v1)) idx |= 2;
            if (inside(v2)) idx |= 4;
            if (inside(v3)) idx |= 8;
            if (idx == 0 || idx == 15) continue;
            const double x0 = origin[0] + i * h[0], y0 = origin[1] + j * h[1];
            // corner coordinates: c0=(x0,y0) c1=(x0+hx,y0) c2=(x0+hx,y0+hy) c3=(x0,y0+hy)
            const double cx[4] = {x0, x0 + h[0], x0 + h[0], x0};
            const double cy[4] = {y0, y0, y0 + h[1], y0 + h[1]};
            const double cv[4] = {v0, v1, v2, v3};
            constexpr int edge_corner[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
            auto cross = [&](int e, double& px, double& py) {
                const int p = edge_corner[e][0], q = edge_corner[e][1];
                const double t = cv[p] / (cv[p] - cv[q]);
                px = cx[p] + t * (cx[q] - cx[p]);
                py = cy[p] + t * (cy[q] - cy[p]);
            };
            auto seg = [&](int ea, int eb) {
                double ax, ay, bx, by;
                cross(ea, ax, ay);
                cross(eb, bx, by);
                acc.push(std::hypot(bx - ax, by - ay));
            };
            switch (idx) {
                case 1: case 14: seg(3, 0); break;
                case 2: case 13: seg(0, 1); break;
                case 3: case 12: seg(3, 1); break;
                case 4: case 11: seg(1, 2); break;
                case 6: case 9: seg(0, 2); break;
                case 7: case 8: seg(2, 3); break;
                case 5: {  // c0,c2 inside: pair by the midpoint sample
                    if (inside(0.25 * (v0 + v1 + v2 + v3))) {
                        seg(0, 1);
                        seg(2, 3);
                    } else {
                        seg(3, 0);
                        seg(1, 2);
                    }
                    break;
                }
                case 10: {
                    if (inside(0.25 * (v0 + v1 + v2 + v3))) {
                        seg(3, 0);
                        seg(1, 2);
                    } else {
                        seg(0, 1);
                        seg(2, 3);
                    }
                    break;
                }
                default: break;
            }
        }
    }
    return acc.total();
}

// One marching-cubes pass over an m^3 cell grid.
inline double cubes_pass(const std::vector<double>& vals, int m, bool wrap,
                         const std::array<double, 3>& origin, const std::array<double, 3>& h) {
    const int stride = wrap ? m : m + 1;
    auto at = [&](int i, int j, int k) {
        if (wrap) {
            i %= m; j %= m; k %= m;
        }
        return vals[(size_t(i) * stride + j) * stride + k];
    };
    // corner offsets in the usual cube ordering
    constexpr int co[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                              {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    quad::SlabSum acc(4096);
    double vx[12], vy[12], vz[12];
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            for (int k = 0; k < m; ++k) {
                double cv[8];
                int cube = 0;
                for (int p = 0; p < 8; ++p) {
                    cv[p] = at(i + co[p][0], j + co[p][1], k + co[p][2]);
                    if (inside(cv[p])) cube |= 1 << p;
                }
                const int edges = detail::kMcEdgeTable[cube];
                if (edges == 0) continue;
                const double base[3] = {origin[0] + i * h[0], origin[1] + j * h[1],
                                        origin[2] + k * h[2]};
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const int p = detail::kMcEdgeVertex[e][0], q = detail::kMcEdgeVertex[e][1];
                    const double t = cv[p] / (cv[p] - cv[q]);
                    vx[e] = base[0] + (co[p][0] + t * (co[q][0] - co[p][0])) * h[0];
                    vy[e] = base[1] + (co[p][1] + t * (co[q][1] - co[p][1])) * h[1];
                    vz[e] = base[2] + (co[p][2] + t * (co[q][2] - co[p][2])) * h[2];
                }
                const int* tri = detail::kMcTriTable[cube];
                for (int t = 0; tri[t] != -1; t += 3) {
                    const int a = tri[t], b = tri[t + 1], c = tri[t + 2];
                    const double ux = vx[b] - vx[a], uy = vy[b] - vy[a], uz = vz[b] - vz[a];
                    const double wx = vx[c] - vx[a], wy = vy[c] - vy[a], wz = vz[c] - vz[a];
                    const double nx = uy * wz - uz * wy;
                    const double ny = uz * wx - ux * wz;
                    const double nz = ux * wy - uy * wx;
                    acc.push(0.5 * std::sqrt(nx * nx + ny * ny + nz * nz));
                }
            }
        }
    }
    return acc.total();
}

template <int D, class Field>
double single_pass(const Field& field, bool torus, const std::array<double, D>& a,
                   const std::array<double, D>& b, int m) {
    RectGrid<D> g;
    std::array<double, D> origin{}, h{};
    if (torus) {
        g = RectGrid<D>::torus(m);
        for (int ax = 0; ax < D; ++ax) {
            h[ax] = quad::kTwoPi / m;
            origin[ax] = 0.5 * h[ax];  // torus nodes carry the half-cell offset
        }
    } else {
        g = RectGrid<D>::box(a, b, m);
        for (int ax = 0; ax < D; ++ax) {
            origin[ax] = a[ax];
            h[ax] = (b[ax] - a[ax]) / m;
        }
    }
    const auto vals = sample_values<D>(field, g);
    if constexpr (D == 2)
        return squares_pass(vals, m, torus, origin, h);
    else
        return cubes_pass(vals, m, torus, origin, h);
}

template <int D, class Field>
OracleResult marching_refine(const Field& field, bool torus, const std::array<double, D>& a,
                             const std::array<double, D>& b, MarchingOptions opt) {
    static_assert(D == 2 || D == 3);
    int m = opt.m_start > 0 ? opt.m_start : (D == 2 ? 64 : 24);
    const int cap = opt.m_cap > 0 ? opt.m_cap : (D == 2 ? 2048 : 192);
    OracleResult r;
    double prev = single_pass<D>(field, torus, a, b, m);
    r.history.push_back(prev);
    r.m = m;
    r.value = prev;
    while (m * 2 <= cap) {
        m *= 2;
        const double cur = single_pass<D>(field, torus, a, b, m);
        r.history.push_back(cur);
        r.m = m;
        r.value = cur;
        if (std::fabs(cur - prev) <= opt.rel_tol * std::fabs(cur)) return r;
        prev = cur;
    }
    r.capped = r.history.size() > 1 &&
               std::fabs(r.history.end()[-1] - r.history.end()[-2]) >
                   opt.rel_tol * std::fabs(r.history.back());
    return r;
}

}  // namespace detail

// Length (d=2) or area (d=3) of {f = 0} on the torus.
template <int D, class Field>
OracleResult marching_measure_torus(const Field& field, MarchingOptions opt = {}) {
    return detail::marching_refine<D>(field, true, {}, {}, opt);
}

// Same on a box.
template <int D, class Field>
OracleResult marching_measure_box(const Field& field, const std::array<double, D>& a,
                                  const std::array<double, D>& b, MarchingOptions opt = {}) {
    for (int i = 0; i < D; ++i)
        if (!(a[i] < b[i])) throw std::invalid_argument("marching: box needs a_i < b_i");
    return detail::marching_refine<D>(field, false, a, b, opt);
}

}  // namespace nodal
