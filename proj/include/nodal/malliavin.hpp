// Directional (sharp) derivative of the nodal volume along an independent
// copy of the coefficient noise, evaluated in forward-tangent arithmetic:
// every jet component is paired with the corresponding hat-field component
// and the nonsingular volume integrand is evaluated over Dual scalars, so
// the product/quotient/|.| rules hold by construction and the result is the
// exact derivative of the discrete quadrature sum.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fields.hpp"
#include "jets.hpp"
#include "kacrice.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "trig_field.hpp"

namespace nodal {

template <int D>
struct PairedField {
    TrigField<D> base;
    TrigField<D> hat;

    PairedField(TrigField<D> b, TrigField<D> h) : base(std::move(b)), hat(std::move(h)) {
        if (!base.same_structure(hat))
            throw std::invalid_argument("PairedField: structure mismatch between base and hat");
    }
};

// Pair with an explicitly given direction (hat = base is the homogeneity
// self-direction).
template <int D>
PairedField<D> make_paired_field(const TrigField<D>& base, const TrigField<D>& hat) {
    return PairedField<D>(base, hat);
}

// Pair with an independent copy: hat re-drawn from the sampling law of the
// model (same n, lambda, weights; fresh Gaussians).
template <int D>
PairedField<D> make_paired_field(const TrigField<D>& base, double lambda, RandomStream& rng,
                                 typename TrigField<D>::WeightRule weights = {}) {
    auto hat = TrigField<D>::sample(base.max_frequency(), lambda, rng, std::move(weights));
    return PairedField<D>(base, hat);
}

struct SharpOptions {
    quad::Options quad{};
    double eta_threshold = kDefaultEtaThreshold;
    double eps_fd = 1e-4;
};

struct SharpEstimate {
    double sharp = 0.0;   // directional derivative of the nodal volume
    double volume = 0.0;  // the volume itself, from the same pass
    int m = 0;
    double error_estimate = 0.0;  // on the sharp value
    double min_eta = 0.0;
    bool tol_reached = false;
};

// Tangent of the nonsingular torus volume along pair.hat.
template <int D>
SharpEstimate sharp_nodal_volume(const PairedField<D>& pair, SharpOptions opt = {}) {
    double min_eta2 = std::numeric_limits<double>::infinity();
    double volume = 0.0;
    auto eval = [&](int m) {
        // hat jets are buffered for one grid level; base jets stream past them
        std::vector<Jet<D>> hats;
        hats.resize(size_t(1) << 0);
        size_t total = 1;
        for (int a = 0; a < D; ++a) total *= size_t(m);
        hats.resize(total);
        pair.hat.for_each_grid_jet(m, [&](size_t i, const Jet<D>& J) { hats[i] = J; });
        quad::SlabSum val(4096), tan(4096);
        pair.base.for_each_grid_jet(m, [&](size_t i, const Jet<D>& J) {
            const double e2 = J.eta2();
            if (e2 < min_eta2) min_eta2 = e2;
            const auto dj = pair_jets(J, hats[i]);
            const Dual g = detail::vol_integrand<Dual, D>(VolumeMethod::nonsingular, dj);
            val.push(g.v);
            tan.push(g.t);
        });
        if (std::sqrt(min_eta2) <= opt.eta_threshold)
            throw DegenerateRealization(std::sqrt(min_eta2));
        double cell = 1.0;
        for (int a = 0; a < D; ++a) cell *= quad::kTwoPi / m;
        volume = val.total() * cell;
        return tan.total() * cell;
    };
    quad::Options q = opt.quad;
    if (q.m_start == 0) q.m_start = (D == 3 ? 32 : 64);
    if (q.m_max == 0) q.m_max = q.m_start;  // pinned grid by default
    const auto r = quad::refine(eval, D, q);
    return {r.value, volume, r.m, r.error_estimate, std::sqrt(min_eta2), r.tol_reached};
}

// Central finite difference of the same discrete functional along hat.
template <int D>
double sharp_nodal_volume_fd(const PairedField<D>& pair, SharpOptions opt = {}) {
    quad::Options q = opt.quad;
    if (q.m_start == 0) q.m_start = (D == 3 ? 32 : 64);
    if (q.m_max == 0) q.m_max = q.m_start;
    FormulaOptions fo;
    fo.quad = q;
    fo.eta_threshold = opt.eta_threshold;
    const double eps = opt.eps_fd;
    const auto plus = pair.base.combined(eps, pair.hat);
    const auto minus = pair.base.combined(-eps, pair.hat);
    const auto vp = nodal_volume_torus<D>(plus, VolumeMethod::nonsingular, fo);
    const auto vm = nodal_volume_torus<D>(minus, VolumeMethod::nonsingular, fo);
    return (vp.value - vm.value) / (2.0 * eps);
}

struct NondegeneracyReport {
    std::vector<double> inner_mean_sq;  // per base realization, mean of sharp^2 over hats
    double overall_mean = 0.0;
    int degenerate_resamples = 0;
};

// Monte-Carlo estimate of E[ E_hat[(sharp Vol)^2] ] for the sampled model:
// n_outer base draws, n_inner independent hat directions each. Degenerate
// bases are replaced by fresh child draws and counted.
template <int D>
NondegeneracyReport nondegeneracy_statistic(int n, double lambda, int n_outer, int n_inner,
                                            SharpOptions opt, std::uint64_t master_seed) {
    if (n_outer < 1 || n_inner < 1)
        throw std::invalid_argument("nondegeneracy_statistic: need n_outer, n_inner >= 1");
    NondegeneracyReport rep;
    rep.inner_mean_sq.resize(n_outer, 0.0);
    for (int i = 0; i < n_outer; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            if (attempt > 100)
                throw std::runtime_error("nondegeneracy_statistic: persistent degeneracy");
            RandomStream rng(derive_seed(master_seed, std::uint64_t(i), 2 * attempt));
            auto base = TrigField<D>::sample(n, lambda, rng);
            try {
                double acc = 0.0;
                for (int j = 0; j < n_inner; ++j) {
                    RandomStream hrng(
                        derive_seed(master_seed, std::uint64_t(i) << 20 | unsigned(j), 2 * attempt + 1));
                    const auto pair = make_paired_field<D>(base, lambda, hrng);
                    const double s = sharp_nodal_volume(pair, opt).sharp;
                    acc += s * s;
                }
                rep.inner_mean_sq[i] = acc / n_inner;
                break;
            } catch (const DegenerateRealization&) {
                ++rep.degenerate_resamples;
            }
        }
    }
    double sum = 0.0;
    for (double v : rep.inner_mean_sq) sum += v;
    rep.overall_mean = sum / n_outer;
    return rep;
}

struct MomentEstimate {
    double mean = 0.0;
    double sample_se = 0.0;
    long n = 0;
};

// Monte-Carlo E[ ||Z||^{-s} ], Z standard normal in R^{d+1}; finite iff
// s < d+1. Drives the integrability-threshold diagnostics.
inline MomentEstimate inverse_eta_moment(int d, double s, long n_samples, std::uint64_t seed) {
    if (d < 1 || n_samples < 1) throw std::invalid_argument("inverse_eta_moment: bad arguments");
    RandomStream rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (long i = 0; i < n_samples; ++i) {
        double r2 = 0.0;
        for (int k = 0; k < d + 1; ++k) {
            const double z = rng.normal();
            r2 += z * z;
        }
        const double v = std::pow(r2, -0.5 * s);
        sum += v;
        sum2 += v * v;
    }
    MomentEstimate out;
    out.n = n_samples;
    out.mean = sum / n_samples;
    const double var = std::max(0.0, sum2 / n_samples - out.mean * out.mean);
    out.sample_se = std::sqrt(var / n_samples);
    return out;
}

// Running means at n = 2^k up to n_max, one deterministic stream; the
// divergent regime s >= d+1 shows up as the sequence never settling.
inline std::vector<MomentEstimate> inverse_eta_moment_doubling(int d, double s, long n_max,
                                                               std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<MomentEstimate> out;
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    for (long target = 1024; target <= n_max; target *= 2) {
        for (; n < target; ++n) {
            double r2 = 0.0;
            for (int k = 0; k < d + 1; ++k) {
                const double z = rng.normal();
                r2 += z * z;
            }
            const double v = std::pow(r2, -0.5 * s);
            sum += v;
            sum2 += v * v;
        }
        MomentEstimate e;
        e.n = n;
        e.mean = sum / n;
        const double var = std::max(0.0, sum2 / n - e.mean * e.mean);
        e.sample_se = std::sqrt(var / n);
        out.push_back(e);
    }
    return out;
}

}  // namespace nodal
