// Stationary 1d Gaussian processes built by the spectral representation
// method: N cosine/sine pairs at midpoint frequencies of a partition of the
// positive band, amplitudes sqrt(2 S(w_j) dw). Stationary by construction;
// derivatives up to order two are exact term-wise.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "jets.hpp"
#include "rng.hpp"
#include "spectral_measure.hpp"

namespace nodal {

class SpectralProcess1D {
public:
    static constexpr int dim = 1;
    using Point = std::array<double, 1>;

    static SpectralProcess1D sample(const SpectralMeasure& mu, int n_terms, RandomStream& rng) {
        if (mu.kind() != SpectralMeasure::Kind::band)
            throw std::invalid_argument("SpectralProcess1D: lattice measure; sample a TrigField instead");
        if (n_terms < 1) throw std::invalid_argument("SpectralProcess1D: need N >= 1");
        SpectralProcess1D p;
        p.omega_.resize(n_terms);
        p.amp_.resize(n_terms);
        p.a_.resize(n_terms);
        p.b_.resize(n_terms);
        const double lo = mu.band_lo(), hi = mu.band_hi();
        const double dw = (hi - lo) / n_terms;
        for (int j = 0; j < n_terms; ++j) {
            p.omega_[j] = lo + (j + 0.5) * dw;
            p.amp_[j] = std::sqrt(2.0 * mu.band_density() * dw);
            p.a_[j] = rng.normal();
            p.b_[j] = rng.normal();
        }
        return p;
    }

    int terms() const { return int(omega_.size()); }

    double value(double x) const {
        double s = 0.0;
        for (size_t j = 0; j < omega_.size(); ++j)
            s += amp_[j] * (a_[j] * std::cos(omega_[j] * x) + b_[j] * std::sin(omega_[j] * x));
        return s;
    }

    Jet<1> jet(const Point& x) const {
        Jet<1> J;
        double f = 0.0, d1 = 0.0, d2 = 0.0;
        for (size_t j = 0; j < omega_.size(); ++j) {
            const double w = omega_[j];
            const double c = std::cos(w * x[0]);
            const double s = std::sin(w * x[0]);
            const double ac = amp_[j] * a_[j];
            const double as = amp_[j] * b_[j];
            f += ac * c + as * s;
            d1 += w * (as * c - ac * s);
            d2 += w * w * (-ac * c - as * s);
        }
        J.f = f;
        J.grad[0] = d1;
        J.hess[0] = d2;
        return J;
    }

private:
    std::vector<double> omega_, amp_, a_, b_;
};

}  // namespace nodal
