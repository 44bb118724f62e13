// Spectral measures: lattice atoms on Z^d for torus-periodic fields, or a
// uniform band density on a symmetric frequency interval for stationary line
// processes. Both expose exact total mass and second moments.
#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

namespace nodal {

struct LlnLimit {
    double value = 0.0;
    bool degenerate = false;  // zero second moment: no oscillation, ratio limit 0
};

class SpectralMeasure {
public:
    enum class Kind { lattice, band };
    using Atom = std::array<int, 3>;  // frequency vector, unused axes zero

    static SpectralMeasure lattice(int d, const std::map<Atom, double>& atoms) {
        if (d < 1 || d > 3) throw std::invalid_argument("SpectralMeasure: d in 1..3");
        SpectralMeasure m;
        m.kind_ = Kind::lattice;
        m.d_ = d;
        m.atoms_ = atoms;
        for (const auto& [k, mass] : atoms) {
            if (mass < 0.0) throw std::invalid_argument("SpectralMeasure: negative mass");
            for (int a = d; a < 3; ++a)
                if (k[a] != 0) throw std::invalid_argument("SpectralMeasure: atom outside Z^d");
            Atom mk{-k[0], -k[1], -k[2]};
            auto it = atoms.find(mk);
            if (it == atoms.end() || it->second != mass)
                throw std::invalid_argument("SpectralMeasure: atoms must be symmetric under k <-> -k");
        }
        if (!(m.total_mass() > 0.0)) throw std::invalid_argument("SpectralMeasure: zero total mass");
        return m;
    }

    // Uniform density `density` on [-hi,-lo] u [lo,hi] (lo = 0 gives a plain
    // symmetric band). The sinc-covariance process is uniform_band(1, 0.5).
    static SpectralMeasure uniform_band(double hi, double density, double lo = 0.0) {
        if (!(hi > lo) || lo < 0.0) throw std::invalid_argument("SpectralMeasure: need 0 <= lo < hi");
        if (!(density > 0.0)) throw std::invalid_argument("SpectralMeasure: need density > 0");
        SpectralMeasure m;
        m.kind_ = Kind::band;
        m.d_ = 1;
        m.lo_ = lo;
        m.hi_ = hi;
        m.density_ = density;
        return m;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return d_; }
    double band_lo() const { return lo_; }
    double band_hi() const { return hi_; }
    double band_density() const { return density_; }

    double total_mass() const {
        if (kind_ == Kind::band) return 2.0 * density_ * (hi_ - lo_);
        double s = 0.0;
        for (const auto& [k, mass] : atoms_) s += mass;
        return s;
    }

    // integral of omega_axis^2 d(mu)
    double second_moment(int axis = 0) const {
        if (kind_ == Kind::band) {
            if (axis != 0) throw std::invalid_argument("SpectralMeasure: band measures are 1d");
            return 2.0 * density_ * (hi_ * hi_ * hi_ - lo_ * lo_ * lo_) / 3.0;
        }
        double s = 0.0;
        for (const auto& [k, mass] : atoms_) s += double(k[axis]) * double(k[axis]) * mass;
        return s;
    }

private:
    SpectralMeasure() = default;
    Kind kind_ = Kind::band;
    int d_ = 1;
    std::map<Atom, double> atoms_;
    double lo_ = 0.0, hi_ = 1.0, density_ = 0.5;
};

// Almost-sure limit of N[0,T]/T for a 1d stationary process with this
// spectral measure: sqrt(E f'(0)^2) / pi.
inline LlnLimit lln_limit(const SpectralMeasure& mu) {
    const double m2 = mu.second_moment(0);
    LlnLimit out;
    out.degenerate = !(m2 > 0.0);
    out.value = out.degenerate ? 0.0 : std::sqrt(m2) / 3.14159265358979323846;
    return out;
}

}  // namespace nodal
