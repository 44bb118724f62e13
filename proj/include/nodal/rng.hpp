// Seeded random streams with O(1) child-stream derivation.
//
// Every Monte-Carlo loop in this library draws from a stream derived as
// derive_seed(master, index [, attempt]), so results are independent of
// worker count and scheduling order.
#pragma once

#include <cmath>
#include <cstdint>

namespace nodal {

namespace detail {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic child seed for realization `index`, resample `attempt`.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                           std::uint64_t attempt = 0) {
    std::uint64_t h = detail::mix64(master);
    h = detail::mix64(h ^ detail::mix64(index + 0x51A4F2EDull));
    h = detail::mix64(h ^ detail::mix64(attempt + 0xC2B2AE3D27D4EB4Full));
    return h;
}

// xoshiro256++ (Blackman, Vigna). State seeded through splitmix64.
class Xoshiro256pp {
public:
    explicit constexpr Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) {
            sm += 0x9E3779B97F4A7C15ull;
            w = detail::mix64(sm);
        }
    }

    constexpr std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4]{};
};

// Gaussian stream via Box-Muller; platform-independent given IEEE doubles.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_.next(); }

    // uniform on (0,1]
    double uniform_pos() {
        return static_cast<double>((gen_.next() >> 11) + 1) * 0x1.0p-53;
    }

    // uniform on [0,1)
    double uniform01() { return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        constexpr double two_pi = 6.283185307179586476925286766559;
        spare_ = r * std::sin(two_pi * u2);
        have_spare_ = true;
        return r * std::cos(two_pi * u2);
    }

private:
    Xoshiro256pp gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace nodal
