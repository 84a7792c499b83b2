#pragma once

#include <cstdint>
#include <vector>

#include "vlasov/rational.hpp"

namespace vlasov {

// Splittable counter-based generator (splitmix64). Every stochastic routine
// takes an explicit Rng or a seed, so identical configs reproduce bit-identical
// streams on any platform; std:: distributions are avoided for that reason.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Independent child stream; advancing the child never disturbs the parent.
    Rng split() { return Rng(next_u64() ^ 0xd1b54a32d192ed03ull); }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi], inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Small exact rational, nonzero with high probability; denominators kept
    // tiny so test polynomials stay readable.
    Rational small_rational() {
        std::int64_t num = uniform_int(-9, 9);
        std::int64_t den = uniform_int(1, 4);
        return Rational(BigInt(num), BigInt(den));
    }

    Rational small_nonzero_rational() {
        Rational r = small_rational();
        while (r == 0) r = small_rational();
        return r;
    }

private:
    std::uint64_t state_;
};

}  // namespace vlasov
