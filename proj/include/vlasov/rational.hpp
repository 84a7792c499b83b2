#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vlasov {

// Exact scalar type used for all algebraic identities. "Equals zero" in the
// identity suites means literal equality of these values.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational rational_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

inline Rational rational_pow(const Rational& base, unsigned exp) {
    Rational out(1);
    Rational b = base;
    unsigned e = exp;
    while (e > 0) {
        if (e & 1u) out *= b;
        b *= b;
        e >>= 1;
    }
    return out;
}

inline BigInt factorial(unsigned n) {
    BigInt out(1);
    for (unsigned i = 2; i <= n; ++i) out *= i;
    return out;
}

inline BigInt binomial(unsigned n, unsigned k) {
    if (k > n) return BigInt(0);
    if (k > n - k) k = n - k;
    BigInt out(1);
    for (unsigned i = 1; i <= k; ++i) {
        out *= (n - k + i);
        out /= i;
    }
    return out;
}

// Falling factorial n (n-1) ... (n-k+1) = |ordered k-tuples from n|.
inline BigInt falling_factorial(unsigned n, unsigned k) {
    if (k > n) return BigInt(0);
    BigInt out(1);
    for (unsigned i = 0; i < k; ++i) out *= (n - i);
    return out;
}

// Parses "p", "-p" or "p/q". Throws on malformed input or q == 0.
inline Rational parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rational(BigInt(text));
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return Rational(num, den);
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed rational literal: '" + text + "'");
    }
}

}  // namespace vlasov
