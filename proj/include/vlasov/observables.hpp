#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlasov/polynomial.hpp"

namespace vlasov {

inline constexpr unsigned kDefaultDegreeCap = 8;

// Raised when a construction would exceed the configured total-degree cap.
// Symmetrization and bracket nesting blow up combinatorially past it.
struct DegreeCapExceeded : std::runtime_error {
    explicit DegreeCapExceeded(unsigned degree, unsigned cap)
        : std::runtime_error("observable degree " + std::to_string(degree) + " exceeds cap " + std::to_string(cap)) {}
};

namespace detail {

inline const std::vector<std::vector<int>>& permutations_of(int k) {
    static std::vector<std::vector<std::vector<int>>> cache;  // cache[k] = all S_k permutations
    if (static_cast<int>(cache.size()) <= k) cache.resize(static_cast<std::size_t>(k) + 1);
    auto& entry = cache[static_cast<std::size_t>(k)];
    if (entry.empty()) {
        std::vector<int> perm(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) perm[static_cast<std::size_t>(i)] = i;
        do {
            entry.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return entry;
}

}  // namespace detail

// Averages a raw polynomial on (R^{2d})^k over all k! relabelings of the
// particle blocks. Idempotent; the fixed points are exactly the symmetric
// polynomials.
inline Polynomial symmetrize_raw(const Polynomial& raw, int k, int d) {
    if (raw.nvars() != 2 * d * k) throw std::invalid_argument("symmetrize: polynomial has wrong variable count");
    Polynomial out(raw.nvars());
    const auto& perms = detail::permutations_of(k);
    const Rational weight(1, static_cast<int>(perms.size()));
    for (const auto& perm : perms) {
        for (const auto& [m, c] : raw.terms()) out.add_term(relabel_blocks(m, d, perm, k), c * weight);
    }
    return out;
}

// A k-particle observable: an S_k-symmetric polynomial on (R^{2d})^k held in
// canonical (grlex, fully expanded) form with exact coefficients.
class SymObservable {
public:
    SymObservable() : k_(1), d_(1), cap_(kDefaultDegreeCap), poly_(2) {}

    SymObservable(int k, int d, unsigned cap = kDefaultDegreeCap) : k_(k), d_(d), cap_(cap), poly_(2 * d * k) {
        validate_shape();
    }

    // Canonicalizes arbitrary input (the symmetrization operator).
    static SymObservable from_raw(const Polynomial& raw, int k, int d, unsigned cap = kDefaultDegreeCap) {
        SymObservable f(k, d, cap);
        f.poly_ = symmetrize_raw(raw, k, d);
        f.check_cap();
        return f;
    }

    // For results that are symmetric by construction (brackets of symmetric
    // inputs, linear combinations, tuple averages). The closure tests
    // re-symmetrize and compare to guard this path.
    static SymObservable trusted(Polynomial symmetric_poly, int k, int d, unsigned cap = kDefaultDegreeCap) {
        SymObservable f(k, d, cap);
        if (symmetric_poly.nvars() != 2 * d * k) throw std::invalid_argument("observable: wrong variable count");
        f.poly_ = std::move(symmetric_poly);
        f.check_cap();
        return f;
    }

    int k() const { return k_; }
    int d() const { return d_; }
    unsigned degree_cap() const { return cap_; }
    const Polynomial& poly() const { return poly_; }
    bool is_zero() const { return poly_.is_zero(); }
    unsigned degree() const { return poly_.degree(); }

    SymObservable& operator+=(const SymObservable& other) {
        check_compatible(other);
        poly_ += other.poly_;
        return *this;
    }

    SymObservable& operator-=(const SymObservable& other) {
        check_compatible(other);
        poly_ -= other.poly_;
        return *this;
    }

    SymObservable& operator*=(const Rational& s) {
        poly_ *= s;
        return *this;
    }

    friend SymObservable operator+(SymObservable a, const SymObservable& b) { return a += b; }
    friend SymObservable operator-(SymObservable a, const SymObservable& b) { return a -= b; }
    friend SymObservable operator*(SymObservable a, const Rational& s) { return a *= s; }
    friend SymObservable operator*(const Rational& s, SymObservable a) { return a *= s; }

    // Pointwise product of observables (symmetric again); used by the Leibniz
    // property tests.
    friend SymObservable operator*(const SymObservable& a, const SymObservable& b) {
        a.check_compatible(b);
        return trusted(a.poly_ * b.poly_, a.k_, a.d_, std::max(a.cap_, b.cap_));
    }

    friend bool operator==(const SymObservable& a, const SymObservable& b) {
        return a.k_ == b.k_ && a.d_ == b.d_ && a.poly_ == b.poly_;
    }

    // Formal partial with respect to x or v of one particle; 1-based indices.
    Polynomial partial(int particle, int coord, bool velocity) const {
        if (particle < 1 || particle > k_) throw std::invalid_argument("partial: particle index out of range");
        if (coord < 1 || coord > d_) throw std::invalid_argument("partial: coordinate index out of range");
        return poly_.derivative(detail::var_index(d_, particle - 1, velocity, coord - 1));
    }

    std::string str() const;

private:
    void validate_shape() const {
        if (k_ < 1 || d_ < 1) throw std::invalid_argument("observable requires k >= 1 and d >= 1");
    }

    void check_cap() const {
        const unsigned deg = poly_.degree();
        if (deg > cap_) throw DegreeCapExceeded(deg, cap_);
    }

    void check_compatible(const SymObservable& other) const {
        if (k_ != other.k_ || d_ != other.d_) throw std::invalid_argument("observable k/d mismatch");
    }

    int k_;
    int d_;
    unsigned cap_;
    Polynomial poly_;
};

// N phase points in R^{2d}, stored flat per particle as x^1..x^d, v^1..v^d.
template <class T>
struct Configuration {
    int d = 1;
    int n = 0;
    std::vector<T> z;  // size 2*d*n

    Configuration() = default;
    Configuration(int d_, int n_) : d(d_), n(n_), z(static_cast<std::size_t>(2 * d_ * n_), T(0)) {
        if (d_ < 1 || n_ < 1) throw std::invalid_argument("configuration requires d >= 1 and N >= 1");
    }

    T& x(int i, int c = 0) { return z[static_cast<std::size_t>(2 * d * i + c)]; }
    T& v(int i, int c = 0) { return z[static_cast<std::size_t>(2 * d * i + d + c)]; }
    const T& x(int i, int c = 0) const { return z[static_cast<std::size_t>(2 * d * i + c)]; }
    const T& v(int i, int c = 0) const { return z[static_cast<std::size_t>(2 * d * i + d + c)]; }
};

using ConfigurationQ = Configuration<Rational>;
using ConfigurationD = Configuration<double>;

template <class T>
T evaluate(const SymObservable& f, const Configuration<T>& z) {
    if (z.n != f.k() || z.d != f.d()) throw std::invalid_argument("evaluate: configuration arity mismatch");
    return f.poly().template evaluate<T>(z.z);
}

// f^{(k)} placed on the particles named by the 1-based tuple, as a raw
// polynomial on (R^{2d})^N. Entries must be distinct and within 1..N.
inline Polynomial extend_to_tuple(const SymObservable& f, const std::vector<int>& tuple, int n_total) {
    if (static_cast<int>(tuple.size()) != f.k()) throw std::invalid_argument("extend_to_tuple: tuple length != k");
    std::vector<int> slot_map(tuple.size());
    std::vector<bool> seen(static_cast<std::size_t>(n_total), false);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        const int j = tuple[i];
        if (j < 1 || j > n_total) throw std::invalid_argument("extend_to_tuple: index out of range");
        if (seen[static_cast<std::size_t>(j - 1)]) throw std::invalid_argument("extend_to_tuple: repeated index");
        seen[static_cast<std::size_t>(j - 1)] = true;
        slot_map[i] = j - 1;
    }
    return f.poly().relabel(f.d(), slot_map, n_total);
}

// Standard Poisson bracket on (R^{2d})^k: sum over particles and coordinates
// of dx f dv g - dv f dx g. Symmetric output for symmetric inputs.
inline SymObservable poisson_bracket(const SymObservable& f, const SymObservable& g) {
    if (f.k() != g.k() || f.d() != g.d()) throw std::invalid_argument("poisson_bracket: k/d mismatch");
    Polynomial out(f.poly().nvars());
    for (int i = 1; i <= f.k(); ++i) {
        for (int c = 1; c <= f.d(); ++c) {
            out += f.partial(i, c, false) * g.partial(i, c, true);
            out -= f.partial(i, c, true) * g.partial(i, c, false);
        }
    }
    return SymObservable::trusted(std::move(out), f.k(), f.d(), std::max(f.degree_cap(), g.degree_cap()));
}

// Bracket of the k-particle observable algebra: k times the standard bracket.
inline SymObservable lie_bracket(const SymObservable& f, const SymObservable& g) {
    return poisson_bracket(f, g) * Rational(f.k());
}

inline std::string observable_var_name(int d, int index) {
    const int slot = index / (2 * d);
    const int rem = index % (2 * d);
    const bool velocity = rem >= d;
    const int coord = velocity ? rem - d : rem;
    std::string name = velocity ? "v" : "x";
    name += std::to_string(slot + 1);
    name += "_";
    name += std::to_string(coord + 1);
    return name;
}

inline std::string SymObservable::str() const {
    const int d = d_;
    return poly_.str([d](int idx) { return observable_var_name(d, idx); });
}

}  // namespace vlasov
