#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "vlasov/hierarchy.hpp"
#include "vlasov/observables.hpp"

namespace vlasov {

// Weighted sum of point masses on (R^{2d})^k, with symmetrized-pairing
// semantics: it stands for the symmetrization of the stored atoms, which is
// invisible because pairings only ever take symmetric observables. R is
// Rational in exact mode and double in float mode; one state never mixes.
template <class R>
struct DiracState {
    struct Atom {
        R weight;
        std::vector<R> point;  // flat, 2*d*k entries per the observable layout
    };

    int k = 1;
    int d = 1;
    bool probability = false;  // flags states whose weights must sum to one
    std::vector<Atom> atoms;

    DiracState() = default;
    DiracState(int k_, int d_) : k(k_), d(d_) {}

    void add_atom(R weight, std::vector<R> point) {
        if (point.size() != static_cast<std::size_t>(2 * d * k)) throw std::invalid_argument("dirac atom has wrong dimension");
        atoms.push_back(Atom{std::move(weight), std::move(point)});
    }

    R mass() const {
        R total(0);
        for (const auto& a : atoms) total += a.weight;
        return total;
    }

    void check_probability() const {
        if (!probability) return;
        if constexpr (std::is_same_v<R, Rational>) {
            if (mass() != 1) throw std::logic_error("probability state does not have unit mass");
        } else {
            if (std::abs(mass() - R(1)) > R(1e-12)) throw std::logic_error("probability state does not have unit mass");
        }
    }
};

template <class R>
R pairing(const SymObservable& f, const DiracState<R>& gamma) {
    if (f.k() != gamma.k || f.d() != gamma.d) throw std::invalid_argument("pairing: arity mismatch");
    R total(0);
    for (const auto& a : gamma.atoms) total += a.weight * f.poly().template evaluate<R>(a.point);
    return total;
}

// k-particle marginal: defined through the adjoint identity
// <phi, marginal> = <embed(phi, N), gamma>, realized atomwise by spreading
// each N-point atom over all ordered k-tuples with equal weight. Using
// ordered tuples (not just subsets) keeps the atom collection closed under
// block permutations, so even non-symmetric integrands pair correctly.
template <class R>
DiracState<R> marginal(const DiracState<R>& gamma, int k_target) {
    if (k_target > gamma.k) throw std::invalid_argument("marginal: target level exceeds state level");
    if (k_target == gamma.k) return gamma;
    DiracState<R> out(k_target, gamma.d);
    out.probability = gamma.probability;
    const auto tuples = detail::ordered_tuples(gamma.k, k_target);
    R denom;
    if constexpr (std::is_same_v<R, Rational>) {
        denom = Rational(falling_factorial(static_cast<unsigned>(gamma.k), static_cast<unsigned>(k_target)));
    } else {
        denom = static_cast<R>(to_double(Rational(falling_factorial(static_cast<unsigned>(gamma.k), static_cast<unsigned>(k_target)))));
    }
    const int block = 2 * gamma.d;
    for (const auto& a : gamma.atoms) {
        for (const auto& tuple : tuples) {
            std::vector<R> sub(static_cast<std::size_t>(block * k_target));
            for (std::size_t s = 0; s < tuple.size(); ++s) {
                const int src = tuple[s] - 1;
                for (int j = 0; j < block; ++j) sub[s * static_cast<std::size_t>(block) + static_cast<std::size_t>(j)] = a.point[static_cast<std::size_t>(src * block + j)];
            }
            out.add_atom(a.weight / denom, std::move(sub));
        }
    }
    return out;
}

// Empirical measure of a configuration: the uniform atomic probability
// measure on the single-particle phase space.
template <class R>
DiracState<R> empirical_measure(const Configuration<R>& z) {
    if (z.n < 1) throw std::invalid_argument("empirical_measure: empty configuration");
    DiracState<R> out(1, z.d);
    out.probability = true;
    R w;
    if constexpr (std::is_same_v<R, Rational>) {
        w = Rational(1, z.n);
    } else {
        w = R(1) / static_cast<R>(z.n);
    }
    const int block = 2 * z.d;
    for (int i = 0; i < z.n; ++i) {
        std::vector<R> pt(z.z.begin() + i * block, z.z.begin() + (i + 1) * block);
        out.add_atom(w, std::move(pt));
    }
    return out;
}

// Symmetric N-particle law of a configuration. Stored as one atom; the
// symmetrized-pairing semantics supply the average over orderings without the
// N! blow-up.
template <class R>
DiracState<R> liouville_state(const Configuration<R>& z) {
    DiracState<R> out(z.n, z.d);
    out.probability = true;
    out.add_atom(R(1), z.z);
    return out;
}

// Hierarchy of Dirac states, one level per particle count.
template <class R>
struct DiracHierarchy {
    int d = 1;
    std::map<int, DiracState<R>> levels;

    DiracHierarchy() = default;
    explicit DiracHierarchy(int d_) : d(d_) {}

    void set_level(int k, DiracState<R> s) {
        if (s.k != k || s.d != d) throw std::invalid_argument("hierarchy level mismatch");
        levels.insert_or_assign(k, std::move(s));
    }

    bool has_level(int k) const { return levels.count(k) > 0; }

    R pair_level(int k, const SymObservable& f) const {
        auto it = levels.find(k);
        if (it == levels.end()) throw std::invalid_argument("state hierarchy is missing level " + std::to_string(k));
        return pairing(f, it->second);
    }
};

// All marginals of an N-particle state, levels 1..N.
template <class R>
DiracHierarchy<R> marginal_hierarchy(const DiracState<R>& gamma) {
    DiracHierarchy<R> out(gamma.d);
    for (int k = 1; k <= gamma.k; ++k) out.set_level(k, marginal(gamma, k));
    return out;
}

// Single state viewed as a hierarchy concentrated at its own level; the
// natural argument for the single-algebra Lie-Poisson bracket.
template <class R>
struct SingleLevelState {
    DiracState<R> state;

    bool has_level(int k) const { return k == state.k; }

    R pair_level(int k, const SymObservable& f) const {
        if (k != state.k) throw std::invalid_argument("single-level state has no level " + std::to_string(k));
        return pairing(f, state);
    }
};

// Phase-space density on [0,L) x [-V,V], d = 1, periodic in x, cell-centered
// values, midpoint quadrature.
struct GridState1D {
    double length = 1.0;   // x in [0, length)
    double vmax = 1.0;     // v in [-vmax, vmax]
    int nx = 1;
    int nv = 1;
    std::vector<double> values;  // row-major, values[ix*nv + iv] >= 0

    GridState1D() = default;
    GridState1D(double L, double V, int nx_, int nv_) : length(L), vmax(V), nx(nx_), nv(nv_), values(static_cast<std::size_t>(nx_ * nv_), 0.0) {
        if (L <= 0 || V <= 0 || nx_ < 1 || nv_ < 1) throw std::invalid_argument("grid state: bad domain");
    }

    double dx() const { return length / nx; }
    double dv() const { return 2.0 * vmax / nv; }
    double xc(int i) const { return (i + 0.5) * dx(); }
    double vc(int j) const { return -vmax + (j + 0.5) * dv(); }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i * nv + j)]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i * nv + j)]; }

    double mass() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s * dx() * dv();
    }

    // Spatial density: velocity marginal per column.
    std::vector<double> density() const {
        std::vector<double> rho(static_cast<std::size_t>(nx), 0.0);
        for (int i = 0; i < nx; ++i) {
            double s = 0.0;
            for (int j = 0; j < nv; ++j) s += at(i, j);
            rho[static_cast<std::size_t>(i)] = s * dv();
        }
        return rho;
    }
};

inline double pairing(const SymObservable& f, const GridState1D& gamma) {
    if (f.k() != 1 || f.d() != 1) throw std::invalid_argument("grid pairing requires a one-particle observable in d = 1");
    double total = 0.0;
    std::vector<double> pt(2);
    for (int i = 0; i < gamma.nx; ++i) {
        pt[0] = gamma.xc(i);
        for (int j = 0; j < gamma.nv; ++j) {
            pt[1] = gamma.vc(j);
            total += f.poly().evaluate<double>(pt) * gamma.at(i, j);
        }
    }
    return total * gamma.dx() * gamma.dv();
}

namespace detail {

// Per-monomial moment table for tensor-power pairings: each monomial of a
// level-k observable splits into one single-particle monomial per slot.
template <class Base, class Scalar>
Scalar block_moment(const Base& base, int d, const std::vector<std::uint8_t>& block_exps);

template <>
inline Rational block_moment<DiracState<Rational>, Rational>(const DiracState<Rational>& base, int d, const std::vector<std::uint8_t>& e) {
    Rational total(0);
    for (const auto& a : base.atoms) {
        Rational term = a.weight;
        for (int i = 0; i < 2 * d; ++i) {
            for (unsigned p = 0; p < e[static_cast<std::size_t>(i)]; ++p) term *= a.point[static_cast<std::size_t>(i)];
        }
        total += term;
    }
    return total;
}

template <>
inline double block_moment<DiracState<double>, double>(const DiracState<double>& base, int d, const std::vector<std::uint8_t>& e) {
    double total = 0;
    for (const auto& a : base.atoms) {
        double term = a.weight;
        for (int i = 0; i < 2 * d; ++i) {
            for (unsigned p = 0; p < e[static_cast<std::size_t>(i)]; ++p) term *= a.point[static_cast<std::size_t>(i)];
        }
        total += term;
    }
    return total;
}

template <>
inline double block_moment<GridState1D, double>(const GridState1D& base, int d, const std::vector<std::uint8_t>& e) {
    (void)d;
    double total = 0.0;
    for (int i = 0; i < base.nx; ++i) {
        const double x = base.xc(i);
        for (int j = 0; j < base.nv; ++j) {
            const double v = base.vc(j);
            double term = base.at(i, j);
            for (unsigned p = 0; p < e[0]; ++p) term *= x;
            for (unsigned p = 0; p < e[1]; ++p) term *= v;
            total += term;
        }
    }
    return total * base.dx() * base.dv();
}

}  // namespace detail

// Lazy tensor-power hierarchy (gamma^{tensor k})_k of a one-particle base
// state. Level-k pairings factor exactly monomial by monomial.
template <class Base, class Scalar>
struct FactorizedState {
    Base base;
    int d = 1;
    int grid_level_cap = 3;  // resource cap for grid bases

    bool has_level(int) const { return true; }

    Scalar pair_level(int k, const SymObservable& f) const {
        if (f.k() != k || f.d() != d) throw std::invalid_argument("factorized pairing: arity mismatch");
        if constexpr (std::is_same_v<Base, GridState1D>) {
            if (k > grid_level_cap) throw std::invalid_argument("factorized grid pairing capped at level " + std::to_string(grid_level_cap));
        }
        Scalar total(0);
        std::vector<std::uint8_t> block(static_cast<std::size_t>(2 * d));
        for (const auto& [m, c] : f.poly().terms()) {
            Scalar term;
            if constexpr (std::is_same_v<Scalar, Rational>) {
                term = c;
            } else {
                term = to_double(c);
            }
            for (int s = 0; s < k; ++s) {
                for (int i = 0; i < 2 * d; ++i) block[static_cast<std::size_t>(i)] = m.exps[static_cast<std::size_t>(2 * d * s + i)];
                term *= detail::block_moment<Base, Scalar>(base, d, block);
            }
            total += term;
        }
        return total;
    }
};

using FactorizedDirac = FactorizedState<DiracState<Rational>, Rational>;
using FactorizedGrid = FactorizedState<GridState1D, double>;

inline FactorizedDirac factorized(const DiracState<Rational>& base) {
    if (base.k != 1) throw std::invalid_argument("factorized: base must be a one-particle state");
    return FactorizedDirac{base, base.d};
}

inline FactorizedGrid factorized(const GridState1D& base) { return FactorizedGrid{base, 1}; }

// Literal k-fold nested atom sum; quadratic-and-worse cost, kept as the
// cross-check for the factorized pairing path.
inline Rational tensor_pair_nested(const SymObservable& f, const DiracState<Rational>& base) {
    if (base.k != 1 || f.d() != base.d) throw std::invalid_argument("tensor_pair_nested: arity mismatch");
    const int k = f.k();
    const int block = 2 * base.d;
    std::vector<std::size_t> choice(static_cast<std::size_t>(k), 0);
    Rational total(0);
    while (true) {
        Rational w(1);
        std::vector<Rational> pt(static_cast<std::size_t>(block * k));
        for (int s = 0; s < k; ++s) {
            const auto& a = base.atoms[choice[static_cast<std::size_t>(s)]];
            w *= a.weight;
            for (int i = 0; i < block; ++i) pt[static_cast<std::size_t>(block * s + i)] = a.point[static_cast<std::size_t>(i)];
        }
        total += w * f.poly().evaluate<Rational>(pt);
        int s = k - 1;
        while (s >= 0 && choice[static_cast<std::size_t>(s)] + 1 == base.atoms.size()) {
            choice[static_cast<std::size_t>(s)] = 0;
            --s;
        }
        if (s < 0) break;
        ++choice[static_cast<std::size_t>(s)];
    }
    return total;
}

}  // namespace vlasov
