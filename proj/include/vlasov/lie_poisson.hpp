#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "vlasov/hierarchy.hpp"
#include "vlasov/states.hpp"

namespace vlasov {

// ---------------------------------------------------------------------------
// Exact polynomial pair potentials.
// ---------------------------------------------------------------------------

// Even polynomial W: R^d -> R acting through displacements W(x_i - x_j).
// Evenness keeps W(x_i - x_j) symmetric under particle exchange.
class PolynomialPotential {
public:
    PolynomialPotential(int d, Polynomial w) : d_(d), w_(std::move(w)) {
        if (w_.nvars() != d) throw std::invalid_argument("potential: polynomial must have d variables");
        for (const auto& [m, c] : w_.terms()) {
            if (m.degree() % 2 != 0) throw std::invalid_argument("potential: W(-x) = W(x) requires even-degree terms");
        }
    }

    static PolynomialPotential zero(int d) { return PolynomialPotential(d, Polynomial(d)); }

    int d() const { return d_; }
    const Polynomial& displacement_poly() const { return w_; }

    Rational at_zero() const {
        std::vector<Rational> origin(static_cast<std::size_t>(d_), Rational(0));
        return w_.evaluate<Rational>(origin);
    }

    template <class T>
    T operator()(const std::vector<T>& u) const {
        return w_.evaluate<T>(u);
    }

    // W(x_i - x_j) as a raw polynomial on (R^{2d})^n, 1-based particle indices.
    Polynomial displacement_between(int i, int j, int n_total) const {
        Polynomial out = Polynomial::constant(2 * d_ * n_total, Rational(0));
        for (const auto& [m, c] : w_.terms()) {
            Polynomial term = Polynomial::constant(2 * d_ * n_total, c);
            for (int cvar = 0; cvar < d_; ++cvar) {
                Polynomial diff = Polynomial::variable(2 * d_ * n_total, detail::var_index(d_, i - 1, false, cvar));
                diff -= Polynomial::variable(2 * d_ * n_total, detail::var_index(d_, j - 1, false, cvar));
                for (unsigned e = 0; e < m.exps[static_cast<std::size_t>(cvar)]; ++e) term = term * diff;
            }
            out += term;
        }
        return out;
    }

    // W(x_1 - x_2) as a two-particle observable.
    SymObservable two_particle(unsigned cap = kDefaultDegreeCap) const {
        return SymObservable::trusted(displacement_between(1, 2, 2), 2, d_, cap);
    }

private:
    int d_;
    Polynomial w_;
};

// Kinetic observable |v|^2 / 2 at level 1.
inline SymObservable kinetic_observable(int d, unsigned cap = kDefaultDegreeCap) {
    Polynomial p(2 * d);
    for (int c = 0; c < d; ++c) {
        Polynomial vc = Polynomial::variable(2 * d, detail::var_index(d, 0, true, c));
        p += vc * vc;
    }
    p *= Rational(1, 2);
    return SymObservable::trusted(std::move(p), 1, d, cap);
}

// ---------------------------------------------------------------------------
// Functionals on dual state spaces: the algebra generated by expectations and
// constants under sums and pointwise products.
// ---------------------------------------------------------------------------

class Functional {
public:
    enum class Kind { Constant, Expectation, Sum, Product };

    static Functional constant(Rational c) {
        Functional f;
        f.kind_ = Kind::Constant;
        f.constant_ = std::move(c);
        return f;
    }

    static Functional expectation(ObservableHierarchy generator) {
        Functional f;
        f.kind_ = Kind::Expectation;
        f.generator_ = std::move(generator);
        return f;
    }

    static Functional expectation(const SymObservable& g) { return expectation(ObservableHierarchy::single(g)); }

    static Functional sum(std::vector<Functional> children) {
        Functional f;
        f.kind_ = Kind::Sum;
        f.children_ = std::move(children);
        return f;
    }

    static Functional product(std::vector<Functional> children) {
        Functional f;
        f.kind_ = Kind::Product;
        f.children_ = std::move(children);
        return f;
    }

    Kind kind() const { return kind_; }
    const Rational& constant_value() const { return constant_; }
    const ObservableHierarchy& generator() const { return generator_; }
    const std::vector<Functional>& children() const { return children_; }

    // Highest generator level appearing anywhere in the tree.
    int max_level() const {
        switch (kind_) {
            case Kind::Constant: return 0;
            case Kind::Expectation: return generator_.max_level();
            default: {
                int m = 0;
                for (const auto& c : children_) m = std::max(m, c.max_level());
                return m;
            }
        }
    }

private:
    Kind kind_ = Kind::Constant;
    Rational constant_{0};
    ObservableHierarchy generator_;
    std::vector<Functional> children_;
};

namespace detail {

template <class Scalar>
Scalar constant_as(const Rational& c) {
    if constexpr (std::is_same_v<Scalar, Rational>) {
        return c;
    } else {
        return to_double(c);
    }
}

}  // namespace detail

// State is anything exposing pair_level(k, SymObservable) -> Scalar.
template <class State>
auto eval_functional(const Functional& f, const State& state) -> decltype(state.pair_level(1, std::declval<const SymObservable&>())) {
    using Scalar = decltype(state.pair_level(1, std::declval<const SymObservable&>()));
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return detail::constant_as<Scalar>(f.constant_value());
        case Functional::Kind::Expectation: {
            Scalar total(0);
            for (const auto& [k, g] : f.generator().levels()) total += state.pair_level(k, g);
            return total;
        }
        case Functional::Kind::Sum: {
            Scalar total(0);
            for (const auto& c : f.children()) total += eval_functional(c, state);
            return total;
        }
        case Functional::Kind::Product: {
            Scalar total(1);
            for (const auto& c : f.children()) total *= eval_functional(c, state);
            return total;
        }
    }
    throw std::logic_error("unreachable functional kind");
}

// Gateaux derivative at an exact state, identified with an observable
// hierarchy: expectations have constant derivative equal to their generator,
// constants vanish, products follow Leibniz with scalar sibling values.
template <class State>
ObservableHierarchy gateaux_derivative(const Functional& f, const State& state, int d) {
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return ObservableHierarchy(d);
        case Functional::Kind::Expectation:
            return f.generator();
        case Functional::Kind::Sum: {
            ObservableHierarchy total(d);
            for (const auto& c : f.children()) total += gateaux_derivative(c, state, d);
            return total;
        }
        case Functional::Kind::Product: {
            ObservableHierarchy total(d);
            const auto n = f.children().size();
            for (std::size_t i = 0; i < n; ++i) {
                Rational scale(1);
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) scale *= eval_functional(f.children()[j], state);
                }
                if (scale == 0) continue;
                total += gateaux_derivative(f.children()[i], state, d) * scale;
            }
            return total;
        }
    }
    throw std::logic_error("unreachable functional kind");
}

// Derivative applied to a direction state, usable in float mode as well; this
// is the quantity the finite-difference gradient checks probe.
template <class State, class Direction>
auto gateaux_apply(const Functional& f, const State& state, const Direction& direction) -> decltype(eval_functional(f, state)) {
    using Scalar = decltype(eval_functional(f, state));
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return Scalar(0);
        case Functional::Kind::Expectation:
            return eval_functional(f, direction);
        case Functional::Kind::Sum: {
            Scalar total(0);
            for (const auto& c : f.children()) total += gateaux_apply(c, state, direction);
            return total;
        }
        case Functional::Kind::Product: {
            Scalar total(0);
            const auto n = f.children().size();
            for (std::size_t i = 0; i < n; ++i) {
                Scalar scale(1);
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i) scale *= eval_functional(f.children()[j], state);
                }
                total += scale * gateaux_apply(f.children()[i], state, direction);
            }
            return total;
        }
    }
    throw std::logic_error("unreachable functional kind");
}

// ---------------------------------------------------------------------------
// Lie-Poisson brackets on the dual spaces.
// ---------------------------------------------------------------------------

// Which Lie algebra supplies the bracket of the derivatives.
struct AlgebraSpec {
    enum class Type { SingleLevel, FiniteHierarchy, LimitHierarchy };
    Type type = Type::SingleLevel;
    int n = 1;  // level k for SingleLevel, particle number N for FiniteHierarchy

    static AlgebraSpec single(int k) { return {Type::SingleLevel, k}; }
    static AlgebraSpec finite(int n) { return {Type::FiniteHierarchy, n}; }
    static AlgebraSpec limit() { return {Type::LimitHierarchy, 0}; }
};

inline ObservableHierarchy algebra_bracket(const ObservableHierarchy& df, const ObservableHierarchy& dg, const AlgebraSpec& spec) {
    switch (spec.type) {
        case AlgebraSpec::Type::SingleLevel: {
            for (const auto* h : {&df, &dg}) {
                for (const auto& [k, g] : h->levels()) {
                    if (k != spec.n) throw std::invalid_argument("single-level bracket: generator outside level " + std::to_string(spec.n));
                }
            }
            ObservableHierarchy out(df.d());
            if (df.has_level(spec.n) && dg.has_level(spec.n)) {
                const SymObservable b = lie_bracket(df.level(spec.n), dg.level(spec.n));
                out.add_level(spec.n, b);
            }
            return out;
        }
        case AlgebraSpec::Type::FiniteHierarchy:
            return hierarchy_bracket(df, dg, spec.n);
        case AlgebraSpec::Type::LimitHierarchy:
            return limit_bracket(df, dg);
    }
    throw std::logic_error("unreachable algebra type");
}

// {F, G}(Gamma) = < [dF[Gamma], dG[Gamma]], Gamma >, with the bracket taken in
// the chosen algebra. Exact on exact states.
template <class State>
Rational lie_poisson_bracket(const Functional& f, const Functional& g, const State& state, const AlgebraSpec& spec, int d) {
    const ObservableHierarchy df = gateaux_derivative(f, state, d);
    const ObservableHierarchy dg = gateaux_derivative(g, state, d);
    const ObservableHierarchy b = algebra_bracket(df, dg, spec);
    Rational total(0);
    for (const auto& [k, obs] : b.levels()) total += state.pair_level(k, obs);
    return total;
}

// ---------------------------------------------------------------------------
// Hamiltonians.
// ---------------------------------------------------------------------------

// Energy per particle of the N-body system with self-interaction added back:
// (1/N)(H_N + W(0)) with H_N = 1/2 sum |v_i|^2 + (1/N) sum_{i != j} W(x_i-x_j).
template <class T>
T hamiltonian_newton(const Configuration<T>& z, const PolynomialPotential& w) {
    const int n = z.n, d = z.d;
    T kinetic(0);
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) kinetic += z.v(i, c) * z.v(i, c);
    }
    kinetic *= detail::constant_as<T>(Rational(1, 2));
    T potential(0);
    std::vector<T> u(static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (int c = 0; c < d; ++c) u[static_cast<std::size_t>(c)] = z.x(i, c) - z.x(j, c);
            potential += w(u);
        }
    }
    T total = kinetic + potential / T(n) + detail::constant_as<T>(w.at_zero());
    return total / T(n);
}

// The same energy as a level-N observable (the Liouville generator).
inline SymObservable newton_observable(const PolynomialPotential& w, int n_total, unsigned cap = kDefaultDegreeCap) {
    const int d = w.d();
    Polynomial p(2 * d * n_total);
    for (int i = 1; i <= n_total; ++i) {
        for (int c = 0; c < d; ++c) {
            Polynomial vc = Polynomial::variable(2 * d * n_total, detail::var_index(d, i - 1, true, c));
            p += vc * vc * Rational(1, 2 * n_total);
        }
    }
    for (int i = 1; i <= n_total; ++i) {
        for (int j = 1; j <= n_total; ++j) {
            if (i == j) continue;
            p += w.displacement_between(i, j, n_total) * Rational(1, static_cast<int>(n_total) * static_cast<int>(n_total));
        }
    }
    p += Polynomial::constant(2 * d * n_total, w.at_zero() / n_total);
    return SymObservable::trusted(std::move(p), n_total, d, cap);
}

template <class R>
R hamiltonian_liouville(const DiracState<R>& gamma, const PolynomialPotential& w, unsigned cap = kDefaultDegreeCap) {
    return pairing(newton_observable(w, gamma.k, cap), gamma);
}

// Generator hierarchies of the two linear hierarchy Hamiltonians. The finite-N
// weights converge componentwise to the limit weights.
inline ObservableHierarchy bbgky_weights(const PolynomialPotential& w, int n_total, unsigned cap = kDefaultDegreeCap) {
    ObservableHierarchy h(w.d());
    h.set_level(1, kinetic_observable(w.d(), cap));
    SymObservable w2 = w.two_particle(cap) * Rational(n_total - 1, n_total);
    Polynomial shift = Polynomial::constant(2 * w.d() * 2, w.at_zero() / n_total);
    w2 += SymObservable::trusted(std::move(shift), 2, w.d(), cap);
    h.set_level(2, w2);
    return h;
}

inline ObservableHierarchy vlasov_hierarchy_weights(const PolynomialPotential& w, unsigned cap = kDefaultDegreeCap) {
    ObservableHierarchy h(w.d());
    h.set_level(1, kinetic_observable(w.d(), cap));
    h.set_level(2, w.two_particle(cap));
    return h;
}

template <class State>
auto hamiltonian_bbgky(const State& state, const PolynomialPotential& w, int n_total) {
    return eval_functional(Functional::expectation(bbgky_weights(w, n_total)), state);
}

template <class State>
auto hamiltonian_vlasov_hierarchy(const State& state, const PolynomialPotential& w) {
    return eval_functional(Functional::expectation(vlasov_hierarchy_weights(w)), state);
}

// Vlasov energy of a one-particle state: kinetic expectation plus the
// two-particle potential expectation against the tensor square.
template <class Base, class Scalar>
Scalar hamiltonian_vlasov(const FactorizedState<Base, Scalar>& state, const PolynomialPotential& w) {
    Scalar total = state.pair_level(1, kinetic_observable(w.d()));
    total += state.pair_level(2, w.two_particle());
    return total;
}

inline Rational hamiltonian_vlasov(const DiracState<Rational>& gamma, const PolynomialPotential& w) {
    return hamiltonian_vlasov(factorized(gamma), w);
}

// ---------------------------------------------------------------------------
// Weak-form Hamiltonian vector fields.
// ---------------------------------------------------------------------------

inline Polynomial standard_bracket_raw(const Polynomial& a, const Polynomial& b, int slots, int d) {
    Polynomial out(2 * d * slots);
    for (int s = 0; s < slots; ++s) {
        for (int c = 0; c < d; ++c) {
            const int xi = detail::var_index(d, s, false, c);
            const int vi = detail::var_index(d, s, true, c);
            out += a.derivative(xi) * b.derivative(vi);
            out -= a.derivative(vi) * b.derivative(xi);
        }
    }
    return out;
}

// Hamiltonian vector field of a functional with derivative hierarchy dg,
// represented weakly: pair(l, f, state) evaluates <f, X(state)^{(l)}> by
// moving all derivatives onto test observables. integrands(l, f) exposes the
// symmetric integrand per source level for symbolic comparisons; for linear
// functionals it does not depend on the state.
class WeakVectorField {
public:
    WeakVectorField(ObservableHierarchy dg, AlgebraSpec spec) : dg_(std::move(dg)), spec_(std::move(spec)) {}

    template <class State>
    static WeakVectorField of(const Functional& g, const State& state, const AlgebraSpec& spec, int d) {
        return WeakVectorField(gateaux_derivative(g, state, d), spec);
    }

    const ObservableHierarchy& generator() const { return dg_; }

    // Level k -> symmetric integrand to pair with the level-k state component.
    std::map<int, SymObservable> integrands(int l, const SymObservable& f) const {
        if (f.k() != l) throw std::invalid_argument("weak field: test observable level mismatch");
        const int d = f.d();
        std::map<int, SymObservable> out;

        if (spec_.type == AlgebraSpec::Type::SingleLevel) {
            if (l != spec_.n) throw std::invalid_argument("weak field: single-level test must be at level " + std::to_string(spec_.n));
            if (dg_.has_level(l)) accumulate(out, l, lie_bracket(f, dg_.level(l)));
            return out;
        }

        const bool finite = spec_.type == AlgebraSpec::Type::FiniteHierarchy;
        if (finite && l > spec_.n) throw std::invalid_argument("weak field: level exceeds N");
        for (const auto& [j, g] : dg_.levels()) {
            const int r0 = finite ? std::max(1, l + j - spec_.n) : 1;
            const int rmax = finite ? std::min(l, j) : 1;
            const int k = finite ? std::min(l + j - 1, spec_.n) : l + j - 1;
            for (int r = r0; r <= rmax; ++r) {
                // u = sum over ordered r-tuples from {1..l} of g placed on
                // (tuple, l+1, ..., l+j-r).
                Polynomial u(2 * d * k);
                for (const auto& tup : detail::ordered_tuples(l, r)) {
                    std::vector<int> slot_map(static_cast<std::size_t>(j));
                    for (int s = 0; s < j; ++s) slot_map[static_cast<std::size_t>(s)] = s < r ? tup[static_cast<std::size_t>(s)] - 1 : l + (s - r);
                    u += g.poly().relabel(d, slot_map, k);
                }
                std::vector<int> f_map(static_cast<std::size_t>(l));
                for (int s = 0; s < l; ++s) f_map[static_cast<std::size_t>(s)] = s;
                const Polynomial phi = f.poly().relabel(d, f_map, k);
                Polynomial b = standard_bracket_raw(phi, u, k, d);
                const Rational coeff = finite ? bracket_coefficient(l, j, spec_.n, r) * Rational(binomial(static_cast<unsigned>(j), static_cast<unsigned>(r))) : Rational(j);
                b *= coeff;
                const unsigned cap = std::max(f.degree_cap(), g.degree_cap());
                accumulate(out, k, SymObservable::from_raw(b, k, d, cap));
            }
        }
        return out;
    }

    template <class State>
    auto pair(int l, const SymObservable& f, const State& state) const -> decltype(state.pair_level(1, f)) {
        using Scalar = decltype(state.pair_level(1, f));
        Scalar total(0);
        for (const auto& [k, obs] : integrands(l, f)) total += state.pair_level(k, obs);
        return total;
    }

private:
    static void accumulate(std::map<int, SymObservable>& out, int k, const SymObservable& obs) {
        if (obs.is_zero()) return;
        auto it = out.find(k);
        if (it == out.end()) {
            out.emplace(k, obs);
        } else {
            it->second += obs;
        }
    }

    ObservableHierarchy dg_;
    AlgebraSpec spec_;
};

// ---------------------------------------------------------------------------
// Poisson-morphism residuals. Each returns |pullback bracket - bracket of
// images|, which the structure theory says is exactly zero.
// ---------------------------------------------------------------------------

// Pullback of an expectation-algebra functional through the empirical-measure
// or law-of-configuration maps: an N-particle symmetric polynomial.
enum class ConfigMap { EmpiricalMeasure, Law };

inline SymObservable pullback_polynomial(const Functional& f, ConfigMap map, int n_total, int d, unsigned cap) {
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return SymObservable::trusted(Polynomial::constant(2 * d * n_total, f.constant_value()), n_total, d, cap);
        case Functional::Kind::Expectation: {
            SymObservable acc(n_total, d, cap);
            for (const auto& [k, g] : f.generator().levels()) {
                if (map == ConfigMap::EmpiricalMeasure) {
                    if (k != 1) throw std::invalid_argument("empirical-measure pullback needs level-1 generators");
                    acc += embed(SymObservable::trusted(g.poly(), 1, d, cap), n_total);
                } else {
                    if (k != n_total) throw std::invalid_argument("law pullback needs level-N generators");
                    acc += SymObservable::trusted(g.poly(), n_total, d, cap);
                }
            }
            return acc;
        }
        case Functional::Kind::Sum: {
            SymObservable acc(n_total, d, cap);
            for (const auto& c : f.children()) acc += pullback_polynomial(c, map, n_total, d, cap);
            return acc;
        }
        case Functional::Kind::Product: {
            SymObservable acc = SymObservable::trusted(Polynomial::constant(2 * d * n_total, Rational(1)), n_total, d, cap);
            for (const auto& c : f.children()) acc = acc * pullback_polynomial(c, map, n_total, d, cap);
            return acc;
        }
    }
    throw std::logic_error("unreachable functional kind");
}

// Empirical measure: configurations with N {.,.} vs the one-particle dual.
inline Rational morphism_residual_empirical(const Functional& f, const Functional& g, const ConfigurationQ& z, unsigned cap = 2 * kDefaultDegreeCap) {
    const SymObservable fp = pullback_polynomial(f, ConfigMap::EmpiricalMeasure, z.n, z.d, cap);
    const SymObservable gp = pullback_polynomial(g, ConfigMap::EmpiricalMeasure, z.n, z.d, cap);
    const Rational lhs = evaluate(lie_bracket(fp, gp), z);
    const SingleLevelState<Rational> mu{empirical_measure(z)};
    const Rational rhs = lie_poisson_bracket(f, g, mu, AlgebraSpec::single(1), z.d);
    return rational_abs(lhs - rhs);
}

// Law map: configurations with N {.,.} vs the N-particle dual.
inline Rational morphism_residual_law(const Functional& f, const Functional& g, const ConfigurationQ& z, unsigned cap = 2 * kDefaultDegreeCap) {
    const SymObservable fp = pullback_polynomial(f, ConfigMap::Law, z.n, z.d, cap);
    const SymObservable gp = pullback_polynomial(g, ConfigMap::Law, z.n, z.d, cap);
    const Rational lhs = evaluate(lie_bracket(fp, gp), z);
    const SingleLevelState<Rational> gamma{liouville_state(z)};
    const Rational rhs = lie_poisson_bracket(f, g, gamma, AlgebraSpec::single(z.n), z.d);
    return rational_abs(lhs - rhs);
}

// Marginal map: N-particle dual vs the N-hierarchy dual. The pullback of an
// expectation sums the embeddings of its generator levels.
inline Functional pullback_through_marginals(const Functional& f, int n_total, int d, unsigned cap) {
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return f;
        case Functional::Kind::Expectation: {
            SymObservable acc(n_total, d, cap);
            for (const auto& [k, g] : f.generator().levels()) acc += embed(g, n_total);
            return Functional::expectation(acc);
        }
        case Functional::Kind::Sum: {
            std::vector<Functional> out;
            for (const auto& c : f.children()) out.push_back(pullback_through_marginals(c, n_total, d, cap));
            return Functional::sum(std::move(out));
        }
        case Functional::Kind::Product: {
            std::vector<Functional> out;
            for (const auto& c : f.children()) out.push_back(pullback_through_marginals(c, n_total, d, cap));
            return Functional::product(std::move(out));
        }
    }
    throw std::logic_error("unreachable functional kind");
}

inline Rational morphism_residual_marginals(const Functional& f, const Functional& g, const DiracState<Rational>& gamma, unsigned cap = kDefaultDegreeCap) {
    const int n_total = gamma.k;
    const Functional fp = pullback_through_marginals(f, n_total, gamma.d, cap);
    const Functional gp = pullback_through_marginals(g, n_total, gamma.d, cap);
    const SingleLevelState<Rational> base{gamma};
    const Rational lhs = lie_poisson_bracket(fp, gp, base, AlgebraSpec::single(n_total), gamma.d);
    const DiracHierarchy<Rational> hier = marginal_hierarchy(gamma);
    const Rational rhs = lie_poisson_bracket(f, g, hier, AlgebraSpec::finite(n_total), gamma.d);
    return rational_abs(lhs - rhs);
}

// Contracts all slots but the first of a level-j observable against a
// one-particle state; the building block of the factorization pullback
// derivative.
inline SymObservable partial_pair_first_slot(const SymObservable& g, const DiracState<Rational>& mu) {
    if (mu.k != 1 || mu.d != g.d()) throw std::invalid_argument("partial pairing: arity mismatch");
    const int d = g.d();
    Polynomial out(2 * d);
    std::vector<std::uint8_t> block(static_cast<std::size_t>(2 * d));
    for (const auto& [m, c] : g.poly().terms()) {
        Rational scale = c;
        for (int s = 1; s < g.k(); ++s) {
            for (int i = 0; i < 2 * d; ++i) block[static_cast<std::size_t>(i)] = m.exps[static_cast<std::size_t>(2 * d * s + i)];
            scale *= detail::block_moment<DiracState<Rational>, Rational>(mu, d, block);
        }
        if (scale == 0) continue;
        Monomial head(static_cast<std::size_t>(2 * d));
        for (int i = 0; i < 2 * d; ++i) head.exps[static_cast<std::size_t>(i)] = m.exps[static_cast<std::size_t>(i)];
        out.add_term(head, scale);
    }
    return SymObservable::trusted(std::move(out), 1, d, g.degree_cap());
}

// Derivative of the factorization pullback: sum over levels of j times the
// partial pairing of the derivative generator at the tensor-power state.
inline SymObservable factorization_pullback_derivative(const Functional& f, const DiracState<Rational>& mu, unsigned cap = kDefaultDegreeCap) {
    const FactorizedDirac state = factorized(mu);
    const ObservableHierarchy df = gateaux_derivative(f, state, mu.d);
    SymObservable total(1, mu.d, cap);
    for (const auto& [j, g] : df.levels()) total += partial_pair_first_slot(g, mu) * Rational(j);
    return total;
}

// Factorization map: one-particle dual vs the limit-hierarchy dual.
inline Rational morphism_residual_factorization(const Functional& f, const Functional& g, const DiracState<Rational>& mu, unsigned cap = kDefaultDegreeCap) {
    const SymObservable df = factorization_pullback_derivative(f, mu, cap);
    const SymObservable dg = factorization_pullback_derivative(g, mu, cap);
    const Rational lhs = pairing(lie_bracket(df, dg), mu);
    const FactorizedDirac state = factorized(mu);
    const Rational rhs = lie_poisson_bracket(f, g, state, AlgebraSpec::limit(), mu.d);
    return rational_abs(lhs - rhs);
}

}  // namespace vlasov
