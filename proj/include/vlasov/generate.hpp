#pragma once

#include "vlasov/lie_poisson.hpp"
#include "vlasov/observables.hpp"
#include "vlasov/rng.hpp"

namespace vlasov {

// Sparse random symmetric observable: a few monomials with small rational
// coefficients, symmetrized. Drives every randomized identity suite.
inline SymObservable random_observable(Rng& rng, int k, int d, unsigned max_degree, int max_terms = 4, unsigned cap = kDefaultDegreeCap) {
    const int nvars = 2 * d * k;
    Polynomial raw(nvars);
    const int terms = static_cast<int>(rng.uniform_int(1, max_terms));
    for (int t = 0; t < terms; ++t) {
        Monomial m(static_cast<std::size_t>(nvars));
        unsigned remaining = max_degree == 0 ? 0 : static_cast<unsigned>(rng.uniform_int(0, static_cast<std::int64_t>(max_degree)));
        while (remaining > 0) {
            const auto var = static_cast<std::size_t>(rng.uniform_int(0, nvars - 1));
            m.exps[var] += 1;
            --remaining;
        }
        raw.add_term(m, rng.small_nonzero_rational());
    }
    return SymObservable::from_raw(raw, k, d, cap);
}

inline SymObservable random_nonzero_observable(Rng& rng, int k, int d, unsigned max_degree, int max_terms = 4, unsigned cap = kDefaultDegreeCap) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        SymObservable f = random_observable(rng, k, d, max_degree, max_terms, cap);
        if (!f.is_zero()) return f;
    }
    throw std::logic_error("failed to generate a nonzero observable");
}

// Hierarchy supported on levels 1..max_level with the given density.
inline ObservableHierarchy random_hierarchy(Rng& rng, int d, int max_level, unsigned max_degree, int max_terms = 3, unsigned cap = kDefaultDegreeCap) {
    ObservableHierarchy h(d);
    for (int k = 1; k <= max_level; ++k) {
        if (rng.uniform() < 0.75) h.add_level(k, random_observable(rng, k, d, max_degree, max_terms, cap));
    }
    if (h.is_zero()) h.add_level(1, random_nonzero_observable(rng, 1, d, max_degree, max_terms, cap));
    return h;
}

// Random points with small rational coordinates.
inline ConfigurationQ random_configuration(Rng& rng, int d, int n) {
    ConfigurationQ z(d, n);
    for (auto& c : z.z) c = rng.small_rational();
    return z;
}

inline DiracState<Rational> random_dirac(Rng& rng, int k, int d, int atoms, bool probability = false) {
    DiracState<Rational> out(k, d);
    out.probability = probability;
    std::vector<Rational> weights;
    Rational total(0);
    for (int a = 0; a < atoms; ++a) {
        Rational w = probability ? Rational(static_cast<int>(rng.uniform_int(1, 5))) : rng.small_nonzero_rational();
        weights.push_back(w);
        total += w;
    }
    for (int a = 0; a < atoms; ++a) {
        std::vector<Rational> pt(static_cast<std::size_t>(2 * d * k));
        for (auto& c : pt) c = rng.small_rational();
        out.add_atom(probability ? weights[static_cast<std::size_t>(a)] / total : weights[static_cast<std::size_t>(a)], std::move(pt));
    }
    return out;
}

inline DiracHierarchy<Rational> random_dirac_hierarchy(Rng& rng, int d, int max_level, int atoms) {
    DiracHierarchy<Rational> out(d);
    for (int k = 1; k <= max_level; ++k) out.set_level(k, random_dirac(rng, k, d, atoms));
    return out;
}

// Random expectation-algebra functional: a sum of a couple of products of
// expectations with sparse generators, plus an occasional constant.
inline Functional random_functional(Rng& rng, int d, int max_level, unsigned max_degree, int max_factors = 2, unsigned cap = kDefaultDegreeCap) {
    std::vector<Functional> summands;
    const int n_sum = static_cast<int>(rng.uniform_int(1, 2));
    for (int s = 0; s < n_sum; ++s) {
        const int n_fac = static_cast<int>(rng.uniform_int(1, max_factors));
        std::vector<Functional> factors;
        for (int p = 0; p < n_fac; ++p) factors.push_back(Functional::expectation(random_hierarchy(rng, d, max_level, max_degree, 2, cap)));
        summands.push_back(n_fac == 1 ? factors[0] : Functional::product(std::move(factors)));
    }
    if (rng.uniform() < 0.3) summands.push_back(Functional::constant(rng.small_rational()));
    return summands.size() == 1 ? summands[0] : Functional::sum(std::move(summands));
}

// Same shape but with every generator concentrated at one level, for
// functionals on a single-algebra dual.
inline Functional random_single_level_functional(Rng& rng, int level, int d, unsigned max_degree, int max_factors = 2, unsigned cap = kDefaultDegreeCap) {
    std::vector<Functional> summands;
    const int n_sum = static_cast<int>(rng.uniform_int(1, 2));
    for (int s = 0; s < n_sum; ++s) {
        const int n_fac = static_cast<int>(rng.uniform_int(1, max_factors));
        std::vector<Functional> factors;
        for (int p = 0; p < n_fac; ++p) factors.push_back(Functional::expectation(random_nonzero_observable(rng, level, d, max_degree, 2, cap)));
        summands.push_back(n_fac == 1 ? factors[0] : Functional::product(std::move(factors)));
    }
    if (rng.uniform() < 0.3) summands.push_back(Functional::constant(rng.small_rational()));
    return summands.size() == 1 ? summands[0] : Functional::sum(std::move(summands));
}

// Random even polynomial potential in d displacement variables.
inline PolynomialPotential random_potential(Rng& rng, int d, unsigned max_half_degree = 2) {
    Polynomial w(d);
    const int terms = static_cast<int>(rng.uniform_int(1, 3));
    for (int t = 0; t < terms; ++t) {
        Monomial m(static_cast<std::size_t>(d));
        unsigned pairs = static_cast<unsigned>(rng.uniform_int(0, static_cast<std::int64_t>(max_half_degree)));
        while (pairs > 0) {
            m.exps[static_cast<std::size_t>(rng.uniform_int(0, d - 1))] += 2;
            --pairs;
        }
        w.add_term(m, rng.small_nonzero_rational());
    }
    return PolynomialPotential(d, w);
}

}  // namespace vlasov
