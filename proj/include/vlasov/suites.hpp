#pragma once

#include <string>
#include <vector>

#include "vlasov/generate.hpp"
#include "vlasov/io.hpp"
#include "vlasov/linalg.hpp"

namespace vlasov {

struct CheckReport {
    std::string name;
    int checks = 0;
    std::vector<std::string> failures;

    explicit CheckReport(std::string name_) : name(std::move(name_)) {}

    bool ok() const { return failures.empty(); }

    void merge(const CheckReport& other) {
        checks += other.checks;
        for (const auto& f : other.failures) failures.push_back(f);
    }
};

inline constexpr const char* kReportSchema = "vlh-report/1";

inline Json report_json(const std::vector<CheckReport>& reports) {
    Json suites = Json::array();
    for (const auto& r : reports) {
        Json item{{"suite", r.name}, {"checks", r.checks}, {"failures", static_cast<int>(r.failures.size())}};
        if (!r.failures.empty()) item["first_counterexample"] = Json::parse(r.failures.front());
        suites.push_back(item);
    }
    return Json{{"schema", kReportSchema}, {"suites", suites}};
}

namespace detail {

inline std::string triple_counterexample(const std::string& suite, int k_or_n, int d, const Json& f, const Json& g, const Json& h, const std::string& what) {
    return Json{{"suite", suite}, {"size", k_or_n}, {"d", d}, {"f", f}, {"g", g}, {"h", h}, {"violated", what}}.dump();
}

}  // namespace detail

// Antisymmetry, bilinearity, Jacobi, closure and Leibniz for the k-particle
// observable bracket, on random rational polynomial triples.
inline CheckReport single_algebra_suite(Rng& rng, int triples, int k_max, int d_max, unsigned degree, bool inject_fault = false) {
    CheckReport report{"single-algebra-bracket"};
    for (int trial = 0; trial < triples; ++trial) {
        const int k = 1 + trial % k_max;
        const int d = 1 + (trial / k_max) % d_max;
        const SymObservable f = random_observable(rng, k, d, degree, 3);
        const SymObservable g = random_observable(rng, k, d, degree, 3);
        const SymObservable h = random_observable(rng, k, d, degree, 3);
        auto fail = [&](const std::string& what) {
            report.failures.push_back(detail::triple_counterexample(report.name, k, d, f.str(), g.str(), h.str(), what));
        };

        if (!(lie_bracket(f, g) + lie_bracket(g, f)).is_zero()) fail("antisymmetry");
        const Rational a = rng.small_rational(), b = rng.small_rational();
        if (!(lie_bracket(a * f + b * g, h) == a * lie_bracket(f, h) + b * lie_bracket(g, h))) fail("bilinearity");

        SymObservable jac = lie_bracket(f, lie_bracket(g, h));
        jac += lie_bracket(g, lie_bracket(h, f));
        jac += lie_bracket(h, lie_bracket(f, g));
        if (inject_fault && trial == 0) jac += SymObservable::trusted(Polynomial::constant(2 * d * k, Rational(1)), k, d);
        if (!jac.is_zero()) fail("jacobi");

        const SymObservable br = lie_bracket(f, g);
        if (!(SymObservable::from_raw(br.poly(), k, d, br.degree_cap()) == br)) fail("closure");
        if (!(poisson_bracket(f, g * h) == g * poisson_bracket(f, h) + h * poisson_bracket(f, g))) fail("leibniz");
        report.checks += 5;
    }
    return report;
}

// The same identity battery for the N-hierarchy bracket.
inline CheckReport finite_hierarchy_suite(Rng& rng, int triples, int n_max, int level_max, unsigned degree) {
    CheckReport report{"finite-hierarchy-bracket"};
    for (int trial = 0; trial < triples; ++trial) {
        const int n = 2 + trial % (n_max - 1);
        const int d = 1 + trial % 2;
        const ObservableHierarchy F = random_hierarchy(rng, d, level_max, degree, 2);
        const ObservableHierarchy G = random_hierarchy(rng, d, level_max, degree, 2);
        const ObservableHierarchy H = random_hierarchy(rng, d, level_max, degree, 2);
        auto fail = [&](const std::string& what) {
            report.failures.push_back(detail::triple_counterexample(report.name, n, d, to_json(F), to_json(G), to_json(H), what));
        };

        if (!hierarchy_bracket(F, F, n).is_zero()) fail("antisymmetry");
        const Rational a = rng.small_rational(), b = rng.small_rational();
        if (!(hierarchy_bracket(a * F + b * G, H, n) == a * hierarchy_bracket(F, H, n) + b * hierarchy_bracket(G, H, n))) fail("bilinearity");

        ObservableHierarchy jac = hierarchy_bracket(F, hierarchy_bracket(G, H, n), n);
        jac += hierarchy_bracket(G, hierarchy_bracket(H, F, n), n);
        jac += hierarchy_bracket(H, hierarchy_bracket(F, G, n), n);
        if (!jac.is_zero()) fail("jacobi");
        report.checks += 3;
    }
    return report;
}

// And for the limit bracket.
inline CheckReport limit_hierarchy_suite(Rng& rng, int triples, int level_max, unsigned degree) {
    CheckReport report{"limit-hierarchy-bracket"};
    for (int trial = 0; trial < triples; ++trial) {
        const int d = 1 + trial % 2;
        const ObservableHierarchy F = random_hierarchy(rng, d, level_max, degree, 2);
        const ObservableHierarchy G = random_hierarchy(rng, d, level_max, degree, 2);
        const ObservableHierarchy H = random_hierarchy(rng, d, level_max, degree, 2);
        auto fail = [&](const std::string& what) {
            report.failures.push_back(detail::triple_counterexample(report.name, 0, d, to_json(F), to_json(G), to_json(H), what));
        };

        if (!limit_bracket(F, F).is_zero()) fail("antisymmetry");
        const Rational a = rng.small_rational(), b = rng.small_rational();
        if (!(limit_bracket(a * F + b * G, H) == a * limit_bracket(F, H) + b * limit_bracket(G, H))) fail("bilinearity");

        ObservableHierarchy jac = limit_bracket(F, limit_bracket(G, H));
        jac += limit_bracket(G, limit_bracket(H, F));
        jac += limit_bracket(H, limit_bracket(F, G));
        if (!jac.is_zero()) fail("jacobi");
        report.checks += 3;
    }
    return report;
}

// Composition, injectivity, filtration and the explicit-vs-definitional
// cross-validation of the hierarchy bracket.
inline CheckReport embedding_suite(Rng& rng, int n_max, unsigned degree, int cross_pairs) {
    CheckReport report{"embedding-maps"};
    // Composition identity for every admissible (a, b, N).
    for (int n = 1; n <= n_max; ++n) {
        for (int b = 1; b <= n; ++b) {
            for (int a = 1; a <= b; ++a) {
                const SymObservable f = random_observable(rng, a, 1, std::min(degree, 3u), 2);
                ++report.checks;
                if (!embed_composition_holds(a, b, n, f)) {
                    report.failures.push_back(Json{{"suite", report.name}, {"violated", "composition"}, {"a", a}, {"b", b}, {"N", n}, {"f", f.str()}}.dump());
                }
            }
        }
    }
    // Injectivity through exact rank on the degree-bounded symmetric space.
    for (int k = 1; k <= 3; ++k) {
        for (int n = k; n <= n_max; ++n) {
            const auto [rank, dim] = embed_rank(k, 1, n, std::min(degree, 3u));
            ++report.checks;
            if (rank != dim) {
                report.failures.push_back(Json{{"suite", report.name}, {"violated", "injectivity"}, {"k", k}, {"N", n}, {"rank", rank}, {"dim", dim}}.dump());
            }
        }
    }
    // Filtration identity for all l, j <= 3, N <= n_max.
    for (int n = 1; n <= n_max; ++n) {
        for (int l = 1; l <= std::min(3, n); ++l) {
            for (int j = 1; j <= std::min(3, n); ++j) {
                const SymObservable f = random_observable(rng, l, 1, degree, 2);
                const SymObservable g = random_observable(rng, j, 1, degree, 2);
                const SymObservable h = filtration_component(f, g, n);
                ++report.checks;
                if (!(embed(h, n) == lie_bracket(embed(f, n), embed(g, n)))) {
                    report.failures.push_back(Json{{"suite", report.name}, {"violated", "filtration"}, {"l", l}, {"j", j}, {"N", n}, {"f", f.str()}, {"g", g.str()}}.dump());
                }
            }
        }
    }
    // Explicit bracket formula against the inversion-based definition.
    for (int pair = 0; pair < cross_pairs; ++pair) {
        const int n = 2 + pair % 2;
        const ObservableHierarchy F = random_hierarchy(rng, 1, 2, degree, 2);
        const ObservableHierarchy G = random_hierarchy(rng, 1, 2, degree, 2);
        ++report.checks;
        if (!(hierarchy_bracket(F, G, n) == hierarchy_bracket_by_inversion(F, G, n))) {
            report.failures.push_back(Json{{"suite", report.name}, {"violated", "explicit-vs-definitional"}, {"N", n}, {"F", to_json(F)}, {"G", to_json(G)}}.dump());
        }
    }
    return report;
}

// Duality separation: a degree-bounded observable annihilating all small
// symmetrized Dirac states must vanish. Checked by exact rank of the pairing
// matrix between the symmetric basis and random states.
inline CheckReport separation_suite(Rng& rng, int k_max, unsigned degree) {
    CheckReport report{"dual-separation"};
    for (int k = 1; k <= k_max; ++k) {
        const auto basis = symmetric_basis(k, 1, degree);
        const int max_atoms = static_cast<int>(degree) + 1;
        std::vector<DiracState<Rational>> states;
        const std::size_t budget = 4 * basis.size();
        RationalMatrix mat(budget, basis.size());
        std::size_t row = 0;
        bool separated = false;
        while (row < budget) {
            const auto gamma = random_dirac(rng, k, 1, 1 + static_cast<int>(rng.uniform_int(0, max_atoms - 1)));
            for (std::size_t c = 0; c < basis.size(); ++c) mat.at(row, c) = pairing(basis[c], gamma);
            ++row;
            if (row >= basis.size()) {
                RationalMatrix sub(row, basis.size());
                for (std::size_t r = 0; r < row; ++r) {
                    for (std::size_t c = 0; c < basis.size(); ++c) sub.at(r, c) = mat.at(r, c);
                }
                if (rank_exact(sub) == basis.size()) {
                    separated = true;
                    break;
                }
            }
        }
        ++report.checks;
        if (!separated) {
            report.failures.push_back(Json{{"suite", report.name}, {"violated", "separation"}, {"k", k}, {"degree", degree}, {"basis_dim", basis.size()}}.dump());
        }
    }
    return report;
}

// Residuals of the four structure maps; every one must be exactly zero.
inline CheckReport morphism_suite(Rng& rng, int trials, unsigned degree, int level_max, bool inject_fault = false) {
    CheckReport report{"poisson-morphisms"};
    for (int trial = 0; trial < trials; ++trial) {
        const int d = 1 + trial % 2;

        {
            const int n = 2 + trial % 2;
            const ConfigurationQ z = random_configuration(rng, d, n);
            const Functional f = random_single_level_functional(rng, 1, d, degree);
            const Functional g = random_single_level_functional(rng, 1, d, degree);
            Rational r = morphism_residual_empirical(f, g, z);
            if (inject_fault && trial == 0) r += 1;
            ++report.checks;
            if (r != 0) {
                report.failures.push_back(Json{{"suite", report.name}, {"map", "empirical-measure"}, {"f", to_json(f)}, {"g", to_json(g)}, {"residual", rational_str(r)}}.dump());
            }
        }
        {
            const int n = 2 + trial % 2;
            const ConfigurationQ z = random_configuration(rng, 1, n);
            const Functional f = random_single_level_functional(rng, n, 1, 2);
            const Functional g = random_single_level_functional(rng, n, 1, 2);
            const Rational r = morphism_residual_law(f, g, z);
            ++report.checks;
            if (r != 0) {
                report.failures.push_back(Json{{"suite", report.name}, {"map", "law"}, {"f", to_json(f)}, {"g", to_json(g)}, {"residual", rational_str(r)}}.dump());
            }
        }
        {
            const int n = 2 + trial % 2;
            const auto gamma = random_dirac(rng, n, 1, 2);
            const Functional f = random_functional(rng, 1, level_max, degree);
            const Functional g = random_functional(rng, 1, level_max, degree);
            const Rational r = morphism_residual_marginals(f, g, gamma);
            ++report.checks;
            if (r != 0) {
                report.failures.push_back(Json{{"suite", report.name}, {"map", "marginals"}, {"f", to_json(f)}, {"g", to_json(g)}, {"residual", rational_str(r)}}.dump());
            }
        }
        {
            const auto mu = random_dirac(rng, 1, 1, 2, true);
            const Functional f = random_functional(rng, 1, level_max, degree);
            const Functional g = random_functional(rng, 1, level_max, degree);
            const Rational r = morphism_residual_factorization(f, g, mu);
            ++report.checks;
            if (r != 0) {
                report.failures.push_back(Json{{"suite", report.name}, {"map", "factorization"}, {"f", to_json(f)}, {"g", to_json(g)}, {"residual", rational_str(r)}}.dump());
            }
        }
    }
    return report;
}

// The four energy pullback identities, exact for polynomial potentials.
inline CheckReport pullback_suite(Rng& rng, int trials) {
    CheckReport report{"hamiltonian-pullbacks"};
    for (int trial = 0; trial < trials; ++trial) {
        const PolynomialPotential w = random_potential(rng, 1, 2);
        auto fail = [&](const std::string& which, const Rational& lhs, const Rational& rhs) {
            report.failures.push_back(Json{{"suite", report.name}, {"identity", which}, {"lhs", rational_str(lhs)}, {"rhs", rational_str(rhs)}}.dump());
        };

        {
            const auto mu = random_dirac(rng, 1, 1, 3, true);
            const Rational lhs = hamiltonian_vlasov_hierarchy(factorized(mu), w);
            const Rational rhs = hamiltonian_vlasov(mu, w);
            ++report.checks;
            if (lhs != rhs) fail("hierarchy-energy-to-vlasov", lhs, rhs);
        }
        {
            const int n = 1 + trial % 4;
            const ConfigurationQ z = random_configuration(rng, 1, n);
            const Rational lhs = hamiltonian_vlasov(empirical_measure(z), w);
            const Rational rhs = hamiltonian_newton(z, w);
            ++report.checks;
            if (lhs != rhs) fail("vlasov-energy-to-newton", lhs, rhs);
        }
        {
            const int n = 2 + trial % 3;
            const auto gamma = random_dirac(rng, n, 1, 2);
            const Rational lhs = hamiltonian_bbgky(marginal_hierarchy(gamma), w, n);
            const Rational rhs = hamiltonian_liouville(gamma, w);
            ++report.checks;
            if (lhs != rhs) fail("hierarchy-energy-to-liouville", lhs, rhs);
        }
        {
            const int n = 2 + trial % 3;
            const ConfigurationQ z = random_configuration(rng, 1, n);
            const Rational lhs = hamiltonian_liouville(liouville_state(z), w);
            const Rational rhs = hamiltonian_newton(z, w);
            ++report.checks;
            if (lhs != rhs) fail("liouville-energy-to-newton", lhs, rhs);
        }
    }
    return report;
}

// Vector-field contract: the weak field reproduces the Lie-Poisson bracket
// against every test functional, plus the explicit case formulas of the
// finite-hierarchy energy.
inline CheckReport vector_field_suite(Rng& rng, int trials) {
    CheckReport report{"hamiltonian-vector-fields"};
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 2 + trial % 2;
        const auto state = random_dirac_hierarchy(rng, 1, n, 2);
        const Functional f = random_functional(rng, 1, 2, 2);
        const Functional g = random_functional(rng, 1, 2, 2);
        for (const AlgebraSpec& spec : {AlgebraSpec::finite(n), AlgebraSpec::limit()}) {
            const auto state_full = spec.type == AlgebraSpec::Type::LimitHierarchy ? random_dirac_hierarchy(rng, 1, 2 * 2, 2) : state;
            const WeakVectorField field = WeakVectorField::of(g, state_full, spec, 1);
            const ObservableHierarchy df = gateaux_derivative(f, state_full, 1);
            Rational via_field(0);
            for (const auto& [l, fl] : df.levels()) via_field += field.pair(l, fl, state_full);
            const Rational direct = lie_poisson_bracket(f, g, state_full, spec, 1);
            ++report.checks;
            if (via_field != direct) {
                report.failures.push_back(Json{{"suite", report.name}, {"violated", spec.type == AlgebraSpec::Type::FiniteHierarchy ? "finite-contract" : "limit-contract"}, {"f", to_json(f)}, {"g", to_json(g)}}.dump());
            }
        }
    }
    return report;
}

// The weak field of the finite-hierarchy energy against its three explicit
// case formulas (bottom level, interior levels, top level), compared as
// symmetric integrands rather than through pairings.
inline CheckReport bbgky_case_suite(Rng& rng, int n_max) {
    CheckReport report{"finite-hierarchy-energy-cases"};
    for (int n = 2; n <= n_max; ++n) {
        const PolynomialPotential w = random_potential(rng, 1, 2);
        const WeakVectorField field(bbgky_weights(w, n), AlgebraSpec::finite(n));
        for (int l = 1; l <= n; ++l) {
            const SymObservable f = random_observable(rng, l, 1, 3, 2);
            const auto got = field.integrands(l, f);

            std::map<int, SymObservable> want;
            auto add = [&](int k, const Polynomial& raw) {
                const SymObservable o = SymObservable::from_raw(raw, k, 1, 12);
                if (o.is_zero()) return;
                auto it = want.find(k);
                if (it == want.end()) {
                    want.emplace(k, o);
                } else {
                    it->second += o;
                }
            };
            Polynomial kin_sum(2 * l);
            for (int a = 1; a <= l; ++a) kin_sum += extend_to_tuple(kinetic_observable(1), {a}, l);
            add(l, standard_bracket_raw(f.poly(), kin_sum, l, 1));
            std::vector<int> idmap(static_cast<std::size_t>(l));
            for (int s = 0; s < l; ++s) idmap[static_cast<std::size_t>(s)] = s;
            if (l <= n - 1) {
                const Polynomial f_ext = f.poly().relabel(1, idmap, l + 1);
                Polynomial coupling(2 * (l + 1));
                for (int a = 1; a <= l; ++a) coupling += w.displacement_between(a, l + 1, l + 1);
                coupling *= Rational(2 * (n - l), n);
                add(l + 1, standard_bracket_raw(f_ext, coupling, l + 1, 1));
                Polynomial recollision(2 * (l + 1));
                for (int i = 1; i <= l; ++i) {
                    for (int j = 1; j <= l; ++j) {
                        if (i != j) recollision += w.displacement_between(i, j, l + 1);
                    }
                }
                recollision *= Rational(1, n);
                add(l + 1, standard_bracket_raw(f_ext, recollision, l + 1, 1));
            } else {
                Polynomial recollision(2 * n);
                for (int i = 1; i <= n; ++i) {
                    for (int j = 1; j <= n; ++j) {
                        if (i != j) recollision += w.displacement_between(i, j, n);
                    }
                }
                recollision *= Rational(1, n);
                add(n, standard_bracket_raw(f.poly(), recollision, n, 1));
            }
            ++report.checks;
            if (!(got == want)) {
                report.failures.push_back(Json{{"suite", report.name}, {"violated", "case-formula"}, {"N", n}, {"level", l}, {"f", f.str()}}.dump());
            }
        }
    }
    return report;
}

// Table rows for the coefficient-limit check.
struct CoefficientLimitRow {
    long n;
    int l, j, r;
    double scaled;
    double error;
    double bound;
    bool pass;
};

inline std::vector<CoefficientLimitRow> coefficient_limit_rows(const std::vector<long>& n_values, int l_max, int j_max) {
    std::vector<CoefficientLimitRow> rows;
    for (const long n : n_values) {
        for (int l = 1; l <= l_max; ++l) {
            for (int j = 1; j <= j_max; ++j) {
                for (int r = 1; r <= std::min(l, j); ++r) {
                    Rational scaled = bracket_coefficient(l, j, static_cast<int>(n), r);
                    for (int p = 0; p < r - 1; ++p) scaled *= n;
                    CoefficientLimitRow row;
                    row.n = n;
                    row.l = l;
                    row.j = j;
                    row.r = r;
                    row.scaled = to_double(scaled);
                    row.error = std::abs(row.scaled - 1.0);
                    row.bound = 10.0 * std::max(l, j) / static_cast<double>(n);
                    row.pass = row.error <= row.bound;
                    rows.push_back(row);
                }
            }
        }
    }
    return rows;
}

// Coefficientwise gap between the finite and limit brackets at two values of
// N; the ratio doubles when N doubles.
struct BracketGapRow {
    int pair;
    double gap_n1, gap_n2, ratio;
    bool pass;
};

inline std::vector<BracketGapRow> bracket_gap_rows(Rng& rng, int pairs, int n1 = 100, int n2 = 200) {
    std::vector<BracketGapRow> rows;
    int produced = 0;
    int attempts = 0;
    while (produced < pairs && attempts < 20 * pairs) {
        ++attempts;
        const ObservableHierarchy F = random_hierarchy(rng, 1, 2, 3, 2);
        const ObservableHierarchy G = random_hierarchy(rng, 1, 2, 3, 2);
        const ObservableHierarchy limit = limit_bracket(F, G);
        auto gap_at = [&](int n) {
            const ObservableHierarchy diff = hierarchy_bracket(F, G, n) - limit;
            double gap = 0.0;
            for (const auto& [k, o] : diff.levels()) {
                for (const auto& [m, c] : o.poly().terms()) gap = std::max(gap, std::abs(to_double(c)));
            }
            return gap;
        };
        const double g1 = gap_at(n1), g2 = gap_at(n2);
        if (g1 == 0.0) continue;  // bracket happens to be N-independent
        BracketGapRow row;
        row.pair = produced;
        row.gap_n1 = g1;
        row.gap_n2 = g2;
        row.ratio = g1 / g2;
        row.pass = row.ratio >= 1.8 && row.ratio <= 2.2;
        rows.push_back(row);
        ++produced;
    }
    return rows;
}

}  // namespace vlasov
