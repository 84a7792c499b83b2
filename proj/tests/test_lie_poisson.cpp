#include <catch2/catch_amalgamated.hpp>

#include "vlasov/generate.hpp"
#include "vlasov/lie_poisson.hpp"
#include "vlasov/suites.hpp"
#include "vlasov/parse.hpp"

using namespace vlasov;

namespace {

SymObservable obs(const std::string& text, int k, int d) { return parse_observable(text, k, d); }

PolynomialPotential quadratic_potential() {
    // W(u) = u^2 in one displacement variable.
    Polynomial w(1);
    Monomial m(1);
    m.exps[0] = 2;
    w.add_term(m, Rational(1));
    return PolynomialPotential(1, w);
}

DiracState<Rational> probability_dirac(Rng& rng, int k, int d, int atoms) { return random_dirac(rng, k, d, atoms, true); }

}  // namespace

TEST_CASE("functional evaluation") {
    Rng rng(31);
    const auto gamma = probability_dirac(rng, 1, 1, 3);
    const SingleLevelState<Rational> state{gamma};

    REQUIRE(eval_functional(Functional::constant(Rational(7, 3)), state) == Rational(7, 3));

    const Functional fx = Functional::expectation(obs("x1", 1, 1));
    const Functional fv = Functional::expectation(obs("v1", 1, 1));
    const Functional prod = Functional::product({fx, fv});
    REQUIRE(eval_functional(prod, state) == eval_functional(fx, state) * eval_functional(fv, state));

    const Functional sum = Functional::sum({fx, Functional::constant(Rational(2))});
    REQUIRE(eval_functional(sum, state) == eval_functional(fx, state) + 2);

    REQUIRE_THROWS_AS(eval_functional(Functional::expectation(obs("x1*x2", 2, 1)), state), std::invalid_argument);
}

TEST_CASE("vlasov energy as kinetic plus tensor-square potential expectation") {
    Rng rng(32);
    const auto gamma = probability_dirac(rng, 1, 1, 3);
    const PolynomialPotential w = quadratic_potential();
    const Rational direct = hamiltonian_vlasov(gamma, w);
    const Rational kin = pairing(kinetic_observable(1), gamma);
    const Rational pot = factorized(gamma).pair_level(2, w.two_particle());
    REQUIRE(direct == kin + pot);
}

TEST_CASE("gateaux derivatives") {
    Rng rng(33);
    SECTION("expectations have constant derivative equal to the generator") {
        const ObservableHierarchy gen = random_hierarchy(rng, 1, 2, 3);
        const Functional f = Functional::expectation(gen);
        for (int trial = 0; trial < 3; ++trial) {
            const auto state = random_dirac_hierarchy(rng, 1, 2, 2);
            REQUIRE(gateaux_derivative(f, state, 1) == gen);
        }
    }
    SECTION("constants have zero derivative") {
        const auto state = random_dirac_hierarchy(rng, 1, 1, 2);
        REQUIRE(gateaux_derivative(Functional::constant(Rational(5)), state, 1).is_zero());
    }
    SECTION("product rule with scalar siblings") {
        const Functional fx = Functional::expectation(obs("x1", 1, 1));
        const Functional fv = Functional::expectation(obs("v1", 1, 1));
        const Functional prod = Functional::product({fx, fv});
        const auto gamma = probability_dirac(rng, 1, 1, 2);
        const SingleLevelState<Rational> state{gamma};
        const ObservableHierarchy d = gateaux_derivative(prod, state, 1);
        const Rational mean_x = pairing(obs("x1", 1, 1), gamma);
        const Rational mean_v = pairing(obs("v1", 1, 1), gamma);
        REQUIRE(d.level(1) == mean_v * obs("x1", 1, 1) + mean_x * obs("v1", 1, 1));
    }
    SECTION("directional application against an exact direction state") {
        for (int trial = 0; trial < 5; ++trial) {
            const Functional f = random_functional(rng, 1, 2, 3);
            const auto state = random_dirac_hierarchy(rng, 1, 2, 2);
            const auto direction = random_dirac_hierarchy(rng, 1, 2, 2);
            const ObservableHierarchy df = gateaux_derivative(f, state, 1);
            Rational via_hierarchy(0);
            for (const auto& [k, g] : df.levels()) via_hierarchy += direction.pair_level(k, g);
            REQUIRE(gateaux_apply(f, state, direction) == via_hierarchy);
        }
    }
    SECTION("finite differences in float mode converge at second order") {
        const Functional f = Functional::product({Functional::expectation(obs("x1", 1, 1)),
                                                  Functional::expectation(obs("v1^2", 1, 1)),
                                                  Functional::expectation(obs("x1*v1", 1, 1))});
        DiracState<double> gamma(1, 1), nu(1, 1);
        gamma.add_atom(0.6, {0.7, -0.4});
        gamma.add_atom(0.4, {-0.2, 1.1});
        nu.add_atom(1.0, {0.3, 0.8});
        const SingleLevelState<double> state{gamma};
        const SingleLevelState<double> dir{nu};
        const double exact = gateaux_apply(f, state, dir);
        std::vector<double> errs;
        for (const double h : {1e-3, 1e-4}) {
            auto shift = [&](double s) {
                DiracState<double> g = gamma;
                for (const auto& atom : nu.atoms) g.add_atom(s * atom.weight, atom.point);
                return SingleLevelState<double>{g};
            };
            const double fd = (eval_functional(f, shift(h)) - eval_functional(f, shift(-h))) / (2 * h);
            errs.push_back(std::abs(fd - exact));
        }
        const double slope = std::log10(errs[0] / errs[1]);
        REQUIRE(slope > 1.9);
    }
}

TEST_CASE("lie-poisson brackets on dual spaces") {
    Rng rng(34);
    SECTION("canonical pair against a probability state") {
        const auto gamma = probability_dirac(rng, 1, 1, 3);
        const SingleLevelState<Rational> state{gamma};
        const Functional fx = Functional::expectation(obs("x1", 1, 1));
        const Functional fv = Functional::expectation(obs("v1", 1, 1));
        REQUIRE(lie_poisson_bracket(fx, fv, state, AlgebraSpec::single(1), 1) == Rational(1));
    }
    SECTION("antisymmetry") {
        const auto state = random_dirac_hierarchy(rng, 1, 3, 2);
        const Functional f = random_functional(rng, 1, 2, 3);
        const Functional g = random_functional(rng, 1, 2, 3);
        const Rational fg = lie_poisson_bracket(f, g, state, AlgebraSpec::finite(3), 1);
        const Rational gf = lie_poisson_bracket(g, f, state, AlgebraSpec::finite(3), 1);
        REQUIRE(fg == -gf);
    }
    SECTION("Jacobi identity for functionals, all three algebras") {
        for (int trial = 0; trial < 3; ++trial) {
            const auto state = random_dirac_hierarchy(rng, 1, 4, 2);
            const Functional f = random_functional(rng, 1, 2, 2);
            const Functional g = random_functional(rng, 1, 2, 2);
            const Functional h = random_functional(rng, 1, 2, 2);
            const std::vector<AlgebraSpec> specs = {AlgebraSpec::finite(4), AlgebraSpec::limit()};
            for (const auto& spec : specs) {
                // d{g,h} is not itself in expectation form, so probe Jacobi
                // through the bracket of brackets evaluated via fresh
                // derivative hierarchies at the same state.
                auto pb = [&](const Functional& a, const Functional& b) { return lie_poisson_bracket(a, b, state, spec, 1); };
                auto pb_with = [&](const Functional& a, const ObservableHierarchy& db_hier, const Rational&) {
                    const ObservableHierarchy da = gateaux_derivative(a, state, 1);
                    const ObservableHierarchy br = algebra_bracket(da, db_hier, spec);
                    Rational total(0);
                    for (const auto& [k, o] : br.levels()) total += state.pair_level(k, o);
                    return total;
                };
                (void)pb_with;
                // The direct Jacobi sum for linear-combination functionals:
                // build {g,h} as a functional via the bracket hierarchy of the
                // (constant-derivative) expectation parts is only valid for
                // pure expectations, so restrict to them here.
                const Functional ef = Functional::expectation(random_hierarchy(rng, 1, 2, 2, 2));
                const Functional eg = Functional::expectation(random_hierarchy(rng, 1, 2, 2, 2));
                const Functional eh = Functional::expectation(random_hierarchy(rng, 1, 2, 2, 2));
                auto bracket_functional = [&](const Functional& a, const Functional& b) {
                    const ObservableHierarchy da = gateaux_derivative(a, state, 1);
                    const ObservableHierarchy db = gateaux_derivative(b, state, 1);
                    return Functional::expectation(algebra_bracket(da, db, spec));
                };
                const Rational jac = pb(ef, bracket_functional(eg, eh)) + pb(eg, bracket_functional(eh, ef)) + pb(eh, bracket_functional(ef, eg));
                REQUIRE(jac == 0);
            }
        }
    }
    SECTION("Leibniz rule") {
        const auto state = random_dirac_hierarchy(rng, 1, 3, 2);
        const Functional f = random_functional(rng, 1, 2, 2);
        const Functional g = random_functional(rng, 1, 2, 2);
        const Functional h = random_functional(rng, 1, 2, 2);
        const AlgebraSpec spec = AlgebraSpec::finite(3);
        const Rational lhs = lie_poisson_bracket(f, Functional::product({g, h}), state, spec, 1);
        const Rational rhs = eval_functional(h, state) * lie_poisson_bracket(f, g, state, spec, 1) +
                             eval_functional(g, state) * lie_poisson_bracket(f, h, state, spec, 1);
        REQUIRE(lhs == rhs);
    }
    SECTION("generator outside the level bound is rejected") {
        const auto state = random_dirac_hierarchy(rng, 1, 1, 2);
        const Functional f = Functional::expectation(obs("x1*x2", 2, 1));
        REQUIRE_THROWS_AS(lie_poisson_bracket(f, f, state, AlgebraSpec::single(1), 1), std::invalid_argument);
    }
}

TEST_CASE("hamiltonians") {
    Rng rng(35);
    const PolynomialPotential w = quadratic_potential();

    SECTION("free energy is mean kinetic energy") {
        const PolynomialPotential none = PolynomialPotential::zero(1);
        ConfigurationQ z = random_configuration(rng, 1, 3);
        Rational kinetic(0);
        for (int i = 0; i < 3; ++i) kinetic += z.v(i) * z.v(i);
        REQUIRE(hamiltonian_newton(z, none) == kinetic / 6);
    }
    SECTION("worked two-body example") {
        ConfigurationQ z(1, 2);
        z.x(0) = 0;
        z.v(0) = 1;
        z.x(1) = 1;
        z.v(1) = -1;
        REQUIRE(hamiltonian_newton(z, w) == Rational(1));
    }
    SECTION("single particle keeps only self-energy") {
        ConfigurationQ z(1, 1);
        z.v(0) = 3;
        REQUIRE(hamiltonian_newton(z, w) == Rational(9, 2) + w.at_zero());
    }
    SECTION("liouville energy pulls back to the particle energy") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 4));
            const ConfigurationQ z = random_configuration(rng, 1, n);
            REQUIRE(hamiltonian_liouville(liouville_state(z), w) == hamiltonian_newton(z, w));
        }
    }
    SECTION("finite-N weights converge componentwise to the limit weights") {
        const ObservableHierarchy limit = vlasov_hierarchy_weights(w);
        double gap_prev = -1.0;
        for (const int n : {100, 200}) {
            const ObservableHierarchy at_n = bbgky_weights(w, n);
            double gap = 0.0;
            const ObservableHierarchy diff = at_n - limit;
            for (const auto& [k, o] : diff.levels()) {
                for (const auto& [m, c] : o.poly().terms()) gap = std::max(gap, std::abs(to_double(c)));
            }
            if (gap_prev >= 0) {
                REQUIRE(gap_prev / gap == Catch::Approx(2.0).margin(0.25));
            }
            gap_prev = gap;
        }
    }
    SECTION("vlasov energy pulls back to the particle energy through empirical measures") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(1, 4));
            const ConfigurationQ z = random_configuration(rng, 1, n);
            REQUIRE(hamiltonian_vlasov(empirical_measure(z), w) == hamiltonian_newton(z, w));
        }
    }
    SECTION("hierarchy energies agree on marginals vs the law") {
        const ConfigurationQ z = random_configuration(rng, 1, 3);
        const auto hier = marginal_hierarchy(liouville_state(z));
        REQUIRE(hamiltonian_bbgky(hier, w, 3) == hamiltonian_liouville(liouville_state(z), w));
    }
}

TEST_CASE("weak hamiltonian vector fields") {
    Rng rng(36);
    SECTION("defining contract for the finite hierarchy algebra") {
        for (int trial = 0; trial < 4; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 3));
            const auto state = random_dirac_hierarchy(rng, 1, n, 2);
            const Functional f = random_functional(rng, 1, 2, 2);
            const Functional g = random_functional(rng, 1, 2, 2);
            const AlgebraSpec spec = AlgebraSpec::finite(n);
            const WeakVectorField field = WeakVectorField::of(g, state, spec, 1);
            const ObservableHierarchy df = gateaux_derivative(f, state, 1);
            Rational via_field(0);
            for (const auto& [l, fl] : df.levels()) via_field += field.pair(l, fl, state);
            REQUIRE(via_field == lie_poisson_bracket(f, g, state, spec, 1));
        }
    }
    SECTION("defining contract for the limit algebra") {
        for (int trial = 0; trial < 4; ++trial) {
            const auto state = random_dirac_hierarchy(rng, 1, 5, 2);
            const Functional f = random_functional(rng, 1, 2, 2);
            const Functional g = random_functional(rng, 1, 3, 2);
            const WeakVectorField field = WeakVectorField::of(g, state, AlgebraSpec::limit(), 1);
            const ObservableHierarchy df = gateaux_derivative(f, state, 1);
            Rational via_field(0);
            for (const auto& [l, fl] : df.levels()) via_field += field.pair(l, fl, state);
            REQUIRE(via_field == lie_poisson_bracket(f, g, state, AlgebraSpec::limit(), 1));
        }
    }
    SECTION("hierarchy energy field matches its case formulas symbolically") {
        const PolynomialPotential w = quadratic_potential();
        for (const int n : {3, 4}) {
            const WeakVectorField field(bbgky_weights(w, n), AlgebraSpec::finite(n));
            for (int l = 1; l <= n; ++l) {
                const SymObservable f = random_observable(rng, l, 1, 3, 2);
                const auto got = field.integrands(l, f);

                // Case formulas, written out term by term.
                std::map<int, SymObservable> want;
                auto add = [&](int k, const Polynomial& raw) {
                    const SymObservable o = SymObservable::from_raw(raw, k, 1, 10);
                    if (o.is_zero()) return;
                    auto it = want.find(k);
                    if (it == want.end()) {
                        want.emplace(k, o);
                    } else {
                        it->second += o;
                    }
                };
                std::vector<int> idmap(static_cast<std::size_t>(l));
                for (int s = 0; s < l; ++s) idmap[static_cast<std::size_t>(s)] = s;
                const Polynomial f_at_l = f.poly();
                // Kinetic transport at the same level.
                Polynomial kin_sum(2 * l);
                for (int a = 1; a <= l; ++a) kin_sum += extend_to_tuple(kinetic_observable(1), {a}, l);
                add(l, standard_bracket_raw(f_at_l, kin_sum, l, 1));
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
                    add(n, standard_bracket_raw(f_at_l, recollision, n, 1));
                }
                REQUIRE(got == want);
            }
        }
    }
    SECTION("limit hierarchy energy acts by transport plus the coupling integral") {
        const PolynomialPotential w = quadratic_potential();
        const WeakVectorField field(vlasov_hierarchy_weights(w), AlgebraSpec::limit());
        for (int l = 1; l <= 3; ++l) {
            const SymObservable f = random_observable(rng, l, 1, 3, 2);
            const auto got = field.integrands(l, f);
            std::map<int, SymObservable> want;
            Polynomial kin_sum(2 * l);
            for (int a = 1; a <= l; ++a) kin_sum += extend_to_tuple(kinetic_observable(1), {a}, l);
            const SymObservable at_l = SymObservable::from_raw(standard_bracket_raw(f.poly(), kin_sum, l, 1), l, 1, 10);
            if (!at_l.is_zero()) want.emplace(l, at_l);
            std::vector<int> idmap(static_cast<std::size_t>(l));
            for (int s = 0; s < l; ++s) idmap[static_cast<std::size_t>(s)] = s;
            Polynomial coupling(2 * (l + 1));
            for (int a = 1; a <= l; ++a) coupling += w.displacement_between(a, l + 1, l + 1);
            coupling *= Rational(2);
            const SymObservable at_l1 = SymObservable::from_raw(standard_bracket_raw(f.poly().relabel(1, idmap, l + 1), coupling, l + 1, 1), l + 1, 1, 10);
            if (!at_l1.is_zero()) want.emplace(l + 1, at_l1);
            REQUIRE(got == want);
        }
    }
}

TEST_CASE("weak fields act linearly on test observables") {
    Rng rng(45);
    const auto state = random_dirac_hierarchy(rng, 1, 4, 2);
    const Functional g = random_functional(rng, 1, 2, 2);
    const WeakVectorField field = WeakVectorField::of(g, state, AlgebraSpec::finite(4), 1);
    for (int l = 1; l <= 2; ++l) {
        const SymObservable f1 = random_observable(rng, l, 1, 3);
        const SymObservable f2 = random_observable(rng, l, 1, 3);
        const Rational a = rng.small_rational(), b = rng.small_rational();
        REQUIRE(field.pair(l, a * f1 + b * f2, state) == a * field.pair(l, f1, state) + b * field.pair(l, f2, state));
    }
}

TEST_CASE("probability flag is preserved and checkable") {
    Rng rng(46);
    const ConfigurationQ z = random_configuration(rng, 1, 3);
    auto mu = empirical_measure(z);
    REQUIRE(mu.probability);
    REQUIRE_NOTHROW(mu.check_probability());
    auto law = liouville_state(z);
    REQUIRE_NOTHROW(law.check_probability());
    auto marg = marginal(law, 2);
    REQUIRE(marg.probability);
    REQUIRE_NOTHROW(marg.check_probability());
    mu.add_atom(Rational(1), mu.atoms.front().point);
    REQUIRE_THROWS_AS(mu.check_probability(), std::logic_error);
}

TEST_CASE("single-algebra weak field reproduces the dual bracket") {
    Rng rng(39);
    for (int trial = 0; trial < 5; ++trial) {
        const int k = static_cast<int>(rng.uniform_int(1, 3));
        const auto gamma = random_dirac(rng, k, 1, 2);
        const SingleLevelState<Rational> state{gamma};
        const Functional f = random_single_level_functional(rng, k, 1, 3);
        const Functional g = random_single_level_functional(rng, k, 1, 3);
        const WeakVectorField field = WeakVectorField::of(g, state, AlgebraSpec::single(k), 1);
        const ObservableHierarchy df = gateaux_derivative(f, state, 1);
        Rational via_field(0);
        if (df.has_level(k)) via_field = field.pair(k, df.level(k), state);
        REQUIRE(via_field == lie_poisson_bracket(f, g, state, AlgebraSpec::single(k), 1));
    }
}

TEST_CASE("poisson morphism residuals vanish exactly") {
    Rng rng(37);
    SECTION("empirical measure, canonical example") {
        const ConfigurationQ z = random_configuration(rng, 1, 3);
        const Functional fx = Functional::expectation(obs("x1", 1, 1));
        const Functional fv = Functional::expectation(obs("v1", 1, 1));
        // Both sides equal one: the rescaled configuration bracket of the
        // pullbacks and the dual-space bracket of the originals.
        const SymObservable fp = pullback_polynomial(fx, ConfigMap::EmpiricalMeasure, 3, 1, 8);
        const SymObservable gp = pullback_polynomial(fv, ConfigMap::EmpiricalMeasure, 3, 1, 8);
        REQUIRE(evaluate(lie_bracket(fp, gp), z) == Rational(1));
        REQUIRE(morphism_residual_empirical(fx, fv, z) == 0);
    }
    SECTION("empirical measure, random functionals") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 3));
            const int d = static_cast<int>(rng.uniform_int(1, 2));
            const ConfigurationQ z = random_configuration(rng, d, n);
            const Functional f = random_single_level_functional(rng, 1, d, 3);
            const Functional g = random_single_level_functional(rng, 1, d, 3);
            REQUIRE(morphism_residual_empirical(f, g, z) == 0);
        }
    }
    SECTION("law map, random functionals") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 3));
            const ConfigurationQ z = random_configuration(rng, 1, n);
            const Functional f = random_single_level_functional(rng, n, 1, 2);
            const Functional g = random_single_level_functional(rng, n, 1, 2);
            REQUIRE(morphism_residual_law(f, g, z) == 0);
        }
    }
    SECTION("marginal map, random functionals") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 3));
            const auto gamma = random_dirac(rng, n, 1, 2);
            const Functional f = random_functional(rng, 1, 2, 2);
            const Functional g = random_functional(rng, 1, 2, 2);
            REQUIRE(morphism_residual_marginals(f, g, gamma) == 0);
        }
    }
    SECTION("factorization map, random functionals") {
        for (int trial = 0; trial < 5; ++trial) {
            const auto mu = random_dirac(rng, 1, 1, 2, true);
            const Functional f = random_functional(rng, 1, 2, 2);
            const Functional g = random_functional(rng, 1, 2, 2);
            REQUIRE(morphism_residual_factorization(f, g, mu) == 0);
        }
    }
}

TEST_CASE("degree-bounded observables are separated by small dirac states") {
    // A polynomial pairing to zero against enough random symmetrized states
    // must vanish; exact rank of the basis-vs-state pairing matrix proves it.
    Rng rng(40);
    for (unsigned degree : {2u, 3u}) {
        const CheckReport report = separation_suite(rng, 2, degree);
        const std::string first = report.failures.empty() ? std::string() : report.failures.front();
        INFO(first);
        REQUIRE(report.ok());
    }
}

TEST_CASE("hamiltonian pullback identities") {
    Rng rng(38);
    const PolynomialPotential w = random_potential(rng, 1, 2);
    SECTION("hierarchy energy restricted to tensor powers is the vlasov energy") {
        for (int trial = 0; trial < 5; ++trial) {
            const auto mu = random_dirac(rng, 1, 1, 3, true);
            REQUIRE(hamiltonian_vlasov_hierarchy(factorized(mu), w) == hamiltonian_vlasov(mu, w));
        }
    }
    SECTION("hierarchy energy on marginals is the liouville energy") {
        for (int trial = 0; trial < 5; ++trial) {
            const int n = static_cast<int>(rng.uniform_int(2, 4));
            const auto gamma = random_dirac(rng, n, 1, 2);
            REQUIRE(hamiltonian_bbgky(marginal_hierarchy(gamma), w, n) == hamiltonian_liouville(gamma, w));
        }
    }
}
