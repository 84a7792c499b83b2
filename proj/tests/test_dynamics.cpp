#include <catch2/catch_amalgamated.hpp>

#include "vlasov/dynamics.hpp"
#include "vlasov/generate.hpp"
#include "vlasov/parse.hpp"

using namespace vlasov;

namespace {

PolynomialPotential quadratic_potential() {
    Polynomial w(1);
    Monomial m(1);
    m.exps[0] = 2;
    w.add_term(m, Rational(1));
    return PolynomialPotential(1, w);
}

GridState1D gaussian_grid(int nx, int nv, double L = 8.0, double V = 4.0) {
    GridState1D g(L, V, nx, nv);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double x = g.xc(i) - L / 2.0, v = g.vc(j);
            g.at(i, j) = std::exp(-2.0 * x * x - 2.0 * v * v);
        }
    }
    return g;
}

void normalize(GridState1D& g) {
    const double m = g.mass();
    for (auto& v : g.values) v /= m;
}

DiracState<double> empirical_double(const ConfigurationD& z) { return empirical_measure(z); }

}  // namespace

TEST_CASE("potential gradients") {
    const std::vector<Potential> pots = {Potential::gaussian(1, 0.8, 0.7), Potential::polynomial(quadratic_potential()), Potential::zero(1)};
    for (const auto& w : pots) {
        SECTION("gradient matches finite differences at second order") {
            std::vector<double> g(1), u(1);
            for (double x : {-1.3, -0.25, 0.4, 1.7}) {
                u[0] = x;
                w.gradient(u, g);
                const double h = 1e-5;
                const double fd = (w({x + h}) - w({x - h})) / (2 * h);
                REQUIRE(g[0] == Catch::Approx(fd).margin(1e-8));
            }
        }
        SECTION("even and flat at the origin") {
            for (double x : {0.3, 1.1, 2.4}) REQUIRE(w({x}) == Catch::Approx(w({-x})).margin(1e-15));
            std::vector<double> g(1);
            w.gradient({0.0}, g);
            REQUIRE(g[0] == 0.0);
        }
    }
}

TEST_CASE("velocity verlet") {
    SECTION("free streaming is exact") {
        ConfigurationD z0(1, 3);
        for (int i = 0; i < 3; ++i) {
            z0.x(i) = 0.2 * i;
            z0.v(i) = 0.5 - 0.3 * i;
        }
        const Trajectory traj = integrate_nbody(z0, Potential::zero(1), 0.01, 100);
        const ConfigurationD& zt = traj.states.back();
        for (int i = 0; i < 3; ++i) {
            REQUIRE(zt.x(i) == Catch::Approx(z0.x(i) + 1.0 * z0.v(i)).margin(1e-12));
            REQUIRE(zt.v(i) == Catch::Approx(z0.v(i)).margin(0.0));
        }
    }
    SECTION("harmonic pair oscillates with period pi") {
        // W(x) = x^2 gives rddot = -4 r for r = x1 - x2.
        ConfigurationD z0(1, 2);
        z0.x(0) = 0.5;
        z0.x(1) = -0.5;
        const double dt = 1e-4;
        const Potential w = Potential::polynomial(quadratic_potential());
        const Trajectory traj = integrate_nbody(z0, w, dt, 35000);
        // Strict sign changes of the relative velocity come every half period;
        // the starting configuration itself sits at a turning point.
        std::vector<double> change_times;
        double prev = traj.states[0].v(0) - traj.states[0].v(1);
        for (std::size_t m = 1; m < traj.states.size() && change_times.size() < 2; ++m) {
            const double cur = traj.states[m].v(0) - traj.states[m].v(1);
            if (prev * cur < 0) {
                const double frac = prev / (prev - cur);
                change_times.push_back((static_cast<double>(m - 1) + frac) * dt);
            }
            if (cur != 0) prev = cur;
        }
        REQUIRE(change_times.size() == 2);
        const double period = 2.0 * (change_times[1] - change_times[0]);
        REQUIRE(std::abs(period - M_PI) / M_PI < 1e-4);
    }
    SECTION("energy drift scales at second order") {
        ConfigurationD z0(1, 4);
        Rng rng(41);
        for (int i = 0; i < 4; ++i) {
            z0.x(i) = rng.uniform(-1, 1);
            z0.v(i) = rng.uniform(-1, 1);
        }
        const Potential w = Potential::gaussian(1, 1.0, 0.8);
        auto drift = [&](double dt) {
            const int steps = static_cast<int>(std::llround(2.0 / dt));
            const Trajectory traj = integrate_nbody(z0, w, dt, steps);
            const double e0 = hamiltonian_newton_numeric(traj.states.front(), w);
            double worst = 0.0;
            for (const auto& z : traj.states) worst = std::max(worst, std::abs(hamiltonian_newton_numeric(z, w) - e0));
            return worst;
        };
        const double ratio = drift(4e-3) / drift(2e-3);
        REQUIRE(ratio == Catch::Approx(4.0).epsilon(0.2));
    }
    SECTION("time reversibility to roundoff") {
        ConfigurationD z0(1, 3);
        Rng rng(42);
        for (int i = 0; i < 3; ++i) {
            z0.x(i) = rng.uniform(-1, 1);
            z0.v(i) = rng.uniform(-1, 1);
        }
        const Potential w = Potential::gaussian(1, 0.5, 1.0);
        const Trajectory fwd = integrate_nbody(z0, w, 1e-3, 500);
        ConfigurationD flipped = fwd.states.back();
        for (int i = 0; i < 3; ++i) flipped.v(i) = -flipped.v(i);
        const Trajectory back = integrate_nbody(flipped, w, 1e-3, 500);
        const ConfigurationD& zr = back.states.back();
        for (int i = 0; i < 3; ++i) {
            REQUIRE(zr.x(i) == Catch::Approx(z0.x(i)).margin(1e-10));
            REQUIRE(zr.v(i) == Catch::Approx(-z0.v(i)).margin(1e-10));
        }
    }
    SECTION("total momentum is conserved for even potentials") {
        ConfigurationD z0(1, 4);
        Rng rng(43);
        for (int i = 0; i < 4; ++i) {
            z0.x(i) = rng.uniform(-1, 1);
            z0.v(i) = rng.uniform(-1, 1);
        }
        const Potential w = Potential::gaussian(1, 1.2, 0.6);
        const Trajectory traj = integrate_nbody(z0, w, 1e-3, 400);
        auto momentum = [](const ConfigurationD& z) {
            double p = 0.0;
            for (int i = 0; i < z.n; ++i) p += z.v(i);
            return p;
        };
        REQUIRE(momentum(traj.states.back()) == Catch::Approx(momentum(z0)).margin(1e-12));
    }
}

TEST_CASE("vlasov solver basics") {
    SECTION("free streaming conserves mass and momentum") {
        GridState1D g0 = gaussian_grid(64, 64);
        normalize(g0);
        const VlasovRun run = solve_vlasov_1d(g0, Potential::zero(1), 0.01, 100);
        const SymObservable v_obs = parse_observable("v1", 1, 1);
        const double p0 = pairing(v_obs, run.states.front());
        const double pt = pairing(v_obs, run.states.back());
        REQUIRE(pt == Catch::Approx(p0).margin(1e-12));
        for (double m : run.mass_history) REQUIRE(std::abs(m - run.mass_history.front()) / run.mass_history.front() < 1e-8);
    }
    SECTION("shear map against the analytic free-streaming answer") {
        GridState1D g0 = gaussian_grid(96, 96);
        normalize(g0);
        const double t_final = 0.25;
        const VlasovRun run = solve_vlasov_1d(g0, Potential::zero(1), 0.0125, 20);
        // <f, gamma^t> = <f(x + t v, v), gamma^0> for transport; compare on x1.
        const SymObservable fx = parse_observable("x1", 1, 1);
        const SymObservable sheared = parse_observable("x1 + 1/4*v1", 1, 1);
        REQUIRE(pairing(fx, run.states.back()) == Catch::Approx(pairing(sheared, g0)).margin(2e-3));
        (void)t_final;
    }
    SECTION("uniform density with even potential feels zero force") {
        GridState1D g(4.0, 2.0, 32, 16);
        for (auto& v : g.values) v = 0.25;
        const auto force = self_consistent_force(g, Potential::gaussian(1, 1.0, 0.5));
        for (double f : force) REQUIRE(f == Catch::Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("weak residuals along exact flows") {
    const Potential w = Potential::gaussian(1, 0.7, 0.9);
    ConfigurationD z0(1, 5);
    Rng rng(44);
    for (int i = 0; i < 5; ++i) {
        z0.x(i) = rng.uniform(-1, 1);
        z0.v(i) = rng.uniform(-0.8, 0.8);
    }
    const double dt = 1e-4;
    const int steps = 2000;
    const Trajectory traj = integrate_nbody(z0, w, dt, steps);

    SECTION("empirical measures are weak solutions of the mean-field equation") {
        const SymObservable f = parse_observable("x1^2*v1 + v1^3", 1, 1);
        auto residual_at = [&](int h_steps) {
            const int mid = steps / 2;
            return std::abs(weak_vlasov_residual(empirical_double(traj.at(static_cast<std::size_t>(mid - h_steps))), empirical_double(traj.at(static_cast<std::size_t>(mid))),
                                                 empirical_double(traj.at(static_cast<std::size_t>(mid + h_steps))), h_steps * dt, w, f));
        };
        const double r1 = residual_at(256), r2 = residual_at(128);
        const double slope = std::log2(r1 / r2);
        REQUIRE(slope >= 1.8);
    }
    SECTION("laws solve the N-particle transport equation weakly") {
        const SymObservable f = SymObservable::from_raw(parse_polynomial("v1^2*x2", 5, 1), 5, 1);
        auto law_at = [&](int m) {
            DiracState<double> s(5, 1);
            s.add_atom(1.0, traj.at(static_cast<std::size_t>(m)).z);
            return s;
        };
        auto residual_at = [&](int h_steps) {
            const int mid = steps / 2;
            return std::abs(weak_liouville_residual(law_at(mid - h_steps), law_at(mid), law_at(mid + h_steps), h_steps * dt, w, f));
        };
        const double slope = std::log2(residual_at(256) / residual_at(128));
        REQUIRE(slope >= 1.8);
    }
    SECTION("marginal hierarchies solve the coupled hierarchy weakly") {
        auto marginals_at = [&](int m, int k) {
            DiracState<double> law(5, 1);
            law.add_atom(1.0, traj.at(static_cast<std::size_t>(m)).z);
            return marginal(law, k);
        };
        for (int k = 1; k <= 3; ++k) {
            const SymObservable f = SymObservable::from_raw(parse_polynomial(k == 1 ? "x1*v1" : "v1^2*x2", k, 1), k, 1);
            auto residual_at = [&](int h_steps) {
                const int mid = steps / 2;
                return std::abs(weak_bbgky_residual(marginals_at(mid - h_steps, k), marginals_at(mid, k), marginals_at(mid + h_steps, k), marginals_at(mid, k + 1), h_steps * dt, 5, w, f));
            };
            const double slope = std::log2(residual_at(256) / residual_at(128));
            REQUIRE(slope >= 1.8);
        }
    }
    SECTION("weak field of the N-particle energy drives the law along the flow") {
        const PolynomialPotential wp = quadratic_potential();
        const Trajectory ptraj = integrate_nbody(z0, Potential::polynomial(wp), dt, steps);
        const int n = 5;
        const SymObservable f = SymObservable::from_raw(parse_polynomial("x1*v1", n, 1), n, 1);
        const WeakVectorField field(ObservableHierarchy::single(newton_observable(wp, n, 10)), AlgebraSpec::single(n));
        auto law_at = [&](int m) {
            DiracState<double> s(n, 1);
            s.add_atom(1.0, ptraj.at(static_cast<std::size_t>(m)).z);
            return SingleLevelState<double>{s};
        };
        const int mid = steps / 2;
        const int h_steps = 64;
        const double h = h_steps * dt;
        const double fd = (pairing(f, law_at(mid + h_steps).state) - pairing(f, law_at(mid - h_steps).state)) / (2.0 * h);
        const double via_field = field.pair(n, f, law_at(mid));
        REQUIRE(fd == Catch::Approx(via_field).margin(10.0 * h * h));
    }
    SECTION("time derivative of empirical expectations matches the symbolic bracket") {
        // d/dt <f, mu^t> computed by finite differences vs N {F, H}_N with
        // polynomial data, to second order in dt.
        const PolynomialPotential wp = quadratic_potential();
        const Potential wpn = Potential::polynomial(wp);
        const Trajectory ptraj = integrate_nbody(z0, wpn, dt, steps);
        const SymObservable f = parse_observable("x1*v1", 1, 1);
        const Functional ff = Functional::expectation(f);
        const SymObservable fpull = pullback_polynomial(ff, ConfigMap::EmpiricalMeasure, 5, 1, 10);
        const SymObservable hnew = newton_observable(wp, 5, 10);
        const SymObservable bracket = lie_bracket(fpull, hnew);
        const int mid = steps / 2;
        for (const int h_steps : {128, 64}) {
            const double fd = (pairing(f, empirical_double(ptraj.at(static_cast<std::size_t>(mid + h_steps)))) -
                               pairing(f, empirical_double(ptraj.at(static_cast<std::size_t>(mid - h_steps))))) /
                              (2.0 * h_steps * dt);
            const double symbolic = bracket.poly().evaluate<double>(ptraj.at(static_cast<std::size_t>(mid)).z);
            REQUIRE(fd == Catch::Approx(symbolic).margin(5e-4 * h_steps * h_steps * dt * dt / (dt * dt) + 1e-7));
        }
    }
}

TEST_CASE("grid hierarchy evaluator agrees with the symbolic weak field") {
    // A grid state is a Dirac sum on cell centers as far as quadrature is
    // concerned, so the grid right-hand side must match the weak field of the
    // limit hierarchy energy paired against tensor powers of those atoms.
    GridState1D g(8.0, 2.0, 6, 6);
    Rng rng(47);
    for (int i = 2; i <= 3; ++i) {  // keep support narrow so wrap never differs
        for (int j = 0; j < g.nv; ++j) g.at(i, j) = rng.uniform(0.1, 1.0);
    }
    const PolynomialPotential wp = quadratic_potential();
    const Potential w = Potential::polynomial(wp);
    const SymObservable f = SymObservable::from_raw(parse_polynomial("x1*v1 + v2^2", 2, 1), 2, 1);

    const double grid_rhs = weak_vlasov_hierarchy_rhs_grid(g, w, f);

    DiracState<double> cells(1, 1);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nv; ++j) {
            if (g.at(i, j) != 0.0) cells.add_atom(g.at(i, j) * g.dx() * g.dv(), {g.xc(i), g.vc(j)});
        }
    }
    // Materialize the tensor powers the level-2 field needs.
    DiracHierarchy<double> hier(1);
    for (int k = 2; k <= 3; ++k) {
        DiracState<double> power(k, 1);
        std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
        while (true) {
            double weight = 1.0;
            std::vector<double> pt;
            for (int s = 0; s < k; ++s) {
                const auto& a = cells.atoms[idx[static_cast<std::size_t>(s)]];
                weight *= a.weight;
                pt.insert(pt.end(), a.point.begin(), a.point.end());
            }
            power.add_atom(weight, std::move(pt));
            int s = k - 1;
            while (s >= 0 && idx[static_cast<std::size_t>(s)] + 1 == cells.atoms.size()) idx[static_cast<std::size_t>(s--)] = 0;
            if (s < 0) break;
            ++idx[static_cast<std::size_t>(s)];
        }
        hier.set_level(k, power);
    }
    const WeakVectorField field(vlasov_hierarchy_weights(wp), AlgebraSpec::limit());
    const double symbolic = field.pair(2, f, hier);
    REQUIRE(grid_rhs == Catch::Approx(symbolic).epsilon(1e-10));
}

TEST_CASE("factorized grid solutions solve the limit hierarchy weakly") {
    const Potential w = Potential::gaussian(1, 0.4, 0.8);
    const SymObservable f = SymObservable::from_raw(parse_polynomial("x1*v1 + v2^2", 2, 1), 2, 1);
    auto residual_for = [&](int cells) {
        GridState1D g0 = gaussian_grid(cells, cells);
        normalize(g0);
        const double dt = 0.02;
        const VlasovRun run = solve_vlasov_1d(g0, w, dt, 10);
        return std::abs(weak_vlasov_hierarchy_residual_grid(run.states[4], run.states[5], run.states[6], dt, w, f));
    };
    const double coarse = residual_for(32), fine = residual_for(64);
    REQUIRE(fine < coarse);
}

TEST_CASE("grid sampling") {
    GridState1D g0 = gaussian_grid(32, 32);
    normalize(g0);
    SECTION("deterministic given the seed") {
        Rng a(99), b(99);
        const ConfigurationD za = sample_from_grid(g0, 50, a);
        const ConfigurationD zb = sample_from_grid(g0, 50, b);
        REQUIRE(za.z == zb.z);
    }
    SECTION("rejects empty draws and zero mass") {
        Rng rng(1);
        REQUIRE_THROWS_AS(sample_from_grid(g0, 0, rng), std::invalid_argument);
        GridState1D empty(1.0, 1.0, 4, 4);
        REQUIRE_THROWS_AS(sample_from_grid(empty, 3, rng), std::invalid_argument);
    }
    SECTION("coarse-bin occupancy within four sigma of the binomial expectation") {
        Rng rng(7);
        const int n = 20000;
        const ConfigurationD z = sample_from_grid(g0, n, rng);
        // 4x4 coarse bins over the domain.
        const int bins = 4;
        std::vector<double> expected(static_cast<std::size_t>(bins * bins), 0.0);
        for (int i = 0; i < g0.nx; ++i) {
            for (int j = 0; j < g0.nv; ++j) {
                const int bx = i * bins / g0.nx, bv = j * bins / g0.nv;
                expected[static_cast<std::size_t>(bx * bins + bv)] += g0.at(i, j) * g0.dx() * g0.dv();
            }
        }
        std::vector<int> counts(static_cast<std::size_t>(bins * bins), 0);
        for (int s = 0; s < n; ++s) {
            int bx = static_cast<int>(z.x(s) / (g0.length / bins));
            int bv = static_cast<int>((z.v(s) + g0.vmax) / (2 * g0.vmax / bins));
            bx = std::clamp(bx, 0, bins - 1);
            bv = std::clamp(bv, 0, bins - 1);
            counts[static_cast<std::size_t>(bx * bins + bv)] += 1;
        }
        for (std::size_t b = 0; b < expected.size(); ++b) {
            const double p = expected[b];
            const double sigma = std::sqrt(n * p * (1 - p));
            REQUIRE(std::abs(counts[b] - n * p) <= 4.0 * sigma + 1.0);
        }
    }
}

TEST_CASE("empirical measure of a single particle is one atom") {
    ConfigurationQ z(1, 1);
    z.x(0) = Rational(2);
    z.v(0) = Rational(-3);
    const auto mu = empirical_measure(z);
    REQUIRE(mu.atoms.size() == 1);
    REQUIRE(mu.atoms[0].weight == Rational(1));
}

TEST_CASE("mean-field experiment smoke run") {
    GridState1D g0 = gaussian_grid(32, 32);
    normalize(g0);
    const Potential w = Potential::gaussian(1, 0.3, 0.8);
    const std::vector<std::pair<std::string, SymObservable>> panel = {
        {"x", parse_observable("x1", 1, 1)},
        {"v2", parse_observable("v1^2", 1, 1)},
    };
    SECTION("single-sample degenerate case stays finite") {
        const MeanFieldResult one = mean_field_experiment(g0, w, {1}, 0.1, 0.02, panel, 2, 7);
        REQUIRE(one.rows.size() == 4);
        for (const auto& row : one.rows) REQUIRE(std::isfinite(row.abs_error));
    }
    const MeanFieldResult res = mean_field_experiment(g0, w, {16, 64}, 0.2, 0.02, panel, 3, 12345);
    REQUIRE(res.rows.size() == 2 * 3 * 2);
    for (const auto& row : res.rows) {
        REQUIRE(std::isfinite(row.empirical));
        REQUIRE(std::isfinite(row.grid));
        REQUIRE(row.abs_error >= 0.0);
    }
    // Determinism of the whole experiment.
    const MeanFieldResult res2 = mean_field_experiment(g0, w, {16, 64}, 0.2, 0.02, panel, 3, 12345);
    REQUIRE(res2.rows.size() == res.rows.size());
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        REQUIRE(res.rows[i].empirical == res2.rows[i].empirical);
        REQUIRE(res.rows[i].grid == res2.rows[i].grid);
    }
}
