// vlh: batch harness for the Lie-Poisson hierarchy library. Subcommands run
// the exact identity suites, the morphism suites, the dynamics solvers, the
// mean-field experiment and the large-N limit tables, all config-driven with
// machine-readable output.
//
// Exit codes: 0 all checks pass, 1 identity violation, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "vlasov/dynamics.hpp"
#include "vlasov/io.hpp"
#include "vlasov/suites.hpp"

using namespace vlasov;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key/value config; INI-style text or a flat JSON object.
class RunConfig {
public:
    static RunConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse(buffer.str());
    }

    static RunConfig parse(const std::string& text) {
        RunConfig cfg;
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string::npos && text[first] == '{') {
            Json j = Json::parse(text);
            for (const auto& [key, value] : j.items()) {
                if (value.is_string()) {
                    cfg.values_[key] = value.get<std::string>();
                } else {
                    cfg.values_[key] = value.dump();
                }
            }
            return cfg;
        }
        std::istringstream lines(text);
        std::string line;
        int lineno = 0;
        while (std::getline(lines, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                if (line.find_first_not_of(" \t\r") != std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
                continue;
            }
            cfg.values_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return cfg;
    }

    // Every key must be consumed by exactly one getter; leftovers are errors.
    void finish() const {
        for (const auto& [key, value] : values_) {
            if (!consumed_.count(key)) throw ConfigError("unknown config key '" + key + "'");
        }
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        consumed_.insert(key);
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    long get_long(const std::string& key, long fallback) const {
        const std::string s = get_string(key, std::to_string(fallback));
        try {
            std::size_t pos = 0;
            const long v = std::stol(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const {
        const std::string s = get_string(key, format_double(fallback));
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        const std::string s = get_string(key, fallback ? "true" : "false");
        if (s == "true" || s == "1") return true;
        if (s == "false" || s == "0") return false;
        throw ConfigError("config key '" + key + "': expected true/false, got '" + s + "'");
    }

    std::vector<long> get_long_list(const std::string& key, const std::string& fallback) const {
        const std::string s = get_string(key, fallback);
        std::vector<long> out;
        std::istringstream iss(s);
        std::string tok;
        while (std::getline(iss, tok, ',')) {
            try {
                out.push_back(std::stol(trim(tok)));
            } catch (const std::exception&) {
                throw ConfigError("config key '" + key + "': expected a comma-separated integer list");
            }
        }
        if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
        return out;
    }

private:
    static std::string trim(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return "";
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

struct CommonArgs {
    std::string config_path;
    std::string out_path;
    std::string mode = "exact";
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, const std::string& default_mode) {
    args.mode = default_mode;
    cmd->add_option("--config", args.config_path, "path to a key=value or flat-JSON config file");
    cmd->add_option("--out", args.out_path, "output path (stdout when omitted)");
    cmd->add_option("--mode", args.mode, "arithmetic mode: exact or float")->check(CLI::IsMember({"exact", "float"}));
    cmd->add_option("--seed", args.seed, "seed overriding the config")->each([&args](const std::string&) { args.seed_given = true; });
}

RunConfig load_config(const CommonArgs& args) {
    if (args.config_path.empty()) return RunConfig::parse("");
    return RunConfig::load(args.config_path);
}

std::uint64_t resolve_seed(const CommonArgs& args, const RunConfig& cfg, std::uint64_t fallback) {
    const auto from_cfg = static_cast<std::uint64_t>(cfg.get_long("seed", static_cast<long>(fallback)));
    return args.seed_given ? args.seed : from_cfg;
}

void emit(const CommonArgs& args, const std::string& content) {
    if (args.out_path.empty()) {
        std::cout << content;
    } else {
        write_file(args.out_path, content);
    }
}

void require_mode(const CommonArgs& args, const std::string& wanted) {
    if (args.mode != wanted) throw ConfigError("this subcommand runs in " + wanted + " mode only");
}

Potential potential_from_config(const RunConfig& cfg, int d) {
    const std::string kind = cfg.get_string("potential", "zero");
    if (kind == "zero") return Potential::zero(d);
    if (kind == "gaussian") {
        return Potential::gaussian(d, cfg.get_double("potential_amplitude", 1.0), cfg.get_double("potential_width", 1.0));
    }
    if (kind == "poly") {
        const std::string text = cfg.get_string("potential_poly", "x1^2");
        // Displacement components are named x1_1 .. x1_d; velocity names are
        // rejected because the potential depends on positions only.
        Polynomial as_obs;
        try {
            as_obs = parse_polynomial(text, 1, d);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("config key 'potential_poly': ") + e.what());
        }
        Polynomial w(d);
        for (const auto& [m, c] : as_obs.terms()) {
            Monomial u(static_cast<std::size_t>(d));
            for (int cvar = 0; cvar < d; ++cvar) {
                u.exps[static_cast<std::size_t>(cvar)] = m.exps[static_cast<std::size_t>(cvar)];
                if (m.exps[static_cast<std::size_t>(d + cvar)] != 0) throw ConfigError("config key 'potential_poly': velocity variables are not allowed");
            }
            w.add_term(u, c);
        }
        try {
            return Potential::polynomial(PolynomialPotential(d, w));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config key 'potential_poly': ") + e.what());
        }
    }
    throw ConfigError("config key 'potential': expected zero, gaussian or poly");
}

GridState1D initial_grid_from_config(const RunConfig& cfg) {
    GridState1D g(cfg.get_double("L", 8.0), cfg.get_double("V", 4.0), static_cast<int>(cfg.get_long("nx", 64)), static_cast<int>(cfg.get_long("nv", 64)));
    const double x0 = cfg.get_double("init_x_center", g.length / 2.0);
    const double sx = cfg.get_double("init_x_width", 0.5);
    const double sv = cfg.get_double("init_v_width", 0.5);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nv; ++j) {
            const double x = g.xc(i) - x0, v = g.vc(j);
            g.at(i, j) = std::exp(-x * x / (2 * sx * sx) - v * v / (2 * sv * sv));
        }
    }
    const double mass = g.mass();
    for (auto& v : g.values) v /= mass;
    return g;
}

int finish_checks(const CommonArgs& args, const std::vector<CheckReport>& reports) {
    const Json out = report_json(reports);
    emit(args, out.dump(2) + "\n");
    for (const auto& r : reports) {
        if (!r.ok()) return 1;
    }
    return 0;
}

int run_algebra_check(const CommonArgs& args) {
    require_mode(args, "exact");
    const RunConfig cfg = load_config(args);
    const auto triples = static_cast<int>(cfg.get_long("triples", 100));
    const auto k_max = static_cast<int>(cfg.get_long("k_max", 3));
    const auto d_max = static_cast<int>(cfg.get_long("d_max", 2));
    const auto degree = static_cast<unsigned>(cfg.get_long("degree", 3));
    const auto degree_cap = static_cast<unsigned>(cfg.get_long("degree_cap", kDefaultDegreeCap));
    const auto hier_triples = static_cast<int>(cfg.get_long("hier_triples", triples));
    const auto hier_n_max = static_cast<int>(cfg.get_long("hier_n_max", 4));
    const auto hier_levels = static_cast<int>(cfg.get_long("hier_levels", 2));
    const auto limit_triples = static_cast<int>(cfg.get_long("limit_triples", triples));
    const auto embed_n_max = static_cast<int>(cfg.get_long("embed_n_max", 5));
    const auto cross_pairs = static_cast<int>(cfg.get_long("cross_pairs", 20));
    const auto separation_degree = static_cast<unsigned>(cfg.get_long("separation_degree", 2));
    const bool inject_fault = cfg.get_bool("inject_fault", false);
    const std::uint64_t seed = resolve_seed(args, cfg, 12001);
    cfg.finish();
    if (degree > degree_cap) throw ConfigError("config: degree exceeds degree_cap");
    if (triples < 1 || k_max < 1 || d_max < 1) throw ConfigError("config: counts must be positive");

    Rng rng(seed);
    std::vector<CheckReport> reports;
    reports.push_back(single_algebra_suite(rng, triples, k_max, d_max, degree, inject_fault));
    reports.push_back(finite_hierarchy_suite(rng, hier_triples, hier_n_max, hier_levels, degree));
    reports.push_back(limit_hierarchy_suite(rng, limit_triples, hier_levels, degree));
    reports.push_back(embedding_suite(rng, embed_n_max, degree, cross_pairs));
    reports.push_back(separation_suite(rng, 2, separation_degree));
    return finish_checks(args, reports);
}

int run_morphism_check(const CommonArgs& args) {
    require_mode(args, "exact");
    const RunConfig cfg = load_config(args);
    const auto trials = static_cast<int>(cfg.get_long("trials", 50));
    const auto degree = static_cast<unsigned>(cfg.get_long("degree", 3));
    const auto level_max = static_cast<int>(cfg.get_long("level_max", 2));
    const auto pullback_trials = static_cast<int>(cfg.get_long("pullback_trials", 50));
    const auto vf_trials = static_cast<int>(cfg.get_long("vector_field_trials", 10));
    const bool inject_fault = cfg.get_bool("inject_fault", false);
    const std::uint64_t seed = resolve_seed(args, cfg, 12002);
    cfg.finish();
    if (trials < 1) throw ConfigError("config: trials must be positive");

    Rng rng(seed);
    std::vector<CheckReport> reports;
    reports.push_back(morphism_suite(rng, trials, degree, level_max, inject_fault));
    reports.push_back(pullback_suite(rng, pullback_trials));
    reports.push_back(vector_field_suite(rng, vf_trials));
    return finish_checks(args, reports);
}

int run_nbody(const CommonArgs& args) {
    require_mode(args, "float");
    const RunConfig cfg = load_config(args);
    const auto n = static_cast<int>(cfg.get_long("n", 8));
    const auto d = static_cast<int>(cfg.get_long("d", 1));
    const double dt = cfg.get_double("dt", 1e-3);
    const auto steps = static_cast<int>(cfg.get_long("steps", 1000));
    const double box = cfg.get_double("init_box", 1.0);
    const Potential w = potential_from_config(cfg, d);
    const std::uint64_t seed = resolve_seed(args, cfg, 12003);
    cfg.finish();
    if (n < 1 || d < 1 || dt <= 0 || steps < 1) throw ConfigError("config: n, d, dt, steps must be positive");

    Rng rng(seed);
    ConfigurationD z0(d, n);
    for (auto& c : z0.z) c = rng.uniform(-box, box);
    const Trajectory traj = integrate_nbody(z0, w, dt, steps);
    emit(args, trajectory_to_csv(traj));
    return 0;
}

int run_vlasov1d(const CommonArgs& args) {
    require_mode(args, "float");
    const RunConfig cfg = load_config(args);
    const double dt = cfg.get_double("dt", 0.01);
    const auto steps = static_cast<int>(cfg.get_long("steps", 100));
    const GridState1D g0 = initial_grid_from_config(cfg);
    const Potential w = potential_from_config(cfg, 1);
    resolve_seed(args, cfg, 0);  // accepted for interface uniformity
    cfg.finish();
    if (dt <= 0 || steps < 1) throw ConfigError("config: dt and steps must be positive");

    const VlasovRun run = solve_vlasov_1d(g0, w, dt, steps);
    std::ostringstream out;
    out << grid_to_csv(run.states.back());
    emit(args, out.str());
    Json meta{{"mass_initial", run.mass_history.front()}, {"mass_final", run.mass_history.back()}, {"warnings", run.warnings}};
    std::cerr << meta.dump() << "\n";
    return 0;
}

int run_meanfield(const CommonArgs& args) {
    require_mode(args, "float");
    const RunConfig cfg = load_config(args);
    const auto n_list_long = cfg.get_long_list("n_list", "64,256,1024");
    const double t_final = cfg.get_double("T", 0.5);
    const double dt = cfg.get_double("dt", 0.005);
    const auto seeds = static_cast<int>(cfg.get_long("seeds", 20));
    const GridState1D g0 = initial_grid_from_config(cfg);
    const Potential w = potential_from_config(cfg, 1);
    const std::uint64_t seed = resolve_seed(args, cfg, 12004);
    cfg.finish();
    if (t_final <= 0 || dt <= 0 || seeds < 1) throw ConfigError("config: T, dt, seeds must be positive");

    std::vector<int> n_list;
    for (long n : n_list_long) {
        if (n < 1) throw ConfigError("config: n_list entries must be positive");
        n_list.push_back(static_cast<int>(n));
    }
    const std::vector<std::pair<std::string, SymObservable>> panel = {
        {"x", parse_observable("x1", 1, 1)},        {"v", parse_observable("v1", 1, 1)},
        {"x2", parse_observable("x1^2", 1, 1)},     {"v2", parse_observable("v1^2", 1, 1)},
        {"xv", parse_observable("x1*v1", 1, 1)},
    };
    const MeanFieldResult res = mean_field_experiment(g0, w, n_list, t_final, dt, panel, seeds, seed);
    emit(args, mean_field_to_csv(res));
    if (!res.warnings.empty()) {
        for (const auto& warning : res.warnings) std::cerr << warning << "\n";
    }
    return 0;
}

int run_limits(const CommonArgs& args) {
    require_mode(args, "exact");
    const RunConfig cfg = load_config(args);
    const auto n_values = cfg.get_long_list("n_values", "1000,1000000");
    const auto l_max = static_cast<int>(cfg.get_long("l_max", 3));
    const auto j_max = static_cast<int>(cfg.get_long("j_max", 3));
    const auto pairs = static_cast<int>(cfg.get_long("pairs", 10));
    const auto gap_n1 = static_cast<int>(cfg.get_long("gap_n1", 100));
    const auto gap_n2 = static_cast<int>(cfg.get_long("gap_n2", 200));
    const std::uint64_t seed = resolve_seed(args, cfg, 12005);
    cfg.finish();
    if (l_max < 1 || j_max < 1 || pairs < 1) throw ConfigError("config: l_max, j_max, pairs must be positive");

    Rng rng(seed);
    const auto coeff_rows = coefficient_limit_rows(n_values, l_max, j_max);
    const auto gap_rows = bracket_gap_rows(rng, pairs, gap_n1, gap_n2);

    CsvWriter csv({"table", "N", "l", "j", "r", "value", "error", "bound", "gap_n1", "gap_n2", "ratio", "pass"});
    bool all_pass = true;
    for (const auto& row : coeff_rows) {
        csv.field("coefficient").field(static_cast<std::int64_t>(row.n)).field(row.l).field(row.j).field(row.r);
        csv.field(row.scaled).field(row.error).field(row.bound).field("").field("").field("").field(row.pass ? "1" : "0");
        csv.end_row();
        all_pass = all_pass && row.pass;
    }
    for (const auto& row : gap_rows) {
        csv.field("bracket-gap").field(row.pair).field("").field("").field("");
        csv.field("").field("").field("").field(row.gap_n1).field(row.gap_n2).field(row.ratio).field(row.pass ? "1" : "0");
        csv.end_row();
        all_pass = all_pass && row.pass;
    }
    emit(args, csv.str());
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lie-Poisson hierarchy toolkit: exact bracket/morphism suites and desk-scale kinetic dynamics"};
    app.require_subcommand(1);

    CommonArgs algebra_args, morphism_args, nbody_args, vlasov_args, meanfield_args, limits_args;
    CLI::App* algebra = app.add_subcommand("algebra-check", "run the exact Lie-algebra identity suites");
    add_common(algebra, algebra_args, "exact");
    CLI::App* morphism = app.add_subcommand("morphism-check", "run the exact Poisson-morphism and pullback suites");
    add_common(morphism, morphism_args, "exact");
    CLI::App* nbody = app.add_subcommand("nbody", "integrate the interacting particle system, CSV trajectory out");
    add_common(nbody, nbody_args, "float");
    CLI::App* vlasov1d = app.add_subcommand("vlasov1d", "solve the 1-D kinetic equation on a phase-space grid");
    add_common(vlasov1d, vlasov_args, "float");
    CLI::App* meanfield = app.add_subcommand("meanfield", "empirical-measure vs grid comparison across N");
    add_common(meanfield, meanfield_args, "float");
    CLI::App* limits = app.add_subcommand("limits", "large-N coefficient and bracket-gap tables");
    add_common(limits, limits_args, "exact");

    try {
        app.parse(argc, argv);
        if (algebra->parsed()) return run_algebra_check(algebra_args);
        if (morphism->parsed()) return run_morphism_check(morphism_args);
        if (nbody->parsed()) return run_nbody(nbody_args);
        if (vlasov1d->parsed()) return run_vlasov1d(vlasov_args);
        if (meanfield->parsed()) return run_meanfield(meanfield_args);
        if (limits->parsed()) return run_limits(limits_args);
        return 2;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const DegreeCapExceeded& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
