#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vlasov/dynamics.hpp"
#include "vlasov/lie_poisson.hpp"
#include "vlasov/parse.hpp"

namespace vlasov {

using Json = nlohmann::json;

// Fixed shortest-round-trip formatting so identical runs produce
// byte-identical artifacts.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

inline std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

// --- observable hierarchies -------------------------------------------------

inline Json to_json(const ObservableHierarchy& h) {
    Json levels = Json::object();
    for (const auto& [k, f] : h.levels()) levels[std::to_string(k)] = f.str();
    return Json{{"d", h.d()}, {"levels", levels}};
}

inline ObservableHierarchy hierarchy_from_json(const Json& j, unsigned cap = kDefaultDegreeCap) {
    const int d = j.at("d").get<int>();
    ObservableHierarchy h(d);
    for (const auto& [key, value] : j.at("levels").items()) {
        const int k = std::stoi(key);
        h.set_level(k, parse_observable(value.get<std::string>(), k, d, cap));
    }
    return h;
}

// --- dirac states -----------------------------------------------------------

inline Json to_json(const DiracState<Rational>& s) {
    Json atoms = Json::array();
    for (const auto& a : s.atoms) {
        Json pt = Json::array();
        for (const auto& c : a.point) pt.push_back(rational_str(c));
        atoms.push_back(Json{{"weight", rational_str(a.weight)}, {"point", pt}});
    }
    return Json{{"k", s.k}, {"d", s.d}, {"mode", "exact"}, {"atoms", atoms}};
}

inline Json to_json(const DiracState<double>& s) {
    Json atoms = Json::array();
    for (const auto& a : s.atoms) {
        Json pt = Json::array();
        for (const double c : a.point) pt.push_back(c);
        atoms.push_back(Json{{"weight", a.weight}, {"point", pt}});
    }
    return Json{{"k", s.k}, {"d", s.d}, {"mode", "float"}, {"atoms", atoms}};
}

inline DiracState<Rational> dirac_exact_from_json(const Json& j) {
    if (j.at("mode").get<std::string>() != "exact") throw std::invalid_argument("expected an exact-mode state");
    DiracState<Rational> s(j.at("k").get<int>(), j.at("d").get<int>());
    for (const auto& atom : j.at("atoms")) {
        std::vector<Rational> pt;
        for (const auto& c : atom.at("point")) pt.push_back(parse_rational(c.get<std::string>()));
        s.add_atom(parse_rational(atom.at("weight").get<std::string>()), std::move(pt));
    }
    return s;
}

inline DiracState<double> dirac_float_from_json(const Json& j) {
    if (j.at("mode").get<std::string>() != "float") throw std::invalid_argument("expected a float-mode state");
    DiracState<double> s(j.at("k").get<int>(), j.at("d").get<int>());
    for (const auto& atom : j.at("atoms")) {
        std::vector<double> pt;
        for (const auto& c : atom.at("point")) pt.push_back(c.get<double>());
        s.add_atom(atom.at("weight").get<double>(), std::move(pt));
    }
    return s;
}

// --- grid states ------------------------------------------------------------
// CSV layout: header line "L,V,Nx,Nv", then Nx rows of Nv values (row-major).

inline std::string grid_to_csv(const GridState1D& g) {
    std::ostringstream os;
    os << format_double(g.length) << "," << format_double(g.vmax) << "," << g.nx << "," << g.nv << "\n";
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.nv; ++j) {
            if (j) os << ",";
            os << format_double(g.at(i, j));
        }
        os << "\n";
    }
    return os.str();
}

inline GridState1D grid_from_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("grid csv: missing header");
    std::istringstream header(line);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(header, tok, ',')) parts.push_back(tok);
    if (parts.size() != 4) throw std::invalid_argument("grid csv: header must be L,V,Nx,Nv");
    GridState1D g(std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2]), std::stoi(parts[3]));
    for (int i = 0; i < g.nx; ++i) {
        if (!std::getline(in, line)) throw std::invalid_argument("grid csv: missing value row");
        std::istringstream row(line);
        for (int j = 0; j < g.nv; ++j) {
            if (!std::getline(row, tok, ',')) throw std::invalid_argument("grid csv: short row");
            g.at(i, j) = std::stod(tok);
        }
    }
    return g;
}

// --- functionals ------------------------------------------------------------

inline Json to_json(const Functional& f) {
    switch (f.kind()) {
        case Functional::Kind::Constant:
            return Json{{"kind", "constant"}, {"value", rational_str(f.constant_value())}};
        case Functional::Kind::Expectation:
            return Json{{"kind", "expectation"}, {"generator", to_json(f.generator())}};
        case Functional::Kind::Sum:
        case Functional::Kind::Product: {
            Json children = Json::array();
            for (const auto& c : f.children()) children.push_back(to_json(c));
            return Json{{"kind", f.kind() == Functional::Kind::Sum ? "sum" : "product"}, {"children", children}};
        }
    }
    throw std::logic_error("unreachable functional kind");
}

inline Functional functional_from_json(const Json& j, unsigned cap = kDefaultDegreeCap) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return Functional::constant(parse_rational(j.at("value").get<std::string>()));
    if (kind == "expectation") return Functional::expectation(hierarchy_from_json(j.at("generator"), cap));
    if (kind != "sum" && kind != "product") throw std::invalid_argument("unknown functional kind '" + kind + "'");
    std::vector<Functional> children;
    for (const auto& c : j.at("children")) children.push_back(functional_from_json(c, cap));
    return kind == "sum" ? Functional::sum(std::move(children)) : Functional::product(std::move(children));
}

// --- csv tables -------------------------------------------------------------

class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) : cols_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) os_ << ",";
            os_ << header[i];
        }
        os_ << "\n";
    }

    CsvWriter& field(const std::string& s) {
        if (in_row_) os_ << ",";
        os_ << s;
        in_row_ = true;
        ++emitted_;
        return *this;
    }

    CsvWriter& field(double x) { return field(format_double(x)); }
    CsvWriter& field(std::int64_t x) { return field(std::to_string(x)); }
    CsvWriter& field(std::uint64_t x) { return field(std::to_string(x)); }
    CsvWriter& field(int x) { return field(std::to_string(x)); }

    void end_row() {
        if (emitted_ != cols_) throw std::logic_error("csv row width mismatch");
        os_ << "\n";
        in_row_ = false;
        emitted_ = 0;
    }

    std::string str() const { return os_.str(); }

private:
    std::ostringstream os_;
    std::size_t cols_;
    std::size_t emitted_ = 0;
    bool in_row_ = false;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << content;
}

inline std::string trajectory_to_csv(const Trajectory& traj) {
    const int n = traj.states.empty() ? 0 : traj.states.front().n;
    const int d = traj.states.empty() ? 1 : traj.states.front().d;
    std::vector<std::string> header = {"t"};
    for (int i = 0; i < n; ++i) {
        for (int c = 0; c < d; ++c) header.push_back("x" + std::to_string(i + 1) + "_" + std::to_string(c + 1));
        for (int c = 0; c < d; ++c) header.push_back("v" + std::to_string(i + 1) + "_" + std::to_string(c + 1));
    }
    CsvWriter csv(header);
    for (std::size_t m = 0; m < traj.states.size(); ++m) {
        csv.field(static_cast<double>(m) * traj.dt);
        const auto& z = traj.states[m];
        for (int i = 0; i < n; ++i) {
            for (int c = 0; c < d; ++c) csv.field(z.x(i, c));
            for (int c = 0; c < d; ++c) csv.field(z.v(i, c));
        }
        csv.end_row();
    }
    return csv.str();
}

inline std::string mean_field_to_csv(const MeanFieldResult& res) {
    CsvWriter csv({"N", "seed", "observable", "empirical_value", "grid_value", "abs_error"});
    for (const auto& row : res.rows) {
        csv.field(row.n).field(row.seed).field(row.observable).field(row.empirical).field(row.grid).field(row.abs_error);
        csv.end_row();
    }
    return csv.str();
}

}  // namespace vlasov
