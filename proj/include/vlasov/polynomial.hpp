#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlasov/monomial.hpp"
#include "vlasov/rational.hpp"

namespace vlasov {

// Sparse multivariate polynomial with exact rational coefficients. Zero
// coefficients are never stored; the grlex term order makes the map iteration
// (and therefore printing and serialization) deterministic.
class Polynomial {
public:
    using TermMap = std::map<Monomial, Rational, GrlexLess>;

    Polynomial() : nvars_(0) {}
    explicit Polynomial(int nvars) : nvars_(nvars) {}

    static Polynomial constant(int nvars, const Rational& c) {
        Polynomial p(nvars);
        if (c != 0) p.terms_.emplace(Monomial(static_cast<std::size_t>(nvars)), c);
        return p;
    }

    static Polynomial variable(int nvars, int index, const Rational& coeff = Rational(1)) {
        Polynomial p(nvars);
        Monomial m(static_cast<std::size_t>(nvars));
        m.exps[static_cast<std::size_t>(index)] = 1;
        if (coeff != 0) p.terms_.emplace(std::move(m), coeff);
        return p;
    }

    int nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    unsigned degree() const {
        unsigned deg = 0;
        for (const auto& [m, c] : terms_) deg = std::max(deg, m.degree());
        return deg;
    }

    void add_term(const Monomial& m, const Rational& c) {
        if (c == 0) return;
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }

    Polynomial& operator+=(const Polynomial& other) {
        check_same_vars(other);
        for (const auto& [m, c] : other.terms_) add_term(m, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& other) {
        check_same_vars(other);
        for (const auto& [m, c] : other.terms_) add_term(m, -c);
        return *this;
    }

    Polynomial& operator*=(const Rational& s) {
        if (s == 0) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
    friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
    friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        a.check_same_vars(b);
        Polynomial out(a.nvars_);
        for (const auto& [ma, ca] : a.terms_) {
            for (const auto& [mb, cb] : b.terms_) out.add_term(ma.times(mb), ca * cb);
        }
        return out;
    }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }

    Polynomial derivative(int var) const {
        Polynomial out(nvars_);
        const auto v = static_cast<std::size_t>(var);
        for (const auto& [m, c] : terms_) {
            if (m.exps[v] == 0) continue;
            Monomial dm = m;
            const Rational coeff = c * static_cast<int>(dm.exps[v]);
            dm.exps[v] -= 1;
            out.add_term(dm, coeff);
        }
        return out;
    }

    // Exact with T = Rational, floating with T = double.
    template <class T>
    T evaluate(const std::vector<T>& point) const {
        if (point.size() != static_cast<std::size_t>(nvars_)) throw std::invalid_argument("evaluate: wrong point dimension");
        T total = T(0);
        for (const auto& [m, c] : terms_) {
            T term = coeff_as<T>(c);
            for (std::size_t i = 0; i < m.exps.size(); ++i) {
                for (unsigned e = 0; e < m.exps[i]; ++e) term *= point[i];
            }
            total += term;
        }
        return total;
    }

    // Moves every particle block through slot_map into a polynomial on
    // target_slots blocks (see relabel_blocks for conventions).
    Polynomial relabel(int d, const std::vector<int>& slot_map, int target_slots) const {
        Polynomial out(2 * d * target_slots);
        for (const auto& [m, c] : terms_) out.add_term(relabel_blocks(m, d, slot_map, target_slots), c);
        return out;
    }

    std::string str(const std::function<std::string(int)>& var_name) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms_) {
            Rational coeff = c;
            if (!first) {
                os << (coeff < 0 ? " - " : " + ");
                if (coeff < 0) coeff = -coeff;
            }
            first = false;
            bool printed_coeff = false;
            if (m.is_constant() || coeff != 1) {
                os << coeff;
                printed_coeff = true;
            }
            for (std::size_t i = 0; i < m.exps.size(); ++i) {
                if (m.exps[i] == 0) continue;
                if (printed_coeff) os << "*";
                os << var_name(static_cast<int>(i));
                if (m.exps[i] > 1) os << "^" << static_cast<int>(m.exps[i]);
                printed_coeff = true;
            }
        }
        return os.str();
    }

private:
    template <class T>
    static T coeff_as(const Rational& c) {
        if constexpr (std::is_same_v<T, Rational>) {
            return c;
        } else {
            return static_cast<T>(to_double(c));
        }
    }

    void check_same_vars(const Polynomial& other) const {
        if (nvars_ != other.nvars_) throw std::invalid_argument("polynomial variable-count mismatch");
    }

    int nvars_;
    TermMap terms_;
};

}  // namespace vlasov
