#pragma once

#include <cctype>
#include <stdexcept>
#include <string>

#include "vlasov/observables.hpp"

namespace vlasov {

struct ParseError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// Recursive-descent parser for the textual polynomial syntax:
//   variables x<i>_<c> and v<i>_<c> (x2 is shorthand for x2_1),
//   integer and p/q literals, + - * ^ and parentheses.
class PolyParser {
public:
    PolyParser(const std::string& text, int k, int d) : text_(text), k_(k), d_(d) {}

    Polynomial parse() {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return p;
    }

private:
    Polynomial expr() {
        Polynomial acc = term();
        while (true) {
            skip_ws();
            if (peek() == '+') {
                ++pos_;
                acc += term();
            } else if (peek() == '-') {
                ++pos_;
                acc -= term();
            } else {
                return acc;
            }
        }
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (true) {
            skip_ws();
            if (peek() == '*') {
                ++pos_;
                acc = acc * factor();
            } else {
                return acc;
            }
        }
    }

    Polynomial factor() {
        skip_ws();
        bool neg = false;
        while (peek() == '-') {
            neg = !neg;
            ++pos_;
            skip_ws();
        }
        Polynomial base = primary();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            const unsigned e = parse_uint();
            Polynomial powed = Polynomial::constant(nvars(), Rational(1));
            for (unsigned i = 0; i < e; ++i) powed = powed * base;
            base = powed;
        }
        if (neg) base *= Rational(-1);
        return base;
    }

    Polynomial primary() {
        skip_ws();
        const char c = peek();
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            skip_ws();
            if (peek() != ')') fail("expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (c == 'x' || c == 'v') return variable();
        if (std::isalpha(static_cast<unsigned char>(c))) fail("unknown identifier");
        fail("expected a literal, variable or '('");
        return Polynomial(nvars());
    }

    Polynomial number() {
        const BigInt num = parse_bigint();
        skip_ws();
        if (peek() == '/') {
            ++pos_;
            skip_ws();
            const BigInt den = parse_bigint();
            if (den == 0) fail("zero denominator");
            return Polynomial::constant(nvars(), Rational(num, den));
        }
        return Polynomial::constant(nvars(), Rational(num));
    }

    Polynomial variable() {
        const bool velocity = peek() == 'v';
        ++pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("variable index expected");
        const unsigned particle = parse_uint();
        unsigned coord = 1;
        if (peek() == '_') {
            ++pos_;
            if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("coordinate index expected");
            coord = parse_uint();
        }
        if (particle < 1 || particle > static_cast<unsigned>(k_)) fail("particle index out of range");
        if (coord < 1 || coord > static_cast<unsigned>(d_)) fail("coordinate index out of range");
        return Polynomial::variable(nvars(), detail::var_index(d_, static_cast<int>(particle) - 1, velocity, static_cast<int>(coord) - 1));
    }

    BigInt parse_bigint() {
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(peek()))) digits.push_back(text_[pos_++]);
        if (digits.empty()) fail("number expected");
        return BigInt(digits);
    }

    unsigned parse_uint() {
        const BigInt b = parse_bigint();
        if (b > 1000000) fail("index too large");
        return b.convert_to<unsigned>();
    }

    int nvars() const { return 2 * d_ * k_; }
    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int k_;
    int d_;
};

}  // namespace detail

inline Polynomial parse_polynomial(const std::string& text, int k, int d) {
    return detail::PolyParser(text, k, d).parse();
}

inline SymObservable parse_observable(const std::string& text, int k, int d, unsigned cap = kDefaultDegreeCap) {
    return SymObservable::from_raw(parse_polynomial(text, k, d), k, d, cap);
}

}  // namespace vlasov
