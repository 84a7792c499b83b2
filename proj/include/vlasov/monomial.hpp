#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace vlasov {

// Exponent vector over the flattened variable list. For a level-k observable in
// dimension d the layout is per particle slot: x_i^1..x_i^d, v_i^1..v_i^d, so
// slot i occupies indices [2*d*i, 2*d*(i+1)).
struct Monomial {
    std::vector<std::uint8_t> exps;

    Monomial() = default;
    explicit Monomial(std::size_t nvars) : exps(nvars, 0) {}

    std::size_t nvars() const { return exps.size(); }

    unsigned degree() const {
        unsigned s = 0;
        for (auto e : exps) s += e;
        return s;
    }

    bool is_constant() const {
        for (auto e : exps) {
            if (e != 0) return false;
        }
        return true;
    }

    Monomial times(const Monomial& other) const {
        Monomial out = *this;
        for (std::size_t i = 0; i < exps.size(); ++i) out.exps[i] = static_cast<std::uint8_t>(out.exps[i] + other.exps[i]);
        return out;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) { return a.exps == b.exps; }
};

// Graded-lexicographic order; total degree first, then lex on the flat list.
// This fixes the deterministic canonical form of every polynomial.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        unsigned da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.exps < b.exps;
    }
};

namespace detail {

inline int var_index(int d, int slot, bool velocity, int coord) {
    return 2 * d * slot + (velocity ? d : 0) + coord;
}

}  // namespace detail

// Moves particle blocks: output slot slot_map[i] receives the block of input
// slot i. slot_map entries must be distinct and < target_slots.
inline Monomial relabel_blocks(const Monomial& m, int d, const std::vector<int>& slot_map, int target_slots) {
    Monomial out(static_cast<std::size_t>(2 * d * target_slots));
    const int block = 2 * d;
    for (std::size_t i = 0; i < slot_map.size(); ++i) {
        for (int j = 0; j < block; ++j) out.exps[static_cast<std::size_t>(slot_map[i] * block + j)] = m.exps[i * static_cast<std::size_t>(block) + static_cast<std::size_t>(j)];
    }
    return out;
}

}  // namespace vlasov
