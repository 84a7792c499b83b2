#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "vlasov/linalg.hpp"
#include "vlasov/observables.hpp"

namespace vlasov {

// Finitely supported sequence of observables, one per particle count. Absent
// levels are zero. Elements of both the N-hierarchy algebra and its limit.
class ObservableHierarchy {
public:
    ObservableHierarchy() : d_(1) {}
    explicit ObservableHierarchy(int d) : d_(d) {}

    static ObservableHierarchy single(const SymObservable& f) {
        ObservableHierarchy h(f.d());
        h.set_level(f.k(), f);
        return h;
    }

    int d() const { return d_; }
    const std::map<int, SymObservable>& levels() const { return levels_; }
    bool is_zero() const { return levels_.empty(); }

    int max_level() const {
        return levels_.empty() ? 0 : levels_.rbegin()->first;
    }

    bool has_level(int k) const { return levels_.count(k) > 0; }

    SymObservable level(int k, unsigned cap = kDefaultDegreeCap) const {
        auto it = levels_.find(k);
        if (it != levels_.end()) return it->second;
        return SymObservable(k, d_, cap);
    }

    void set_level(int k, const SymObservable& f) {
        if (f.k() != k) throw std::invalid_argument("hierarchy level tag does not match observable particle count");
        if (f.d() != d_) throw std::invalid_argument("hierarchy dimension mismatch");
        if (f.is_zero()) {
            levels_.erase(k);
        } else {
            levels_.insert_or_assign(k, f);
        }
    }

    void add_level(int k, const SymObservable& f) {
        if (f.is_zero()) return;
        if (has_level(k)) {
            set_level(k, level(k, f.degree_cap()) + f);
        } else {
            set_level(k, f);
        }
    }

    ObservableHierarchy& operator+=(const ObservableHierarchy& other) {
        for (const auto& [k, f] : other.levels_) add_level(k, f);
        return *this;
    }

    ObservableHierarchy& operator*=(const Rational& s) {
        if (s == 0) {
            levels_.clear();
            return *this;
        }
        for (auto& [k, f] : levels_) f *= s;
        return *this;
    }

    friend ObservableHierarchy operator+(ObservableHierarchy a, const ObservableHierarchy& b) { return a += b; }
    friend ObservableHierarchy operator*(ObservableHierarchy a, const Rational& s) { return a *= s; }
    friend ObservableHierarchy operator*(const Rational& s, ObservableHierarchy a) { return a *= s; }

    friend ObservableHierarchy operator-(ObservableHierarchy a) { return a *= Rational(-1); }

    friend ObservableHierarchy operator-(ObservableHierarchy a, const ObservableHierarchy& b) {
        ObservableHierarchy nb = b;
        nb *= Rational(-1);
        return a += nb;
    }

    friend bool operator==(const ObservableHierarchy& a, const ObservableHierarchy& b) {
        return a.d_ == b.d_ && a.levels_ == b.levels_;
    }

private:
    int d_;
    std::map<int, SymObservable> levels_;
};

namespace detail {

// All k-subsets of {1..n} in lexicographic order, 1-based.
inline std::vector<std::vector<int>> combinations(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - (k - 1 - i)) --i;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

// All ordered k-tuples of distinct entries from {1..n}, 1-based.
inline std::vector<std::vector<int>> ordered_tuples(int n, int k) {
    std::vector<std::vector<int>> out;
    for (const auto& comb : combinations(n, k)) {
        std::vector<int> tup = comb;
        std::sort(tup.begin(), tup.end());
        do {
            out.push_back(tup);
        } while (std::next_permutation(tup.begin(), tup.end()));
    }
    return out;
}

}  // namespace detail

// Symmetrized average of a k-particle observable over all placements on N
// particles. Linear, injective, and degree-preserving.
inline SymObservable embed(const SymObservable& f, int n_total) {
    if (f.k() > n_total) throw std::invalid_argument("embed: observable has more particles than the target");
    if (f.k() == n_total) return f;
    // The sum over ordered tuples collapses onto unordered subsets because f
    // is symmetric; embed_ordered_reference keeps the literal tuple sum as a
    // cross-check.
    Polynomial acc(2 * f.d() * n_total);
    const auto combos = detail::combinations(n_total, f.k());
    const Rational weight(BigInt(1), binomial(static_cast<unsigned>(n_total), static_cast<unsigned>(f.k())));
    for (const auto& subset : combos) acc += extend_to_tuple(f, subset, n_total);
    acc *= weight;
    return SymObservable::trusted(std::move(acc), n_total, f.d(), f.degree_cap());
}

// Literal definition: average over all ordered tuples. Exponentially more
// terms than embed(); used only to validate the subset shortcut.
inline SymObservable embed_ordered_reference(const SymObservable& f, int n_total) {
    if (f.k() > n_total) throw std::invalid_argument("embed: observable has more particles than the target");
    Polynomial acc(2 * f.d() * n_total);
    const auto tuples = detail::ordered_tuples(n_total, f.k());
    const Rational weight(BigInt(1), falling_factorial(static_cast<unsigned>(n_total), static_cast<unsigned>(f.k())));
    for (const auto& tup : tuples) acc += extend_to_tuple(f, tup, n_total);
    acc *= weight;
    return SymObservable::trusted(std::move(acc), n_total, f.d(), f.degree_cap());
}

// Orbit-sum basis of the symmetric polynomials at level k, dimension d, total
// degree <= max_degree. Each element is the symmetrization of one monomial
// orbit representative, so the list is linearly independent and spanning.
inline std::vector<SymObservable> symmetric_basis(int k, int d, unsigned max_degree, unsigned cap = kDefaultDegreeCap) {
    // Enumerate single-block exponent vectors of degree <= max_degree.
    std::vector<std::vector<std::uint8_t>> blocks;
    std::vector<std::uint8_t> cur(static_cast<std::size_t>(2 * d), 0);
    const auto rec_blocks = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
        if (pos == cur.size()) {
            blocks.push_back(cur);
            return;
        }
        for (unsigned e = 0; e <= remaining; ++e) {
            cur[pos] = static_cast<std::uint8_t>(e);
            self(self, pos + 1, remaining - e);
        }
        cur[pos] = 0;
    };
    rec_blocks(rec_blocks, 0, max_degree);

    const auto block_degree = [](const std::vector<std::uint8_t>& b) {
        unsigned s = 0;
        for (auto e : b) s += e;
        return s;
    };

    // Non-increasing block sequences = one representative per orbit.
    std::vector<SymObservable> basis;
    std::vector<std::size_t> chosen(static_cast<std::size_t>(k));
    const auto rec_seq = [&](auto&& self, int slot, std::size_t max_block, unsigned remaining) -> void {
        if (slot == k) {
            Monomial m(static_cast<std::size_t>(2 * d * k));
            for (int s = 0; s < k; ++s) {
                const auto& b = blocks[chosen[static_cast<std::size_t>(s)]];
                for (std::size_t j = 0; j < b.size(); ++j) m.exps[static_cast<std::size_t>(2 * d * s) + j] = b[j];
            }
            Polynomial raw(2 * d * k);
            raw.add_term(m, Rational(1));
            basis.push_back(SymObservable::from_raw(raw, k, d, cap));
            return;
        }
        for (std::size_t bi = 0; bi <= max_block; ++bi) {
            const unsigned deg = block_degree(blocks[bi]);
            if (deg > remaining) continue;
            chosen[static_cast<std::size_t>(slot)] = bi;
            self(self, slot + 1, bi, remaining - deg);
        }
    };
    // blocks are generated in a fixed order; index order serves as the block order.
    rec_seq(rec_seq, 0, blocks.size() - 1, max_degree);
    return basis;
}

// Solves embed(f, N) = g for f at the requested level over the degree-bounded
// symmetric basis. Empty optional means g is not in the image.
inline std::optional<SymObservable> embed_inverse(const SymObservable& g, int target_k, int n_total, unsigned max_degree) {
    if (g.k() != n_total) throw std::invalid_argument("embed_inverse: g must live at level N");
    if (target_k > n_total) throw std::invalid_argument("embed_inverse: target level exceeds N");
    const auto basis = symmetric_basis(target_k, g.d(), max_degree, g.degree_cap());

    // Column space: images of the basis in level-N monomial coordinates.
    std::map<Monomial, std::size_t, GrlexLess> row_of;
    std::vector<Polynomial> images;
    images.reserve(basis.size());
    for (const auto& b : basis) {
        images.push_back(embed(b, n_total).poly());
        for (const auto& [m, c] : images.back().terms()) row_of.emplace(m, 0);
    }
    for (const auto& [m, c] : g.poly().terms()) row_of.emplace(m, 0);
    std::size_t idx = 0;
    for (auto& [m, r] : row_of) r = idx++;

    RationalMatrix mat(row_of.size(), basis.size());
    std::vector<Rational> rhs(row_of.size(), Rational(0));
    for (std::size_t col = 0; col < images.size(); ++col) {
        for (const auto& [m, c] : images[col].terms()) mat.at(row_of.at(m), col) = c;
    }
    for (const auto& [m, c] : g.poly().terms()) rhs[row_of.at(m)] = c;

    const auto solution = solve_exact(mat, rhs);
    if (!solution) return std::nullopt;
    SymObservable f(target_k, g.d(), g.degree_cap());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if ((*solution)[i] != 0) f += basis[i] * (*solution)[i];
    }
    return f;
}

// Rank of embed on the degree-bounded symmetric subspace; equals the subspace
// dimension exactly when the embedding is injective there.
inline std::pair<std::size_t, std::size_t> embed_rank(int k, int d, int n_total, unsigned max_degree) {
    const auto basis = symmetric_basis(k, d, max_degree);
    std::map<Monomial, std::size_t, GrlexLess> row_of;
    std::vector<Polynomial> images;
    for (const auto& b : basis) {
        images.push_back(embed(b, n_total).poly());
        for (const auto& [m, c] : images.back().terms()) row_of.emplace(m, 0);
    }
    std::size_t idx = 0;
    for (auto& [m, r] : row_of) r = idx++;
    RationalMatrix mat(row_of.size(), basis.size());
    for (std::size_t col = 0; col < images.size(); ++col) {
        for (const auto& [m, c] : images[col].terms()) mat.at(row_of.at(m), col) = c;
    }
    return {rank_exact(mat), basis.size()};
}

inline bool embed_composition_holds(int a, int b, int n_total, const SymObservable& f) {
    if (!(1 <= a && a <= b && b <= n_total)) throw std::invalid_argument("embed_composition_holds: need 1 <= a <= b <= N");
    if (f.k() != a) throw std::invalid_argument("embed_composition_holds: f must live at level a");
    return embed(f, n_total) == embed(embed(f, b), n_total);
}

// Cross-derivative contraction of an l-particle and a j-particle observable
// over r shared slots, as a raw polynomial on (R^{2d})^{l+j-r}. Slot
// conventions: the shared slots come first; g's remaining slots follow f's in
// the first term and symmetrically in the second.
inline Polynomial wedge(const SymObservable& f, const SymObservable& g, int r) {
    if (f.d() != g.d()) throw std::invalid_argument("wedge: dimension mismatch");
    const int l = f.k();
    const int j = g.k();
    if (r < 1 || r > std::min(l, j)) throw std::invalid_argument("wedge: r out of range");
    const int d = f.d();
    const int total = l + j - r;

    std::vector<int> f_id(static_cast<std::size_t>(l));
    for (int s = 0; s < l; ++s) f_id[static_cast<std::size_t>(s)] = s;
    std::vector<int> g_id(static_cast<std::size_t>(j));
    for (int s = 0; s < j; ++s) g_id[static_cast<std::size_t>(s)] = s;
    std::vector<int> g_shift(static_cast<std::size_t>(j));
    for (int s = 0; s < j; ++s) g_shift[static_cast<std::size_t>(s)] = s < r ? s : l + (s - r);
    std::vector<int> f_shift(static_cast<std::size_t>(l));
    for (int s = 0; s < l; ++s) f_shift[static_cast<std::size_t>(s)] = s < r ? s : j + (s - r);

    Polynomial acc(2 * d * total);
    for (int i = 1; i <= r; ++i) {
        for (int c = 1; c <= d; ++c) {
            acc += f.partial(i, c, false).relabel(d, f_id, total) * g.partial(i, c, true).relabel(d, g_shift, total);
            acc -= g.partial(i, c, false).relabel(d, g_id, total) * f.partial(i, c, true).relabel(d, f_shift, total);
        }
    }
    const Rational prefactor(binomial(static_cast<unsigned>(l), static_cast<unsigned>(r)) * binomial(static_cast<unsigned>(j), static_cast<unsigned>(r)) * factorial(static_cast<unsigned>(r)));
    acc *= prefactor;
    return acc;
}

// (N-l)!(N-j)! / ((N-1)!(N-l-j+r)!), evaluated by telescoping so that N in the
// millions stays cheap.
inline Rational bracket_coefficient(int l, int j, int n_total, int r) {
    if (l < 1 || j < 1 || l > n_total || j > n_total) throw std::invalid_argument("bracket_coefficient: levels out of range");
    const int r0 = std::max(1, l + j - n_total);
    if (r < r0 || r > std::min(l, j)) throw std::invalid_argument("bracket_coefficient: r out of range");
    BigInt num(1);
    for (int s = n_total - l - j + r + 1; s <= n_total - j; ++s) num *= s;
    BigInt den(1);
    for (int t = 1; t <= l - 1; ++t) den *= (n_total - t);
    return Rational(num, den);
}

// Component of the N-hierarchy bracket contributed by a single level pair;
// lands at level min(l+j-1, N) and satisfies embed(h, N) = [embed f, embed g].
inline SymObservable filtration_component(const SymObservable& f, const SymObservable& g, int n_total) {
    const int l = f.k();
    const int j = g.k();
    if (l > n_total || j > n_total) throw std::invalid_argument("filtration_component: level out of range");
    const int k = std::min(l + j - 1, n_total);
    const int r0 = std::max(1, l + j - n_total);
    SymObservable h(k, f.d(), std::max(f.degree_cap(), g.degree_cap()));
    for (int r = r0; r <= std::min(l, j); ++r) {
        const SymObservable w = SymObservable::from_raw(wedge(f, g, r), l + j - r, f.d(), h.degree_cap());
        h += embed(w, k) * bracket_coefficient(l, j, n_total, r);
    }
    return h;
}

// Explicit N-hierarchy Lie bracket, levelwise.
inline ObservableHierarchy hierarchy_bracket(const ObservableHierarchy& F, const ObservableHierarchy& G, int n_total) {
    if (F.max_level() > n_total || G.max_level() > n_total) throw std::invalid_argument("hierarchy_bracket: support exceeds N");
    if (F.d() != G.d()) throw std::invalid_argument("hierarchy_bracket: dimension mismatch");
    ObservableHierarchy out(F.d());
    for (const auto& [l, f] : F.levels()) {
        for (const auto& [j, g] : G.levels()) {
            const SymObservable h = filtration_component(f, g, n_total);
            out.add_level(h.k(), h);
        }
    }
    return out;
}

// Definitional route: embed everything to level N, bracket there, and invert
// the embedding. Exists as the independent oracle for hierarchy_bracket.
inline ObservableHierarchy hierarchy_bracket_by_inversion(const ObservableHierarchy& F, const ObservableHierarchy& G, int n_total) {
    if (F.max_level() > n_total || G.max_level() > n_total) throw std::invalid_argument("hierarchy_bracket: support exceeds N");
    ObservableHierarchy out(F.d());
    std::map<int, SymObservable> by_level;
    for (const auto& [l, f] : F.levels()) {
        for (const auto& [j, g] : G.levels()) {
            const int k = std::min(l + j - 1, n_total);
            const SymObservable big = lie_bracket(embed(f, n_total), embed(g, n_total));
            auto it = by_level.find(k);
            if (it == by_level.end()) {
                by_level.emplace(k, big);
            } else {
                it->second += big;
            }
        }
    }
    for (const auto& [k, big] : by_level) {
        if (big.is_zero()) continue;
        auto inv = embed_inverse(big, k, n_total, big.degree());
        if (!inv) throw std::logic_error("hierarchy bracket image failed to invert; filtration violated");
        if (!inv->is_zero()) out.add_level(k, *inv);
    }
    return out;
}

// Limit bracket of the full hierarchy algebra: the r = 1 terms survive with
// unit coefficient and every level pair lands at l + j - 1.
inline ObservableHierarchy limit_bracket(const ObservableHierarchy& F, const ObservableHierarchy& G) {
    if (F.d() != G.d()) throw std::invalid_argument("limit_bracket: dimension mismatch");
    ObservableHierarchy out(F.d());
    for (const auto& [l, f] : F.levels()) {
        for (const auto& [j, g] : G.levels()) {
            const int k = l + j - 1;
            const unsigned cap = std::max(f.degree_cap(), g.degree_cap());
            out.add_level(k, SymObservable::from_raw(wedge(f, g, 1), k, F.d(), cap));
        }
    }
    return out;
}

}  // namespace vlasov
