#pragma once

#include <optional>
#include <vector>

#include "vlasov/rational.hpp"

namespace vlasov {

// Dense matrix over the rationals; just enough exact linear algebra for the
// embedding-inversion and rank checks.
class RationalMatrix {
public:
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Rational& at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
    std::size_t rows_, cols_;
    std::vector<Rational> data_;
};

// Gaussian elimination of [A | b]; returns a solution of A x = b or nullopt
// when the system is inconsistent. Free variables are set to zero.
inline std::optional<std::vector<Rational>> solve_exact(const RationalMatrix& a, const std::vector<Rational>& b) {
    const std::size_t m = a.rows(), n = a.cols();
    RationalMatrix aug(m, n + 1);
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < n; ++c) aug.at(r, c) = a.at(r, c);
        aug.at(r, n) = b[r];
    }

    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t pivot = row;
        while (pivot < m && aug.at(pivot, col) == 0) ++pivot;
        if (pivot == m) continue;
        if (pivot != row) {
            for (std::size_t c = col; c <= n; ++c) std::swap(aug.at(pivot, c), aug.at(row, c));
        }
        const Rational inv = Rational(1) / aug.at(row, col);
        for (std::size_t c = col; c <= n; ++c) aug.at(row, c) *= inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == row || aug.at(r, col) == 0) continue;
            const Rational factor = aug.at(r, col);
            for (std::size_t c = col; c <= n; ++c) aug.at(r, c) -= factor * aug.at(row, c);
        }
        pivot_col.push_back(col);
        ++row;
    }

    for (std::size_t r = row; r < m; ++r) {
        if (aug.at(r, n) != 0) return std::nullopt;
    }

    std::vector<Rational> x(n, Rational(0));
    for (std::size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = aug.at(r, n);
    return x;
}

inline std::size_t rank_exact(RationalMatrix a) {
    const std::size_t m = a.rows(), n = a.cols();
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < m; ++col) {
        std::size_t pivot = row;
        while (pivot < m && a.at(pivot, col) == 0) ++pivot;
        if (pivot == m) continue;
        if (pivot != row) {
            for (std::size_t c = col; c < n; ++c) std::swap(a.at(pivot, c), a.at(row, c));
        }
        const Rational inv = Rational(1) / a.at(row, col);
        for (std::size_t c = col; c < n; ++c) a.at(row, c) *= inv;
        for (std::size_t r = row + 1; r < m; ++r) {
            if (a.at(r, col) == 0) continue;
            const Rational factor = a.at(r, col);
            for (std::size_t c = col; c < n; ++c) a.at(r, c) -= factor * a.at(row, c);
        }
        ++row;
    }
    return row;
}

}  // namespace vlasov
