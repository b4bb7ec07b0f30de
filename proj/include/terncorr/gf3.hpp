// include/terncorr/gf3.hpp: prime field GF(3) scalars and dense matrices over GF(3).

#pragma once

#include <terncorr/error.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace terncorr {

using Trit = std::uint8_t;

namespace gf3 {

constexpr Trit reduce(int v) noexcept {
    const int r = v % 3;
    return static_cast<Trit>(r < 0 ? r + 3 : r);
}
constexpr Trit add(Trit a, Trit b) noexcept { return static_cast<Trit>((a + b) % 3); }
constexpr Trit sub(Trit a, Trit b) noexcept { return static_cast<Trit>((a + 3 - b) % 3); }
constexpr Trit neg(Trit a) noexcept { return static_cast<Trit>((3 - a) % 3); }
constexpr Trit mul(Trit a, Trit b) noexcept { return static_cast<Trit>((a * b) % 3); }
// Over GF(3) every nonzero element is its own inverse.
constexpr Trit inv(Trit a) noexcept { return a; }

// Quadratic character of GF(3): eta(0) = 0, eta(1) = 1, eta(2) = -1.
constexpr int eta(Trit a) noexcept { return a == 0 ? 0 : (a == 1 ? 1 : -1); }

constexpr Trit from_sign(int s) noexcept { return reduce(s); }

} // namespace gf3

/// Dense row-major matrix over GF(3).
class Gf3Matrix {
public:
    Gf3Matrix() = default;
    Gf3Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    static Gf3Matrix identity(std::size_t n) {
        Gf3Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Trit &operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    Trit operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] bool is_symmetric() const noexcept {
        if (rows_ != cols_) {
            return false;
        }
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = i + 1; j < cols_; ++j) {
                if ((*this)(i, j) != (*this)(j, i)) {
                    return false;
                }
            }
        }
        return true;
    }

    [[nodiscard]] Gf3Matrix transposed() const {
        Gf3Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    /// Evaluates x^T M x for a square matrix.
    [[nodiscard]] Trit quadratic(std::span<const Trit> x) const {
        int acc = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (x[i] == 0) {
                continue;
            }
            int row = 0;
            for (std::size_t j = 0; j < cols_; ++j) {
                row += (*this)(i, j) * x[j];
            }
            acc += x[i] * (row % 3);
        }
        return gf3::reduce(acc);
    }

    [[nodiscard]] std::vector<Trit> apply(std::span<const Trit> x) const {
        std::vector<Trit> y(rows_, 0);
        for (std::size_t i = 0; i < rows_; ++i) {
            int acc = 0;
            for (std::size_t j = 0; j < cols_; ++j) {
                acc += (*this)(i, j) * x[j];
            }
            y[i] = gf3::reduce(acc);
        }
        return y;
    }

    /// Row rank by Gaussian elimination on a private copy.
    [[nodiscard]] std::size_t rank() const {
        Gf3Matrix m = *this;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
            std::size_t pivot = rank;
            while (pivot < rows_ && m(pivot, col) == 0) {
                ++pivot;
            }
            if (pivot == rows_) {
                continue;
            }
            m.swap_rows(pivot, rank);
            const Trit scale = gf3::inv(m(rank, col));
            for (std::size_t j = col; j < cols_; ++j) {
                m(rank, j) = gf3::mul(m(rank, j), scale);
            }
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == rank || m(i, col) == 0) {
                    continue;
                }
                const Trit f = m(i, col);
                for (std::size_t j = col; j < cols_; ++j) {
                    m(i, j) = gf3::sub(m(i, j), gf3::mul(f, m(rank, j)));
                }
            }
            ++rank;
        }
        return rank;
    }

    [[nodiscard]] std::size_t kernel_dim() const { return cols_ - rank(); }

    /// Basis of the right kernel {x : M x = 0}, one vector per free column.
    [[nodiscard]] std::vector<std::vector<Trit>> kernel_basis() const {
        Gf3Matrix m = *this;
        std::vector<std::size_t> pivot_cols;
        std::size_t rank = 0;
        for (std::size_t col = 0; col < cols_ && rank < rows_; ++col) {
            std::size_t pivot = rank;
            while (pivot < rows_ && m(pivot, col) == 0) {
                ++pivot;
            }
            if (pivot == rows_) {
                continue;
            }
            m.swap_rows(pivot, rank);
            const Trit scale = gf3::inv(m(rank, col));
            for (std::size_t j = 0; j < cols_; ++j) {
                m(rank, j) = gf3::mul(m(rank, j), scale);
            }
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == rank || m(i, col) == 0) {
                    continue;
                }
                const Trit f = m(i, col);
                for (std::size_t j = 0; j < cols_; ++j) {
                    m(i, j) = gf3::sub(m(i, j), gf3::mul(f, m(rank, j)));
                }
            }
            pivot_cols.push_back(col);
            ++rank;
        }
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivot_cols) {
            is_pivot[c] = true;
        }
        std::vector<std::vector<Trit>> basis;
        for (std::size_t free = 0; free < cols_; ++free) {
            if (is_pivot[free]) {
                continue;
            }
            std::vector<Trit> v(cols_, 0);
            v[free] = 1;
            for (std::size_t r = 0; r < pivot_cols.size(); ++r) {
                v[pivot_cols[r]] = gf3::neg(m(r, free));
            }
            basis.push_back(std::move(v));
        }
        return basis;
    }

    void swap_rows(std::size_t a, std::size_t b) noexcept {
        if (a == b) {
            return;
        }
        for (std::size_t j = 0; j < cols_; ++j) {
            std::swap((*this)(a, j), (*this)(b, j));
        }
    }

    friend bool operator==(const Gf3Matrix &, const Gf3Matrix &) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Trit> data_;
};

/// Result of reducing a symmetric matrix to diagonal form by congruence.
struct Diagonalization {
    std::vector<Trit> diagonal; // nonzero entries of the nondegenerate part
    std::size_t rank = 0;
    Trit delta = 1;             // determinant class: product of the diagonal, in {1, 2}
    int epsilon = 1;            // eta((-1)^{t/2} delta) for even t, eta((-1)^{(t-1)/2} delta) for odd t
};

/// Symmetric congruence elimination S -> P S P^T over GF(3).
/// A zero pivot with a nonzero off-diagonal entry in its row is repaired by
/// adding that row/column into the pivot position, which yields 2*s_pj != 0.
inline Diagonalization diagonalize(const Gf3Matrix &symmetric) {
    if (!symmetric.is_symmetric()) {
        throw Error(ErrorCode::InvalidArgument, "diagonalize requires a symmetric matrix");
    }
    Gf3Matrix m = symmetric;
    const std::size_t n = m.rows();
    auto swap_index = [&](std::size_t a, std::size_t b) {
        m.swap_rows(a, b);
        for (std::size_t i = 0; i < n; ++i) {
            std::swap(m(i, a), m(i, b));
        }
    };
    auto add_index = [&](std::size_t target, std::size_t source, Trit f) {
        // row_target += f row_source, then col_target += f col_source
        for (std::size_t j = 0; j < n; ++j) {
            m(target, j) = gf3::add(m(target, j), gf3::mul(f, m(source, j)));
        }
        for (std::size_t i = 0; i < n; ++i) {
            m(i, target) = gf3::add(m(i, target), gf3::mul(f, m(i, source)));
        }
    };

    Diagonalization out;
    for (std::size_t p = 0; p < n; ++p) {
        if (m(p, p) == 0) {
            std::size_t j = p + 1;
            while (j < n && m(j, j) == 0) {
                ++j;
            }
            if (j < n) {
                swap_index(p, j);
            } else {
                j = p + 1;
                while (j < n && m(p, j) == 0) {
                    ++j;
                }
                if (j == n) {
                    continue;
                }
                add_index(p, j, 1);
            }
        }
        const Trit pivot_inv = gf3::inv(m(p, p));
        for (std::size_t i = p + 1; i < n; ++i) {
            if (m(i, p) != 0) {
                add_index(i, p, gf3::neg(gf3::mul(m(i, p), pivot_inv)));
            }
        }
        out.diagonal.push_back(m(p, p));
    }
    out.rank = out.diagonal.size();
    Trit delta = 1;
    for (auto d : out.diagonal) {
        delta = gf3::mul(delta, d);
    }
    out.delta = delta;
    const std::size_t half = out.rank / 2; // t/2 for even t, (t-1)/2 for odd t
    const Trit sign = (half % 2 == 0) ? Trit{1} : Trit{2};
    out.epsilon = gf3::eta(gf3::mul(sign, delta));
    return out;
}

} // namespace terncorr
