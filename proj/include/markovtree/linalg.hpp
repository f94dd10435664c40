#ifndef MARKOVTREE_LINALG_HPP
#define MARKOVTREE_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "core.hpp"
#include "scalar.hpp"

namespace markovtree::detail {

// Gaussian elimination. Exact mode pivots on the first nonzero entry;
// float mode uses partial pivoting.
template <Scalar T>
T determinant(DenseMatrix<T> a) {
    const std::size_t n = a.size();
    T det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        if constexpr (is_exact_v<T>) {
            while (pivot < n && is_zero(a(pivot, col))) ++pivot;
            if (pivot == n) return T(0);
        } else {
            for (std::size_t r = col + 1; r < n; ++r)
                if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
            if (a(pivot, col) == 0.0) return 0.0;
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            det = -det;
        }
        const T p = a(col, col);
        det *= p;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (is_zero(a(r, col))) continue;
            const T f = a(r, col) / p;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
        }
    }
    return det;
}

// Reduced row echelon form in place; returns pivot columns. Float entries
// with magnitude <= zero_tol are treated as zero.
template <Scalar T>
std::vector<std::size_t> rref(DenseMatrix<T>& a, double zero_tol = 0.0) {
    const std::size_t n = a.size();
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t pivot = row;
        if constexpr (is_exact_v<T>) {
            while (pivot < n && is_zero(a(pivot, col))) ++pivot;
            if (pivot == n) continue;
        } else {
            for (std::size_t r = row + 1; r < n; ++r)
                if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
            if (std::fabs(a(pivot, col)) <= zero_tol) {
                for (std::size_t r = row; r < n; ++r) a(r, col) = 0.0;
                continue;
            }
        }
        for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(row, c));
        const T p = a(row, col);
        for (std::size_t c = 0; c < n; ++c) a(row, c) /= p;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row || is_zero(a(r, col))) continue;
            const T f = a(r, col);
            for (std::size_t c = 0; c < n; ++c) a(r, c) -= f * a(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace markovtree::detail

#endif // MARKOVTREE_LINALG_HPP
