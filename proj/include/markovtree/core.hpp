#ifndef MARKOVTREE_CORE_HPP
#define MARKOVTREE_CORE_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <type_traits>
#include <span>
#include <vector>

#include "error.hpp"
#include "scalar.hpp"

namespace markovtree {

// Strict: nonnegative entries. Generalized: only the unit row sums are
// required, so signed matrices are admitted.
enum class Mode { Strict, Generalized };

inline const char* to_string(Mode m) {
    return m == Mode::Strict ? "strict" : "generalized";
}

// Dense row-major square matrix.
template <Scalar T>
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), data_(n * n, T(0)) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t size() const { return n_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

    std::span<const T> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

  private:
    std::size_t n_ = 0;
    std::vector<T> data_;
};

namespace detail {

template <Scalar T>
DenseMatrix<T> to_dense(const std::vector<std::vector<T>>& rows) {
    const std::size_t n = rows.size();
    if (n == 0) throw InvalidArgument("matrix must have at least one state");
    DenseMatrix<T> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rows[i].size() != n) throw NonSquare(i, n, rows[i].size());
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

template <Scalar T>
T row_sum(const DenseMatrix<T>& m, std::size_t i) {
    T s(0);
    for (const T& x : m.row(i)) s += x;
    return s;
}

template <Scalar T>
bool near(const T& value, const T& target) {
    if constexpr (is_exact_v<T>) {
        return value == target;
    } else {
        return std::isfinite(value) && std::fabs(value - target) <= kFloatTolerance;
    }
}

} // namespace detail

// Row-stochastic matrix M. Entry (i, j) is the transition weight from state
// i to state j. Only obtainable through validate_stochastic.
template <Scalar T>
class StochasticMatrix {
  public:
    using scalar_type = T;

    std::size_t size() const { return m_.size(); }
    Mode mode() const { return mode_; }
    const T& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    std::span<const T> row(std::size_t i) const { return m_.row(i); }
    const DenseMatrix<T>& entries() const { return m_; }

    friend bool operator==(const StochasticMatrix&, const StochasticMatrix&) = default;

  private:
    StochasticMatrix(DenseMatrix<T> m, Mode mode) : m_(std::move(m)), mode_(mode) {}

    template <Scalar U>
    friend StochasticMatrix<U> validate_stochastic(DenseMatrix<U> m, Mode mode);

    DenseMatrix<T> m_;
    Mode mode_ = Mode::Strict;
};

// Markov generator A: nonnegative off-diagonal, zero row sums.
template <Scalar T>
class MarkovGenerator {
  public:
    using scalar_type = T;

    std::size_t size() const { return a_.size(); }
    const T& operator()(std::size_t i, std::size_t j) const { return a_(i, j); }
    const DenseMatrix<T>& entries() const { return a_; }

    friend bool operator==(const MarkovGenerator&, const MarkovGenerator&) = default;

  private:
    explicit MarkovGenerator(DenseMatrix<T> a) : a_(std::move(a)) {}

    template <Scalar U>
    friend MarkovGenerator<U> validate_generator(DenseMatrix<U> a);

    DenseMatrix<T> a_;
};

// Checks rows in order; within a row, sign violations (strict mode) are
// reported before the row sum.
template <Scalar T>
StochasticMatrix<T> validate_stochastic(DenseMatrix<T> m, Mode mode) {
    const std::size_t n = m.size();
    if (n == 0) throw InvalidArgument("matrix must have at least one state");
    for (std::size_t i = 0; i < n; ++i) {
        if (mode == Mode::Strict) {
            for (std::size_t j = 0; j < n; ++j)
                if (m(i, j) < T(0)) throw NegativeEntry(i, j);
        }
        T s = detail::row_sum(m, i);
        if (!detail::near(s, T(1))) throw RowSumViolation(i, to_string(s), to_double(s));
    }
    return StochasticMatrix<T>(std::move(m), mode);
}

template <Scalar T>
StochasticMatrix<T> validate_stochastic(const std::vector<std::vector<T>>& rows, Mode mode) {
    return validate_stochastic(detail::to_dense(rows), mode);
}

template <Scalar T>
MarkovGenerator<T> validate_generator(DenseMatrix<T> a) {
    const std::size_t n = a.size();
    if (n == 0) throw InvalidArgument("generator must have at least one state");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && a(i, j) < T(0)) throw InvalidGenerator(i, "negative off-diagonal entry");
            if (i == j && a(i, j) > T(0)) throw InvalidGenerator(i, "positive diagonal entry");
        }
        T s = detail::row_sum(a, i);
        if (!detail::near(s, T(0))) throw InvalidGenerator(i, "row sums to " + to_string(s));
    }
    return MarkovGenerator<T>(std::move(a));
}

template <Scalar T>
MarkovGenerator<T> validate_generator(const std::vector<std::vector<T>>& rows) {
    return validate_generator(detail::to_dense(rows));
}

// M = alpha * A + I. With no alpha, uses 1 / max_i |a_ii| (1 for A = 0).
template <Scalar T>
StochasticMatrix<T> generator_to_stochastic(const MarkovGenerator<T>& a,
                                            std::optional<std::type_identity_t<T>> alpha = std::nullopt) {
    const std::size_t n = a.size();
    T max_diag(0);
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, T(abs_value(a(i, i))));

    T scale = alpha ? *alpha : (is_zero(max_diag) ? T(1) : T(1) / max_diag);
    if (!(scale > T(0))) throw InvalidArgument("alpha must be positive");
    if (alpha && scale * max_diag > T(1)) {
        bool within = false;
        if constexpr (!is_exact_v<T>) within = scale * max_diag - 1.0 <= kFloatTolerance;
        if (!within)
            throw AlphaTooLarge("alpha * max|a_ii| = " + to_string(T(scale * max_diag)) +
                                " exceeds 1");
    }

    DenseMatrix<T> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        T off(0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            m(i, j) = scale * a(i, j);
            off += m(i, j);
        }
        // Diagonal from the off-diagonal mass keeps float row sums tight.
        m(i, i) = T(1) - off;
        if constexpr (!is_exact_v<T>) {
            if (m(i, i) < 0.0 && m(i, i) > -kFloatTolerance) m(i, i) = 0.0;
        }
    }
    return validate_stochastic(std::move(m), Mode::Strict);
}

// A = M - I.
template <Scalar T>
MarkovGenerator<T> stochastic_to_generator(const StochasticMatrix<T>& m) {
    if (m.mode() != Mode::Strict)
        throw ModeMismatch("generator conversion requires a strict stochastic matrix");
    DenseMatrix<T> a = m.entries();
    for (std::size_t i = 0; i < a.size(); ++i) a(i, i) -= T(1);
    return validate_generator(std::move(a));
}

// Rows/columns of `states`, in the given order.
template <Scalar T>
DenseMatrix<T> principal_submatrix(const DenseMatrix<T>& m, std::span<const std::size_t> states) {
    DenseMatrix<T> sub(states.size());
    for (std::size_t a = 0; a < states.size(); ++a)
        for (std::size_t b = 0; b < states.size(); ++b) sub(a, b) = m(states[a], states[b]);
    return sub;
}

inline StochasticMatrix<double> to_float(const StochasticMatrix<Rational>& m) {
    DenseMatrix<double> d(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) d(i, j) = to_double(m(i, j));
    return validate_stochastic(std::move(d), m.mode());
}

inline StochasticMatrix<double> to_float(const StochasticMatrix<double>& m) { return m; }

} // namespace markovtree

#endif // MARKOVTREE_CORE_HPP
