#ifndef MARKOVTREE_TESTS_SUPPORT_HPP
#define MARKOVTREE_TESTS_SUPPORT_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "markovtree/markovtree.hpp"

namespace mt_test {

using markovtree::Rational;

inline Rational Q(const std::string& s) { return markovtree::parse_scalar<Rational>(s); }

inline markovtree::StochasticMatrix<Rational>
exact(const std::vector<std::vector<std::string>>& rows,
      markovtree::Mode mode = markovtree::Mode::Strict) {
    std::vector<std::vector<Rational>> r;
    for (const auto& row : rows) {
        r.emplace_back();
        for (const auto& c : row) r.back().push_back(Q(c));
    }
    return markovtree::validate_stochastic(r, mode);
}

inline markovtree::StochasticMatrix<double>
floating(const std::vector<std::vector<double>>& rows,
         markovtree::Mode mode = markovtree::Mode::Strict) {
    return markovtree::validate_stochastic(rows, mode);
}

// Lazy 5-cycle 1 -> 2 -> 3 -> 4 -> 5 -> 1 with rates m12..m51 and the rest
// of each row on the diagonal.
inline markovtree::StochasticMatrix<Rational> five_cycle(const std::vector<Rational>& rate) {
    markovtree::DenseMatrix<Rational> m(5);
    for (std::size_t i = 0; i < 5; ++i) {
        m(i, (i + 1) % 5) = rate[i];
        m(i, i) = Rational(1) - rate[i];
    }
    return markovtree::validate_stochastic(std::move(m), markovtree::Mode::Strict);
}

template <typename T>
markovtree::StochasticMatrix<T> identity(std::size_t n) {
    return markovtree::validate_stochastic(markovtree::DenseMatrix<T>::identity(n),
                                           markovtree::Mode::Strict);
}

// The 3-state detailed-balance example: m13 = a, m32 = b, m21 = c, m31 = d,
// m12 = e, m23 = f; detailed balance iff abc = def.
struct SixRates {
    Rational a, b, c, d, e, f;
};

inline markovtree::StochasticMatrix<Rational> three_state(const SixRates& r) {
    markovtree::DenseMatrix<Rational> m(3);
    m(0, 1) = r.e;
    m(0, 2) = r.a;
    m(1, 0) = r.c;
    m(1, 2) = r.f;
    m(2, 0) = r.d;
    m(2, 1) = r.b;
    for (std::size_t i = 0; i < 3; ++i) {
        Rational off(0);
        for (std::size_t j = 0; j < 3; ++j)
            if (j != i) off += m(i, j);
        m(i, i) = Rational(1) - off;
    }
    return markovtree::validate_stochastic(std::move(m), markovtree::Mode::Strict);
}

// ---------------------------------------------------------------------------
// Test-only brute force, independent of both trees.hpp and oracle.hpp:
// walk the full product space of out-edge assignments (odometer style) and
// keep the acyclic ones.

inline bool acyclic_assignment(const std::vector<std::size_t>& target) {
    const std::size_t n = target.size();
    for (std::size_t v = 0; v < n; ++v) {
        std::size_t x = v, steps = 0;
        while (target[x] != markovtree::npos) {
            x = target[x];
            if (++steps > n) return false;
        }
    }
    return true;
}

// Calls visit(target) for every acyclic assignment where each vertex in
// `sources` picks one target among allowed(v, t), t != v.
inline std::size_t odometer_assignments(
    std::size_t n, const std::vector<std::size_t>& sources,
    const std::function<bool(std::size_t, std::size_t)>& allowed,
    const std::function<void(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> digit(sources.size(), 0);
    std::size_t accepted = 0;
    while (true) {
        std::vector<std::size_t> target(n, markovtree::npos);
        bool ok = true;
        for (std::size_t k = 0; k < sources.size(); ++k) {
            std::size_t v = sources[k], t = digit[k];
            if (t == v || !allowed(v, t)) {
                ok = false;
                break;
            }
            target[v] = t;
        }
        if (ok && acyclic_assignment(target)) {
            ++accepted;
            visit(target);
        }
        std::size_t k = 0;
        while (k < digit.size() && ++digit[k] == n) digit[k++] = 0;
        if (k == digit.size()) break;
    }
    return accepted;
}

inline std::size_t brute_marked_count(std::size_t n, const std::vector<std::size_t>& marked) {
    return odometer_assignments(n, marked, [](std::size_t, std::size_t) { return true; },
                                [](const std::vector<std::size_t>&) {});
}

inline std::size_t brute_tree_count(const markovtree::Digraph& g, std::size_t root) {
    std::vector<std::size_t> sources;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (v != root) sources.push_back(v);
    if (sources.empty()) return 1;
    return odometer_assignments(g.size(), sources,
                                [&](std::size_t v, std::size_t t) { return g.has_edge(v, t); },
                                [](const std::vector<std::size_t>&) {});
}

} // namespace mt_test

#endif // MARKOVTREE_TESTS_SUPPORT_HPP
