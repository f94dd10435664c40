#ifndef MARKOVTREE_ORACLE_HPP
#define MARKOVTREE_ORACLE_HPP

// Independent baselines: linear-algebra fixed space, power iteration,
// exhaustive edge-subset tree sums and trajectory simulation, plus the
// seeded random matrix generators used to drive property checks. Nothing in
// here reuses the backtracking enumerator from trees.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "linalg.hpp"
#include "measure.hpp"
#include "scalar.hpp"

namespace markovtree::oracle {

template <Scalar T>
struct FixedSpaceBasis {
    std::size_t dimension = 0;
    // Unit 1-norm, dominant entry nonnegative.
    std::vector<std::vector<T>> vectors;
};

// Basis of { v : v^T M = v^T } from the reduced row echelon form of
// (M - I)^T.
template <Scalar T>
FixedSpaceBasis<T> null_space_solve(const StochasticMatrix<T>& m, double zero_tol = 1e-9) {
    const std::size_t n = m.size();
    DenseMatrix<T> b(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(j, i) = m(i, j) - (i == j ? T(1) : T(0));

    std::vector<std::size_t> pivots = detail::rref(b, zero_tol);
    std::vector<bool> is_pivot(n, false);
    for (std::size_t p : pivots) is_pivot[p] = true;

    FixedSpaceBasis<T> out;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<T> v(n, T(0));
        v[f] = T(1);
        for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -b(r, f);

        T norm(0);
        std::size_t dominant = 0;
        for (std::size_t i = 0; i < n; ++i) {
            norm += abs_value(v[i]);
            if (abs_value(v[i]) > abs_value(v[dominant])) dominant = i;
        }
        T scale = v[dominant] < T(0) ? T(-1) / norm : T(1) / norm;
        for (auto& x : v) x *= scale;
        out.vectors.push_back(std::move(v));
    }
    out.dimension = out.vectors.size();
    return out;
}

struct PowerResult {
    std::vector<double> distribution;
    std::size_t iterations = 0;
    bool converged = false;
};

// p <- M^T p until the 1-norm change is <= tol. Periodic chains may
// oscillate forever; that is reported through `converged`.
template <Scalar T>
PowerResult power_iteration(const StochasticMatrix<T>& m, std::vector<double> p0,
                            std::size_t max_iters = 100000, double tol = 1e-13) {
    if (m.mode() != Mode::Strict) throw ModeMismatch("power iteration requires strict mode");
    const std::size_t n = m.size();
    if (p0.size() != n) throw DimensionMismatch(n, p0.size());
    double total = 0.0;
    for (double x : p0) {
        if (!(x >= 0.0)) throw InvalidArgument("initial distribution has a negative entry");
        total += x;
    }
    if (std::fabs(total - 1.0) > kFloatTolerance)
        throw InvalidArgument("initial distribution does not sum to 1");

    StochasticMatrix<double> f = to_float(m);
    PowerResult out{std::move(p0), 0, false};
    std::vector<double> next(n);
    while (out.iterations < max_iters) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) next[k] += out.distribution[j] * f(j, k);
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) change += std::fabs(next[k] - out.distribution[k]);
        out.distribution.swap(next);
        ++out.iterations;
        if (change <= tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

inline constexpr std::size_t kBruteForceMaxStates = 8;

// Sum of weight products over all (n-1)-subsets of the complete directed
// edge set that form an arborescence rooted at `root` inside the reaction
// graph. Subsets are generated by include/exclude over the edge list;
// branches that already violate the out-degree rule or use a missing edge
// are dropped early, which does not change the set of accepted subsets.
template <Scalar T>
T brute_force_tree_sum(const StochasticMatrix<T>& m, std::size_t root) {
    const std::size_t n = m.size();
    if (n > kBruteForceMaxStates)
        throw InstanceTooLarge("brute force tree sum supports at most " +
                               std::to_string(kBruteForceMaxStates) + " states");
    if (root >= n) throw VertexOutOfRange(root, n);
    if (n == 1) return T(1);

    auto present = [&](std::size_t i, std::size_t j) {
        return m.mode() == Mode::Strict ? m(i, j) > T(0) : !is_zero(m(i, j));
    };
    std::vector<std::pair<std::size_t, std::size_t>> all_edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) all_edges.emplace_back(i, j);

    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    std::vector<int> out_degree(n, 0);
    T total(0);

    auto is_arborescence = [&]() {
        // Every vertex must reach the root along the chosen edges.
        std::vector<bool> reached(n, false);
        reached[root] = true;
        std::size_t count = 1;
        bool grew = true;
        while (grew) {
            grew = false;
            for (auto [i, j] : chosen)
                if (reached[j] && !reached[i]) {
                    reached[i] = true;
                    ++count;
                    grew = true;
                }
        }
        return count == n;
    };

    auto recurse = [&](auto& self, std::size_t idx) -> void {
        const std::size_t need = n - 1 - chosen.size();
        if (need == 0) {
            if (is_arborescence()) {
                T p(1);
                for (auto [i, j] : chosen) p *= m(i, j);
                total += p;
            }
            return;
        }
        if (all_edges.size() - idx < need) return;
        auto [i, j] = all_edges[idx];
        if (i != root && out_degree[i] == 0 && present(i, j)) {
            chosen.emplace_back(i, j);
            ++out_degree[i];
            self(self, idx + 1);
            --out_degree[i];
            chosen.pop_back();
        }
        self(self, idx + 1);
    };
    recurse(recurse, 0);
    return total;
}

// Visit frequencies of X_1..X_steps for one seeded trajectory.
template <Scalar T>
std::vector<double> simulate_chain(const StochasticMatrix<T>& m, std::size_t start,
                                   std::size_t steps, std::uint64_t seed) {
    if (m.mode() != Mode::Strict) throw ModeMismatch("simulation requires strict mode");
    const std::size_t n = m.size();
    if (start >= n) throw VertexOutOfRange(start, n);
    StochasticMatrix<double> f = to_float(m);
    std::vector<std::vector<double>> cumulative(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        std::partial_sum(f.row(i).begin(), f.row(i).end(), cumulative[i].begin());

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> freq(n, 0.0);
    std::size_t state = start;
    for (std::size_t s = 0; s < steps; ++s) {
        const auto& c = cumulative[state];
        double u = unif(rng) * c.back();
        std::size_t next = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), u) - c.begin());
        // Guard against u landing on the final boundary or on zero-width slots.
        while (next >= n || f(state, next) == 0.0) next = next == 0 ? n - 1 : next - 1;
        state = next;
        freq[state] += 1.0;
    }
    if (steps > 0)
        for (auto& x : freq) x /= static_cast<double>(steps);
    return freq;
}

// ---------------------------------------------------------------------------
// Seeded random instances.

// Integer weights in [1, max_weight], each zeroed with probability
// `sparsity`; an all-zero row becomes a self-loop.
inline std::vector<std::vector<int>> random_weight_rows(std::size_t n, double sparsity,
                                                        std::mt19937_64& rng, int max_weight = 20) {
    std::uniform_int_distribution<int> weight(1, max_weight);
    std::bernoulli_distribution drop(sparsity);
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) {
            int w = weight(rng);
            if (!drop(rng)) {
                rows[i][j] = w;
                any = true;
            }
        }
        if (!any) rows[i][i] = 1;
    }
    return rows;
}

// Row-normalizes nonnegative integer weights.
template <Scalar T>
StochasticMatrix<T> stochastic_from_weights(const std::vector<std::vector<int>>& rows) {
    const std::size_t n = rows.size();
    DenseMatrix<T> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        long total = std::accumulate(rows[i].begin(), rows[i].end(), 0L);
        if (total <= 0) throw InvalidArgument("weight row without mass");
        for (std::size_t j = 0; j < n; ++j) {
            if constexpr (is_exact_v<T>)
                m(i, j) = Rational(rows[i][j], total);
            else
                m(i, j) = static_cast<double>(rows[i][j]) / static_cast<double>(total);
        }
    }
    return validate_stochastic(std::move(m), Mode::Strict);
}

template <Scalar T>
StochasticMatrix<T> random_stochastic(std::size_t n, double sparsity, std::mt19937_64& rng) {
    return stochastic_from_weights<T>(random_weight_rows(n, sparsity, rng));
}

// Weight rows of a reducible chain: states are split into 2..4 blocks and
// cross-block edges only run from earlier to later blocks, so no later
// block ever reaches an earlier one. n >= 2.
inline std::vector<std::vector<int>> random_reducible_rows(std::size_t n, std::mt19937_64& rng) {
    if (n < 2) throw InvalidArgument("a reducible chain needs at least two states");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::size_t blocks = std::uniform_int_distribution<std::size_t>(2, std::min<std::size_t>(4, n))(rng);
    std::vector<std::size_t> cuts(n - 1);
    std::iota(cuts.begin(), cuts.end(), 1);
    std::shuffle(cuts.begin(), cuts.end(), rng);
    cuts.resize(blocks - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> block_of(n);
    for (std::size_t pos = 0, b = 0; pos < n; ++pos) {
        while (b < cuts.size() && pos >= cuts[b]) ++b;
        block_of[perm[pos]] = b;
    }

    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double inner_density = 0.3 + 0.7 * unif(rng);
    double cross_density = unif(rng) < 0.25 ? 0.0 : 0.4 * unif(rng);
    std::uniform_int_distribution<int> weight(1, 20);
    std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < n; ++j) {
            double p = block_of[i] == block_of[j] ? inner_density
                       : block_of[i] < block_of[j] ? cross_density
                                                   : 0.0;
            if (unif(rng) < p) {
                rows[i][j] = weight(rng);
                any = true;
            }
        }
        if (!any) rows[i][i] = 1;
    }
    return rows;
}

template <Scalar T>
StochasticMatrix<T> random_reducible(std::size_t n, std::mt19937_64& rng) {
    return stochastic_from_weights<T>(random_reducible_rows(n, rng));
}

struct DetailedBalancedInstance {
    StochasticMatrix<Rational> matrix;
    // Measure with target[i] m_ij = target[j] m_ji.
    std::vector<Rational> target;
};

// m_ij = c s_ij / w_i for random positive w and symmetric base rates s, so
// w_i m_ij = c s_ij is symmetric. A random spanning tree of base rates keeps
// the support connected.
inline DetailedBalancedInstance random_detailed_balanced(std::size_t n, double density,
                                                         std::mt19937_64& rng) {
    std::uniform_int_distribution<int> wdist(1, 12), sdist(1, 9);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<Rational> w(n);
    for (auto& x : w) x = Rational(wdist(rng));

    std::vector<std::vector<int>> s(n, std::vector<int>(n, 0));
    for (std::size_t v = 1; v < n; ++v) {
        std::size_t u = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
        s[u][v] = s[v][u] = sdist(rng);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (s[i][j] == 0 && unif(rng) < density) s[i][j] = s[j][i] = sdist(rng);

    Rational max_out(0);
    for (std::size_t i = 0; i < n; ++i) {
        Rational out(0);
        for (std::size_t j = 0; j < n; ++j) out += Rational(s[i][j]) / w[i];
        max_out = std::max(max_out, out);
    }
    // Leave some diagonal mass on every row half the time.
    Rational c = max_out.is_zero() ? Rational(1) : Rational(1) / max_out;
    if (unif(rng) < 0.5) c *= Rational(3, 4);

    DenseMatrix<Rational> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational off(0);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            m(i, j) = c * Rational(s[i][j]) / w[i];
            off += m(i, j);
        }
        m(i, i) = Rational(1) - off;
    }
    return {validate_stochastic(std::move(m), Mode::Strict), std::move(w)};
}

// Uniformly shuffled Kruskal over the two-way edges of m's support.
template <Scalar T>
UndirectedTree random_spanning_tree(const StochasticMatrix<T>& m, std::mt19937_64& rng) {
    const std::size_t n = m.size();
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m(i, j) > T(0) && m(j, i) > T(0)) candidates.emplace_back(i, j);
    std::shuffle(candidates.begin(), candidates.end(), rng);

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (auto [a, b] : candidates) {
        std::size_t ra = find(a), rb = find(b);
        if (ra == rb) continue;
        parent[ra] = rb;
        edges.emplace_back(a, b);
    }
    return UndirectedTree(n, std::move(edges));
}

} // namespace markovtree::oracle

#endif // MARKOVTREE_ORACLE_HPP
