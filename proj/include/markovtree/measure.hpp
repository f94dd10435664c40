#ifndef MARKOVTREE_MEASURE_HPP
#define MARKOVTREE_MEASURE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "linalg.hpp"
#include "scalar.hpp"
#include "trees.hpp"

namespace markovtree {

enum class Method { TreeSum, Cofactor, DetailedBalance, Solve, Power };

inline const char* to_string(Method m) {
    switch (m) {
    case Method::TreeSum: return "tree";
    case Method::Cofactor: return "cofactor";
    case Method::DetailedBalance: return "db";
    case Method::Solve: return "solve";
    case Method::Power: return "power";
    }
    return "?";
}

// Unnormalized invariant measure w together with Z = sum_j w_j.
template <Scalar T>
struct InvariantMeasure {
    std::vector<T> weights;
    T normalizer{0};
    Method method = Method::TreeSum;
    // Spanning tree used by the detailed-balance method ("1-2,2-3").
    std::string tree_id;
    // States carrying nonzero weight.
    std::vector<std::size_t> support;
    std::vector<std::string> warnings;

    std::size_t size() const { return weights.size(); }

    // weights / Z, or nothing when Z = 0.
    std::optional<std::vector<T>> normalized() const {
        if (is_zero(normalizer)) return std::nullopt;
        std::vector<T> p(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i) p[i] = weights[i] / normalizer;
        return p;
    }

    bool is_zero_vector() const { return support.empty(); }
};

template <Scalar T>
InvariantMeasure<T> make_measure(std::vector<T> weights, Method method) {
    InvariantMeasure<T> m;
    m.method = method;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        m.normalizer += weights[i];
        if (!is_zero(weights[i])) m.support.push_back(i);
    }
    m.weights = std::move(weights);
    return m;
}

namespace detail {

// Exact tree sums. Each row is rescaled to integers by the lcm of its
// off-diagonal denominators; a tree rooted at j uses one entry from every
// row but j, so w_j = (integer tree sum) / prod_{i != j} D_i.
inline std::vector<Rational> tree_sums_exact(const ReactionGraph<Rational>& g,
                                             const EnumerationLimits& limits) {
    using boost::multiprecision::denominator;
    using boost::multiprecision::numerator;
    const std::size_t n = g.size();
    std::vector<Integer> row_den(n, Integer(1));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : g.successors(i))
            row_den[i] = boost::multiprecision::lcm(row_den[i], denominator(g.weight(i, j)));

    std::vector<Integer> num(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j : g.successors(i)) {
            const Rational& x = g.weight(i, j);
            num[i * n + j] = numerator(x) * (row_den[i] / denominator(x));
        }

    Integer all(1);
    for (const auto& d : row_den) all *= d;

    std::vector<Rational> w(n);
    for (std::size_t root = 0; root < n; ++root) {
        Integer s = fold_arborescence_products<Integer>(
            g, root, [&](std::size_t i, std::size_t j) -> const Integer& { return num[i * n + j]; },
            limits);
        w[root] = Rational(s, all / row_den[root]);
    }
    return w;
}

inline std::vector<double> tree_sums_float(const ReactionGraph<double>& g,
                                           const EnumerationLimits& limits) {
    std::vector<double> w(g.size());
    for (std::size_t root = 0; root < g.size(); ++root)
        w[root] = fold_arborescence_products<double>(
            g, root, [&](std::size_t i, std::size_t j) { return g.weight(i, j); }, limits);
    return w;
}

} // namespace detail

// Markov tree theorem: w_j = sum over arborescences rooted at j of the
// product of their edge weights. Valid for reducible and signed matrices.
template <Scalar T>
InvariantMeasure<T> invariant_tree_sum(const StochasticMatrix<T>& m, EnumerationLimits limits = {}) {
    ReactionGraph<T> g = build_graph(m);
    std::vector<T> w;
    if constexpr (is_exact_v<T>)
        w = detail::tree_sums_exact(g, limits);
    else
        w = detail::tree_sums_float(g, limits);
    return make_measure(std::move(w), Method::TreeSum);
}

// w_j = det((I - M) with row j and column j removed).
template <Scalar T>
InvariantMeasure<T> invariant_cofactor(const StochasticMatrix<T>& m) {
    const std::size_t n = m.size();
    DenseMatrix<T> lap(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lap(i, j) = (i == j ? T(1) : T(0)) - m(i, j);

    std::vector<T> w(n);
    std::vector<std::string> warnings;
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> keep;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) keep.push_back(i);
        w[j] = keep.empty() ? T(1) : detail::determinant(principal_submatrix(lap, keep));
        if constexpr (!is_exact_v<T>) {
            if (m.mode() == Mode::Strict && w[j] < 0.0 && w[j] > -kFloatTolerance) {
                warnings.push_back("clamped minor " + std::to_string(j + 1) + " = " +
                                   to_string(w[j]) + " to 0");
                w[j] = 0.0;
            }
        }
    }
    auto out = make_measure(std::move(w), Method::Cofactor);
    out.warnings = std::move(warnings);
    return out;
}

template <Scalar T>
struct InvarianceCheck {
    bool holds = false;
    T max_residual{0};
};

// r_k = |w_k - sum_j w_j m_jk|; passes iff max r_k <= tol * max(1, max|w|).
// Exact mode always uses tol = 0.
template <Scalar T>
InvarianceCheck<T> check_invariance(const StochasticMatrix<T>& m, std::span<const T> w,
                                    double tol = kFloatTolerance) {
    const std::size_t n = m.size();
    if (w.size() != n) throw DimensionMismatch(n, w.size());
    InvarianceCheck<T> out;
    T scale(1);
    for (std::size_t k = 0; k < n; ++k) {
        T flow(0);
        for (std::size_t j = 0; j < n; ++j) flow += w[j] * m(j, k);
        T r = abs_value(T(w[k] - flow));
        if (r > out.max_residual) out.max_residual = r;
        if (abs_value(w[k]) > scale) scale = abs_value(w[k]);
    }
    if constexpr (is_exact_v<T>)
        out.holds = is_zero(out.max_residual);
    else
        out.holds = out.max_residual <= tol * scale;
    return out;
}

template <Scalar T>
InvarianceCheck<T> check_invariance(const StochasticMatrix<T>& m, const std::vector<T>& w,
                                    double tol = kFloatTolerance) {
    return check_invariance(m, std::span<const T>(w), tol);
}

struct StateCertificate {
    std::size_t state = 0;
    bool reaches_all = false;     // Z_k = Z
    bool weight_positive = false; // w_k > 0
    bool consistent() const { return reaches_all == weight_positive; }
};

template <Scalar T>
struct PositivityReport {
    std::vector<StateCertificate> states;
    InvariantMeasure<T> tree_sum;

    bool all_consistent() const {
        return std::all_of(states.begin(), states.end(), [](const auto& s) { return s.consistent(); });
    }
};

// Per state: does every state reach k, and is w_k > 0. The two must agree.
template <Scalar T>
PositivityReport<T> positivity_certificate(const StochasticMatrix<T>& m, EnumerationLimits limits = {}) {
    if (m.mode() != Mode::Strict) throw ModeMismatch("positivity certificate requires strict mode");
    ReactionGraph<T> g = build_graph(m);
    PositivityReport<T> out{{}, invariant_tree_sum(m, limits)};
    for (std::size_t k = 0; k < m.size(); ++k)
        out.states.push_back({k, reachability_set(g, k).size() == m.size(),
                              out.tree_sum.weights[k] > T(0)});
    return out;
}

template <Scalar T>
struct UniquenessReport {
    bool unique = false;
    bool w_zero = false;
    // One measure per closed (Z1 or Z2) class, zero outside the class.
    std::vector<InvariantMeasure<T>> basis;
    ClassDecomposition classes;
    InvariantMeasure<T> tree_sum;
};

template <Scalar T>
UniquenessReport<T> uniqueness_report(const StochasticMatrix<T>& m, EnumerationLimits limits = {}) {
    if (m.mode() != Mode::Strict) throw ModeMismatch("uniqueness report requires strict mode");
    UniquenessReport<T> out;
    out.classes = communicating_classes(build_graph(m));
    out.tree_sum = invariant_tree_sum(m, limits);
    out.w_zero = out.tree_sum.is_zero_vector();

    for (const CommunicatingClass* c : out.classes.closed_classes()) {
        // A closed class loses no mass, so its block is stochastic on its own.
        auto sub = validate_stochastic(principal_submatrix(m.entries(), c->members), Mode::Strict);
        InvariantMeasure<T> local = invariant_tree_sum(sub, limits);
        std::vector<T> w(m.size(), T(0));
        for (std::size_t a = 0; a < c->members.size(); ++a) w[c->members[a]] = local.weights[a];
        out.basis.push_back(make_measure(std::move(w), Method::TreeSum));
    }
    out.unique = out.basis.size() == 1;
    return out;
}

// Spanning tree of an undirected graph, edges stored as (min, max) pairs in
// sorted order.
class UndirectedTree {
  public:
    UndirectedTree(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges)
        : n_(n), edges_(std::move(edges)) {
        if (n_ == 0) throw TreeNotSpanning("tree must have at least one vertex");
        if (edges_.size() != n_ - 1)
            throw TreeNotSpanning("a spanning tree on " + std::to_string(n_) + " vertices needs " +
                                  std::to_string(n_ - 1) + " edges, got " +
                                  std::to_string(edges_.size()));
        std::vector<std::size_t> parent(n_);
        for (std::size_t v = 0; v < n_; ++v) parent[v] = v;
        auto find = [&](std::size_t v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (auto& [a, b] : edges_) {
            if (a >= n_) throw VertexOutOfRange(a, n_);
            if (b >= n_) throw VertexOutOfRange(b, n_);
            if (a == b) throw TreeNotSpanning("self-loop in tree");
            if (a > b) std::swap(a, b);
            std::size_t ra = find(a), rb = find(b);
            if (ra == rb) throw TreeNotSpanning("tree edges contain a cycle");
            parent[ra] = rb;
        }
        std::sort(edges_.begin(), edges_.end());
    }

    std::size_t size() const { return n_; }
    const std::vector<std::pair<std::size_t, std::size_t>>& edges() const { return edges_; }

    std::vector<std::vector<std::size_t>> adjacency() const {
        std::vector<std::vector<std::size_t>> adj(n_);
        for (auto [a, b] : edges_) {
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
        for (auto& l : adj) std::sort(l.begin(), l.end());
        return adj;
    }

    // 1-based "a-b,c-d".
    std::string id() const {
        std::string s;
        for (auto [a, b] : edges_) {
            if (!s.empty()) s += ',';
            s += std::to_string(a + 1) + "-" + std::to_string(b + 1);
        }
        return s;
    }

    friend bool operator==(const UndirectedTree&, const UndirectedTree&) = default;

  private:
    std::size_t n_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;
};

// Orients every edge of t toward root.
inline Arborescence orient_tree(const UndirectedTree& t, std::size_t root) {
    const std::size_t n = t.size();
    if (root >= n) throw VertexOutOfRange(root, n);
    auto adj = t.adjacency();
    std::vector<std::size_t> target(n, npos);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> queue{root};
    seen[root] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        std::size_t v = queue[head];
        for (std::size_t u : adj[v])
            if (!seen[u]) {
                seen[u] = true;
                target[u] = v;
                queue.push_back(u);
            }
    }
    return Arborescence(root, std::move(target));
}

namespace detail {

// Undirected support: {i, j} whenever m_ij or m_ji is an edge.
template <Scalar T>
std::vector<std::vector<std::size_t>> symmetric_support(const ReactionGraph<T>& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && (g.has_edge(i, j) || g.has_edge(j, i))) adj[i].push_back(j);
    return adj;
}

// BFS forest over adj from each unvisited vertex in increasing order.
inline void bfs_forest(const std::vector<std::vector<std::size_t>>& adj,
                       std::vector<std::size_t>& parent, std::vector<std::size_t>& depth) {
    const std::size_t n = adj.size();
    parent.assign(n, npos);
    depth.assign(n, npos);
    for (std::size_t s = 0; s < n; ++s) {
        if (depth[s] != npos) continue;
        depth[s] = 0;
        std::vector<std::size_t> queue{s};
        for (std::size_t head = 0; head < queue.size(); ++head) {
            std::size_t v = queue[head];
            for (std::size_t u : adj[v])
                if (depth[u] == npos) {
                    depth[u] = depth[v] + 1;
                    parent[u] = v;
                    queue.push_back(u);
                }
        }
    }
}

// Rotate to start at the smallest vertex and traverse toward its smaller
// neighbour on the cycle.
inline std::vector<std::size_t> canonical_cycle(std::vector<std::size_t> c) {
    auto it = std::min_element(c.begin(), c.end());
    std::rotate(c.begin(), it, c.end());
    if (c.size() > 2 && c.back() < c[1]) std::reverse(c.begin() + 1, c.end());
    return c;
}

} // namespace detail

// Breadth-first spanning tree of the symmetrized support, rooted at state 0.
template <Scalar T>
UndirectedTree support_spanning_tree(const StochasticMatrix<T>& m) {
    auto adj = detail::symmetric_support(build_graph(m));
    std::vector<std::size_t> parent, depth;
    detail::bfs_forest(adj, parent, depth);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t v = 0; v < m.size(); ++v)
        if (parent[v] != npos) edges.emplace_back(parent[v], v);
    if (edges.size() + 1 != m.size()) throw TreeNotSpanning("support graph is not connected");
    return UndirectedTree(m.size(), std::move(edges));
}

inline constexpr double kDetailedBalanceTolerance = 1e-10;

template <Scalar T>
struct DetailedBalanceReport {
    bool weakly_reversible = true;
    // (i, j) with m_ij > 0 but m_ji = 0, when not weakly reversible.
    std::optional<std::pair<std::size_t, std::size_t>> witness;
    bool cycle_condition_holds = false;
    // Fundamental cycle with the largest |log(forward / backward)|.
    std::vector<std::size_t> worst_cycle;
    T forward_product{0};
    T backward_product{0};
    double worst_log_ratio = 0.0;
    double tolerance = kDetailedBalanceTolerance;
    std::size_t cycles_checked = 0;
};

// Kolmogorov cycle condition on the fundamental cycles of a BFS spanning
// forest of the symmetrized support. Float mode compares
// |log(forward) - log(backward)| against tol; exact mode demands equality.
template <Scalar T>
DetailedBalanceReport<T> detailed_balance_check(const StochasticMatrix<T>& m,
                                                double tol = kDetailedBalanceTolerance) {
    if (m.mode() != Mode::Strict) throw ModeMismatch("detailed balance check requires strict mode");
    const std::size_t n = m.size();
    DetailedBalanceReport<T> out;
    out.tolerance = is_exact_v<T> ? 0.0 : tol;
    ReactionGraph<T> g = build_graph(m);

    for (auto [i, j] : g.edges())
        if (!g.has_edge(j, i)) {
            out.weakly_reversible = false;
            out.witness = std::make_pair(i, j);
            return out;
        }

    auto adj = detail::symmetric_support(g);
    std::vector<std::size_t> parent, depth;
    detail::bfs_forest(adj, parent, depth);

    bool holds = true;
    double worst = -1.0;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v : adj[u]) {
            if (v <= u || parent[v] == u || parent[u] == v) continue;
            // Tree path u -> lca -> v, closed by the edge v -> u.
            std::vector<std::size_t> up{u}, down{v};
            std::size_t a = u, b = v;
            while (a != b) {
                if (depth[a] >= depth[b])
                    up.push_back(a = parent[a]);
                else
                    down.push_back(b = parent[b]);
            }
            down.pop_back();
            up.insert(up.end(), down.rbegin(), down.rend());
            std::vector<std::size_t> cycle = detail::canonical_cycle(std::move(up));

            T fwd(1), bwd(1);
            for (std::size_t k = 0; k < cycle.size(); ++k) {
                std::size_t x = cycle[k], y = cycle[(k + 1) % cycle.size()];
                fwd *= m(x, y);
                bwd *= m(y, x);
            }
            ++out.cycles_checked;
            double dev;
            bool ok;
            if constexpr (is_exact_v<T>) {
                ok = fwd == bwd;
                dev = std::fabs(std::log(to_double(Rational(fwd / bwd))));
                if (!ok && dev == 0.0) dev = std::numeric_limits<double>::min();
            } else {
                dev = std::fabs(std::log(fwd) - std::log(bwd));
                if (std::isnan(dev)) dev = std::numeric_limits<double>::infinity();
                ok = dev <= tol;
            }
            holds = holds && ok;
            if (dev > worst) {
                worst = dev;
                out.worst_cycle = std::move(cycle);
                out.forward_product = fwd;
                out.backward_product = bwd;
                out.worst_log_ratio = dev;
            }
        }
    out.cycle_condition_holds = holds;
    return out;
}

// w_k = product of the weights of t oriented toward k. Requires detailed
// balance and a spanning tree whose edges are two-way edges of the graph.
template <Scalar T>
InvariantMeasure<T> invariant_detailed_balance(const StochasticMatrix<T>& m, const UndirectedTree& t,
                                               double tol = kDetailedBalanceTolerance) {
    const std::size_t n = m.size();
    if (t.size() != n)
        throw TreeNotSpanning("tree has " + std::to_string(t.size()) + " vertices, matrix has " +
                              std::to_string(n));
    for (auto [a, b] : t.edges())
        if (!(m(a, b) > T(0)) || !(m(b, a) > T(0))) throw TreeEdgeNotInGraph(a, b);

    auto report = detailed_balance_check(m, tol);
    if (!report.weakly_reversible)
        throw DetailedBalanceViolation("matrix is not weakly reversible");
    if (!report.cycle_condition_holds)
        throw DetailedBalanceViolation("cycle condition fails (|log ratio| = " +
                                       to_string(report.worst_log_ratio) + ")");

    std::vector<T> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        Arborescence oriented = orient_tree(t, k);
        T p(1);
        for (auto [i, j] : oriented.edges()) p *= m(i, j);
        w[k] = p;
    }
    auto out = make_measure(std::move(w), Method::DetailedBalance);
    out.tree_id = t.id();
    return out;
}

} // namespace markovtree

#endif // MARKOVTREE_MEASURE_HPP
