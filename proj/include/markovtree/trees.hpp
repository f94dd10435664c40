#ifndef MARKOVTREE_TREES_HPP
#define MARKOVTREE_TREES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graph.hpp"
#include "scalar.hpp"

namespace markovtree {

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Environment variable overriding EnumerationLimits::max_trees.
inline constexpr const char* kTreeCapEnv = "MARKOVTREE_TREE_CAP";

struct EnumerationLimits {
    // Hitting this many trees and finding one more is an error, never a
    // silent truncation.
    std::uint64_t max_trees = 10'000'000;
    // Largest complete graph that count_arborescences_complete enumerates.
    std::size_t max_complete_n = 12;

    static EnumerationLimits from_env() {
        EnumerationLimits l;
        if (const char* s = std::getenv(kTreeCapEnv); s && *s) {
            char* end = nullptr;
            unsigned long long v = std::strtoull(s, &end, 10);
            if (end && *end == '\0' && v > 0) l.max_trees = v;
        }
        return l;
    }
};

// Directed spanning tree with every edge oriented toward the root: each
// non-root vertex has exactly one outgoing edge, the root has none.
class Arborescence {
  public:
    // Validates edge count and acyclicity; throws InvalidArborescence.
    Arborescence(std::size_t root, std::vector<std::size_t> targets)
        : root_(root), target_(std::move(targets)) {
        const std::size_t n = target_.size();
        if (root_ >= n) throw VertexOutOfRange(root_, n);
        if (target_[root_] != npos) throw InvalidArborescence("root has an outgoing edge");
        for (std::size_t v = 0; v < n; ++v) {
            if (v == root_) continue;
            if (target_[v] >= n || target_[v] == v)
                throw InvalidArborescence("vertex " + std::to_string(v) + " has no valid outgoing edge");
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::size_t x = v, steps = 0;
            while (x != root_) {
                x = target_[x];
                if (++steps > n - 1) throw InvalidArborescence("edges contain a cycle");
            }
        }
    }

    std::size_t size() const { return target_.size(); }
    std::size_t root() const { return root_; }
    std::size_t target(std::size_t v) const { return target_[v]; }
    std::span<const std::size_t> targets() const { return target_; }

    // (source, target), by source.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (std::size_t v = 0; v < target_.size(); ++v)
            if (v != root_) e.emplace_back(v, target_[v]);
        return e;
    }

    friend bool operator==(const Arborescence&, const Arborescence&) = default;

  private:
    struct unchecked_t {};
    Arborescence(unchecked_t, std::size_t root, std::size_t n) : root_(root), target_(n, npos) {}

    friend class ArborescenceEnumerator;

    std::size_t root_;
    std::vector<std::size_t> target_;
};

// v, target(v), ..., root.
inline std::vector<std::size_t> path_to_root(const Arborescence& t, std::size_t v) {
    if (v >= t.size()) throw VertexOutOfRange(v, t.size());
    std::vector<std::size_t> path{v};
    while (v != t.root()) {
        v = t.target(v);
        path.push_back(v);
    }
    return path;
}

// The single directed cycle of t plus the edge (root, target), listed from
// the root in edge direction.
inline std::vector<std::size_t> add_edge_unique_cycle(const Arborescence& t, std::size_t target) {
    if (target >= t.size()) throw VertexOutOfRange(target, t.size());
    if (target == t.root()) throw InvalidArgument("added edge would be a self-loop at the root");
    std::vector<std::size_t> cycle{t.root()};
    for (std::size_t v : path_to_root(t, target))
        if (v != t.root()) cycle.push_back(v);
    return cycle;
}

// Out-edge vector of t with the extra edge (root, target): a functional
// graph with one cycle. Used to compare the two sides of the exchange
// bijection as canonical edge sets.
inline std::vector<std::size_t> with_root_edge(const Arborescence& t, std::size_t target) {
    if (target >= t.size() || target == t.root()) throw VertexOutOfRange(target, t.size());
    std::vector<std::size_t> code(t.targets().begin(), t.targets().end());
    code[t.root()] = target;
    return code;
}

// Backtracking over out-edge choices, vertices in increasing order and
// targets in increasing order, so trees come out lexicographically by their
// out-edge vector. A choice is pruned as soon as it closes a cycle.
class ArborescenceEnumerator {
  public:
    ArborescenceEnumerator(const Digraph& g, std::size_t root, EnumerationLimits limits = {})
        : g_(g), limits_(limits), tree_(Arborescence::unchecked_t{}, root, g.size()) {
        if (root >= g.size()) throw VertexOutOfRange(root, g.size());
        for (std::size_t v = 0; v < g.size(); ++v)
            if (v != root) order_.push_back(v);
    }

    // on_step(depth, v, t) runs after v -> t is fixed; on_leaf(tree) runs for
    // every complete tree. Returns the number of trees.
    template <typename OnStep, typename OnLeaf>
    std::uint64_t run(OnStep&& on_step, OnLeaf&& on_leaf) {
        count_ = 0;
        // No tree can exist unless every vertex reaches the root.
        if (reachability_set(g_, tree_.root()).size() != g_.size()) return 0;
        recurse(0, on_step, on_leaf);
        return count_;
    }

  private:
    bool closes_cycle(std::size_t v, std::size_t t) const {
        std::size_t x = t;
        while (x != tree_.root_ && x != v && tree_.target_[x] != npos) x = tree_.target_[x];
        return x == v;
    }

    template <typename OnStep, typename OnLeaf>
    void recurse(std::size_t depth, OnStep& on_step, OnLeaf& on_leaf) {
        if (depth == order_.size()) {
            if (++count_ > limits_.max_trees) throw EnumerationCapExceeded(limits_.max_trees);
            on_leaf(static_cast<const Arborescence&>(tree_));
            return;
        }
        const std::size_t v = order_[depth];
        for (std::size_t t : g_.successors(v)) {
            if (closes_cycle(v, t)) continue;
            tree_.target_[v] = t;
            on_step(depth, v, t);
            recurse(depth + 1, on_step, on_leaf);
        }
        tree_.target_[v] = npos;
    }

    const Digraph& g_;
    EnumerationLimits limits_;
    Arborescence tree_;
    std::vector<std::size_t> order_;
    std::uint64_t count_ = 0;
};

// Streams every arborescence of g rooted at `root`, each exactly once.
// The reference passed to visit is only valid during the call.
template <typename Visitor>
std::uint64_t for_each_arborescence(const Digraph& g, std::size_t root, Visitor&& visit,
                                    EnumerationLimits limits = {}) {
    ArborescenceEnumerator e(g, root, limits);
    return e.run([](std::size_t, std::size_t, std::size_t) {}, visit);
}

inline std::vector<Arborescence> enumerate_arborescences(const Digraph& g, std::size_t root,
                                                         EnumerationLimits limits = {}) {
    std::vector<Arborescence> out;
    for_each_arborescence(g, root, [&](const Arborescence& t) { out.push_back(t); }, limits);
    return out;
}

inline std::uint64_t count_arborescences(const Digraph& g, std::size_t root,
                                         EnumerationLimits limits = {}) {
    return for_each_arborescence(g, root, [](const Arborescence&) {}, limits);
}

// Sum over arborescences rooted at `root` of the product of weight(i, j)
// over their edges. Products are carried along the recursion, so each
// search node costs one multiplication.
template <typename U, typename WeightFn>
U fold_arborescence_products(const Digraph& g, std::size_t root, WeightFn&& weight,
                             EnumerationLimits limits = {}) {
    ArborescenceEnumerator e(g, root, limits);
    std::vector<U> prefix(g.size(), U(1));
    U total(0);
    e.run(
        [&](std::size_t depth, std::size_t v, std::size_t t) {
            prefix[depth + 1] = prefix[depth] * weight(v, t);
        },
        [&](const Arborescence&) { total += prefix[g.size() - 1]; });
    return total;
}

// n^(n-2), with 1 for n = 1.
inline Integer complete_tree_count(std::size_t n) {
    if (n == 0) throw InvalidArgument("n must be positive");
    if (n == 1) return Integer(1);
    return boost::multiprecision::pow(Integer(n), static_cast<unsigned>(n - 2));
}

// (n-k) n^(k-1).
inline Integer marked_graph_count(std::size_t n, std::size_t k) {
    if (k == 0) throw EmptyMarkedSet();
    if (k > n) throw InvalidArgument("more marked vertices than vertices");
    return Integer(n - k) * boost::multiprecision::pow(Integer(n), static_cast<unsigned>(k - 1));
}

struct TreeCount {
    Integer value;
    // True when the count was also obtained by exhaustive enumeration.
    bool enumerated = false;
};

inline TreeCount count_arborescences_complete(std::size_t n, std::size_t root,
                                              EnumerationLimits limits = {}) {
    if (n == 0) throw InvalidArgument("n must be positive");
    if (root >= n) throw VertexOutOfRange(root, n);
    TreeCount c{complete_tree_count(n), false};
    if (n <= limits.max_complete_n && c.value <= limits.max_trees) {
        Integer counted(count_arborescences(Digraph::complete(n), root, limits));
        if (counted != c.value)
            throw std::logic_error("enumeration disagrees with n^(n-2) for n = " + std::to_string(n));
        c.enumerated = true;
    }
    return c;
}

// Directed acyclic graph in which each marked vertex has exactly one
// outgoing edge (to any other vertex) and unmarked vertices have none.
class MarkedFunctionalGraph {
  public:
    MarkedFunctionalGraph(std::vector<std::size_t> marked, std::vector<std::size_t> targets)
        : marked_(std::move(marked)), target_(std::move(targets)) {
        const std::size_t n = target_.size();
        std::sort(marked_.begin(), marked_.end());
        for (std::size_t v = 0; v < n; ++v) {
            bool is_marked = std::binary_search(marked_.begin(), marked_.end(), v);
            if (is_marked != (target_[v] != npos))
                throw InvalidArborescence("out-edges must start exactly at marked vertices");
            if (is_marked && (target_[v] >= n || target_[v] == v))
                throw InvalidArborescence("invalid out-edge at vertex " + std::to_string(v));
        }
        for (std::size_t v : marked_) {
            std::size_t x = v, steps = 0;
            while (target_[x] != npos) {
                x = target_[x];
                if (++steps > n) throw InvalidArborescence("edges contain a cycle");
            }
        }
    }

    std::size_t size() const { return target_.size(); }
    const std::vector<std::size_t>& marked() const { return marked_; }
    std::size_t target(std::size_t v) const { return target_[v]; }
    std::span<const std::size_t> targets() const { return target_; }

  private:
    std::vector<std::size_t> marked_;
    std::vector<std::size_t> target_;
};

namespace detail {

inline std::vector<std::size_t> normalize_marked(std::size_t n, std::vector<std::size_t> marked) {
    if (marked.empty()) throw EmptyMarkedSet();
    for (std::size_t v : marked)
        if (v >= n) throw VertexOutOfRange(v, n);
    std::sort(marked.begin(), marked.end());
    marked.erase(std::unique(marked.begin(), marked.end()), marked.end());
    return marked;
}

} // namespace detail

// All marked functional graphs over the complete graph on n vertices.
// The visitor receives the out-edge vector (npos for unmarked vertices).
template <typename Visitor>
std::uint64_t for_each_marked_graph(std::size_t n, std::vector<std::size_t> marked,
                                    Visitor&& visit, EnumerationLimits limits = {}) {
    marked = detail::normalize_marked(n, std::move(marked));
    std::vector<std::size_t> target(n, npos);
    std::uint64_t count = 0;

    auto closes_cycle = [&](std::size_t v, std::size_t t) {
        std::size_t x = t;
        while (x != v && target[x] != npos) x = target[x];
        return x == v;
    };
    auto recurse = [&](auto& self, std::size_t depth) -> void {
        if (depth == marked.size()) {
            if (++count > limits.max_trees) throw EnumerationCapExceeded(limits.max_trees);
            visit(std::span<const std::size_t>(target));
            return;
        }
        const std::size_t v = marked[depth];
        for (std::size_t t = 0; t < n; ++t) {
            if (t == v || closes_cycle(v, t)) continue;
            target[v] = t;
            self(self, depth + 1);
        }
        target[v] = npos;
    };
    recurse(recurse, 0);
    return count;
}

inline TreeCount count_marked_graphs(std::size_t n, std::vector<std::size_t> marked,
                                     EnumerationLimits limits = {}) {
    marked = detail::normalize_marked(n, std::move(marked));
    TreeCount c{marked_graph_count(n, marked.size()), false};
    if (n <= limits.max_complete_n && c.value <= limits.max_trees) {
        Integer counted(for_each_marked_graph(n, marked, [](std::span<const std::size_t>) {}, limits));
        if (counted != c.value)
            throw std::logic_error("enumeration disagrees with (n-k) n^(k-1)");
        c.enumerated = true;
    }
    return c;
}

} // namespace markovtree

#endif // MARKOVTREE_TREES_HPP
