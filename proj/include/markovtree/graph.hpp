#ifndef MARKOVTREE_GRAPH_HPP
#define MARKOVTREE_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include "core.hpp"
#include "error.hpp"

namespace markovtree {

// Unweighted directed graph on vertices 0..n-1 without self-loops.
// Adjacency lists are kept sorted so every traversal is deterministic.
class Digraph {
  public:
    Digraph() = default;
    explicit Digraph(std::size_t n) : n_(n), adj_(n * n, false), out_(n), in_(n) {}

    Digraph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
        : Digraph(n) {
        for (auto [i, j] : edges) add_edge(i, j);
    }

    static Digraph complete(std::size_t n) {
        Digraph g(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) g.add_edge(i, j);
        return g;
    }

    std::size_t size() const { return n_; }

    std::size_t edge_count() const {
        std::size_t c = 0;
        for (const auto& o : out_) c += o.size();
        return c;
    }

    bool has_edge(std::size_t i, std::size_t j) const { return adj_[i * n_ + j]; }

    const std::vector<std::size_t>& successors(std::size_t i) const { return out_[i]; }
    const std::vector<std::size_t>& predecessors(std::size_t i) const { return in_[i]; }

    // Lexicographic (source, target) order.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j : out_[i]) e.emplace_back(i, j);
        return e;
    }

    void add_edge(std::size_t i, std::size_t j) {
        if (i >= n_) throw VertexOutOfRange(i, n_);
        if (j >= n_) throw VertexOutOfRange(j, n_);
        if (i == j) throw InvalidArgument("self-loops are not graph edges");
        if (adj_[i * n_ + j]) return;
        adj_[i * n_ + j] = true;
        out_[i].insert(std::lower_bound(out_[i].begin(), out_[i].end(), j), j);
        in_[j].insert(std::lower_bound(in_[j].begin(), in_[j].end(), i), i);
    }

  private:
    std::size_t n_ = 0;
    std::vector<bool> adj_;
    std::vector<std::vector<std::size_t>> out_, in_;
};

// The reaction graph of a stochastic matrix: edge (i, j) for every
// qualifying off-diagonal entry, weighted by m_ij.
template <Scalar T>
class ReactionGraph : public Digraph {
  public:
    using scalar_type = T;

    const T& weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
    const DenseMatrix<T>& weights() const { return weights_; }

  private:
    ReactionGraph(std::size_t n, DenseMatrix<T> w) : Digraph(n), weights_(std::move(w)) {}

    template <Scalar U>
    friend ReactionGraph<U> build_graph(const StochasticMatrix<U>& m);

    DenseMatrix<T> weights_;
};

// Strict: m_ij > 0. Generalized: m_ij != 0. Diagonal entries never form edges.
template <Scalar T>
ReactionGraph<T> build_graph(const StochasticMatrix<T>& m) {
    const std::size_t n = m.size();
    ReactionGraph<T> g(n, DenseMatrix<T>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const T& x = m(i, j);
            bool present = m.mode() == Mode::Strict ? x > T(0) : !is_zero(x);
            if (present) {
                g.add_edge(i, j);
                g.weights_(i, j) = x;
            }
        }
    return g;
}

// Z1: no inter-class edges at all. Z2: receives inter-class paths but has no
// outgoing one. Z_R: everything else (has an outgoing inter-class edge).
enum class ClassKind { Disconnected, ClosedReceiving, Remaining };

inline const char* to_string(ClassKind k) {
    switch (k) {
    case ClassKind::Disconnected: return "Z1";
    case ClassKind::ClosedReceiving: return "Z2";
    case ClassKind::Remaining: return "ZR";
    }
    return "?";
}

struct CommunicatingClass {
    std::vector<std::size_t> members; // sorted
    ClassKind kind = ClassKind::Remaining;

    // Z1 and Z2 classes are closed and carry invariant measures.
    bool closed() const { return kind != ClassKind::Remaining; }

    friend bool operator==(const CommunicatingClass&, const CommunicatingClass&) = default;
};

struct ClassDecomposition {
    // Z1 classes, then Z2, then Z_R; each group ordered by smallest member.
    std::vector<CommunicatingClass> classes;
    // class_of[v] indexes into classes.
    std::vector<std::size_t> class_of;

    std::size_t count(ClassKind k) const {
        return static_cast<std::size_t>(std::count_if(
            classes.begin(), classes.end(), [k](const auto& c) { return c.kind == k; }));
    }

    std::size_t closed_count() const {
        return count(ClassKind::Disconnected) + count(ClassKind::ClosedReceiving);
    }

    std::vector<const CommunicatingClass*> closed_classes() const {
        std::vector<const CommunicatingClass*> out;
        for (const auto& c : classes)
            if (c.closed()) out.push_back(&c);
        return out;
    }
};

namespace detail {

// Iterative Tarjan; returns component id per vertex (ids in reverse
// topological order of the condensation, not canonical).
inline std::vector<std::size_t> tarjan_scc(const Digraph& g, std::size_t& count) {
    const std::size_t n = g.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::pair<std::size_t, std::size_t>> call; // (vertex, next successor slot)
    std::size_t next_index = 0;
    count = 0;

    for (std::size_t s = 0; s < n; ++s) {
        if (index[s] != unvisited) continue;
        call.emplace_back(s, 0);
        index[s] = low[s] = next_index++;
        stack.push_back(s);
        on_stack[s] = true;
        while (!call.empty()) {
            auto& [v, slot] = call.back();
            const auto& succ = g.successors(v);
            if (slot < succ.size()) {
                std::size_t w = succ[slot++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] == index[done]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = count;
                } while (w != done);
                ++count;
            }
        }
    }
    return comp;
}

} // namespace detail

inline ClassDecomposition communicating_classes(const Digraph& g) {
    const std::size_t n = g.size();
    std::size_t m = 0;
    std::vector<std::size_t> comp = detail::tarjan_scc(g, m);

    std::vector<CommunicatingClass> raw(m);
    for (std::size_t v = 0; v < n; ++v) raw[comp[v]].members.push_back(v);

    std::vector<bool> has_out(m, false), has_in(m, false), has_internal(m, false);
    for (auto [i, j] : g.edges()) {
        if (comp[i] == comp[j]) {
            has_internal[comp[i]] = true;
        } else {
            has_out[comp[i]] = true;
            has_in[comp[j]] = true;
        }
    }
    for (std::size_t c = 0; c < m; ++c) {
        if (has_out[c])
            raw[c].kind = ClassKind::Remaining;
        else if (has_in[c])
            raw[c].kind = ClassKind::ClosedReceiving;
        else if (m == 1 && has_internal[c])
            raw[c].kind = ClassKind::ClosedReceiving; // a lone spanning class with edges
        else
            raw[c].kind = ClassKind::Disconnected;
    }

    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.members.front() < b.members.front();
    });

    ClassDecomposition d;
    d.class_of.assign(n, 0);
    for (std::size_t c = 0; c < raw.size(); ++c)
        for (std::size_t v : raw[c].members) d.class_of[v] = c;
    d.classes = std::move(raw);
    return d;
}

// Z_k: every vertex with a directed path to k (k included).
struct ReachabilitySet {
    std::size_t target = 0;
    std::vector<std::size_t> members; // sorted

    bool contains(std::size_t v) const {
        return std::binary_search(members.begin(), members.end(), v);
    }
    std::size_t size() const { return members.size(); }
};

inline ReachabilitySet reachability_set(const Digraph& g, std::size_t k) {
    const std::size_t n = g.size();
    if (k >= n) throw VertexOutOfRange(k, n);
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> queue{k};
    seen[k] = true;
    for (std::size_t head = 0; head < queue.size(); ++head)
        for (std::size_t p : g.predecessors(queue[head]))
            if (!seen[p]) {
                seen[p] = true;
                queue.push_back(p);
            }
    ReachabilitySet r{k, std::move(queue)};
    std::sort(r.members.begin(), r.members.end());
    return r;
}

inline bool is_irreducible(const Digraph& g) {
    return communicating_classes(g).classes.size() == 1;
}

} // namespace markovtree

#endif // MARKOVTREE_GRAPH_HPP
