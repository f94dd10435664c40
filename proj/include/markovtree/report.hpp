#ifndef MARKOVTREE_REPORT_HPP
#define MARKOVTREE_REPORT_HPP

// JSON report fragments. Field order is fixed (ordered_json) and every
// vertex index is 1-based. Exact scalars serialize as
// {"decimal": <number>, "exact": "p/q"}; float scalars as plain numbers.
// The schema lives in docs/report.schema.json.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "graph.hpp"
#include "measure.hpp"
#include "oracle.hpp"
#include "scalar.hpp"
#include "trees.hpp"

namespace markovtree::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

inline Json number(double x) {
    if (std::isfinite(x)) return x;
    return to_string(x);
}

inline Json number(const Rational& x) {
    Json j;
    j["decimal"] = number(to_double(x));
    j["exact"] = to_string(x);
    return j;
}

inline Json number(const Integer& x) {
    // Counts fit in JSON numbers only up to 2^53; keep the exact digits too.
    Json j;
    j["decimal"] = number(to_double(x));
    j["exact"] = to_string(x);
    return j;
}

template <Scalar T>
Json vector(const std::vector<T>& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(number(x));
    return a;
}

inline Json one_based(const std::vector<std::size_t>& v) {
    Json a = Json::array();
    for (std::size_t x : v) a.push_back(x + 1);
    return a;
}

inline Json edge_list(const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Json a = Json::array();
    for (auto [i, j] : edges) a.push_back(Json::array({i + 1, j + 1}));
    return a;
}

inline Json header(const std::string& command, std::size_t n, bool exact, Mode mode) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["input"] = {{"n", n}, {"arithmetic", exact ? "exact" : "float"}, {"mode", to_string(mode)}};
    return j;
}

inline Json classes(const ClassDecomposition& d) {
    Json a = Json::array();
    for (const auto& c : d.classes) {
        Json j;
        j["members"] = one_based(c.members);
        j["kind"] = to_string(c.kind);
        j["closed"] = c.closed();
        a.push_back(std::move(j));
    }
    Json out;
    out["count"] = d.classes.size();
    out["irreducible"] = d.classes.size() == 1;
    out["classes"] = std::move(a);
    return out;
}

template <Scalar T>
Json measure(const InvariantMeasure<T>& m, const InvarianceCheck<T>* check = nullptr) {
    Json j;
    j["method"] = to_string(m.method);
    if (!m.tree_id.empty()) j["tree"] = m.tree_id;
    j["weights"] = vector(m.weights);
    j["normalizer"] = number(m.normalizer);
    if (auto p = m.normalized())
        j["normalized"] = vector(*p);
    else
        j["normalized"] = nullptr;
    j["support"] = one_based(m.support);
    if (check) j["residual"] = {{"max", number(check->max_residual)}, {"holds", check->holds}};
    if (!m.warnings.empty()) j["warnings"] = m.warnings;
    return j;
}

template <Scalar T>
Json positivity(const PositivityReport<T>& p) {
    Json a = Json::array();
    for (const auto& s : p.states)
        a.push_back({{"state", s.state + 1},
                     {"reaches_all", s.reaches_all},
                     {"weight_positive", s.weight_positive},
                     {"consistent", s.consistent()}});
    return {{"states", std::move(a)}, {"all_consistent", p.all_consistent()}};
}

template <Scalar T>
Json uniqueness(const UniquenessReport<T>& u) {
    Json basis = Json::array();
    for (const auto& b : u.basis) basis.push_back(measure(b));
    return {{"unique", u.unique}, {"w_zero", u.w_zero}, {"basis", std::move(basis)}};
}

template <Scalar T>
Json detailed_balance(const DetailedBalanceReport<T>& r) {
    Json j;
    j["weakly_reversible"] = r.weakly_reversible;
    if (r.witness)
        j["witness"] = Json::array({r.witness->first + 1, r.witness->second + 1});
    else
        j["witness"] = nullptr;
    j["cycle_condition_holds"] = r.cycle_condition_holds;
    j["cycles_checked"] = r.cycles_checked;
    if (r.worst_cycle.empty()) {
        j["worst_cycle"] = nullptr;
    } else {
        j["worst_cycle"] = {{"vertices", one_based(r.worst_cycle)},
                            {"forward_product", number(r.forward_product)},
                            {"backward_product", number(r.backward_product)},
                            {"abs_log_ratio", number(r.worst_log_ratio)}};
    }
    j["tolerance"] = r.tolerance;
    return j;
}

template <Scalar T>
Json fixed_space(const oracle::FixedSpaceBasis<T>& b) {
    Json a = Json::array();
    for (const auto& v : b.vectors) a.push_back(vector(v));
    return {{"dimension", b.dimension}, {"vectors", std::move(a)}};
}

inline Json power(const oracle::PowerResult& p) {
    return {{"method", "power"},
            {"normalized", vector(p.distribution)},
            {"iterations", p.iterations},
            {"converged", p.converged}};
}

inline Json error(const std::string& type, const std::string& message) {
    return {{"type", type}, {"message", message}};
}

} // namespace markovtree::report

#endif // MARKOVTREE_REPORT_HPP
