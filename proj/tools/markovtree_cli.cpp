// markovtree: invariant measures of finite stochastic matrices from the
// command line. Every subcommand prints one JSON document on stdout.
//
// Exit codes: 0 ok, 1 parse/usage, 2 validation, 3 enumeration cap,
// 4 detailed balance violated, 5 internal error or failed verification.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "markovtree/markovtree.hpp"

namespace mt = markovtree;
using mt::report::Json;

namespace {

enum Exit : int { kOk = 0, kParse = 1, kValidation = 2, kCap = 3, kDetailedBalance = 4, kInternal = 5 };

struct Options {
    std::string file;
    std::string mode;
    bool exact = false;
    bool force_float = false;
    std::uint64_t cap = 0;

    std::string method = "tree";
    std::string tree;
    double tol = mt::kFloatTolerance;
    double db_tol = mt::kDetailedBalanceTolerance;
    double verify_tol = 1e-10;
    std::size_t max_iters = 100000;
    double power_tol = 1e-13;

    std::size_t root = 0;
    bool list = false;
};

void emit(const Json& j) { std::cout << j.dump(2) << '\n'; }

mt::EnumerationLimits limits_for(const Options& o) {
    auto l = mt::EnumerationLimits::from_env();
    if (o.cap > 0) l.max_trees = o.cap;
    return l;
}

// "1-2,2-3" (1-based) to an undirected tree on n vertices.
mt::UndirectedTree parse_tree(const std::string& spec, std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        auto dash = item.find('-');
        if (dash == std::string::npos) throw mt::ParseError(1, start + 1, "tree edge '" + item + "' is not of the form a-b");
        try {
            std::size_t a = std::stoul(item.substr(0, dash));
            std::size_t b = std::stoul(item.substr(dash + 1));
            if (a == 0 || b == 0) throw mt::VertexOutOfRange(0, n);
            edges.emplace_back(a - 1, b - 1);
        } catch (const std::logic_error&) {
            throw mt::ParseError(1, start + 1, "tree edge '" + item + "' is not of the form a-b");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return mt::UndirectedTree(n, std::move(edges));
}

template <mt::Scalar T>
mt::StochasticMatrix<T> load(const mt::io::MatrixText& text, const Options& o) {
    mt::Mode mode = text.mode.value_or(mt::Mode::Strict);
    if (!o.mode.empty()) mode = o.mode == "generalized" ? mt::Mode::Generalized : mt::Mode::Strict;
    return mt::validate_stochastic(mt::io::to_matrix<T>(text), mode);
}

template <mt::Scalar T>
Json header(const std::string& cmd, const mt::StochasticMatrix<T>& m) {
    return mt::report::header(cmd, m.size(), mt::is_exact_v<T>, m.mode());
}

template <mt::Scalar T>
Json measure_with_residual(const mt::StochasticMatrix<T>& m, const mt::InvariantMeasure<T>& w, double tol) {
    auto check = mt::check_invariance(m, w.weights, tol);
    return mt::report::measure(w, &check);
}

template <mt::Scalar T>
int cmd_validate(const mt::StochasticMatrix<T>& m) {
    Json j = header("validate", m);
    j["validation"] = {{"valid", true}};
    emit(j);
    return kOk;
}

template <mt::Scalar T>
int cmd_invariant(const mt::StochasticMatrix<T>& m, const Options& o) {
    Json j = header("invariant", m);
    Json measures = Json::array();
    if (o.method == "tree") {
        measures.push_back(measure_with_residual(m, mt::invariant_tree_sum(m, limits_for(o)), o.tol));
    } else if (o.method == "cofactor") {
        measures.push_back(measure_with_residual(m, mt::invariant_cofactor(m), o.tol));
    } else if (o.method == "solve") {
        auto basis = mt::oracle::null_space_solve(m);
        for (auto& v : basis.vectors)
            measures.push_back(measure_with_residual(m, mt::make_measure(v, mt::Method::Solve), o.tol));
        j["fixed_space_dimension"] = basis.dimension;
    } else if (o.method == "power") {
        std::vector<double> p0(m.size(), 1.0 / static_cast<double>(m.size()));
        auto p = mt::oracle::power_iteration(m, p0, o.max_iters, o.power_tol);
        Json pj = mt::report::power(p);
        auto fm = mt::to_float(m);
        auto check = mt::check_invariance(fm, p.distribution, o.tol);
        pj["residual"] = {{"max", mt::report::number(check.max_residual)}, {"holds", check.holds}};
        measures.push_back(std::move(pj));
    } else if (o.method == "db") {
        auto r = mt::detailed_balance_check(m, o.db_tol);
        if (!r.weakly_reversible || !r.cycle_condition_holds) {
            j["detailed_balance"] = mt::report::detailed_balance(r);
            j["error"] = mt::report::error("DetailedBalanceViolation", "matrix is not detailed balanced");
            emit(j);
            return kDetailedBalance;
        }
        mt::UndirectedTree t = o.tree.empty() ? mt::support_spanning_tree(m) : parse_tree(o.tree, m.size());
        measures.push_back(measure_with_residual(m, mt::invariant_detailed_balance(m, t, o.db_tol), o.tol));
    }
    j["invariant"] = std::move(measures);
    emit(j);
    return kOk;
}

template <mt::Scalar T>
int cmd_classes(const mt::StochasticMatrix<T>& m) {
    Json j = header("classes", m);
    j["classes"] = mt::report::classes(mt::communicating_classes(mt::build_graph(m)));
    emit(j);
    return kOk;
}

template <mt::Scalar T>
int cmd_trees(const mt::StochasticMatrix<T>& m, const Options& o) {
    if (o.root == 0 || o.root > m.size()) throw mt::VertexOutOfRange(o.root, m.size());
    const std::size_t root = o.root - 1;
    auto g = mt::build_graph(m);
    Json t;
    t["root"] = o.root;
    if (o.list) {
        Json list = Json::array();
        std::uint64_t count = mt::for_each_arborescence(
            g, root, [&](const mt::Arborescence& a) { list.push_back(mt::report::edge_list(a.edges())); },
            limits_for(o));
        t["count"] = count;
        t["trees"] = std::move(list);
    } else {
        t["count"] = mt::count_arborescences(g, root, limits_for(o));
    }
    t["complete_graph_count"] = mt::report::number(mt::complete_tree_count(m.size()));
    Json j = header("trees", m);
    j["trees"] = std::move(t);
    emit(j);
    return kOk;
}

template <mt::Scalar T>
int cmd_db_check(const mt::StochasticMatrix<T>& m, const Options& o) {
    auto r = mt::detailed_balance_check(m, o.db_tol);
    Json j = header("db-check", m);
    j["detailed_balance"] = mt::report::detailed_balance(r);
    emit(j);
    return r.cycle_condition_holds ? kOk : kDetailedBalance;
}

// Largest componentwise difference between the normalized forms of a and b;
// unnormalized when either sums to zero.
template <mt::Scalar T>
double discrepancy(const std::vector<T>& a, const std::vector<T>& b) {
    auto normalize = [](std::vector<T> v) {
        T s(0);
        for (const auto& x : v) s += x;
        if (!mt::is_zero(s))
            for (auto& x : v) x /= s;
        return v;
    };
    T sa(0), sb(0);
    for (const auto& x : a) sa += x;
    for (const auto& x : b) sb += x;
    bool both = !mt::is_zero(sa) && !mt::is_zero(sb);
    auto na = both ? normalize(a) : a;
    auto nb = both ? normalize(b) : b;
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, mt::to_double(T(mt::abs_value(T(na[i] - nb[i])))));
    if constexpr (mt::is_exact_v<T>) {
        // Exact agreement is equality, not "small".
        if (na != nb && worst == 0.0) worst = std::numeric_limits<double>::min();
    }
    return worst;
}

template <mt::Scalar T>
int cmd_verify(const mt::StochasticMatrix<T>& m, const Options& o) {
    auto tree = mt::invariant_tree_sum(m, limits_for(o));
    auto cof = mt::invariant_cofactor(m);
    auto solve = mt::oracle::null_space_solve(m);
    const double tol = mt::is_exact_v<T> ? 0.0 : o.verify_tol;

    double worst = discrepancy(tree.weights, cof.weights);
    if (solve.dimension == 1 && !mt::is_zero(tree.normalizer)) {
        worst = std::max(worst, discrepancy(tree.weights, solve.vectors.front()));
        worst = std::max(worst, discrepancy(cof.weights, solve.vectors.front()));
    }
    bool agree = worst <= tol;

    Json v;
    v["tree"] = measure_with_residual(m, tree, o.tol);
    v["cofactor"] = measure_with_residual(m, cof, o.tol);
    v["solve"] = mt::report::fixed_space(solve);
    v["solve_dimension"] = solve.dimension;
    v["max_discrepancy"] = worst;
    v["tolerance"] = tol;
    v["agree"] = agree;
    Json j = header("verify", m);
    j["verify"] = std::move(v);
    emit(j);
    return agree ? kOk : kInternal;
}

template <mt::Scalar T>
int cmd_analyze(const mt::StochasticMatrix<T>& m, const Options& o) {
    auto limits = limits_for(o);
    auto g = mt::build_graph(m);
    Json j = header("analyze", m);
    j["validation"] = {{"valid", true}};
    j["classes"] = mt::report::classes(mt::communicating_classes(g));

    auto tree = mt::invariant_tree_sum(m, limits);
    Json measures = Json::array();
    measures.push_back(measure_with_residual(m, tree, o.tol));
    measures.push_back(measure_with_residual(m, mt::invariant_cofactor(m), o.tol));
    j["invariant"] = std::move(measures);

    if (m.mode() == mt::Mode::Strict) {
        j["positivity"] = mt::report::positivity(mt::positivity_certificate(m, limits));
        j["uniqueness"] = mt::report::uniqueness(mt::uniqueness_report(m, limits));
        j["detailed_balance"] = mt::report::detailed_balance(mt::detailed_balance_check(m, o.db_tol));
    } else {
        j["positivity"] = nullptr;
        j["uniqueness"] = nullptr;
        j["detailed_balance"] = nullptr;
    }

    Json counts = Json::array();
    for (std::size_t r = 0; r < m.size(); ++r) counts.push_back(mt::count_arborescences(g, r, limits));
    j["tree_counts"] = {{"per_root", std::move(counts)},
                        {"complete_graph_count", mt::report::number(mt::complete_tree_count(m.size()))}};
    emit(j);
    return kOk;
}

template <mt::Scalar T>
int dispatch(const std::string& cmd, const mt::io::MatrixText& text, const Options& o) {
    mt::StochasticMatrix<T> m = load<T>(text, o);
    if (cmd == "validate") return cmd_validate(m);
    if (cmd == "invariant") return cmd_invariant(m, o);
    if (cmd == "classes") return cmd_classes(m);
    if (cmd == "trees") return cmd_trees(m, o);
    if (cmd == "db-check") return cmd_db_check(m, o);
    if (cmd == "verify") return cmd_verify(m, o);
    return cmd_analyze(m, o);
}

int fail(int code, const std::string& type, const std::string& message, Json extra = Json::object()) {
    std::cerr << "markovtree: " << message << '\n';
    Json j;
    j["schema_version"] = mt::report::kSchemaVersion;
    j["error"] = mt::report::error(type, message);
    for (auto& [k, v] : extra.items()) j["error"][k] = v;
    emit(j);
    return code;
}

int run(const std::string& cmd, const Options& o) {
    try {
        mt::io::MatrixText text = mt::io::read_matrix_file(o.file);
        bool exact = o.exact || (!o.force_float && text.has_fraction());
        return exact ? dispatch<mt::Rational>(cmd, text, o) : dispatch<double>(cmd, text, o);
    } catch (const mt::ParseError& e) {
        return fail(kParse, "ParseError", e.what(), {{"line", e.line()}, {"column", e.column()}});
    } catch (const mt::RowSumViolation& e) {
        return fail(kValidation, "RowSumViolation", e.what(), {{"row", e.row() + 1}, {"sum", e.sum()}});
    } catch (const mt::NegativeEntry& e) {
        return fail(kValidation, "NegativeEntry", e.what(), {{"row", e.row() + 1}, {"col", e.col() + 1}});
    } catch (const mt::NonSquare& e) {
        return fail(kValidation, "NonSquare", e.what(), {{"row", e.row() + 1}});
    } catch (const mt::EnumerationCapExceeded& e) {
        return fail(kCap, "EnumerationCapExceeded", e.what(), {{"cap", e.cap()}});
    } catch (const mt::DetailedBalanceViolation& e) {
        return fail(kDetailedBalance, "DetailedBalanceViolation", e.what());
    } catch (const mt::VertexOutOfRange& e) {
        return fail(kParse, "VertexOutOfRange", e.what());
    } catch (const mt::TreeNotSpanning& e) {
        return fail(kParse, "TreeNotSpanning", e.what());
    } catch (const mt::TreeEdgeNotInGraph& e) {
        return fail(kParse, "TreeEdgeNotInGraph", e.what());
    } catch (const mt::ModeMismatch& e) {
        return fail(kValidation, "ModeMismatch", e.what());
    } catch (const std::exception& e) {
        return fail(kInternal, "InternalError", e.what());
    }
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("file", o.file, "Matrix file (CSV or JSON)")->required();
    sub->add_option("--mode", o.mode, "strict or generalized (default: file setting, else strict)")
        ->check(CLI::IsMember({"strict", "generalized"}));
    auto* ex = sub->add_flag("--exact", o.exact, "Exact rational arithmetic");
    auto* fl = sub->add_flag("--float", o.force_float, "binary64 arithmetic even for p/q entries");
    ex->excludes(fl);
    sub->add_option("--cap", o.cap, std::string("Tree enumeration cap (default 1e7, env ") + mt::kTreeCapEnv + ")");
    sub->add_option("--tol", o.tol, "Invariance residual tolerance (float)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant measures of stochastic matrices via the Markov tree theorem"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check that the file holds a stochastic matrix");
    add_common(validate, o);

    auto* invariant = app.add_subcommand("invariant", "Compute an invariant measure");
    add_common(invariant, o);
    invariant->add_option("--method", o.method, "tree, cofactor, solve, power or db")
        ->check(CLI::IsMember({"tree", "cofactor", "solve", "power", "db"}));
    invariant->add_option("--tree", o.tree, "Spanning tree for --method db, e.g. \"1-2,2-3\"");
    invariant->add_option("--db-tol", o.db_tol, "Detailed-balance |log ratio| tolerance");
    invariant->add_option("--max-iters", o.max_iters, "Power iteration limit");
    invariant->add_option("--power-tol", o.power_tol, "Power iteration 1-norm stopping change");

    auto* classes = app.add_subcommand("classes", "Communicating classes and their Z1/Z2/ZR kind");
    add_common(classes, o);

    auto* trees = app.add_subcommand("trees", "Count or list arborescences rooted at a state");
    add_common(trees, o);
    trees->add_option("--root", o.root, "Root state (1-based)")->required();
    auto* count_flag = trees->add_flag("--count", "Print only the count (default)");
    auto* list_flag = trees->add_flag("--list", o.list, "List every tree");
    count_flag->excludes(list_flag);

    auto* db = app.add_subcommand("db-check", "Detailed balance via the cycle condition");
    add_common(db, o);
    db->add_option("--db-tol,--cycle-tol", o.db_tol, "|log ratio| tolerance");

    auto* verify = app.add_subcommand("verify", "Cross-check tree sum, cofactors and null-space solve");
    add_common(verify, o);
    verify->add_option("--verify-tol", o.verify_tol, "Normalized discrepancy tolerance (float)");

    auto* analyze = app.add_subcommand("analyze", "Full analysis report");
    add_common(analyze, o);
    analyze->add_option("--db-tol", o.db_tol, "Detailed-balance |log ratio| tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kParse;
    }

    for (auto* sub : app.get_subcommands()) return run(sub->get_name(), o);
    return kParse;
}
