#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace markovtree;
using mt_test::Q;

namespace {

std::vector<Rational> cycle_rates() { return {Q("1/2"), Q("1/3"), Q("1/4"), Q("1/5"), Q("1/6")}; }

// The 5-cycle closed form: w_k is the product of every rate except the one
// leaving k.
std::vector<Rational> five_cycle_closed_form(const std::vector<Rational>& r) {
    std::vector<Rational> w(5, Rational(1));
    for (std::size_t k = 0; k < 5; ++k)
        for (std::size_t i = 0; i < 5; ++i)
            if (i != k) w[k] *= r[i];
    return w;
}

// The 3-state closed form by direct substitution.
std::vector<Rational> three_state_closed_form(const StochasticMatrix<Rational>& m) {
    auto e = [&](int i, int j) { return m(i - 1, j - 1); };
    return {e(2, 1) * e(3, 1) + e(2, 3) * e(3, 1) + e(2, 1) * e(3, 2),
            e(1, 2) * e(3, 2) + e(1, 2) * e(3, 1) + e(1, 3) * e(3, 2),
            e(1, 3) * e(2, 3) + e(1, 3) * e(2, 1) + e(1, 2) * e(2, 3)};
}

StochasticMatrix<Rational> random_generalized(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
    DenseMatrix<Rational> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational off(0);
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) off += m(i, j) = Rational(num(rng), den(rng));
        m(i, i) = Rational(1) - off;
    }
    return validate_stochastic(std::move(m), Mode::Generalized);
}

const mt_test::SixRates kBalanced{Q("1/4"), Q("1/3"), Q("1/2"), Q("1/4"), Q("1/3"), Q("1/2")};

} // namespace

TEST(TreeSum, ThreeStateClosedForm) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        auto m = oracle::random_stochastic<Rational>(3, 0.0, rng);
        EXPECT_EQ(invariant_tree_sum(m).weights, three_state_closed_form(m));
    }
}

TEST(TreeSum, FiveCycle) {
    auto m = mt_test::five_cycle(cycle_rates());
    auto w = invariant_tree_sum(m);
    EXPECT_EQ(w.weights, five_cycle_closed_form(cycle_rates()));
    EXPECT_EQ(w.weights[0], Q("1/360"));
    // Normalized measure is proportional to the inverse rates.
    auto p = *w.normalized();
    Rational inv_sum(0);
    for (const auto& r : cycle_rates()) inv_sum += 1 / r;
    for (std::size_t k = 0; k < 5; ++k) EXPECT_EQ(p[k], (1 / cycle_rates()[k]) / inv_sum);
}

TEST(TreeSum, SignedMatrix) {
    auto m = mt_test::exact({{"1", "-1", "1"}, {"1", "1", "-1"}, {"-1", "1", "1"}}, Mode::Generalized);
    EXPECT_EQ(invariant_tree_sum(m).weights, std::vector<Rational>(3, Rational(1)));
}

TEST(TreeSum, IdentityGivesZero) {
    auto w = invariant_tree_sum(mt_test::identity<Rational>(3));
    EXPECT_EQ(w.weights, std::vector<Rational>(3, Rational(0)));
    EXPECT_TRUE(w.is_zero_vector());
    EXPECT_FALSE(w.normalized().has_value());
}

TEST(TreeSum, SingleState) {
    auto w = invariant_tree_sum(mt_test::identity<Rational>(1));
    EXPECT_EQ(w.weights, std::vector<Rational>{Rational(1)});
}

TEST(TreeSum, FloatMatchesExact) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + rng() % 5;
        auto rows = oracle::random_weight_rows(n, 0.3, rng);
        auto q = invariant_tree_sum(oracle::stochastic_from_weights<Rational>(rows));
        auto f = invariant_tree_sum(oracle::stochastic_from_weights<double>(rows));
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_NEAR(f.weights[k], to_double(q.weights[k]), 1e-12 * std::max(1.0, to_double(q.weights[k])));
    }
}

// Invariance of the tree sum on random strict matrices, exact and float,
// and on signed matrices in generalized mode.
TEST(TreeSum, InvarianceProperty) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 120; ++trial) {
        std::size_t n = 1 + rng() % 6;
        double sparsity = (trial % 4) * 0.2;
        auto rows = oracle::random_weight_rows(n, sparsity, rng);
        auto q = oracle::stochastic_from_weights<Rational>(rows);
        auto wq = invariant_tree_sum(q);
        auto cq = check_invariance(q, wq.weights);
        EXPECT_TRUE(cq.holds);
        EXPECT_EQ(cq.max_residual, 0);
        for (const auto& x : wq.weights) EXPECT_GE(x, 0);
        if (auto p = wq.normalized()) {
            Rational s(0);
            for (const auto& x : *p) s += x;
            EXPECT_EQ(s, 1);
        }

        auto f = oracle::stochastic_from_weights<double>(rows);
        auto cf = check_invariance(f, invariant_tree_sum(f).weights);
        EXPECT_TRUE(cf.holds) << cf.max_residual;

        auto g = random_generalized(n, rng);
        EXPECT_TRUE(check_invariance(g, invariant_tree_sum(g).weights).holds);
    }
}

TEST(Cofactor, AgreesWithTreeSum) {
    EXPECT_EQ(invariant_cofactor(mt_test::five_cycle(cycle_rates())).weights,
              five_cycle_closed_form(cycle_rates()));
    EXPECT_EQ(invariant_cofactor(mt_test::identity<Rational>(4)).weights, std::vector<Rational>(4, Rational(0)));
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 1 + rng() % 6;
        auto m = oracle::random_stochastic<Rational>(n, 0.5, rng);
        EXPECT_EQ(invariant_cofactor(m).weights, invariant_tree_sum(m).weights);
        auto g = random_generalized(n, rng);
        EXPECT_EQ(invariant_cofactor(g).weights, invariant_tree_sum(g).weights);
    }
    auto m3 = oracle::random_stochastic<Rational>(3, 0.0, rng);
    EXPECT_EQ(invariant_cofactor(m3).weights, three_state_closed_form(m3));
}

TEST(CheckInvariance, Examples) {
    auto id = mt_test::identity<Rational>(3);
    EXPECT_TRUE(check_invariance(id, std::vector<Rational>{Q("2"), Q("-1/3"), Q("5")}).holds);

    auto c = mt_test::five_cycle(cycle_rates());
    auto r = check_invariance(c, std::vector<Rational>{1, 0, 0, 0, 0});
    EXPECT_FALSE(r.holds);
    // Residual at state 1 is m12 = 1/2; at state 2 it is also m12.
    EXPECT_EQ(r.max_residual, Q("1/2"));
    EXPECT_THROW(check_invariance(c, std::vector<Rational>{1, 0}), DimensionMismatch);
}

TEST(Positivity, IrreducibleIsAllPositive) {
    auto p = positivity_certificate(mt_test::five_cycle(cycle_rates()));
    for (const auto& s : p.states) {
        EXPECT_TRUE(s.reaches_all);
        EXPECT_TRUE(s.weight_positive);
    }
}

TEST(Positivity, ChainOnlyLastStatePositive) {
    auto m = mt_test::exact({{"1/2", "1/2", "0"}, {"0", "1/2", "1/2"}, {"0", "0", "1"}});
    auto p = positivity_certificate(m);
    EXPECT_TRUE(p.all_consistent());
    EXPECT_FALSE(p.states[0].weight_positive);
    EXPECT_FALSE(p.states[1].weight_positive);
    EXPECT_TRUE(p.states[2].weight_positive);
    EXPECT_EQ(p.tree_sum.weights[2], Q("1/4"));
}

TEST(Positivity, IdentityHasNoPositiveState) {
    auto p = positivity_certificate(mt_test::identity<Rational>(3));
    for (const auto& s : p.states) {
        EXPECT_FALSE(s.reaches_all);
        EXPECT_FALSE(s.weight_positive);
    }
}

TEST(Positivity, RequiresStrictMode) {
    auto m = mt_test::exact({{"1", "-1", "1"}, {"1", "1", "-1"}, {"-1", "1", "1"}}, Mode::Generalized);
    EXPECT_THROW(positivity_certificate(m), ModeMismatch);
    EXPECT_THROW(uniqueness_report(m), ModeMismatch);
    EXPECT_THROW(detailed_balance_check(m), ModeMismatch);
}

TEST(Uniqueness, Examples) {
    auto u = uniqueness_report(mt_test::five_cycle(cycle_rates()));
    EXPECT_TRUE(u.unique);
    EXPECT_FALSE(u.w_zero);
    ASSERT_EQ(u.basis.size(), 1u);
    EXPECT_EQ(u.basis[0].weights, five_cycle_closed_form(cycle_rates()));

    auto id = uniqueness_report(mt_test::identity<Rational>(3));
    EXPECT_FALSE(id.unique);
    EXPECT_TRUE(id.w_zero);
    ASSERT_EQ(id.basis.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(id.basis[k].support, std::vector<std::size_t>{k});

    auto blocks = mt_test::exact(
        {{"0", "1", "0", "0"}, {"1", "0", "0", "0"}, {"0", "0", "0", "1"}, {"0", "0", "1", "0"}});
    auto b = uniqueness_report(blocks);
    EXPECT_FALSE(b.unique);
    EXPECT_TRUE(b.w_zero);
    ASSERT_EQ(b.basis.size(), 2u);
    EXPECT_EQ(b.basis[0].support, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(b.basis[1].support, (std::vector<std::size_t>{2, 3}));
    EXPECT_EQ(oracle::null_space_solve(blocks).dimension, 2u);
}

TEST(UndirectedTree, Validation) {
    EXPECT_NO_THROW(UndirectedTree(3, {{0, 1}, {1, 2}}));
    EXPECT_THROW(UndirectedTree(3, {{0, 1}}), TreeNotSpanning);
    EXPECT_THROW(UndirectedTree(3, {{0, 1}, {1, 0}}), TreeNotSpanning);
    EXPECT_THROW(UndirectedTree(3, {{0, 1}, {1, 3}}), VertexOutOfRange);
    EXPECT_EQ(UndirectedTree(3, {{2, 1}, {0, 1}}).id(), "1-2,2-3");
}

TEST(OrientTree, PathExamples) {
    UndirectedTree path(3, {{0, 1}, {1, 2}});
    EXPECT_EQ(orient_tree(path, 2).edges(), (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}}));
    EXPECT_EQ(orient_tree(path, 0).edges(), (std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {2, 1}}));
}

TEST(OrientTree, RandomTreesReachRoot) {
    std::mt19937_64 rng(88);
    auto full = oracle::random_stochastic<double>(8, 0.0, rng);
    for (int trial = 0; trial < 50; ++trial) {
        auto t = oracle::random_spanning_tree(full, rng);
        std::size_t root = rng() % 8;
        auto a = orient_tree(t, root);
        for (std::size_t v = 0; v < 8; ++v) EXPECT_EQ(path_to_root(a, v).back(), root);
    }
}

TEST(DetailedBalance, SymmetricMatrixPasses) {
    auto m = mt_test::exact({{"1/2", "1/4", "1/4"}, {"1/4", "1/4", "1/2"}, {"1/4", "1/2", "1/4"}});
    auto r = detailed_balance_check(m);
    EXPECT_TRUE(r.weakly_reversible);
    EXPECT_TRUE(r.cycle_condition_holds);
    EXPECT_EQ(r.cycles_checked, 1u);
}

TEST(DetailedBalance, ThreeStateExample) {
    auto m = mt_test::three_state(kBalanced);
    EXPECT_TRUE(detailed_balance_check(m).cycle_condition_holds);

    auto [a, b, c, d, e, f] = kBalanced;
    auto w1 = invariant_detailed_balance(m, UndirectedTree(3, {{0, 1}, {1, 2}}));
    EXPECT_EQ(w1.weights, (std::vector<Rational>{b * c, b * e, e * f}));
    EXPECT_EQ(w1.tree_id, "1-2,2-3");
    auto w2 = invariant_detailed_balance(m, UndirectedTree(3, {{0, 2}, {2, 1}}));
    EXPECT_EQ(w2.weights, (std::vector<Rational>{d * f, a * b, a * f}));
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(w1.weights[k] / w2.weights[k], e / a);
}

TEST(DetailedBalance, ViolationReportsWorstCycle) {
    auto rates = kBalanced;
    rates.d = Q("1/5");
    auto m = mt_test::three_state(rates);
    auto r = detailed_balance_check(m);
    EXPECT_TRUE(r.weakly_reversible);
    EXPECT_FALSE(r.cycle_condition_holds);
    EXPECT_EQ(r.worst_cycle, (std::vector<std::size_t>{0, 1, 2}));
    // Forward 1 -> 2 -> 3 -> 1 is e f d; backward is a b c.
    EXPECT_EQ(r.forward_product, rates.e * rates.f * rates.d);
    EXPECT_EQ(r.backward_product, rates.a * rates.b * rates.c);
    EXPECT_THROW(invariant_detailed_balance(m, UndirectedTree(3, {{0, 1}, {1, 2}})), DetailedBalanceViolation);
}

TEST(DetailedBalance, NotWeaklyReversible) {
    auto m = mt_test::exact({{"1/2", "1/2", "0"}, {"0", "1/2", "1/2"}, {"1/2", "0", "1/2"}});
    auto r = detailed_balance_check(m);
    EXPECT_FALSE(r.weakly_reversible);
    EXPECT_FALSE(r.cycle_condition_holds);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_EQ(*r.witness, (std::pair<std::size_t, std::size_t>{0, 1}));
}

TEST(DetailedBalance, TreeMustUseTwoWayEdges) {
    auto m = mt_test::exact({{"1/2", "1/2", "0"}, {"1/2", "0", "1/2"}, {"0", "1/2", "1/2"}});
    EXPECT_THROW(invariant_detailed_balance(m, UndirectedTree(3, {{0, 2}, {1, 2}})), TreeEdgeNotInGraph);
    EXPECT_THROW(invariant_detailed_balance(m, UndirectedTree(2, {{0, 1}})), TreeNotSpanning);
    auto w = invariant_detailed_balance(m, UndirectedTree(3, {{0, 1}, {1, 2}}));
    EXPECT_EQ(w.weights, (std::vector<Rational>{Q("1/4"), Q("1/4"), Q("1/4")}));
}

TEST(DetailedBalance, StarTreeOnUniformSymmetricMatrix) {
    DenseMatrix<Rational> e(5);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) e(i, j) = i == j ? Q("3/5") : Q("1/10");
    auto m = validate_stochastic(std::move(e), Mode::Strict);
    auto w = invariant_detailed_balance(m, UndirectedTree(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));
    EXPECT_EQ(w.weights, std::vector<Rational>(5, Q("1/10000")));
}

// Random detailed-balanced matrices: the tree-sum measure satisfies the
// pairwise flux identity w_i m_ij = w_j m_ji, and every spanning tree gives
// a measure proportional to it.
TEST(DetailedBalance, PairwiseFluxProperty) {
    std::mt19937_64 rng(555);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t n = 2 + rng() % 5;
        auto inst = oracle::random_detailed_balanced(n, 0.6, rng);
        const auto& m = inst.matrix;
        auto report = detailed_balance_check(m);
        EXPECT_TRUE(report.weakly_reversible);
        EXPECT_TRUE(report.cycle_condition_holds);

        auto w = invariant_tree_sum(m).weights;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(w[i] * m(i, j), w[j] * m(j, i));

        auto t = oracle::random_spanning_tree(m, rng);
        auto v = invariant_detailed_balance(m, t).weights;
        Rational ratio = v[0] / w[0];
        for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(v[k], ratio * w[k]);
    }
}

TEST(DetailedBalance, FloatToleranceOnLogRatio) {
    auto m = to_float(mt_test::three_state(kBalanced));
    auto r = detailed_balance_check(m);
    EXPECT_TRUE(r.cycle_condition_holds);
    EXPECT_LE(r.worst_log_ratio, 1e-10);
    EXPECT_EQ(r.tolerance, kDetailedBalanceTolerance);
}

TEST(SupportTree, SpansConnectedSupport) {
    auto t = support_spanning_tree(mt_test::five_cycle(cycle_rates()));
    EXPECT_EQ(t.edges().size(), 4u);
    EXPECT_THROW(support_spanning_tree(mt_test::identity<Rational>(2)), TreeNotSpanning);
}
