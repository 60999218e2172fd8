#include <gtest/gtest.h>

#include <random>

#include "pnk/linalg.hpp"

using namespace pnk;

namespace {

template <class S>
SparseMatrix<S> dense(const std::vector<std::vector<S>>& rows, std::size_t cols) {
    SparseMatrix<S> m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        typename SparseMatrix<S>::Row r;
        for (std::size_t j = 0; j < cols; ++j) r.emplace_back(j, rows[i][j]);
        m.set_row(i, std::move(r));
    }
    return m;
}

using Q = Rational;

Q frac(long a, long b) {
    Q q(a, b);
    q.canonicalize();
    return q;
}

}  // namespace

TEST(SparseMatrix, SetRowSortsMergesAndDropsZeros) {
    SparseMatrix<Q> m(1, 4);
    m.set_row(0, {{3, Q(1, 4)}, {1, Q(1, 4)}, {3, Q(1, 4)}, {2, Q(0)}, {0, Q(1, 4)}});
    ASSERT_EQ(m.row(0).size(), 3u);
    EXPECT_EQ(m.row(0)[0].first, 0u);
    EXPECT_EQ(m.at(0, 3), Q(1, 2));
    EXPECT_EQ(m.at(0, 2), Q(0));
    EXPECT_TRUE(m.is_stochastic());
    EXPECT_THROW(m.set_row(0, {{4, Q(1)}}), LinalgError);
}

TEST(SparseMatrix, ProductAndConvexCombination) {
    auto a = dense<Q>({{Q(1, 2), Q(1, 2)}, {Q(0), Q(1)}}, 2);
    auto i = SparseMatrix<Q>::identity(2);
    EXPECT_EQ(mat_mul(a, i), a);
    auto a2 = mat_mul(a, a);
    EXPECT_EQ(a2.at(0, 0), Q(1, 4));
    EXPECT_EQ(a2.at(0, 1), Q(3, 4));
    auto c = convex(Q(1, 3), a, i);
    EXPECT_EQ(c.at(0, 0), Q(1, 3) * Q(1, 2) + Q(2, 3));
    EXPECT_TRUE(c.is_stochastic());
}

// Two transient states that move to each other with probability 1/2 and
// otherwise absorb in their own column. The oracle, from the fundamental
// matrix N = (I - Q)^-1 = 4/3 [[1, 1/2], [1/2, 1]] times R = I/2, is
// [[2/3, 1/3], [1/3, 2/3]].
TEST(Absorption, TwoByTwoOracle) {
    auto q = dense<Q>({{Q(0), Q(1, 2)}, {Q(1, 2), Q(0)}}, 2);
    auto r = dense<Q>({{Q(1, 2), Q(0)}, {Q(0), Q(1, 2)}}, 2);
    double residual = -1;
    auto a = solve_absorption(q, r, &residual);
    EXPECT_EQ(residual, 0.0);
    EXPECT_EQ(a.at(0, 0), Q(2, 3));
    EXPECT_EQ(a.at(0, 1), Q(1, 3));
    EXPECT_EQ(a.at(1, 0), Q(1, 3));
    EXPECT_EQ(a.at(1, 1), Q(2, 3));
    auto row = absorption_row(q, r, 1);
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(row[0].second, Q(1, 3));
    EXPECT_EQ(row[1].second, Q(2, 3));
}

// A chain 0 -> {1,2} -> absorbing, with a self-loop on 2 (three SCCs).
TEST(Absorption, AcyclicBlocksAndSelfLoops) {
    auto q = dense<Q>({{Q(0), Q(1, 3), Q(1, 3)}, {Q(0), Q(0), Q(0)}, {Q(0), Q(0), Q(1, 2)}}, 3);
    auto r = dense<Q>({{Q(1, 3), Q(0)}, {Q(0), Q(1)}, {Q(1, 4), Q(1, 4)}}, 2);
    auto a = solve_absorption(q, r);
    EXPECT_EQ(a.at(2, 0), Q(1, 2));
    EXPECT_EQ(a.at(0, 0), Q(1, 3) + Q(1, 3) * Q(1, 2));
    EXPECT_EQ(a.at(0, 1), Q(1, 3) + Q(1, 3) * Q(1, 2));
    for (std::size_t s = 0; s < 3; ++s) {
        auto row = absorption_row(q, r, s);
        for (const auto& [j, v] : row) EXPECT_EQ(v, a.at(s, j));
    }
}

TEST(Absorption, SingularSystemIsReported) {
    // state 0 loops forever with probability 1
    auto q = dense<Q>({{Q(1)}}, 1);
    SparseMatrix<Q> r(1, 1);
    EXPECT_THROW(solve_absorption(q, r), LinalgError);
    EXPECT_THROW(absorption_row(q, r, 0), LinalgError);
}

TEST(Absorption, FloatMatchesExactOnRandomChains) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> w(0, 3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 6, m = 3;
        SparseMatrix<Q> q(n, n), r(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<int> ws(n + m);
            int total = 0;
            for (auto& x : ws) total += x = w(rng);
            ws[n + i % m] += 1;  // every state leaks into an absorbing column
            ++total;
            typename SparseMatrix<Q>::Row qr, rr;
            for (std::size_t j = 0; j < n; ++j) qr.emplace_back(j, frac(ws[j], total));
            for (std::size_t j = 0; j < m; ++j) rr.emplace_back(j, frac(ws[n + j], total));
            q.set_row(i, std::move(qr));
            r.set_row(i, std::move(rr));
        }
        auto exact = solve_absorption(q, r);
        SparseMatrix<double> qd(n, n), rd(n, m);
        for (std::size_t i = 0; i < n; ++i) {
            typename SparseMatrix<double>::Row a, b;
            for (const auto& [j, v] : q.row(i)) a.emplace_back(j, v.get_d());
            for (const auto& [j, v] : r.row(i)) b.emplace_back(j, v.get_d());
            qd.set_row(i, std::move(a));
            rd.set_row(i, std::move(b));
        }
        double residual = 1;
        auto approx = solve_absorption(qd, rd, &residual);
        EXPECT_LT(residual, 1e-12);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_EQ(exact.row_sum(i), Q(1));
            for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(approx.at(i, j), exact.at(i, j).get_d(), 1e-12);
        }
    }
}
