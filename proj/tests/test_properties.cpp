#include <gtest/gtest.h>

#include "pnk/pnk.hpp"
#include "support.hpp"

using namespace pnk;
using testkit::ProgramGen;

namespace {

constexpr int kCases = 500;

// Runs `body` kCases times, cycling through the small universes, each with
// its own deterministic generator.
template <class F>
void for_cases(std::uint64_t salt, F body) {
    const auto us = testkit::small_universes();
    for (int i = 0; i < kCases; ++i) {
        ProgramGen gen(salt * 1000003 + static_cast<std::uint64_t>(i), us[i % us.size()]);
        body(gen);
    }
}

// Per-packet truth of a predicate, written directly against the encoding.
bool truth(const Program& t, const PacketUniverse& u, PacketIndex pk) {
    switch (t->kind) {
    case Kind::Skip:
        return true;
    case Kind::Drop:
        return false;
    case Kind::Test:
        return u.decode(pk)[u.require_field(t->field)] == t->value;
    case Kind::Neg:
        return !truth(t->kids[0], u, pk);
    case Kind::Union:
        return truth(t->kids[0], u, pk) || truth(t->kids[1], u, pk);
    case Kind::Seq:
        return truth(t->kids[0], u, pk) && truth(t->kids[1], u, pk);
    default:
        ADD_FAILURE() << "not a predicate";
        return false;
    }
}

Dist<Rational> bind(const Dist<Rational>& d, Kernel<Rational>& k) {
    DistBuilder<Rational> b;
    for (const auto& [mid, p] : d)
        for (const auto& [out, q] : k.apply(mid)) b.add(out, Rational(p * q));
    return b.finish();
}

}  // namespace

TEST(Properties, CompiledRowsAreStochastic) {
    for_cases(1, [](ProgramGen& g) {
        auto p = g.core(3);
        Kernel<Rational> k(p, g.universe());
        auto a = g.subset();
        const auto& d = k.apply(a);
        EXPECT_EQ(d.mass(), Rational(1)) << pretty(p);
        for (const auto& [b, q] : d) EXPECT_GT(q, 0);
        if (a.empty()) {
            EXPECT_EQ(d, Dist<Rational>::delta({}));
        }
        // every row of the subterm memo tables is stochastic as well
        for (std::size_t id = 0; id < k.root() + 1; ++id)
            EXPECT_EQ(k.apply_node(id, a).mass(), Rational(1));
    });
}

TEST(Properties, PredicatesFilterTheirInput) {
    for_cases(2, [](ProgramGen& g) {
        auto t = g.pred(3);
        const auto& u = g.universe();
        auto a = g.subset();
        std::vector<PacketIndex> keep;
        for (auto pk : a)
            if (truth(t, u, pk)) keep.push_back(pk);
        Kernel<Rational> k(t, u);
        EXPECT_EQ(k.apply(a), Dist<Rational>::delta(PacketSet(keep))) << pretty(t);
    });
}

TEST(Properties, SequenceRowIsBind) {
    for_cases(3, [](ProgramGen& g) {
        auto p = g.core(2), q = g.core(2);
        const auto& u = g.universe();
        Kernel<Rational> kp(p, u), kq(q, u), kpq(ast::seq(p, q), u);
        auto a = g.subset();
        EXPECT_EQ(kpq.apply(a), bind(kp.apply(a), kq)) << pretty(p) << " ; " << pretty(q);
    });
}

TEST(Properties, StarIsAFixedPoint) {
    for_cases(4, [](ProgramGen& g) {
        auto p = g.core(3, 1);
        const auto& u = g.universe();
        auto ps = ast::star(p);
        Kernel<Rational> lhs(ps, u), rhs(ast::uni(ast::skip(), ast::seq(p, ps)), u);
        // extensional on the rows the exploration touches from a random start
        auto a = g.nonempty_subset();
        auto explored = explore<Rational>(p, u, a);
        std::set<PacketSet> rows{a};
        for (const auto& s : explored.states) rows.insert(s.current);
        for (const auto& r : rows) EXPECT_EQ(lhs.apply(r), rhs.apply(r)) << pretty(ps) << " on " << format_set(u, r);
    });
}

TEST(Properties, RedirectCommutesWithStep) {
    for_cases(5, [](ProgramGen& g) {
        auto p = g.core(3, 0);
        auto graph = explore<Rational>(p, g.universe(), g.nonempty_subset());
        auto m = su_matrices(graph);
        auto su = mat_mul(m.s, m.u);
        EXPECT_EQ(mat_mul(m.u, su), su) << pretty(p);
    });
}

TEST(Properties, AccumulatorsOnlyGrow) {
    for_cases(6, [](ProgramGen& g) {
        auto p = g.core(3, 0);
        auto graph = explore<Rational>(p, g.universe(), g.nonempty_subset());
        for (std::size_t i = 0; i < graph.size(); ++i)
            for (const auto& [j, q] : graph.edges[i]) {
                const auto& from = graph.states[i];
                const auto& to = graph.states[j];
                EXPECT_TRUE(from.accumulator.subset_of(to.accumulator));
                EXPECT_TRUE(from.current.subset_of(to.accumulator));
                // a saturated state only reaches saturated states
                if (graph.saturated[i]) {
                    EXPECT_TRUE(graph.saturated[j]);
                }
            }
    });
}

TEST(Properties, MeetClosureOrderMatchesBruteForce) {
    int below = 0;
    for_cases(7, [&](ProgramGen& g) {
        auto x = g.dist();
        auto y = g.pick(2) ? g.grow(x) : g.dist();
        bool fast = dist_leq(x, y), slow = testkit::brute_dist_leq(x, y, g.universe());
        EXPECT_EQ(fast, slow);
        below += slow;
        EXPECT_EQ(dist_leq(y, x), testkit::brute_dist_leq(y, x, g.universe()));
    });
    // both outcomes are exercised
    EXPECT_GT(below, kCases / 4);
    EXPECT_LT(below, kCases);
}

TEST(Properties, UnrollingsIncrease) {
    for_cases(8, [](ProgramGen& g) {
        auto p = g.core(3, 0);
        const auto& u = g.universe();
        auto a = g.nonempty_subset();
        Kernel<Rational> star(ast::star(p), u);
        const auto& limit = star.apply(a);
        Dist<Rational> prev;
        for (int n = 0; n <= 3; ++n) {
            Kernel<Rational> k(testkit::unroll(p, n), u);
            auto cur = k.apply(a);
            if (n > 0) {
                EXPECT_TRUE(testkit::brute_dist_leq(prev, cur, u)) << pretty(p) << " n=" << n;
            }
            EXPECT_TRUE(testkit::brute_dist_leq(cur, limit, u)) << pretty(p) << " n=" << n;
            prev = std::move(cur);
        }
    });
}
