#include <gtest/gtest.h>

#include "pnk/desugar.hpp"
#include "pnk/kernel.hpp"
#include "pnk/syntax.hpp"

using namespace pnk;

namespace {

const PacketUniverse kU({{"f", 2}});
const PacketSet kP0({0}), kP1({1}), kBoth({0, 1});

Dist<Rational> run(const std::string& text, const PacketSet& a, const PacketUniverse& u = kU) {
    Kernel<Rational> k(desugar(parse(text, u)), u);
    return k.apply(a);
}

Dist<Rational> dist(std::vector<std::pair<PacketSet, Rational>> es) { return Dist<Rational>::from_entries(std::move(es)); }

}  // namespace

TEST(BigStep, PrimitiveActions) {
    EXPECT_EQ(run("drop", kBoth), Dist<Rational>::delta({}));
    EXPECT_EQ(run("skip", kBoth), Dist<Rational>::delta(kBoth));
    EXPECT_EQ(run("f=1", kBoth), Dist<Rational>::delta(kP1));
    EXPECT_EQ(run("!f=1", kBoth), Dist<Rational>::delta(kP0));
    EXPECT_EQ(run("f:=1", kBoth), Dist<Rational>::delta(kP1));
    EXPECT_EQ(run("f:=0", kP1), Dist<Rational>::delta(kP0));
}

TEST(BigStep, EmptyInputMapsToEmptyOutput) {
    for (auto text : {"skip", "f:=1", "f:=0 +[1/3] f:=1", "(f:=0 & f:=1)*", "f=0 & f:=1"})
        EXPECT_EQ(run(text, {}), Dist<Rational>::delta({})) << text;
}

TEST(BigStep, ChoiceWeights) {
    EXPECT_EQ(run("f:=0 +[1/3] f:=1", kP0), dist({{kP0, Rational(1, 3)}, {kP1, Rational(2, 3)}}));
    EXPECT_EQ(run("f:=0 +[1] f:=1", kP0), Dist<Rational>::delta(kP0));
    EXPECT_EQ(run("skip +[1/2] skip", kP0), Dist<Rational>::delta(kP0));
}

// Both operands of & see the same input and sample independently; the
// results are unioned. With one deterministic operand:
//   f:=0 & (f:=0 +[1/2] f:=1) on {pi0}: {pi0} w.p. 1/2, {pi0,pi1} w.p. 1/2.
TEST(BigStep, UnionOfCorrelatedOperands) {
    EXPECT_EQ(run("f:=0 & (f:=0 +[1/2] f:=1)", kP0), dist({{kP0, Rational(1, 2)}, {kBoth, Rational(1, 2)}}));
    // two independent coins: {pi0} 1/4, {pi1} 1/4, both 1/2
    EXPECT_EQ(run("(f:=0 +[1/2] f:=1) & (f:=0 +[1/2] f:=1)", kP0),
              dist({{kP0, Rational(1, 4)}, {kP1, Rational(1, 4)}, {kBoth, Rational(1, 2)}}));
    // tests split the input and the halves are reunited
    EXPECT_EQ(run("f=0 & f=1", kBoth), Dist<Rational>::delta(kBoth));
}

TEST(BigStep, SequenceIsBind) {
    // first coin picks the packet, second acts on it
    auto d = run("(f:=0 +[1/2] f:=1) ; (f=0 ; (skip +[1/3] drop) & f=1)", kP0);
    EXPECT_EQ(d, dist({{{}, Rational(1, 3)}, {kP0, Rational(1, 6)}, {kP1, Rational(1, 2)}}));
}

TEST(BigStep, PacketsAreProcessedIndependentlyByTestsOnly) {
    // assignments on a set collapse it
    PacketUniverse u({{"f", 2}, {"g", 2}});
    auto all = PacketSet::full(u);
    auto d = run("g:=1", all, u);
    EXPECT_EQ(d, Dist<Rational>::delta(PacketSet({u.packet({{"f", 0}, {"g", 1}}), u.packet({{"f", 1}, {"g", 1}})})));
}

TEST(BigStep, MatrixRowsAreStochastic) {
    PacketUniverse u({{"f", 2}, {"g", 2}});
    Kernel<Rational> k(desugar(parse("(f:=1 +[1/4] g:=1) & (g=0 ; f:=0)", u)), u);
    auto m = k.full_matrix();
    EXPECT_EQ(m.rows.size(), 16u);
    EXPECT_EQ(m.cols.size(), 16u);
    EXPECT_TRUE(m.matrix.is_stochastic());
    EXPECT_EQ(m.matrix.at(0, 0), Rational(1));  // empty row
    auto sub = k.matrix({PacketSet::singleton(0)});
    EXPECT_EQ(sub.rows.size(), 1u);
    EXPECT_EQ(sub.matrix.row_sum(0), Rational(1));
}

TEST(BigStep, FullMatrixRespectsCap) {
    PacketUniverse u({{"f", 8}, {"g", 4}});
    KernelOptions opts;
    opts.full_matrix_rows = 1024;
    Kernel<Rational> k(ast::skip(), u, opts);
    EXPECT_THROW(k.full_matrix(), ResourceError);
}

TEST(BigStep, RejectsSugarAndUnknownFields) {
    EXPECT_THROW(Kernel<Rational>(parse("if f=0 then skip else drop", kU), kU), ProgramError);
    EXPECT_THROW(Kernel<Rational>(ast::assign("g", 0), kU), UniverseError);
    EXPECT_THROW(Kernel<Rational>(ast::assign("f", 2), kU), UniverseError);
}

TEST(BigStep, FloatAgreesWithExact) {
    PacketUniverse u({{"f", 3}});
    auto p = desugar(parse("((f:=0 +[1/3] f:=1) & (f=1 ; f:=2))*", u));
    Kernel<Rational> ke(p, u);
    Kernel<double> kf(p, u);
    for (const auto& a : Kernel<Rational>::all_subsets(u))
        EXPECT_TRUE(kf.apply(a).near(convert<double>(ke.apply(a)), 1e-12));
}

TEST(BigStep, SharedSubprogramsAreCompiledOnce) {
    auto body = parse("f:=0 +[1/2] f:=1", kU);
    auto p = ast::seq(body, ast::seq(body, body));
    Kernel<Rational> k(p, kU);
    k.apply(kP0);
    // three occurrences of `body` share one memo table: 2 inputs reach it
    EXPECT_LE(k.memo_size(), 12u);
    EXPECT_EQ(k.apply(kP0), dist({{kP0, Rational(1, 2)}, {kP1, Rational(1, 2)}}));
}
