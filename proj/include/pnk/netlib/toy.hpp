#pragma once

// The three-switch example network: Source behind switch 1, Destination
// behind switch 2, and a detour through switch 3. Links 1->2 and 1->3 can
// fail; their health is tracked by flags up2 and up3 at switch 1.

#include <vector>

#include "pnk/analysis.hpp"
#include "pnk/ast.hpp"
#include "pnk/netlib/topology.hpp"

namespace pnk::net::toy {

inline PacketUniverse universe() {
    return PacketUniverse({{"sw", 4}, {"pt", 4}, {"up2", 2}, {"up3", 2}});
}

/// Links l12, l13, l32; ports are named after the neighbor switch.
inline Topology topology() {
    return {3, {{1, 2, 2, 1, true}, {1, 3, 3, 1, true}, {3, 2, 2, 3, false}}};
}

inline Program t() { return topo_program(topology(), false); }
inline Program t_hat() { return topo_program(topology(), true); }

/// Naive forwarding: every switch sends out of port 2.
inline Program p() {
    using namespace ast;
    return union_all({seq(test("sw", 1), assign("pt", 2)), seq(test("sw", 2), assign("pt", 2)),
                      seq(test("sw", 3), assign("pt", 2))});
}

/// Switch 1 detours via switch 3 when link 1->2 is down.
inline Program p_hat() {
    using namespace ast;
    auto p1 = uni(seq(test("up2", 1), assign("pt", 2)), seq(test("up2", 0), assign("pt", 3)));
    return union_all({seq(test("sw", 1), p1), seq(test("sw", 2), assign("pt", 2)),
                      seq(test("sw", 3), assign("pt", 2))});
}

inline Program in() { return ast::seq(ast::test("sw", 1), ast::test("pt", 1)); }
inline Program out() { return ast::seq(ast::test("sw", 2), ast::test("pt", 2)); }
inline Program teleport() { return ast::seq(ast::assign("sw", 2), ast::assign("pt", 2)); }

/// M(p,t) = (p;t)*;p
inline Program model(const Program& pol, const Program& topo) {
    return ast::seq(ast::star(ast::seq(pol, topo)), pol);
}

/// var up2:=1 in var up3:=1 in M((f;p), t)
inline Program refined_model(const Program& pol, const Program& topo, const Program& f) {
    return ast::var("up2", 1, ast::var("up3", 1, model(ast::seq(f, pol), topo)));
}

/// in ; prog ; out
inline Program delivery(const Program& prog) { return ast::seq_all({in(), prog, out()}); }

/// Links never fail.
inline Program f0() { return ast::seq(ast::assign("up2", 1), ast::assign("up3", 1)); }

/// At most one of the two links fails, each with probability 1/4.
inline Program f1() {
    using namespace ast;
    return nary({{f0(), Rational(1, 2)},
                 {seq(assign("up2", 0), assign("up3", 1)), Rational(1, 4)},
                 {seq(assign("up2", 1), assign("up3", 0)), Rational(1, 4)}});
}

/// Both links fail independently with probability 1/5.
inline Program f2() {
    using namespace ast;
    return seq(choice(Rational(4, 5), assign("up2", 1), assign("up2", 0)),
               choice(Rational(4, 5), assign("up3", 1), assign("up3", 0)));
}

inline PacketIndex in_packet(const PacketUniverse& u) { return u.packet({{"sw", 1}, {"pt", 1}}); }

/// Rows of the in-restricted checks: the empty set and the ingress packet.
inline InputSpec in_rows(const PacketUniverse& u) {
    return InputSpec::of({PacketSet{}, PacketSet::singleton(in_packet(u))});
}

/// Every subset of the nine located packets (switch and port in 1..3,
/// flags 0).
inline InputSpec location_rows(const PacketUniverse& u) {
    std::vector<PacketIndex> pks;
    for (std::uint32_t sw = 1; sw <= 3; ++sw)
        for (std::uint32_t pt = 1; pt <= 3; ++pt) pks.push_back(u.packet({{"sw", sw}, {"pt", pt}}));
    return InputSpec::all_subsets(pks, 9);
}

}  // namespace pnk::net::toy
