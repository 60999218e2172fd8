#pragma once

// F10 routing on (AB) FatTrees in three refinements, and the network model
// used to analyze them.
//
//   F10_0   ECMP: uniform over the ports on shortest paths to the
//           destination, minus the arrival port. Not failure-aware.
//   F10_3   at a core whose downward port is down, detour through an
//           aggregation switch of the opposite subtree type (3 extra hops).
//   F10_35  if no such port is up either, detour through an aggregation
//           switch of the same type, flagging default:=0 so that switch
//           sends the packet down instead of up (5 extra hops).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pnk/analysis.hpp"
#include "pnk/ast.hpp"
#include "pnk/netlib/failure.hpp"
#include "pnk/netlib/fattree.hpp"

namespace pnk::net {

enum class Scheme { F10_0, F10_3, F10_35 };

inline const char* to_string(Scheme s) {
    switch (s) {
    case Scheme::F10_0:
        return "F10_0";
    case Scheme::F10_3:
        return "F10_3";
    case Scheme::F10_35:
        return "F10_35";
    }
    return "?";
}

inline constexpr const char* kDefaultField = "default";
inline constexpr const char* kCounterField = "counter";

namespace detail {

/// Uniform choice of action(port) over the ports whose flag is up, decided
/// by nested tests on the flags; `none_up` runs when every flag is down.
inline Program uniform_over_up(const std::vector<std::uint32_t>& ports,
                               const std::function<Program(std::uint32_t)>& action,
                               const Program& none_up, std::size_t i = 0,
                               std::vector<std::uint32_t> chosen = {}) {
    using namespace ast;
    if (i == ports.size()) {
        if (chosen.empty()) return none_up;
        std::vector<Program> branches;
        for (auto c : chosen) branches.push_back(action(c));
        return uniform(std::move(branches));
    }
    auto without = uniform_over_up(ports, action, none_up, i + 1, chosen);
    chosen.push_back(ports[i]);
    auto with = uniform_over_up(ports, action, none_up, i + 1, std::move(chosen));
    return ite(test(up_field(ports[i]), 1), with, without);
}

inline Program send(std::uint32_t port) { return ast::assign("pt", port); }

inline Program uniform_send(const std::vector<std::uint32_t>& ports) {
    if (ports.empty()) return ast::drop();
    std::vector<Program> branches;
    for (auto p : ports) branches.push_back(send(p));
    return ast::uniform(std::move(branches));
}

/// Ports through which a packet can enter switch s: link heads, plus the
/// host port of edge switches.
inline std::vector<std::uint32_t> arrival_ports(const FatTree& ft, std::uint32_t s) {
    std::vector<std::uint32_t> out;
    if (ft.role[s] == Role::Edge) out.push_back(1);
    for (const auto& l : ft.topo.links)
        if (l.dst == s) out.push_back(l.dstport);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Shortest-path ports of s towards dest, excluding the arrival port.
inline std::vector<std::uint32_t> ecmp_ports(const FatTree& ft, const std::vector<std::uint32_t>& dist,
                                             std::uint32_t s, std::uint32_t arrival) {
    std::uint32_t best = UINT32_MAX;
    auto ports = ft.topo.ports_of(s);
    for (const auto& [port, nbr] : ports) best = std::min(best, dist[nbr]);
    std::vector<std::uint32_t> out;
    for (const auto& [port, nbr] : ports)
        if (dist[nbr] == best && port != arrival) out.push_back(port);
    return out;
}

/// Forwarding program of the given scheme for traffic towards `dest`.
inline Program f10(Scheme scheme, const FatTree& ft, std::uint32_t dest = 1) {
    using namespace ast;
    if (dest < 1 || dest > ft.topo.switches || ft.role[dest] != Role::Edge)
        throw TopologyError("destination must be an edge switch");
    const auto dist = ft.topo.distances_to(dest);
    std::vector<Program> per_switch;
    for (std::uint32_t s = 1; s <= ft.topo.switches; ++s) {
        if (s == dest) continue;
        std::vector<Program> per_port;
        for (auto ip : detail::arrival_ports(ft, s)) {
            auto cand = ecmp_ports(ft, dist, s, ip);
            Program action = detail::uniform_send(cand);
            if (scheme != Scheme::F10_0 && ft.role[s] == Role::Core && cand.size() == 1) {
                const auto j = cand[0];
                const auto a = ft.topo.link_at(s, j)->dst;
                std::vector<std::uint32_t> opposite, same;
                for (const auto& [port, nbr] : ft.topo.ports_of(s)) {
                    if (port == j || ft.role[nbr] != Role::Aggregation) continue;
                    (ft.type_b(nbr) != ft.type_b(a) ? opposite : same).push_back(port);
                }
                // parking on the dead port j makes the guarded link drop it
                Program stuck = detail::send(j);
                if (scheme == Scheme::F10_35)
                    stuck = detail::uniform_over_up(
                        same, [](std::uint32_t c) { return seq(assign(kDefaultField, 0), detail::send(c)); },
                        stuck);
                auto reroute = detail::uniform_over_up(opposite, detail::send, stuck);
                action = ite(test(up_field(j), 1), detail::send(j), reroute);
            }
            if (scheme == Scheme::F10_35 && ft.role[s] == Role::Aggregation) {
                std::vector<std::uint32_t> downs;
                for (const auto& [port, nbr] : ft.topo.ports_of(s))
                    if (ft.role[nbr] == Role::Edge) downs.push_back(port);
                action = ite(test(kDefaultField, 0),
                             seq(assign(kDefaultField, 1), detail::uniform_send(downs)), action);
            }
            if (scheme == Scheme::F10_35 && ft.role[s] == Role::Edge && ip == 1)
                action = seq(assign(kDefaultField, 1), action);
            per_port.push_back(seq(test("pt", ip), action));
        }
        per_switch.push_back(seq(test("sw", s), union_all(per_port)));
    }
    return union_all(per_switch);
}

/// Parameters of the analyzed network model.
struct ModelOptions {
    std::uint32_t dest = 1;
    std::optional<std::uint32_t> k;     // max failures per hop; nullopt = unbounded
    Rational p = Rational(1, 4);        // per-link failure probability
    bool hop_counter = false;            // count hops in field `counter`
    std::uint32_t counter_size = 16;     // counter saturates at size-1
    bool check_default = false;          // require default=1 on delivery
};

inline PacketUniverse model_universe(const FatTree& ft, const ModelOptions& o) {
    std::vector<FieldDecl> f{{"sw", ft.topo.switches + 1}, {"pt", ft.topo.max_port() + 1}};
    for (const auto& up : ft.topo.up_fields()) f.push_back({up, 2});
    f.push_back({kDefaultField, 2});
    if (o.k && *o.k > 0) f.push_back({kBudgetField, *o.k + 1});
    if (o.hop_counter) f.push_back({kCounterField, o.counter_size});
    return PacketUniverse(std::move(f));
}

inline Program failure_model(const FatTree& ft, const ModelOptions& o) {
    return failure_program({o.k, o.p, ft.topo.failable_links()});
}

/// Union of the host-facing ports of all edge switches other than dest.
inline Program ingress(const FatTree& ft, std::uint32_t dest) {
    std::vector<Program> parts;
    for (auto e : ft.edges())
        if (e != dest) parts.push_back(ast::seq(ast::test("sw", e), ast::test("pt", 1)));
    return ast::union_all(parts);
}

inline Program teleport(std::uint32_t dest) { return ast::assign("sw", dest); }

/// var up_i := 1 in ... var default := 1 in
///   in ; do (f ; p ; t ; up_i := 1 ... [; counter++]) while !(sw=dest) ;
///   [default=1 ;] pt := 1
/// Flags are reset after every hop, so each hop draws fresh failures at the
/// switch it leaves.
inline Program refined_model(const Program& policy, const FatTree& ft, const Program& f,
                             const ModelOptions& o) {
    using namespace ast;
    std::vector<Program> body{f, policy, topo_program(ft.topo, true)};
    for (const auto& up : ft.topo.up_fields()) body.push_back(assign(up, 1));
    if (o.hop_counter) {
        std::vector<Program> inc;
        for (std::uint32_t n = 0; n + 1 < o.counter_size; ++n)
            inc.push_back(seq(test(kCounterField, n), assign(kCounterField, n + 1)));
        inc.push_back(test(kCounterField, o.counter_size - 1));
        body.push_back(union_all(inc));
    }
    std::vector<Program> main{ingress(ft, o.dest),
                              do_while(seq_all(body), neg(test("sw", o.dest)))};
    if (o.check_default) main.push_back(test(kDefaultField, 1));
    main.push_back(assign("pt", 1));
    Program m = var(kDefaultField, 1, seq_all(main));
    auto ups = ft.topo.up_fields();
    for (auto it = ups.rbegin(); it != ups.rend(); ++it) m = var(*it, 1, m);
    return m;
}

inline Program scheme_model(Scheme s, const FatTree& ft, const ModelOptions& o) {
    return refined_model(f10(s, ft, o.dest), ft, failure_model(ft, o), o);
}

/// One singleton row per ingress location, all other fields zero.
inline InputSpec ingress_rows(const PacketUniverse& u, const FatTree& ft, std::uint32_t dest) {
    std::vector<PacketSet> rows;
    for (auto e : ft.edges())
        if (e != dest) rows.push_back(PacketSet::singleton(u.packet({{"sw", e}, {"pt", 1}})));
    return InputSpec::of(std::move(rows));
}

}  // namespace pnk::net
