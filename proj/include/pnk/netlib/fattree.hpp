#pragma once

// Three-level FatTree and AB FatTree instances with k=4 pods: each pod has
// two edge and two aggregation switches, and there are four core switches.
//
// Numbering for P pods: edges 1..2P, aggregation 2P+1..4P, cores
// 4P+1..4P+4. Pod i holds edges 2i+1, 2i+2 and aggregation switches
// 2P+2i+1, 2P+2i+2. Ports are numbered downlinks first, then uplinks,
// ascending by neighbor id; port 1 of an edge switch faces its host.
// Only core-to-aggregation links can fail.

#include <string>
#include <vector>

#include "pnk/netlib/topology.hpp"

namespace pnk::net {

enum class Role { None, Edge, Aggregation, Core };

struct FatTree {
    std::string name;
    Topology topo;
    std::uint32_t pods = 0;
    std::vector<Role> role;          // indexed by switch
    std::vector<int> pod;            // -1 for cores
    std::vector<char> pod_is_type_b;  // indexed by pod

    std::vector<std::uint32_t> edges() const { return of_role(Role::Edge); }
    std::vector<std::uint32_t> aggregations() const { return of_role(Role::Aggregation); }
    std::vector<std::uint32_t> cores() const { return of_role(Role::Core); }

    bool type_b(std::uint32_t sw) const { return pod[sw] >= 0 && pod_is_type_b[pod[sw]]; }

private:
    std::vector<std::uint32_t> of_role(Role r) const {
        std::vector<std::uint32_t> out;
        for (std::uint32_t s = 1; s < role.size(); ++s)
            if (role[s] == r) out.push_back(s);
        return out;
    }
};

/// Builds a k=4 tree. Type-A pods wire their first aggregation switch to
/// cores 1,2 and the second to cores 3,4; type-B pods wire the first to
/// cores 1,3 and the second to cores 2,4.
inline FatTree build_fattree(std::string name, const std::vector<char>& pod_is_type_b) {
    FatTree ft;
    ft.name = std::move(name);
    const auto P = static_cast<std::uint32_t>(pod_is_type_b.size());
    ft.pods = P;
    ft.pod_is_type_b = pod_is_type_b;
    const std::uint32_t n = 4 * P + 4;
    ft.topo.switches = n;
    ft.role.assign(n + 1, Role::None);
    ft.pod.assign(n + 1, -1);
    auto edge = [&](std::uint32_t i, std::uint32_t x) { return 2 * i + 1 + x; };
    auto agg = [&](std::uint32_t i, std::uint32_t x) { return 2 * P + 2 * i + 1 + x; };
    auto core = [&](std::uint32_t c) { return 4 * P + c; };  // c in 1..4

    // undirected adjacency, then ports by ascending neighbor id per layer
    std::vector<std::vector<std::uint32_t>> down(n + 1), up(n + 1);
    for (std::uint32_t i = 0; i < P; ++i) {
        for (std::uint32_t x = 0; x < 2; ++x) {
            ft.role[edge(i, x)] = Role::Edge;
            ft.role[agg(i, x)] = Role::Aggregation;
            ft.pod[edge(i, x)] = ft.pod[agg(i, x)] = static_cast<int>(i);
        }
        for (std::uint32_t e = 0; e < 2; ++e)
            for (std::uint32_t a = 0; a < 2; ++a) {
                up[edge(i, e)].push_back(agg(i, a));
                down[agg(i, a)].push_back(edge(i, e));
            }
        for (std::uint32_t a = 0; a < 2; ++a) {
            std::vector<std::uint32_t> cs;
            if (!pod_is_type_b[i])
                cs = a == 0 ? std::vector<std::uint32_t>{1, 2} : std::vector<std::uint32_t>{3, 4};
            else
                cs = a == 0 ? std::vector<std::uint32_t>{1, 3} : std::vector<std::uint32_t>{2, 4};
            for (auto c : cs) {
                up[agg(i, a)].push_back(core(c));
                down[core(c)].push_back(agg(i, a));
            }
        }
    }
    for (std::uint32_t c = 1; c <= 4; ++c) ft.role[core(c)] = Role::Core;

    std::vector<std::vector<std::uint32_t>> ports(n + 1);  // ports[s][k] = neighbor at port k+1
    for (std::uint32_t s = 1; s <= n; ++s) {
        std::sort(down[s].begin(), down[s].end());
        std::sort(up[s].begin(), up[s].end());
        if (ft.role[s] == Role::Edge) ports[s].push_back(0);  // host
        for (auto v : down[s]) ports[s].push_back(v);
        for (auto v : up[s]) ports[s].push_back(v);
    }
    auto port_to = [&](std::uint32_t s, std::uint32_t v) {
        for (std::uint32_t k = 0; k < ports[s].size(); ++k)
            if (ports[s][k] == v) return k + 1;
        throw TopologyError("missing port");
    };
    for (std::uint32_t s = 1; s <= n; ++s)
        for (std::uint32_t k = 0; k < ports[s].size(); ++k) {
            auto v = ports[s][k];
            if (v == 0) continue;
            ft.topo.links.push_back(
                {s, k + 1, v, port_to(v, s), ft.role[s] == Role::Core && ft.role[v] == Role::Aggregation});
        }
    ft.topo.validate();
    return ft;
}

inline FatTree fattree20() { return build_fattree("fattree", {0, 0, 0, 0}); }

/// Pods 0 and 2 are type A, pods 1 and 3 type B.
inline FatTree abfattree20() { return build_fattree("abfattree", {0, 1, 0, 1}); }

/// Two-pod AB FatTree (4 edge, 4 aggregation, 4 core switches).
inline FatTree abfattree_reduced() { return build_fattree("abfattree-reduced", {0, 1}); }

}  // namespace pnk::net
