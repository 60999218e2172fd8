#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnk/ast.hpp"

namespace pnk::net {

/// A directed link from (src, srcport) to (dst, dstport). A failable link
/// is guarded by the flag field up<srcport> of its source switch.
struct Link {
    std::uint32_t src = 0;
    std::uint32_t srcport = 0;
    std::uint32_t dst = 0;
    std::uint32_t dstport = 0;
    bool failable = false;

    bool operator==(const Link&) const = default;
};

inline std::string up_field(std::uint32_t port) { return "up" + std::to_string(port); }

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Switches are numbered 1..switches.
struct Topology {
    std::uint32_t switches = 0;
    std::vector<Link> links;

    void validate() const {
        std::set<std::pair<std::uint32_t, std::uint32_t>> out_ports, in_ports;
        for (const auto& l : links) {
            if (l.src < 1 || l.src > switches || l.dst < 1 || l.dst > switches)
                throw TopologyError("link endpoint outside switches 1.." + std::to_string(switches));
            if (l.srcport == 0 || l.dstport == 0) throw TopologyError("port 0 is reserved");
            if (!out_ports.emplace(l.src, l.srcport).second)
                throw TopologyError("two links leave switch " + std::to_string(l.src) + " port " +
                                    std::to_string(l.srcport));
            if (!in_ports.emplace(l.dst, l.dstport).second)
                throw TopologyError("two links enter switch " + std::to_string(l.dst) + " port " +
                                    std::to_string(l.dstport));
        }
    }

    std::vector<Link> failable_links() const {
        std::vector<Link> out;
        for (const auto& l : links)
            if (l.failable) out.push_back(l);
        return out;
    }

    /// Flag fields used by failable links, in port order.
    std::vector<std::string> up_fields() const {
        std::set<std::uint32_t> ports;
        for (const auto& l : links)
            if (l.failable) ports.insert(l.srcport);
        std::vector<std::string> out;
        for (auto p : ports) out.push_back(up_field(p));
        return out;
    }

    std::uint32_t max_port() const {
        std::uint32_t m = 0;
        for (const auto& l : links) m = std::max({m, l.srcport, l.dstport});
        return m;
    }

    /// The link leaving (sw, port), if any.
    const Link* link_at(std::uint32_t sw, std::uint32_t port) const {
        for (const auto& l : links)
            if (l.src == sw && l.srcport == port) return &l;
        return nullptr;
    }

    /// Outgoing (port, neighbor) pairs of a switch, ascending by port.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ports_of(std::uint32_t sw) const {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
        for (const auto& l : links)
            if (l.src == sw) out.emplace_back(l.srcport, l.dst);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Hop distance of every switch to `dest` along directed links;
    /// unreachable switches get UINT32_MAX.
    std::vector<std::uint32_t> distances_to(std::uint32_t dest) const {
        std::vector<std::uint32_t> dist(switches + 1, UINT32_MAX);
        std::vector<std::vector<std::uint32_t>> rev(switches + 1);
        for (const auto& l : links) rev[l.dst].push_back(l.src);
        std::deque<std::uint32_t> q{dest};
        dist[dest] = 0;
        while (!q.empty()) {
            auto v = q.front();
            q.pop_front();
            for (auto u : rev[v])
                if (dist[u] == UINT32_MAX) {
                    dist[u] = dist[v] + 1;
                    q.push_back(u);
                }
        }
        return dist;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& l : links)
            arr.push_back({{"src", l.src},
                           {"srcport", l.srcport},
                           {"dst", l.dst},
                           {"dstport", l.dstport},
                           {"failable", l.failable}});
        return {{"switches", switches}, {"links", arr}};
    }

    static Topology from_json(const nlohmann::json& j) {
        Topology t;
        t.switches = j.at("switches").get<std::uint32_t>();
        for (const auto& l : j.at("links"))
            t.links.push_back({l.at("src").get<std::uint32_t>(), l.at("srcport").get<std::uint32_t>(),
                               l.at("dst").get<std::uint32_t>(), l.at("dstport").get<std::uint32_t>(),
                               l.value("failable", false)});
        t.validate();
        return t;
    }
};

/// sw=src ; pt=srcport ; [up<srcport>=1 ;] sw:=dst ; pt:=dstport
inline Program link_program(const Link& l, bool guarded) {
    using namespace ast;
    std::vector<Program> steps{test("sw", l.src), test("pt", l.srcport)};
    if (guarded && l.failable) steps.push_back(test(up_field(l.srcport), 1));
    steps.push_back(assign("sw", l.dst));
    steps.push_back(assign("pt", l.dstport));
    return seq_all(steps);
}

/// Union of all links; the guarded form drops packets sent over a failable
/// link whose flag is down.
inline Program topo_program(const Topology& t, bool guarded) {
    std::vector<Program> parts;
    for (const auto& l : t.links) parts.push_back(link_program(l, guarded));
    return ast::union_all(parts);
}

}  // namespace pnk::net
