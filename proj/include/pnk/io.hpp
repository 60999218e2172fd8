#pragma once

// JSON encodings of universes, packet sets, distributions and verdicts.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pnk/analysis.hpp"
#include "pnk/dist.hpp"
#include "pnk/packet.hpp"

namespace pnk {

using json = nlohmann::ordered_json;

/// {"fields":[{"name":"sw","size":8},...]}
inline json universe_to_json(const PacketUniverse& u) {
    json fields = json::array();
    for (const auto& f : u.fields()) fields.push_back({{"name", f.name}, {"size", f.size}});
    return {{"fields", fields}};
}

inline PacketUniverse universe_from_json(const json& j) {
    if (!j.is_object() || !j.contains("fields") || !j["fields"].is_array())
        throw UniverseError("universe JSON needs a \"fields\" array");
    std::vector<FieldDecl> decls;
    for (const auto& f : j["fields"]) {
        if (!f.contains("name") || !f.contains("size"))
            throw UniverseError("each field needs \"name\" and \"size\"");
        auto size = f["size"].get<long long>();
        if (size < 1 || size > 0xffffffffll)
            throw UniverseError("field '" + f["name"].get<std::string>() + "' has invalid size");
        decls.push_back({f["name"].get<std::string>(), static_cast<std::uint32_t>(size)});
    }
    return PacketUniverse(std::move(decls));
}

/// A packet as a field-value record in declaration order.
inline json packet_to_json(const PacketUniverse& u, PacketIndex pk) {
    json rec = json::object();
    auto vals = u.decode(pk);
    for (std::size_t f = 0; f < vals.size(); ++f) rec[u.fields()[f].name] = vals[f];
    return rec;
}

/// Fields missing from the record default to 0.
inline PacketIndex packet_from_json(const PacketUniverse& u, const json& rec) {
    if (!rec.is_object()) throw UniverseError("packet must be a JSON object of field values");
    std::vector<std::uint32_t> vals(u.fields().size(), 0);
    for (const auto& [name, v] : rec.items()) {
        auto f = u.require_field(name);
        auto n = v.get<long long>();
        if (n < 0) throw UniverseError("negative value for field '" + name + "'");
        vals[f] = static_cast<std::uint32_t>(n);
    }
    return u.encode(vals);
}

inline json set_to_json(const PacketUniverse& u, const PacketSet& s) {
    json arr = json::array();
    for (auto pk : s) arr.push_back(packet_to_json(u, pk));
    return arr;
}

inline PacketSet set_from_json(const PacketUniverse& u, const json& arr) {
    if (!arr.is_array()) throw UniverseError("packet set must be a JSON array");
    std::vector<PacketIndex> pks;
    for (const auto& rec : arr) pks.push_back(packet_from_json(u, rec));
    return PacketSet(std::move(pks));
}

/// A list of packet sets, e.g. an explicit input specification.
inline std::vector<PacketSet> sets_from_json(const PacketUniverse& u, const json& arr) {
    if (!arr.is_array()) throw UniverseError("expected a JSON array of packet sets");
    std::vector<PacketSet> out;
    for (const auto& s : arr) out.push_back(set_from_json(u, s));
    return out;
}

/// {"input":[...],"support":[{"set":[...],"prob":"4/5"}]}
template <class S>
json dist_to_json(const PacketUniverse& u, const PacketSet& input, const Dist<S>& d) {
    json support = json::array();
    for (const auto& [b, p] : d)
        support.push_back({{"set", set_to_json(u, b)}, {"prob", scalar_traits<S>::str(p)}});
    return {{"input", set_to_json(u, input)}, {"support", support}};
}

template <class S>
json verdict_to_json(const PacketUniverse& u, const Verdict<S>& v) {
    json j = {{"result", to_string(v.result)},
              {"mode", scalar_traits<S>::name},
              {"inputs_checked", v.inputs_checked}};
    if (!scalar_traits<S>::exact) j["tolerance"] = v.tolerance;
    if (v.witness) {
        const auto& w = *v.witness;
        const bool order = v.result == Relation::NotLeq;
        j["witness"] = {{"input", set_to_json(u, w.input)},
                        {order ? "upset_of" : "output", set_to_json(u, w.output)},
                        {"left", scalar_traits<S>::str(w.left)},
                        {"right", scalar_traits<S>::str(w.right)}};
    }
    return j;
}

}  // namespace pnk
