#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace pnk {

struct FieldDecl {
    std::string name;
    std::uint32_t size = 1;  // values are 0..size-1

    bool operator==(const FieldDecl&) const = default;
};

class UniverseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using PacketIndex = std::uint32_t;

/// The finite packet universe Pk induced by a list of fields with finite
/// domains. Packets are numbered by mixed-radix encoding with the first
/// declared field least significant.
class PacketUniverse {
public:
    static constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 20;

    PacketUniverse() : PacketUniverse(std::vector<FieldDecl>{}) {}

    explicit PacketUniverse(std::vector<FieldDecl> decls, std::uint64_t cap = kDefaultCap)
        : decls_(std::move(decls)) {
        std::uint64_t count = 1;
        for (std::size_t i = 0; i < decls_.size(); ++i) {
            const auto& d = decls_[i];
            if (d.size == 0) throw UniverseError("field '" + d.name + "' has empty domain");
            if (!by_name_.emplace(d.name, i).second)
                throw UniverseError("duplicate field '" + d.name + "'");
            strides_.push_back(count);
            count *= d.size;
            if (count > cap)
                throw UniverseError("packet universe exceeds cap of " + std::to_string(cap) +
                                    " packets");
        }
        packet_count_ = count;
    }

    const std::vector<FieldDecl>& fields() const { return decls_; }
    std::uint64_t packet_count() const { return packet_count_; }

    std::optional<std::size_t> field_index(const std::string& name) const {
        auto it = by_name_.find(name);
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require_field(const std::string& name) const {
        auto idx = field_index(name);
        if (!idx) throw UniverseError("unknown field '" + name + "'");
        return *idx;
    }

    std::uint32_t value(PacketIndex pk, std::size_t field) const {
        return static_cast<std::uint32_t>((pk / strides_[field]) % decls_[field].size);
    }

    PacketIndex with_value(PacketIndex pk, std::size_t field, std::uint32_t n) const {
        std::uint64_t cur = value(pk, field);
        return static_cast<PacketIndex>(pk - cur * strides_[field] + n * strides_[field]);
    }

    PacketIndex encode(const std::vector<std::uint32_t>& values) const {
        if (values.size() != decls_.size())
            throw UniverseError("expected " + std::to_string(decls_.size()) + " field values");
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i] >= decls_[i].size)
                throw UniverseError("value " + std::to_string(values[i]) + " out of range for '" +
                                    decls_[i].name + "'");
            idx += values[i] * strides_[i];
        }
        return static_cast<PacketIndex>(idx);
    }

    std::vector<std::uint32_t> decode(PacketIndex pk) const {
        if (pk >= packet_count_) throw UniverseError("packet index out of range");
        std::vector<std::uint32_t> out(decls_.size());
        for (std::size_t i = 0; i < decls_.size(); ++i) out[i] = value(pk, i);
        return out;
    }

    /// Packet with the given named fields set and all others zero.
    PacketIndex packet(std::initializer_list<std::pair<std::string, std::uint32_t>> values) const {
        std::vector<std::uint32_t> v(decls_.size(), 0);
        for (const auto& [name, n] : values) v[require_field(name)] = n;
        return encode(v);
    }

    void check_value(std::size_t field, std::uint32_t n) const {
        if (n >= decls_[field].size)
            throw UniverseError("value " + std::to_string(n) + " out of range for field '" +
                                decls_[field].name + "' (size " +
                                std::to_string(decls_[field].size) + ")");
    }

    bool operator==(const PacketUniverse& o) const { return decls_ == o.decls_; }

private:
    std::vector<FieldDecl> decls_;
    std::vector<std::uint64_t> strides_;
    std::unordered_map<std::string, std::size_t> by_name_;
    std::uint64_t packet_count_ = 1;
};

/// A set of packets, stored as a sorted list of packet indices. Sets that
/// occur during evaluation are tiny compared to the universe, so the sparse
/// form beats a dense bitset for both memory and hashing.
class PacketSet {
public:
    PacketSet() = default;
    PacketSet(std::initializer_list<PacketIndex> pks) : items_(pks) { normalize(); }
    explicit PacketSet(std::vector<PacketIndex> pks) : items_(std::move(pks)) { normalize(); }

    static PacketSet singleton(PacketIndex pk) {
        PacketSet s;
        s.items_.push_back(pk);
        return s;
    }

    static PacketSet full(const PacketUniverse& u) {
        PacketSet s;
        s.items_.resize(u.packet_count());
        for (std::size_t i = 0; i < s.items_.size(); ++i) s.items_[i] = static_cast<PacketIndex>(i);
        return s;
    }

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<PacketIndex>& items() const { return items_; }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

    bool contains(PacketIndex pk) const { return std::binary_search(items_.begin(), items_.end(), pk); }

    bool subset_of(const PacketSet& o) const {
        return std::includes(o.items_.begin(), o.items_.end(), items_.begin(), items_.end());
    }

    PacketSet operator|(const PacketSet& o) const {
        if (o.empty()) return *this;
        if (empty()) return o;
        PacketSet r;
        r.items_.reserve(items_.size() + o.items_.size());
        std::set_union(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                       std::back_inserter(r.items_));
        return r;
    }

    PacketSet operator&(const PacketSet& o) const {
        PacketSet r;
        std::set_intersection(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                              std::back_inserter(r.items_));
        return r;
    }

    PacketSet operator-(const PacketSet& o) const {
        PacketSet r;
        std::set_difference(items_.begin(), items_.end(), o.items_.begin(), o.items_.end(),
                            std::back_inserter(r.items_));
        return r;
    }

    template <class Pred>
    PacketSet filter(Pred&& keep) const {
        PacketSet r;
        for (auto pk : items_)
            if (keep(pk)) r.items_.push_back(pk);
        return r;
    }

    bool operator==(const PacketSet&) const = default;

    /// Lexicographic on the sorted index lists; the empty set is least.
    bool operator<(const PacketSet& o) const {
        return std::lexicographical_compare(items_.begin(), items_.end(), o.items_.begin(),
                                            o.items_.end());
    }

    std::size_t hash() const {
        std::size_t h = 0xcbf29ce484222325ull;
        for (auto pk : items_) {
            h ^= pk + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        }
        return h ^ items_.size();
    }

private:
    void normalize() {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    std::vector<PacketIndex> items_;
};

struct PacketSetHash {
    std::size_t operator()(const PacketSet& s) const { return s.hash(); }
};

/// Image of `a` under the update pi -> pi[field := n].
inline PacketSet modify(const PacketUniverse& u, const PacketSet& a, std::size_t field,
                        std::uint32_t n) {
    std::vector<PacketIndex> out;
    out.reserve(a.size());
    for (auto pk : a) out.push_back(u.with_value(pk, field, n));
    return PacketSet(std::move(out));
}

inline PacketSet modify(const PacketUniverse& u, const PacketSet& a, const std::string& field,
                        std::uint32_t n) {
    auto f = u.require_field(field);
    u.check_value(f, n);
    return modify(u, a, f, n);
}

/// Compact human form: {(sw=1 pt=2),(sw=3 pt=1)}.
inline std::string format_set(const PacketUniverse& u, const PacketSet& s) {
    std::string out = "{";
    bool first = true;
    for (auto pk : s) {
        if (!first) out += ",";
        first = false;
        out += "(";
        auto vals = u.decode(pk);
        for (std::size_t f = 0; f < vals.size(); ++f) {
            if (f) out += " ";
            out += u.fields()[f].name + "=" + std::to_string(vals[f]);
        }
        out += ")";
    }
    return out + "}";
}

}  // namespace pnk
