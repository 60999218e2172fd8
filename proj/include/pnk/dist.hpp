#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pnk/packet.hpp"
#include "pnk/scalar.hpp"

namespace pnk {

/// A finitely supported distribution over packet sets, kept sorted by set
/// with strictly positive masses.
template <class S>
class Dist {
public:
    using T = scalar_traits<S>;
    using Entry = std::pair<PacketSet, S>;

    Dist() = default;

    static Dist delta(PacketSet a) {
        Dist d;
        d.entries_.emplace_back(std::move(a), T::one());
        return d;
    }

    /// Builds from (set, mass) pairs; duplicate sets are merged and zero
    /// masses dropped.
    static Dist from_entries(std::vector<Entry> entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& x, const Entry& y) { return x.first < y.first; });
        Dist d;
        for (auto& [set, p] : entries) {
            if (!d.entries_.empty() && d.entries_.back().first == set)
                d.entries_.back().second += p;
            else
                d.entries_.emplace_back(std::move(set), std::move(p));
        }
        std::erase_if(d.entries_, [](const Entry& e) { return T::is_zero(e.second); });
        return d;
    }

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    bool is_delta() const { return entries_.size() == 1; }

    S prob(const PacketSet& b) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), b,
                                   [](const Entry& e, const PacketSet& s) { return e.first < s; });
        return (it != entries_.end() && it->first == b) ? it->second : T::zero();
    }

    S mass() const {
        S m = T::zero();
        for (const auto& e : entries_) m += e.second;
        return m;
    }

    /// mu(up a) = total mass of outputs containing a.
    S up_mass(const PacketSet& a) const {
        S m = T::zero();
        for (const auto& [b, p] : entries_)
            if (a.subset_of(b)) m += p;
        return m;
    }

    bool operator==(const Dist& o) const { return entries_ == o.entries_; }

    /// Same support up to entries whose mass is within tol of zero, and
    /// matching masses within tol. Exact scalars compare exactly.
    bool near(const Dist& o, double tol) const {
        if constexpr (T::exact) {
            return *this == o;
        } else {
            std::size_t x = 0, y = 0;
            const auto &a = entries_, &b = o.entries_;
            while (x < a.size() || y < b.size()) {
                if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
                    if (!T::near(a[x++].second, 0.0, tol)) return false;
                } else if (x == a.size() || b[y].first < a[x].first) {
                    if (!T::near(b[y++].second, 0.0, tol)) return false;
                } else if (!T::near(a[x++].second, b[y++].second, tol)) {
                    return false;
                }
            }
            return true;
        }
    }

private:
    std::vector<Entry> entries_;
};

/// Accumulates masses keyed by set; finish() yields the sorted Dist.
template <class S>
class DistBuilder {
public:
    void add(const PacketSet& b, const S& p) {
        if (scalar_traits<S>::is_zero(p)) return;
        auto [it, inserted] = acc_.try_emplace(b, p);
        if (!inserted) it->second += p;
    }

    void add(PacketSet&& b, const S& p) {
        if (scalar_traits<S>::is_zero(p)) return;
        auto [it, inserted] = acc_.try_emplace(std::move(b), p);
        if (!inserted) it->second += p;
    }

    Dist<S> finish() {
        std::vector<typename Dist<S>::Entry> out;
        out.reserve(acc_.size());
        for (auto& [b, p] : acc_) out.emplace_back(b, std::move(p));
        acc_.clear();
        return Dist<S>::from_entries(std::move(out));
    }

private:
    std::unordered_map<PacketSet, S, PacketSetHash> acc_;
};

/// Maps an exact distribution to another scalar type.
template <class S>
Dist<S> convert(const Dist<Rational>& d) {
    std::vector<typename Dist<S>::Entry> out;
    for (const auto& [b, p] : d) out.emplace_back(b, scalar_traits<S>::from_rational(p));
    return Dist<S>::from_entries(std::move(out));
}

}  // namespace pnk
