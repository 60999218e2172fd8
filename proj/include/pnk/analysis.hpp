#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnk/desugar.hpp"
#include "pnk/kernel.hpp"
#include "pnk/predicate.hpp"

namespace pnk {

class QueryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The input rows a decision ranges over.
struct InputSpec {
    std::vector<PacketSet> sets;

    static InputSpec of(std::vector<PacketSet> sets) {
        if (sets.empty()) throw std::invalid_argument("input spec must not be empty");
        return {std::move(sets)};
    }

    /// All subsets of the given packets, refused beyond `cap` packets.
    static InputSpec all_subsets(const std::vector<PacketIndex>& pks, std::size_t cap = 12) {
        if (pks.size() > cap)
            throw ResourceError("all-subsets input over " + std::to_string(pks.size()) +
                                " packets exceeds cap of " + std::to_string(cap) +
                                "; pass explicit inputs instead");
        return {Kernel<Rational>::all_subsets(pks)};
    }

    static InputSpec all(const PacketUniverse& u, std::size_t cap = 12) {
        if (u.packet_count() > cap)
            throw ResourceError("universe has " + std::to_string(u.packet_count()) +
                                " packets; all-subsets checks are capped at " + std::to_string(cap));
        std::vector<PacketIndex> pks;
        for (PacketIndex i = 0; i < u.packet_count(); ++i) pks.push_back(i);
        return all_subsets(pks, cap);
    }

    static InputSpec singletons(const PacketUniverse& u) {
        std::vector<PacketSet> sets;
        for (PacketIndex i = 0; i < u.packet_count(); ++i) sets.push_back(PacketSet::singleton(i));
        return of(std::move(sets));
    }
};

enum class Relation { Equal, NotEqual, Leq, NotLeq };

inline const char* to_string(Relation r) {
    switch (r) {
    case Relation::Equal:
        return "equal";
    case Relation::NotEqual:
        return "not-equal";
    case Relation::Leq:
        return "leq";
    case Relation::NotLeq:
        return "not-leq";
    }
    return "?";
}

/// For equivalence, `output` is an output set whose probability differs.
/// For the order, `output` generates the up-set whose mass is larger on the
/// left, and the probabilities are the two up-set masses.
template <class S>
struct Witness {
    PacketSet input;
    PacketSet output;
    S left;
    S right;
};

template <class S>
struct Verdict {
    Relation result;
    std::optional<Witness<S>> witness;
    double tolerance = 0.0;  // 0 for exact verdicts
    std::size_t inputs_checked = 0;

    bool positive() const { return result == Relation::Equal || result == Relation::Leq; }
};

/// Least output set (in set order) on which the two distributions differ.
template <class S>
std::optional<PacketSet> first_difference(const Dist<S>& x, const Dist<S>& y, double tol) {
    using T = scalar_traits<S>;
    std::vector<PacketSet> keys;
    for (const auto& e : x) keys.push_back(e.first);
    for (const auto& e : y) keys.push_back(e.first);
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (const auto& b : keys)
        if (!T::near(x.prob(b), y.prob(b), tol)) return b;
    return std::nullopt;
}

template <class S>
Verdict<S> equiv(Kernel<S>& p, Kernel<S>& q, const InputSpec& inputs,
                 double tol = kDefaultTolerance) {
    Verdict<S> v{Relation::Equal, std::nullopt, scalar_traits<S>::exact ? 0.0 : tol, 0};
    for (const auto& a : inputs.sets) {
        ++v.inputs_checked;
        const auto& x = p.apply(a);
        const auto& y = q.apply(a);
        if (auto b = first_difference(x, y, tol)) {
            v.result = Relation::NotEqual;
            v.witness = Witness<S>{a, *b, x.prob(*b), y.prob(*b)};
            return v;
        }
    }
    return v;
}

/// Intersections of any nonempty family of support sets, plus the empty set.
template <class S>
std::vector<PacketSet> meet_closure(const Dist<S>& x, const Dist<S>& y) {
    std::set<PacketSet> closed{PacketSet{}};
    std::vector<PacketSet> base;
    for (const auto& e : x) base.push_back(e.first);
    for (const auto& e : y) base.push_back(e.first);
    std::vector<PacketSet> frontier;
    for (auto& b : base)
        if (closed.insert(b).second) frontier.push_back(b);
    while (!frontier.empty()) {
        std::vector<PacketSet> next;
        for (const auto& c : frontier)
            for (const auto& b : base) {
                auto m = c & b;
                if (closed.insert(m).second) next.push_back(std::move(m));
            }
        frontier = std::move(next);
    }
    return {closed.begin(), closed.end()};
}

/// Least generator a (in set order) with x(up a) > y(up a), if any.
template <class S>
std::optional<PacketSet> leq_violation(const Dist<S>& x, const Dist<S>& y,
                                       double tol = kDefaultTolerance) {
    using T = scalar_traits<S>;
    for (const auto& a : meet_closure(x, y)) {
        S l = x.up_mass(a), r = y.up_mass(a);
        if (l > r && !T::near(l, r, tol)) return a;
    }
    return std::nullopt;
}

/// x is below y in the distribution order: x(up a) <= y(up a) for all a.
template <class S>
bool dist_leq(const Dist<S>& x, const Dist<S>& y, double tol = kDefaultTolerance) {
    return !leq_violation(x, y, tol);
}

template <class S>
Verdict<S> leq(Kernel<S>& p, Kernel<S>& q, const InputSpec& inputs,
               double tol = kDefaultTolerance) {
    Verdict<S> v{Relation::Leq, std::nullopt, scalar_traits<S>::exact ? 0.0 : tol, 0};
    for (const auto& a : inputs.sets) {
        ++v.inputs_checked;
        const auto& x = p.apply(a);
        const auto& y = q.apply(a);
        if (auto g = leq_violation(x, y, tol)) {
            v.result = Relation::NotLeq;
            v.witness = Witness<S>{a, *g, x.up_mass(*g), y.up_mass(*g)};
            return v;
        }
    }
    return v;
}

/// p < q: p <= q and p, q not equivalent on the inputs.
template <class S>
struct StrictVerdict {
    Verdict<S> order;
    Verdict<S> equality;
    bool holds() const { return order.positive() && !equality.positive(); }
};

template <class S>
StrictVerdict<S> strictly_less(Kernel<S>& p, Kernel<S>& q, const InputSpec& inputs,
                               double tol = kDefaultTolerance) {
    return {leq(p, q, inputs, tol), equiv(p, q, inputs, tol)};
}

/// Convenience overloads that desugar and compile their arguments.
template <class S>
Verdict<S> equiv(const Program& p, const Program& q, const PacketUniverse& u,
                 const InputSpec& inputs, KernelOptions opts = {}, double tol = kDefaultTolerance) {
    Kernel<S> kp(desugar(p), u, opts), kq(desugar(q), u, opts);
    return equiv(kp, kq, inputs, tol);
}

template <class S>
Verdict<S> leq(const Program& p, const Program& q, const PacketUniverse& u,
               const InputSpec& inputs, KernelOptions opts = {}, double tol = kDefaultTolerance) {
    Kernel<S> kp(desugar(p), u, opts), kq(desugar(q), u, opts);
    return leq(kp, kq, inputs, tol);
}

// Quantitative measures over one output distribution.

template <class S>
S prob_nonempty(const Dist<S>& d) {
    S m = scalar_traits<S>::zero();
    for (const auto& [b, p] : d)
        if (!b.empty()) m += p;
    return m;
}

enum class Quantifier { All, Some };

/// Probability that the output is nonempty and all (or some) of its packets
/// satisfy the predicate.
template <class S>
S prob_satisfies(const Dist<S>& d, const Program& pred, const PacketUniverse& u, Quantifier q) {
    if (!is_predicate(pred)) throw QueryError("prob_satisfies needs a predicate");
    S m = scalar_traits<S>::zero();
    for (const auto& [b, p] : d) {
        if (b.empty()) continue;
        auto sat = [&](PacketIndex pk) { return satisfies(pred, u, pk); };
        bool ok = q == Quantifier::All ? std::all_of(b.begin(), b.end(), sat)
                                       : std::any_of(b.begin(), b.end(), sat);
        if (ok) m += p;
    }
    return m;
}

/// Value of a field on an output set: the minimum over its packets. For the
/// single-packet outputs of the case studies this is just the packet's value.
inline std::uint32_t set_field_value(const PacketSet& b, const PacketUniverse& u, std::size_t f) {
    std::uint32_t v = u.fields()[f].size;
    for (auto pk : b) v = std::min(v, u.value(pk, f));
    return v;
}

/// E[field | output nonempty].
template <class S>
S expected_field(const Dist<S>& d, const PacketUniverse& u, const std::string& field) {
    const auto f = u.require_field(field);
    S mass = prob_nonempty(d);
    if (scalar_traits<S>::is_zero(mass))
        throw QueryError("expected " + field + ": output is empty with probability 1");
    S acc = scalar_traits<S>::zero();
    for (const auto& [b, p] : d)
        if (!b.empty()) acc += p * S(set_field_value(b, u, f));
    return acc / mass;
}

/// cdf[v] = P(field <= v and output nonempty), optionally divided by
/// P(output nonempty).
template <class S>
std::vector<S> field_cdf(const Dist<S>& d, const PacketUniverse& u, const std::string& field,
                         bool conditional = true) {
    const auto f = u.require_field(field);
    std::vector<S> cdf(u.fields()[f].size, scalar_traits<S>::zero());
    for (const auto& [b, p] : d)
        if (!b.empty()) cdf[set_field_value(b, u, f)] += p;
    for (std::size_t v = 1; v < cdf.size(); ++v) cdf[v] += cdf[v - 1];
    if (conditional) {
        S mass = prob_nonempty(d);
        if (scalar_traits<S>::is_zero(mass))
            throw QueryError(field + " cdf: output is empty with probability 1");
        for (auto& c : cdf) c /= mass;
    }
    return cdf;
}

}  // namespace pnk
