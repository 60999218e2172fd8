#pragma once

#include <deque>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pnk/kernel.hpp"

namespace pnk {

struct PairState {
    PacketSet current;      // a
    PacketSet accumulator;  // b

    bool operator==(const PairState&) const = default;
};

struct PairStateHash {
    std::size_t operator()(const PairState& s) const {
        return s.current.hash() * 0x100000001b3ull ^ s.accumulator.hash();
    }
};

/// Reachable fragment of the small-step chain of p*: states (a, b) and the
/// transitions (a, b) -> (a', b | a) with probability B[p]_{a,a'}.
/// State 0 is the start state; indices follow exploration order.
template <class S>
struct PairStateGraph {
    std::vector<PairState> states;
    std::vector<std::vector<std::pair<std::size_t, S>>> edges;
    std::vector<char> saturated;

    std::size_t size() const { return states.size(); }

    std::size_t index_of(const PairState& s) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i] == s) return i;
        return static_cast<std::size_t>(-1);
    }
};

inline constexpr std::size_t kNoFilter = static_cast<std::size_t>(-1);

/// Breadth-first closure from (a0, {}) under the body kernel `body`. With a
/// predicate node `filter`, accumulators keep only the packets passing it.
template <class S>
PairStateGraph<S> explore(Kernel<S>& k, std::size_t body, const PacketSet& a0,
                          std::size_t filter = kNoFilter) {
    const std::size_t cap = k.options().max_states;
    PairStateGraph<S> g;
    std::unordered_map<PairState, std::size_t, PairStateHash> index;
    auto intern = [&](PairState s) {
        auto [it, inserted] = index.try_emplace(s, g.states.size());
        if (inserted) {
            if (g.states.size() >= cap)
                throw ResourceError("star exploration exceeded " + std::to_string(cap) +
                                    " pair states in (" + k.describe(body) + ")*");
            g.states.push_back(std::move(s));
            g.edges.emplace_back();
        }
        return it->second;
    };
    intern({a0, {}});
    for (std::size_t i = 0; i < g.states.size(); ++i) {
        PacketSet grown = g.states[i].accumulator | g.states[i].current;
        if (filter != kNoFilter) grown = grown.filter([&](PacketIndex pk) { return k.holds(filter, pk); });
        // copy: intern() may grow the vectors we would otherwise alias
        const Dist<S> next = k.apply_node(body, g.states[i].current);
        std::vector<std::pair<std::size_t, S>> out;
        for (const auto& [a, p] : next) out.emplace_back(intern({a, grown}), p);
        g.edges[i] = std::move(out);
    }
    return g;
}

/// Flags states whose accumulator can never grow again. A state is
/// unsaturated iff it reaches (in zero or more steps) the source of an edge
/// that strictly enlarges the accumulator.
template <class S>
void mark_saturated(PairStateGraph<S>& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<char> unsat(n, 0);
    std::vector<std::size_t> work;
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [j, p] : g.edges[i]) {
            preds[j].push_back(i);
            if (!unsat[i] && g.states[j].accumulator.size() != g.states[i].accumulator.size()) {
                unsat[i] = 1;
                work.push_back(i);
            }
        }
    while (!work.empty()) {
        auto j = work.back();
        work.pop_back();
        for (auto i : preds[j])
            if (!unsat[i]) {
                unsat[i] = 1;
                work.push_back(i);
            }
    }
    g.saturated.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) g.saturated[i] = !unsat[i];
}

/// Output distribution of body* on a0 (of body*;filter when a filter is
/// given): explores the pair-state chain, redirects saturated states to
/// their canonical absorbing state (0, b), and solves the resulting
/// absorbing chain from the start state.
template <class S>
Dist<S> star_dist(Kernel<S>& k, std::size_t body, const PacketSet& a0, std::size_t filter) {
    if (a0.empty()) return Dist<S>::delta({});
    auto g = explore(k, body, a0, filter);
    mark_saturated(g);
    if (g.saturated[0]) return Dist<S>::delta({});

    // transient states = unsaturated; absorbing columns = distinct final b
    const std::size_t n = g.size();
    std::vector<std::size_t> tidx(n, static_cast<std::size_t>(-1));
    std::size_t nt = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (!g.saturated[i]) tidx[i] = nt++;
    std::unordered_map<PacketSet, std::size_t, PacketSetHash> col;
    std::vector<PacketSet> finals;
    for (std::size_t i = 0; i < n; ++i)
        if (g.saturated[i] && col.try_emplace(g.states[i].accumulator, finals.size()).second)
            finals.push_back(g.states[i].accumulator);

    SparseMatrix<S> q(nt, nt), r(nt, finals.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (g.saturated[i]) continue;
        typename SparseMatrix<S>::Row qrow, rrow;
        for (const auto& [j, p] : g.edges[i]) {
            if (g.saturated[j])
                rrow.emplace_back(col.at(g.states[j].accumulator), p);
            else
                qrow.emplace_back(tidx[j], p);
        }
        q.set_row(tidx[i], std::move(qrow));
        r.set_row(tidx[i], std::move(rrow));
    }
    std::vector<typename Dist<S>::Entry> out;
    for (auto& [j, p] : absorption_row(q, r, tidx[0])) out.emplace_back(finals[j], std::move(p));
    return Dist<S>::from_entries(std::move(out));
}

/// Convenience wrapper: explores (p)* for a standalone core program p.
template <class S>
PairStateGraph<S> explore(const Program& p, const PacketUniverse& u, const PacketSet& a0,
                          std::size_t cap = KernelOptions{}.max_states) {
    KernelOptions opts;
    opts.max_states = cap;
    Kernel<S> k(p, u, opts);
    auto g = explore(k, k.root(), a0);
    mark_saturated(g);
    return g;
}

/// Explicit small-step matrix S and redirect matrix U over the explored
/// states, extended with the canonical states (0, b) they redirect to.
template <class S>
struct SUMatrices {
    std::vector<PairState> states;
    SparseMatrix<S> s;
    SparseMatrix<S> u;
};

template <class S>
SUMatrices<S> su_matrices(const PairStateGraph<S>& g) {
    using T = scalar_traits<S>;
    SUMatrices<S> out;
    out.states = g.states;
    std::unordered_map<PairState, std::size_t, PairStateHash> index;
    for (std::size_t i = 0; i < g.size(); ++i) index.emplace(g.states[i], i);
    auto canonical = [&](const PacketSet& b) {
        PairState c{{}, b};
        auto [it, inserted] = index.try_emplace(c, out.states.size());
        if (inserted) out.states.push_back(c);
        return it->second;
    };
    std::vector<std::size_t> target(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        target[i] = g.saturated[i] ? canonical(g.states[i].accumulator) : i;
    const std::size_t n = out.states.size();
    out.s = SparseMatrix<S>(n, n);
    out.u = SparseMatrix<S>(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < g.size()) {
            out.s.set_row(i, g.edges[i]);
            out.u.set_row(i, {{target[i], T::one()}});
        } else {
            // (0, b) steps to itself
            out.s.set_row(i, {{i, T::one()}});
            out.u.set_row(i, {{i, T::one()}});
        }
    }
    return out;
}

/// Graphviz rendering; states are labeled "a | b" and saturated states are
/// drawn with a double border.
template <class S>
std::string to_dot(const PairStateGraph<S>& g, const PacketUniverse& u) {
    auto fmt = [&](const PacketSet& s) { return format_set(u, s); };
    std::ostringstream os;
    os << "digraph pairs {\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << "  s" << i << " [label=\"" << fmt(g.states[i].current) << " | "
           << fmt(g.states[i].accumulator) << "\"";
        if (!g.saturated.empty() && g.saturated[i]) os << ", peripheries=2";
        os << "];\n";
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& [j, p] : g.edges[i])
            os << "  s" << i << " -> s" << j << " [label=\"" << scalar_traits<S>::str(p) << "\"];\n";
    os << "}\n";
    return os.str();
}

}  // namespace pnk
