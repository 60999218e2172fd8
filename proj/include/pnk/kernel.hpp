#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnk/ast.hpp"
#include "pnk/dist.hpp"
#include "pnk/linalg.hpp"
#include "pnk/packet.hpp"
#include "pnk/syntax.hpp"

namespace pnk {

/// Raised when exploration exceeds its configured state budget.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KernelOptions {
    std::size_t max_states = 200000;  // pair states per star evaluation
    std::size_t full_matrix_rows = 4096;
};

/// A big-step matrix restricted to a list of rows; columns are the union of
/// the row supports in set order.
template <class S>
struct BigStepMatrix {
    std::vector<PacketSet> rows;
    std::vector<PacketSet> cols;
    SparseMatrix<S> matrix;
};

template <class S>
class Kernel;

template <class S>
Dist<S> star_dist(Kernel<S>& k, std::size_t body, const PacketSet& a0,
                  std::size_t filter = static_cast<std::size_t>(-1));

/// The big-step semantics of a core program: maps each input set to its
/// output distribution. Sub-results are memoized per (node, input set), so a
/// kernel is not safe for concurrent use; give each thread its own.
template <class S>
class Kernel {
public:
    using T = scalar_traits<S>;

    Kernel(const Program& program, PacketUniverse universe, KernelOptions opts = {})
        : universe_(std::move(universe)), opts_(opts) {
        if (!is_core(program))
            throw ProgramError("kernel requires a core program; desugar it first");
        std::unordered_map<const Node*, std::size_t> seen;
        root_ = compile(program, seen);
        memo_.resize(nodes_.size());
    }

    const PacketUniverse& universe() const { return universe_; }
    const KernelOptions& options() const { return opts_; }
    std::size_t root() const { return root_; }

    const Dist<S>& apply(const PacketSet& a) { return apply_node(root_, a); }

    const Dist<S>& apply_node(std::size_t id, const PacketSet& a) {
        auto& memo = memo_[id];
        if (auto it = memo.find(a); it != memo.end()) return it->second;
        Dist<S> d = eval(id, a);
        return memo.emplace(a, std::move(d)).first->second;
    }

    /// Source text of a compiled node, for diagnostics.
    std::string describe(std::size_t id) const { return pretty(nodes_[id].source); }

    BigStepMatrix<S> matrix(const std::vector<PacketSet>& rows) {
        BigStepMatrix<S> out;
        out.rows = rows;
        std::vector<PacketSet> cols;
        for (const auto& a : rows)
            for (const auto& [b, p] : apply(a)) cols.push_back(b);
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        out.cols = cols;
        out.matrix = SparseMatrix<S>(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            typename SparseMatrix<S>::Row row;
            for (const auto& [b, p] : apply(rows[i])) {
                auto j = std::lower_bound(cols.begin(), cols.end(), b) - cols.begin();
                row.emplace_back(static_cast<std::size_t>(j), p);
            }
            out.matrix.set_row(i, std::move(row));
        }
        return out;
    }

    /// The full square matrix over 2^Pk, in the same order as
    /// all_subsets(); only for universes within `full_matrix_rows`.
    BigStepMatrix<S> full_matrix() {
        auto rows = all_subsets(universe_);
        if (rows.size() > opts_.full_matrix_rows)
            throw ResourceError("full big-step matrix needs " + std::to_string(rows.size()) +
                                " rows, cap is " + std::to_string(opts_.full_matrix_rows));
        auto m = matrix(rows);
        // square indexing: columns are all subsets as well
        BigStepMatrix<S> sq{rows, rows, SparseMatrix<S>(rows.size(), rows.size())};
        for (std::size_t i = 0; i < rows.size(); ++i) {
            typename SparseMatrix<S>::Row row;
            for (const auto& [j, p] : m.matrix.row(i)) {
                auto k = std::lower_bound(rows.begin(), rows.end(), m.cols[j]) - rows.begin();
                row.emplace_back(static_cast<std::size_t>(k), p);
            }
            sq.matrix.set_row(i, std::move(row));
        }
        return sq;
    }

    static std::vector<PacketSet> all_subsets(const PacketUniverse& u) {
        std::vector<PacketIndex> pks;
        for (PacketIndex i = 0; i < u.packet_count(); ++i) pks.push_back(i);
        return all_subsets(pks);
    }

    /// Every subset of `pks`, sorted in set order (the empty set first).
    static std::vector<PacketSet> all_subsets(const std::vector<PacketIndex>& pks) {
        if (pks.size() >= 31) throw ResourceError("too many packets to enumerate all subsets");
        std::vector<PacketSet> out;
        const std::uint64_t n = std::uint64_t{1} << pks.size();
        out.reserve(n);
        for (std::uint64_t mask = 0; mask < n; ++mask) {
            std::vector<PacketIndex> items;
            for (std::size_t i = 0; i < pks.size(); ++i)
                if (mask >> i & 1) items.push_back(pks[i]);
            out.emplace_back(std::move(items));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::size_t memo_size() const {
        std::size_t n = 0;
        for (const auto& m : memo_) n += m.size();
        return n;
    }

private:
    struct CNode {
        Kind kind;
        std::size_t field = 0;
        std::uint32_t value = 0;
        S weight{};
        S weight_c{};
        std::size_t lhs = 0, rhs = 0;
        bool star_filter = false;  // Seq(Star(lhs'), rhs) with rhs a predicate
        Program source;
    };

    std::size_t compile(const Program& p, std::unordered_map<const Node*, std::size_t>& seen) {
        if (auto it = seen.find(p.get()); it != seen.end()) return it->second;
        CNode c;
        c.kind = p->kind;
        c.source = p;
        switch (p->kind) {
        case Kind::Test:
        case Kind::Assign:
            c.field = universe_.require_field(p->field);
            universe_.check_value(c.field, p->value);
            c.value = p->value;
            break;
        case Kind::Choice:
            c.weight = T::from_rational(p->weight);
            c.weight_c = T::from_rational(Rational(1 - p->weight));
            [[fallthrough]];
        case Kind::Union:
        case Kind::Seq:
            c.lhs = compile(p->kids[0], seen);
            c.rhs = compile(p->kids[1], seen);
            c.star_filter = p->kind == Kind::Seq && p->kids[0]->kind == Kind::Star && is_predicate(p->kids[1]);
            break;
        case Kind::Neg:
        case Kind::Star:
            c.lhs = compile(p->kids[0], seen);
            break;
        default:
            break;
        }
        nodes_.push_back(std::move(c));
        seen.emplace(p.get(), nodes_.size() - 1);
        return nodes_.size() - 1;
    }

public:
    /// Whether packet pk passes the predicate node `id`.
    bool holds(std::size_t id, PacketIndex pk) const {
        const auto& n = nodes_[id];
        switch (n.kind) {
        case Kind::Drop:
            return false;
        case Kind::Skip:
            return true;
        case Kind::Test:
            return universe_.value(pk, n.field) == n.value;
        case Kind::Neg:
            return !holds(n.lhs, pk);
        case Kind::Union:
            return holds(n.lhs, pk) || holds(n.rhs, pk);
        case Kind::Seq:
            return holds(n.lhs, pk) && holds(n.rhs, pk);
        default:
            throw ProgramError("negation of a non-predicate");
        }
    }

private:

    Dist<S> eval(std::size_t id, const PacketSet& a) {
        // every program maps the empty set to itself
        if (a.empty()) return Dist<S>::delta(a);
        const auto& n = nodes_[id];
        switch (n.kind) {
        case Kind::Drop:
            return Dist<S>::delta({});
        case Kind::Skip:
            return Dist<S>::delta(a);
        case Kind::Test:
            return Dist<S>::delta(a.filter([&](PacketIndex pk) { return universe_.value(pk, n.field) == n.value; }));
        case Kind::Assign:
            return Dist<S>::delta(modify(universe_, a, n.field, n.value));
        case Kind::Neg:
            return Dist<S>::delta(a.filter([&](PacketIndex pk) { return !holds(n.lhs, pk); }));
        case Kind::Union: {
            const auto& x = apply_node(n.lhs, a);
            const auto& y = apply_node(n.rhs, a);
            if (x.is_delta() && x.begin()->first.empty()) return y;
            if (y.is_delta() && y.begin()->first.empty()) return x;
            DistBuilder<S> out;
            for (const auto& [b1, p1] : x)
                for (const auto& [b2, p2] : y) out.add(b1 | b2, p1 * p2);
            return out.finish();
        }
        case Kind::Seq: {
            // p* ; t only observes the accumulated packets passing t, so the
            // star can track just those and keep far fewer pair states
            if (n.star_filter) return star_dist(*this, nodes_[n.lhs].lhs, a, n.rhs);
            const auto& x = apply_node(n.lhs, a);
            if (x.is_delta()) return apply_node(n.rhs, x.begin()->first);
            DistBuilder<S> out;
            for (const auto& [b, p] : x)
                for (const auto& [c, q] : apply_node(n.rhs, b)) out.add(c, p * q);
            return out.finish();
        }
        case Kind::Choice: {
            if (T::is_zero(n.weight_c)) return apply_node(n.lhs, a);
            if (T::is_zero(n.weight)) return apply_node(n.rhs, a);
            DistBuilder<S> out;
            for (const auto& [b, p] : apply_node(n.lhs, a)) out.add(b, n.weight * p);
            for (const auto& [b, p] : apply_node(n.rhs, a)) out.add(b, n.weight_c * p);
            return out.finish();
        }
        case Kind::Star:
            return star_dist(*this, n.lhs, a);
        default:
            throw ProgramError("kernel: unexpected sugar node");
        }
    }

    PacketUniverse universe_;
    KernelOptions opts_;
    std::vector<CNode> nodes_;
    std::size_t root_ = 0;
    std::vector<std::unordered_map<PacketSet, Dist<S>, PacketSetHash>> memo_;
};

}  // namespace pnk

#include "pnk/star.hpp"
