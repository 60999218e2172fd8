#pragma once

#include "pnk/ast.hpp"
#include "pnk/packet.hpp"

namespace pnk {

/// The characteristic set b_t of a predicate t, so that t maps any input a
/// to a ∩ b_t with probability one. Materializes sets over the whole
/// universe; meant for small universes and for checking.
inline PacketSet predicate_set(const Program& t, const PacketUniverse& u) {
    switch (t->kind) {
    case Kind::Drop:
        return {};
    case Kind::Skip:
        return PacketSet::full(u);
    case Kind::Test: {
        auto f = u.require_field(t->field);
        u.check_value(f, t->value);
        return PacketSet::full(u).filter([&](PacketIndex pk) { return u.value(pk, f) == t->value; });
    }
    case Kind::Neg:
        return PacketSet::full(u) - predicate_set(t->kids[0], u);
    case Kind::Union:
        return predicate_set(t->kids[0], u) | predicate_set(t->kids[1], u);
    case Kind::Seq:
        return predicate_set(t->kids[0], u) & predicate_set(t->kids[1], u);
    default:
        throw ProgramError("predicate_set: program is not a predicate");
    }
}

/// Membership test of a single packet against a predicate, without
/// materializing b_t.
inline bool satisfies(const Program& t, const PacketUniverse& u, PacketIndex pk) {
    switch (t->kind) {
    case Kind::Drop:
        return false;
    case Kind::Skip:
        return true;
    case Kind::Test:
        return u.value(pk, u.require_field(t->field)) == t->value;
    case Kind::Neg:
        return !satisfies(t->kids[0], u, pk);
    case Kind::Union:
        return satisfies(t->kids[0], u, pk) || satisfies(t->kids[1], u, pk);
    case Kind::Seq:
        return satisfies(t->kids[0], u, pk) && satisfies(t->kids[1], u, pk);
    default:
        throw ProgramError("satisfies: program is not a predicate");
    }
}

}  // namespace pnk
