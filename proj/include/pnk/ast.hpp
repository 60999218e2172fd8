#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pnk/scalar.hpp"

namespace pnk {

struct SourcePos {
    int line = 0;
    int column = 0;
};

enum class Kind {
    Drop,
    Skip,
    Test,
    Assign,
    Neg,
    Union,
    Seq,
    Choice,
    Star,
    // sugar
    If,
    While,
    DoWhile,
    Var,
    NaryChoice,
};

struct Node;

/// Programs are immutable trees shared by pointer.
using Program = std::shared_ptr<const Node>;

struct Node {
    Kind kind = Kind::Drop;
    std::string field;           // Test, Assign, Var
    std::uint32_t value = 0;     // Test, Assign, Var
    Rational weight;             // Choice: probability of the left branch
    std::vector<Program> kids;   // operands, in source order
    std::vector<Rational> weights;  // NaryChoice, parallel to kids
    SourcePos pos;
};

class ProgramError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline bool is_sugar(Kind k) { return k >= Kind::If; }

/// A node is a predicate iff it is drop, skip, a test, or a negation /
/// union / sequence of predicates.
inline bool is_predicate(const Program& p) {
    switch (p->kind) {
    case Kind::Drop:
    case Kind::Skip:
    case Kind::Test:
        return true;
    case Kind::Neg:
        return is_predicate(p->kids[0]);
    case Kind::Union:
    case Kind::Seq:
        return is_predicate(p->kids[0]) && is_predicate(p->kids[1]);
    default:
        return false;
    }
}

inline bool is_core(const Program& p) {
    if (is_sugar(p->kind)) return false;
    for (const auto& k : p->kids)
        if (!is_core(k)) return false;
    return true;
}

/// Structural equality, ignoring source positions.
inline bool equal(const Program& a, const Program& b) {
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind || a->field != b->field || a->value != b->value) return false;
    if (a->kind == Kind::Choice && a->weight != b->weight) return false;
    if (a->weights != b->weights || a->kids.size() != b->kids.size()) return false;
    for (std::size_t i = 0; i < a->kids.size(); ++i)
        if (!equal(a->kids[i], b->kids[i])) return false;
    return true;
}

inline std::size_t size(const Program& p) {
    std::size_t n = 1;
    for (const auto& k : p->kids) n += size(k);
    return n;
}

namespace ast {

namespace detail {
inline Node node(Kind k) {
    Node n;
    n.kind = k;
    return n;
}

inline Program make(Node n) { return std::make_shared<const Node>(std::move(n)); }

inline void require_predicate(const Program& t, const char* what) {
    if (!is_predicate(t))
        throw ProgramError(std::string(what) + " requires a predicate operand");
}
}  // namespace detail

inline Program drop() { return detail::make(detail::node(Kind::Drop)); }
inline Program skip() { return detail::make(detail::node(Kind::Skip)); }

inline Program test(std::string field, std::uint32_t value) {
    Node n = detail::node(Kind::Test);
    n.field = std::move(field);
    n.value = value;
    return detail::make(std::move(n));
}

inline Program assign(std::string field, std::uint32_t value) {
    Node n = detail::node(Kind::Assign);
    n.field = std::move(field);
    n.value = value;
    return detail::make(std::move(n));
}

inline Program neg(Program t) {
    detail::require_predicate(t, "negation");
    Node n = detail::node(Kind::Neg);
    n.kids = {std::move(t)};
    return detail::make(std::move(n));
}

inline Program uni(Program p, Program q) {
    Node n = detail::node(Kind::Union);
    n.kids = {std::move(p), std::move(q)};
    return detail::make(std::move(n));
}

inline Program seq(Program p, Program q) {
    Node n = detail::node(Kind::Seq);
    n.kids = {std::move(p), std::move(q)};
    return detail::make(std::move(n));
}

inline Program choice(Rational r, Program p, Program q) {
    r.canonicalize();
    if (r < 0 || r > 1) throw ProgramError("choice weight " + r.get_str() + " outside [0,1]");
    Node n = detail::node(Kind::Choice);
    n.weight = std::move(r);
    n.kids = {std::move(p), std::move(q)};
    return detail::make(std::move(n));
}

inline Program star(Program p) {
    Node n = detail::node(Kind::Star);
    n.kids = {std::move(p)};
    return detail::make(std::move(n));
}

inline Program ite(Program t, Program p, Program q) {
    detail::require_predicate(t, "if guard");
    Node n = detail::node(Kind::If);
    n.kids = {std::move(t), std::move(p), std::move(q)};
    return detail::make(std::move(n));
}

inline Program while_do(Program t, Program p) {
    detail::require_predicate(t, "while guard");
    Node n = detail::node(Kind::While);
    n.kids = {std::move(t), std::move(p)};
    return detail::make(std::move(n));
}

inline Program do_while(Program p, Program t) {
    detail::require_predicate(t, "do-while guard");
    Node n = detail::node(Kind::DoWhile);
    n.kids = {std::move(p), std::move(t)};
    return detail::make(std::move(n));
}

inline Program var(std::string field, std::uint32_t value, Program body) {
    Node n = detail::node(Kind::Var);
    n.field = std::move(field);
    n.value = value;
    n.kids = {std::move(body)};
    return detail::make(std::move(n));
}

inline Program nary(std::vector<std::pair<Program, Rational>> branches) {
    if (branches.empty()) throw ProgramError("n-ary choice needs at least one branch");
    Node n = detail::node(Kind::NaryChoice);
    Rational total = 0;
    for (auto& [p, w] : branches) {
        w.canonicalize();
        if (w < 0) throw ProgramError("negative n-ary choice weight");
        total += w;
        n.kids.push_back(std::move(p));
        n.weights.push_back(std::move(w));
    }
    if (total != 1) throw ProgramError("n-ary choice weights sum to " + total.get_str() + ", not 1");
    return detail::make(std::move(n));
}

/// Uniform n-ary choice; a single branch is returned unchanged.
inline Program uniform(std::vector<Program> branches) {
    if (branches.size() == 1) return branches.front();
    std::vector<std::pair<Program, Rational>> weighted;
    Rational w(1, static_cast<unsigned long>(branches.size()));
    for (auto& b : branches) weighted.emplace_back(std::move(b), w);
    return nary(std::move(weighted));
}

/// Left-nested union; the empty union is drop.
inline Program union_all(const std::vector<Program>& ps) {
    if (ps.empty()) return drop();
    Program acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i) acc = uni(acc, ps[i]);
    return acc;
}

/// Left-nested sequence; the empty sequence is skip.
inline Program seq_all(const std::vector<Program>& ps) {
    if (ps.empty()) return skip();
    Program acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i) acc = seq(acc, ps[i]);
    return acc;
}

}  // namespace ast
}  // namespace pnk
