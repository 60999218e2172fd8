#pragma once

#include "pnk/ast.hpp"

namespace pnk {

/// Rewrites derived forms into the core calculus:
///   if t then p else q  =>  t;p & !t;q
///   while t do p        =>  (t;p)*;!t
///   do p while t        =>  p;(t;p)*;!t
///   var f := n in p     =>  (f:=n;p);f:=0
///   oneof {...}         =>  right-nested binary choices
inline Program desugar(const Program& p) {
    using namespace ast;
    switch (p->kind) {
    case Kind::Drop:
    case Kind::Skip:
    case Kind::Test:
    case Kind::Assign:
        return p;
    case Kind::Neg:
        return neg(desugar(p->kids[0]));
    case Kind::Union:
        return uni(desugar(p->kids[0]), desugar(p->kids[1]));
    case Kind::Seq:
        return seq(desugar(p->kids[0]), desugar(p->kids[1]));
    case Kind::Choice:
        return choice(p->weight, desugar(p->kids[0]), desugar(p->kids[1]));
    case Kind::Star:
        return star(desugar(p->kids[0]));
    case Kind::If: {
        auto t = desugar(p->kids[0]);
        return uni(seq(t, desugar(p->kids[1])), seq(neg(t), desugar(p->kids[2])));
    }
    case Kind::While: {
        auto t = desugar(p->kids[0]);
        return seq(star(seq(t, desugar(p->kids[1]))), neg(t));
    }
    case Kind::DoWhile: {
        auto body = desugar(p->kids[0]);
        auto t = desugar(p->kids[1]);
        return seq(body, seq(star(seq(t, body)), neg(t)));
    }
    case Kind::Var:
        return seq(seq(assign(p->field, p->value), desugar(p->kids[0])), assign(p->field, 0));
    case Kind::NaryChoice: {
        // p1 @ w1, rest  =>  p1 +[w1] (rest rescaled by 1/(1-w1))
        const auto n = p->kids.size();
        Program acc = desugar(p->kids[n - 1]);
        Rational tail = p->weights[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) {
            const Rational& w = p->weights[i];
            Rational total = tail + w;
            Rational r = sgn(total) == 0 ? Rational(1, 2) : Rational(w / total);
            acc = choice(r, desugar(p->kids[i]), acc);
            tail = total;
        }
        return acc;
    }
    }
    throw ProgramError("desugar: unknown node kind");
}

}  // namespace pnk
