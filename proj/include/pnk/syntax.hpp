#pragma once

// Concrete syntax for history-free ProbNetKAT.
//
//   expr    := expr '+[' weight ']' expr      (loosest, left-assoc)
//            | expr '&' expr                   (left-assoc)
//            | expr ';' expr                   (left-assoc)
//            | '!' expr                        (prefix)
//            | expr '*'                        (postfix, tightest)
//            | 'drop' | 'skip' | f '=' n | f ':=' n | '(' expr ')'
//            | 'if' expr 'then' expr 'else' expr
//            | 'while' expr 'do' expr
//            | 'do' expr 'while' expr
//            | 'var' f ':=' n 'in' expr
//            | 'oneof' '{' expr '@' weight (',' expr '@' weight)* '}'
//
// Weights are `a/b` or decimal literals and are kept exact. The trailing
// expression of the keyword forms extends as far right as possible.
// A program file may start with `fields { name : size ; ... }`.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pnk/ast.hpp"
#include "pnk/packet.hpp"

namespace pnk {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourcePos pos)
        : std::runtime_error(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " +
                             msg),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

namespace detail {

enum class Tok { Ident, Number, Sym, End };

struct Token {
    Tok type;
    std::string text;
    SourcePos pos;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        SourcePos pos{line, col};
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() &&
                                                            std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            auto digits = [&] {
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            };
            digits();
            if (j < src.size() && (src[j] == '.' || src[j] == '/') && j + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                digits();
            }
            out.push_back({Tok::Number, std::string(src.substr(i, j - i)), pos});
            advance(j - i);
            continue;
        }
        if (c == ':' && i + 1 < src.size() && src[i + 1] == '=') {
            out.push_back({Tok::Sym, ":=", pos});
            advance(2);
            continue;
        }
        if (std::string_view("=;&!*()[]{}+@,:").find(c) != std::string_view::npos) {
            out.push_back({Tok::Sym, std::string(1, c), pos});
            advance(1);
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

inline bool is_keyword(const std::string& s) {
    static const char* kws[] = {"drop", "skip", "true", "false", "if", "then", "else", "while",
                                "do", "var", "in", "oneof", "fields"};
    for (auto* k : kws)
        if (s == k) return true;
    return false;
}

class Parser {
public:
    Parser(std::vector<Token> toks, const PacketUniverse* u) : toks_(std::move(toks)), u_(u) {}

    std::optional<PacketUniverse> header() {
        if (!(peek().type == Tok::Ident && peek().text == "fields")) return std::nullopt;
        next();
        expect("{");
        std::vector<FieldDecl> decls;
        while (!peek_sym("}")) {
            auto name = ident("field name");
            expect(":");
            auto size = natural("domain size");
            if (size == 0) throw ParseError("field '" + name + "' needs a positive size", last_pos_);
            decls.push_back({name, size});
            if (peek_sym(";") || peek_sym(",")) next();
        }
        expect("}");
        try {
            return PacketUniverse(std::move(decls));
        } catch (const UniverseError& e) {
            throw ParseError(e.what(), last_pos_);
        }
    }

    void set_universe(const PacketUniverse* u) { u_ = u; }

    Program program() {
        auto p = expr();
        if (peek().type != Tok::End) fail("unexpected '" + peek().text + "'");
        return p;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() {
        last_pos_ = toks_[pos_].pos;
        return toks_[pos_++];
    }
    bool peek_sym(const char* s) const { return peek().type == Tok::Sym && peek().text == s; }
    bool peek_kw(const char* s) const { return peek().type == Tok::Ident && peek().text == s; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, peek().pos); }

    void expect(const char* s) {
        if (!peek_sym(s)) fail(std::string("expected '") + s + "'" +
                               (peek().type == Tok::End ? " at end of input" : ", found '" + peek().text + "'"));
        next();
    }

    void expect_kw(const char* s) {
        if (!peek_kw(s)) fail(std::string("expected '") + s + "'");
        next();
    }

    std::string ident(const char* what) {
        if (peek().type != Tok::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
        return next().text;
    }

    std::uint32_t natural(const char* what) {
        if (peek().type != Tok::Number || peek().text.find_first_of("./") != std::string::npos)
            fail(std::string("expected ") + what + " (unsigned integer)");
        const auto& t = next();
        try {
            auto v = std::stoull(t.text);
            if (v > 0xffffffffull) throw std::out_of_range("");
            return static_cast<std::uint32_t>(v);
        } catch (const std::exception&) {
            throw ParseError("integer literal out of range", t.pos);
        }
    }

    Rational weight() {
        if (peek().type != Tok::Number) fail("expected probability weight");
        const auto& t = next();
        Rational r;
        try {
            r = parse_rational(t.text);
        } catch (const std::exception& e) {
            throw ParseError(e.what(), t.pos);
        }
        if (r > 1) throw ParseError("weight " + r.get_str() + " exceeds 1", t.pos);
        return r;
    }

    // Field/value validation against the universe.
    void check_field(const std::string& f, std::uint32_t n, SourcePos pos) const {
        if (!u_) return;
        auto idx = u_->field_index(f);
        if (!idx) throw ParseError("unknown field '" + f + "'", pos);
        if (n >= u_->fields()[*idx].size)
            throw ParseError("value " + std::to_string(n) + " out of domain of '" + f + "' (size " +
                                 std::to_string(u_->fields()[*idx].size) + ")",
                             pos);
    }

    static Program at(Program p, SourcePos pos) {
        auto n = std::make_shared<Node>(*p);
        n->pos = pos;
        return n;
    }

    Program require_pred(Program t, const char* what, SourcePos pos) {
        if (!is_predicate(t)) throw ParseError(std::string(what) + " must be a predicate", pos);
        return t;
    }

    Program expr() {
        auto lhs = union_expr();
        while (peek_sym("+")) {
            auto pos = peek().pos;
            next();
            expect("[");
            auto r = weight();
            expect("]");
            auto rhs = union_expr();
            lhs = at(ast::choice(r, lhs, rhs), pos);
        }
        return lhs;
    }

    Program union_expr() {
        auto lhs = seq_expr();
        while (peek_sym("&")) {
            auto pos = next().pos;
            lhs = at(ast::uni(lhs, seq_expr()), pos);
        }
        return lhs;
    }

    Program seq_expr() {
        auto lhs = unary();
        while (peek_sym(";")) {
            auto pos = next().pos;
            lhs = at(ast::seq(lhs, unary()), pos);
        }
        return lhs;
    }

    Program unary() {
        if (peek_sym("!")) {
            auto pos = next().pos;
            auto t = unary();
            require_pred(t, "operand of '!'", pos);
            return at(ast::neg(t), pos);
        }
        auto p = atom();
        while (peek_sym("*")) {
            auto pos = next().pos;
            p = at(ast::star(p), pos);
        }
        return p;
    }

    Program atom() {
        const auto& t = peek();
        auto pos = t.pos;
        if (t.type == Tok::Sym && t.text == "(") {
            next();
            auto p = expr();
            expect(")");
            return p;
        }
        if (t.type != Tok::Ident) fail(t.type == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
        const std::string kw = t.text;
        if (kw == "drop" || kw == "false") {
            next();
            return at(ast::drop(), pos);
        }
        if (kw == "skip" || kw == "true") {
            next();
            return at(ast::skip(), pos);
        }
        if (kw == "if") {
            next();
            auto g = require_pred(expr(), "if guard", pos);
            expect_kw("then");
            auto p = expr();
            expect_kw("else");
            auto q = expr();
            return at(ast::ite(g, p, q), pos);
        }
        if (kw == "while") {
            next();
            auto g = require_pred(expr(), "while guard", pos);
            expect_kw("do");
            auto p = expr();
            return at(ast::while_do(g, p), pos);
        }
        if (kw == "do") {
            next();
            auto p = expr();
            expect_kw("while");
            auto g = require_pred(expr(), "do-while guard", pos);
            return at(ast::do_while(p, g), pos);
        }
        if (kw == "var") {
            next();
            auto fpos = peek().pos;
            auto f = ident("field name");
            expect(":=");
            auto n = natural("field value");
            check_field(f, n, fpos);
            expect_kw("in");
            auto body = expr();
            return at(ast::var(f, n, body), pos);
        }
        if (kw == "oneof") {
            next();
            expect("{");
            std::vector<std::pair<Program, Rational>> branches;
            do {
                auto p = expr();
                expect("@");
                branches.emplace_back(p, weight());
            } while (peek_sym(",") && (next(), true));
            expect("}");
            try {
                return at(ast::nary(std::move(branches)), pos);
            } catch (const ProgramError& e) {
                throw ParseError(e.what(), pos);
            }
        }
        if (is_keyword(kw)) fail("unexpected keyword '" + kw + "'");
        auto f = ident("field name");
        if (peek_sym("=")) {
            next();
            auto n = natural("field value");
            check_field(f, n, pos);
            return at(ast::test(f, n), pos);
        }
        if (peek_sym(":=")) {
            next();
            auto n = natural("field value");
            check_field(f, n, pos);
            return at(ast::assign(f, n), pos);
        }
        fail("expected '=' or ':=' after field '" + f + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SourcePos last_pos_{1, 1};
    const PacketUniverse* u_;
};

}  // namespace detail

/// Parses a program against a universe; every field must be declared and
/// every value must lie within its domain.
inline Program parse(std::string_view text, const PacketUniverse& universe) {
    detail::Parser p(detail::lex(text), &universe);
    return p.program();
}

struct ProgramFile {
    PacketUniverse universe;
    Program program;
};

/// Parses `[fields { ... }] expr`. The header wins when present; otherwise
/// `fallback` supplies the universe.
inline ProgramFile parse_program_file(std::string_view text,
                                      const std::optional<PacketUniverse>& fallback = std::nullopt) {
    detail::Parser p(detail::lex(text), nullptr);
    auto header = p.header();
    if (!header && !fallback)
        throw ParseError("no field declarations: add a 'fields { ... }' header or supply a universe",
                         {1, 1});
    ProgramFile out{header ? *header : *fallback, nullptr};
    p.set_universe(&out.universe);
    out.program = p.program();
    return out;
}

namespace detail {

// Binding strength used for parenthesization. Keyword forms bind loosest.
inline int precedence(Kind k) {
    switch (k) {
    case Kind::Choice:
        return 1;
    case Kind::Union:
        return 2;
    case Kind::Seq:
        return 3;
    case Kind::Neg:
        return 4;
    case Kind::Star:
        return 5;
    case Kind::Drop:
    case Kind::Skip:
    case Kind::Test:
    case Kind::Assign:
        return 6;
    default:
        return 0;
    }
}

inline void print(std::ostream& os, const Program& p);

inline void print_wrapped(std::ostream& os, const Program& p, bool parens) {
    if (parens) os << '(';
    print(os, p);
    if (parens) os << ')';
}

inline void print(std::ostream& os, const Program& p) {
    const int prec = precedence(p->kind);
    switch (p->kind) {
    case Kind::Drop:
        os << "drop";
        break;
    case Kind::Skip:
        os << "skip";
        break;
    case Kind::Test:
        os << p->field << '=' << p->value;
        break;
    case Kind::Assign:
        os << p->field << ":=" << p->value;
        break;
    case Kind::Neg:
        os << '!';
        print_wrapped(os, p->kids[0], precedence(p->kids[0]->kind) < prec);
        break;
    case Kind::Star:
        print_wrapped(os, p->kids[0], precedence(p->kids[0]->kind) < prec);
        os << '*';
        break;
    case Kind::Seq:
    case Kind::Union:
    case Kind::Choice: {
        print_wrapped(os, p->kids[0], precedence(p->kids[0]->kind) < prec);
        if (p->kind == Kind::Seq)
            os << " ; ";
        else if (p->kind == Kind::Union)
            os << " & ";
        else
            os << " +[" << p->weight.get_str() << "] ";
        print_wrapped(os, p->kids[1], precedence(p->kids[1]->kind) <= prec);
        break;
    }
    case Kind::If:
        os << "if ";
        print(os, p->kids[0]);
        os << " then ";
        print(os, p->kids[1]);
        os << " else ";
        print(os, p->kids[2]);
        break;
    case Kind::While:
        os << "while ";
        print(os, p->kids[0]);
        os << " do ";
        print(os, p->kids[1]);
        break;
    case Kind::DoWhile:
        // the body is delimited by `while`, but a body ending in a keyword
        // form would swallow it, so wrap those
        os << "do ";
        print_wrapped(os, p->kids[0], precedence(p->kids[0]->kind) == 0);
        os << " while ";
        print(os, p->kids[1]);
        break;
    case Kind::Var:
        os << "var " << p->field << " := " << p->value << " in ";
        print(os, p->kids[0]);
        break;
    case Kind::NaryChoice:
        os << "oneof { ";
        for (std::size_t i = 0; i < p->kids.size(); ++i) {
            if (i) os << ", ";
            print(os, p->kids[i]);
            os << " @ " << p->weights[i].get_str();
        }
        os << " }";
        break;
    }
}

}  // namespace detail

/// Canonical concrete syntax; parse(pretty(p)) reproduces p.
inline std::string pretty(const Program& p) {
    std::ostringstream os;
    detail::print(os, p);
    return os.str();
}

inline std::string pretty(const PacketUniverse& u) {
    std::ostringstream os;
    os << "fields {";
    for (const auto& f : u.fields()) os << ' ' << f.name << " : " << f.size << ';';
    os << " }";
    return os.str();
}

}  // namespace pnk
