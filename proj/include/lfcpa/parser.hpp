#pragma once

// Lexer and recursive-descent parser for the mini language.
//
// A program is a sequence of type/variable declarations followed by either
// bare statements (an implicit "main" procedure) or explicit `proc name { }`
// blocks. Declarations use C syntax restricted to int/char/struct/union,
// pointers, and fixed-extent arrays.

#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ast.hpp"
#include "type_table.hpp"

namespace lfcpa {

enum class Tok {
    Ident, IntLit,
    KwStruct, KwUnion, KwInt, KwChar, KwProc, KwUse, KwOther,
    KwIf, KwElse, KwWhile, KwReturn, KwMalloc, KwSizeof,
    LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Semi, Comma, Assign, Star, Amp, Plus, Minus, Dot, Arrow,
    EqEq, Ne, Le, Ge, Lt, Gt,
    Eof
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    std::int64_t value = 0;
    SrcLoc loc;
};

class Lexer {
public:
    explicit Lexer(std::string src) : src_(std::move(src)) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            Token t = next();
            out.push_back(t);
            if (t.kind == Tok::Eof) break;
        }
        return out;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;

    char peek(std::size_t k = 0) const {
        return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
    }

    char take() {
        char c = src_[pos_++];
        if (c == '\n') { ++line_; col_ = 1; } else { ++col_; }
        return c;
    }

    void skip_space() {
        for (;;) {
            while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(peek())))
                take();
            if (peek() == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') take();
                continue;
            }
            break;
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(SrcLoc{line_, col_}, msg);
    }

    Token next() {
        Token t;
        t.loc = SrcLoc{line_, col_};
        if (pos_ >= src_.size()) { t.kind = Tok::Eof; return t; }
        char c = peek();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string s;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                s += take();
            t.text = s;
            t.kind = keyword(s);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string s;
            while (std::isdigit(static_cast<unsigned char>(peek()))) s += take();
            t.kind = Tok::IntLit;
            t.text = s;
            t.value = std::stoll(s);
            return t;
        }
        take();
        switch (c) {
        case '{': t.kind = Tok::LBrace; return t;
        case '}': t.kind = Tok::RBrace; return t;
        case '(': t.kind = Tok::LParen; return t;
        case ')': t.kind = Tok::RParen; return t;
        case '[': t.kind = Tok::LBracket; return t;
        case ']': t.kind = Tok::RBracket; return t;
        case ';': t.kind = Tok::Semi; return t;
        case ',': t.kind = Tok::Comma; return t;
        case '*': t.kind = Tok::Star; return t;
        case '&': t.kind = Tok::Amp; return t;
        case '+': t.kind = Tok::Plus; return t;
        case '.': t.kind = Tok::Dot; return t;
        case '-':
            if (peek() == '>') { take(); t.kind = Tok::Arrow; } else t.kind = Tok::Minus;
            return t;
        case '=':
            if (peek() == '=') { take(); t.kind = Tok::EqEq; } else t.kind = Tok::Assign;
            return t;
        case '!':
            if (peek() == '=') { take(); t.kind = Tok::Ne; return t; }
            fail("stray '!'");
        case '<':
            if (peek() == '=') { take(); t.kind = Tok::Le; } else t.kind = Tok::Lt;
            return t;
        case '>':
            if (peek() == '=') { take(); t.kind = Tok::Ge; } else t.kind = Tok::Gt;
            return t;
        default:
            fail(std::string("unexpected character '") + c + "'");
        }
    }

    static Tok keyword(const std::string& s) {
        static const std::map<std::string, Tok> kw = {
            {"struct", Tok::KwStruct}, {"union", Tok::KwUnion},
            {"int", Tok::KwInt},       {"char", Tok::KwChar},
            {"proc", Tok::KwProc},     {"use", Tok::KwUse},
            {"other", Tok::KwOther},   {"if", Tok::KwIf},
            {"else", Tok::KwElse},     {"while", Tok::KwWhile},
            {"return", Tok::KwReturn}, {"malloc", Tok::KwMalloc},
            {"sizeof", Tok::KwSizeof},
        };
        auto it = kw.find(s);
        return it == kw.end() ? Tok::Ident : it->second;
    }
};

class Parser {
public:
    explicit Parser(std::string src) {
        toks_ = Lexer(std::move(src)).run();
    }

    ParseResult run() {
        ParseResult res;
        res.types = std::make_unique<TypeTable>();
        tt_ = res.types.get();
        parse_program(res.program);
        tt_ = nullptr;
        return res;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    TypeTable* tt_ = nullptr;
    int anon_counter_ = 0;

    const Token& peek(std::size_t k = 0) const {
        std::size_t i = pos_ + k;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }

    const Token& take() {
        const Token& t = peek();
        if (t.kind != Tok::Eof) ++pos_;
        return t;
    }

    bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }

    const Token& expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what);
        return take();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw parse_error(peek().loc, msg + " (got '" + describe(peek()) + "')");
    }

    static std::string describe(const Token& t) {
        if (t.kind == Tok::Eof) return "end of input";
        if (!t.text.empty()) return t.text;
        switch (t.kind) {
        case Tok::LBrace: return "{"; case Tok::RBrace: return "}";
        case Tok::LParen: return "("; case Tok::RParen: return ")";
        case Tok::LBracket: return "["; case Tok::RBracket: return "]";
        case Tok::Semi: return ";"; case Tok::Comma: return ",";
        case Tok::Assign: return "="; case Tok::Star: return "*";
        case Tok::Amp: return "&"; case Tok::Plus: return "+";
        case Tok::Minus: return "-"; case Tok::Dot: return ".";
        case Tok::Arrow: return "->"; case Tok::EqEq: return "==";
        case Tok::Ne: return "!="; case Tok::Le: return "<=";
        case Tok::Ge: return ">="; case Tok::Lt: return "<";
        case Tok::Gt: return ">";
        default: return "?";
        }
    }

    bool at_type_start() const {
        return at(Tok::KwInt) || at(Tok::KwChar) || at(Tok::KwStruct) || at(Tok::KwUnion);
    }

    // ----- declarations -----

    const Type* parse_type_spec() {
        if (at(Tok::KwInt)) { take(); return tt_->int_type(); }
        if (at(Tok::KwChar)) { take(); return tt_->char_type(); }
        TypeKind kind = at(Tok::KwUnion) ? TypeKind::Union : TypeKind::Struct;
        if (kind == TypeKind::Struct && !at(Tok::KwStruct)) fail("expected a type");
        take();
        std::string tag;
        if (at(Tok::Ident)) tag = take().text;
        if (at(Tok::LBrace)) {
            if (tag.empty()) {
                do { tag = "__anon" + std::to_string(++anon_counter_); }
                while (tt_->named_record(kind, tag));
            } else if (tt_->named_record(kind, tag)) {
                fail("redefinition of '" + tag + "'");
            }
            Type* rec = tt_->begin_record(kind, tag);
            take(); // {
            while (!at(Tok::RBrace)) parse_member(rec);
            take(); // }
            if (rec->fields.empty()) fail("empty struct/union '" + tag + "'");
            return rec;
        }
        if (tag.empty()) fail("expected a tag or member list");
        const Type* rec = tt_->named_record(kind, tag);
        if (!rec)
            fail(std::string(kind == TypeKind::Union ? "union" : "struct") +
                 " '" + tag + "' is not defined");
        return rec;
    }

    struct Declarator {
        int stars = 0;
        std::string name;
        std::vector<std::int64_t> dims;
        SrcLoc loc;
    };

    Declarator parse_declarator() {
        Declarator d;
        while (at(Tok::Star)) { take(); ++d.stars; }
        d.loc = peek().loc;
        d.name = expect(Tok::Ident, "a name").text;
        while (at(Tok::LBracket)) {
            take();
            const Token& n = expect(Tok::IntLit, "an array extent");
            if (n.value <= 0) throw parse_error(n.loc, "array extent must be positive");
            d.dims.push_back(n.value);
            expect(Tok::RBracket, "']'");
        }
        return d;
    }

    const Type* declarator_type(const Type* base, const Declarator& d) {
        const Type* t = base;
        for (int i = 0; i < d.stars; ++i) t = tt_->pointer_to(t);
        for (auto it = d.dims.rbegin(); it != d.dims.rend(); ++it)
            t = tt_->array_of(t, *it);
        return t;
    }

    void parse_member(Type* rec) {
        const Type* base = parse_type_spec();
        for (;;) {
            Declarator d = parse_declarator();
            if (rec->find_field(d.name))
                throw parse_error(d.loc, "duplicate member '" + d.name + "'");
            rec->fields.push_back(FieldDecl{d.name, declarator_type(base, d)});
            if (at(Tok::Comma)) { take(); continue; }
            expect(Tok::Semi, "';'");
            break;
        }
    }

    // Parses one declaration line; appends declared names to `names`.
    void parse_decl(std::vector<std::string>& names) {
        const Type* base = parse_type_spec();
        if (at(Tok::Semi)) { take(); return; } // pure type declaration
        for (;;) {
            Declarator d = parse_declarator();
            if (tt_->var_type(d.name))
                throw parse_error(d.loc, "redeclaration of '" + d.name + "'");
            tt_->declare_var(d.name, declarator_type(base, d));
            names.push_back(d.name);
            if (at(Tok::Comma)) { take(); continue; }
            expect(Tok::Semi, "';'");
            break;
        }
    }

    // ----- program structure -----

    void parse_program(SourceProgram& prog) {
        while (at_type_start()) parse_decl(prog.globals);

        AstProc implicit;
        implicit.name = "main";
        implicit.implicit = true;

        while (!at(Tok::Eof)) {
            if (at(Tok::KwProc)) {
                take();
                AstProc p;
                p.name = expect(Tok::Ident, "a procedure name").text;
                for (const auto& q : prog.procs)
                    if (q.name == p.name) fail("redefinition of procedure '" + p.name + "'");
                expect(Tok::LBrace, "'{'");
                while (at_type_start()) parse_decl(p.locals);
                while (!at(Tok::RBrace)) p.body.push_back(parse_stmt());
                take();
                prog.procs.push_back(std::move(p));
                continue;
            }
            if (at_type_start())
                fail("declarations must precede statements");
            implicit.body.push_back(parse_stmt());
        }

        if (!implicit.body.empty()) {
            for (const auto& q : prog.procs)
                if (q.name == "main") fail("both bare statements and a 'main' procedure");
            prog.procs.push_back(std::move(implicit));
        }
        if (prog.procs.empty()) {
            // An empty program still analyzes: keep an empty main.
            prog.procs.push_back(std::move(implicit));
        }
    }

    // ----- statements -----

    std::vector<AstStmt> parse_block() {
        expect(Tok::LBrace, "'{'");
        std::vector<AstStmt> out;
        while (!at(Tok::RBrace)) out.push_back(parse_stmt());
        take();
        return out;
    }

    AstStmt parse_stmt() {
        AstStmt s;
        s.loc = peek().loc;
        switch (peek().kind) {
        case Tok::KwUse: {
            take();
            s.kind = AstStmt::Kind::Use;
            expect(Tok::LParen, "'('");
            s.args.push_back(parse_expr());
            while (at(Tok::Comma)) { take(); s.args.push_back(parse_expr()); }
            expect(Tok::RParen, "')'");
            expect(Tok::Semi, "';'");
            return s;
        }
        case Tok::KwOther: {
            take();
            s.kind = AstStmt::Kind::Other;
            expect(Tok::Semi, "';'");
            return s;
        }
        case Tok::KwReturn: {
            take();
            s.kind = AstStmt::Kind::Return;
            if (!at(Tok::Semi)) s.args.push_back(parse_expr());
            expect(Tok::Semi, "';'");
            return s;
        }
        case Tok::KwIf: {
            take();
            s.kind = AstStmt::Kind::If;
            parse_cond(s);
            s.body = parse_block();
            if (at(Tok::KwElse)) {
                take();
                if (at(Tok::KwIf)) s.else_body.push_back(parse_stmt());
                else s.else_body = parse_block();
            }
            return s;
        }
        case Tok::KwWhile: {
            take();
            s.kind = AstStmt::Kind::While;
            parse_cond(s);
            s.body = parse_block();
            return s;
        }
        default: {
            s.kind = AstStmt::Kind::Assign;
            s.lhs = parse_expr();
            expect(Tok::Assign, "'='");
            s.rhs = parse_expr();
            expect(Tok::Semi, "';'");
            return s;
        }
        }
    }

    void parse_cond(AstStmt& s) {
        expect(Tok::LParen, "'('");
        s.cond_l = parse_expr();
        switch (peek().kind) {
        case Tok::EqEq: s.cond_op = "=="; break;
        case Tok::Ne: s.cond_op = "!="; break;
        case Tok::Le: s.cond_op = "<="; break;
        case Tok::Ge: s.cond_op = ">="; break;
        case Tok::Lt: s.cond_op = "<"; break;
        case Tok::Gt: s.cond_op = ">"; break;
        default: s.cond_op.clear();
        }
        if (!s.cond_op.empty()) {
            take();
            s.cond_r = parse_expr();
        }
        expect(Tok::RParen, "')'");
    }

    // ----- expressions -----

    ExprPtr make(Expr::Kind k, SrcLoc loc) {
        auto e = std::make_unique<Expr>();
        e->kind = k;
        e->loc = loc;
        return e;
    }

    ExprPtr parse_expr() { return parse_add(); }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool plus = at(Tok::Plus);
            SrcLoc loc = take().loc;
            ExprPtr r = parse_mul();
            ExprPtr n = make(plus ? Expr::Kind::Add : Expr::Kind::Sub, loc);
            n->a = std::move(e);
            n->b = std::move(r);
            e = std::move(n);
        }
        return e;
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        while (at(Tok::Star)) {
            SrcLoc loc = take().loc;
            ExprPtr r = parse_unary();
            ExprPtr n = make(Expr::Kind::Mul, loc);
            n->a = std::move(e);
            n->b = std::move(r);
            e = std::move(n);
        }
        return e;
    }

    ExprPtr parse_unary() {
        switch (peek().kind) {
        case Tok::Star: {
            SrcLoc loc = take().loc;
            ExprPtr n = make(Expr::Kind::Deref, loc);
            n->a = parse_unary();
            return n;
        }
        case Tok::Amp: {
            SrcLoc loc = take().loc;
            ExprPtr n = make(Expr::Kind::AddrOf, loc);
            n->a = parse_unary();
            return n;
        }
        case Tok::Minus: {
            SrcLoc loc = take().loc;
            ExprPtr n = make(Expr::Kind::Neg, loc);
            n->a = parse_unary();
            return n;
        }
        default:
            return parse_postfix();
        }
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        for (;;) {
            if (at(Tok::Dot)) {
                SrcLoc loc = take().loc;
                ExprPtr n = make(Expr::Kind::Dot, loc);
                n->name = expect(Tok::Ident, "a member name").text;
                n->a = std::move(e);
                e = std::move(n);
            } else if (at(Tok::Arrow)) {
                SrcLoc loc = take().loc;
                ExprPtr n = make(Expr::Kind::Arrow, loc);
                n->name = expect(Tok::Ident, "a member name").text;
                n->a = std::move(e);
                e = std::move(n);
            } else if (at(Tok::LBracket)) {
                SrcLoc loc = take().loc;
                ExprPtr n = make(Expr::Kind::Index, loc);
                n->a = std::move(e);
                n->b = parse_expr();
                expect(Tok::RBracket, "']'");
                e = std::move(n);
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_malloc() {
        SrcLoc loc = expect(Tok::KwMalloc, "'malloc'").loc;
        expect(Tok::LParen, "'('");
        expect(Tok::KwSizeof, "'sizeof'");
        expect(Tok::LParen, "'('");
        const Type* t = parse_type_spec();
        expect(Tok::RParen, "')'");
        expect(Tok::RParen, "')'");
        ExprPtr n = make(Expr::Kind::Malloc, loc);
        n->malloc_type = t;
        return n;
    }

    ExprPtr parse_primary() {
        switch (peek().kind) {
        case Tok::Ident: {
            const Token& t = take();
            ExprPtr n = make(Expr::Kind::Var, t.loc);
            n->name = t.text;
            return n;
        }
        case Tok::IntLit: {
            const Token& t = take();
            ExprPtr n = make(Expr::Kind::IntLit, t.loc);
            n->lit = t.value;
            return n;
        }
        case Tok::KwMalloc:
            return parse_malloc();
        case Tok::LParen: {
            if (at(Tok::KwInt, 1) || at(Tok::KwChar, 1) ||
                at(Tok::KwStruct, 1) || at(Tok::KwUnion, 1)) {
                // cast: only valid immediately in front of malloc
                SrcLoc loc = take().loc;
                const Type* base = parse_type_spec();
                int stars = 0;
                while (at(Tok::Star)) { take(); ++stars; }
                if (stars == 0) throw parse_error(loc, "cast must be a pointer type");
                expect(Tok::RParen, "')'");
                ExprPtr inner;
                if (at(Tok::LParen)) {
                    take();
                    inner = parse_malloc();
                    expect(Tok::RParen, "')'");
                } else {
                    inner = parse_malloc();
                }
                const Type* t = base;
                for (int i = 0; i < stars; ++i) t = tt_->pointer_to(t);
                inner->cast_type = t;
                return inner;
            }
            take();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        default:
            fail("expected an expression");
        }
    }
};

inline ParseResult parse(std::string source) {
    return Parser(std::move(source)).run();
}

} // namespace lfcpa
