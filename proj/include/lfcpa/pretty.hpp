#pragma once

// Renderers: IR expressions/statements for analysis dumps, and a program
// printer over the parsed tree whose output parses back to the same
// program (anonymous record types come back under their synthetic tags).

#include <string>

#include "ast.hpp"
#include "ir.hpp"
#include "type_table.hpp"

namespace lfcpa {

// ---- IR index expressions --------------------------------------------------

namespace detail {

inline int idx_level(const IndexExpr& e) {
    switch (e.kind) {
    case IndexExpr::Kind::Add:
    case IndexExpr::Kind::Sub: return 0;
    case IndexExpr::Kind::Mul: return 1;
    case IndexExpr::Kind::Neg: return 2;
    default: return 3;
    }
}

inline std::string render_idx(const IndexExpr& e, int need) {
    int lvl = idx_level(e);
    std::string s;
    switch (e.kind) {
    case IndexExpr::Kind::Lit: s = std::to_string(e.lit); break;
    case IndexExpr::Kind::Var: s = e.var; break;
    case IndexExpr::Kind::Add:
        s = render_idx(*e.a, 0) + " + " + render_idx(*e.b, 1);
        break;
    case IndexExpr::Kind::Sub:
        s = render_idx(*e.a, 0) + " - " + render_idx(*e.b, 1);
        break;
    case IndexExpr::Kind::Mul:
        s = render_idx(*e.a, 1) + " * " + render_idx(*e.b, 2);
        break;
    case IndexExpr::Kind::Neg:
        s = "-" + render_idx(*e.a, 2);
        break;
    }
    return lvl < need ? "(" + s + ")" : s;
}

} // namespace detail

inline std::string render(const IndexExpr& e) { return detail::render_idx(e, 0); }

// ---- Types -----------------------------------------------------------------

// Renders a declaration of `name` with type `t`, e.g. "struct B *x[10]".
inline std::string render_decl(const Type* t, const std::string& name) {
    std::string dims;
    while (t->kind == TypeKind::Array) {
        dims += "[" + std::to_string(t->extent) + "]";
        t = t->elem;
    }
    std::string stars;
    while (t->kind == TypeKind::Pointer) {
        stars += "*";
        t = t->pointee;
    }
    std::string base;
    switch (t->kind) {
    case TypeKind::Scalar: base = t->name; break;
    case TypeKind::Struct: base = "struct " + t->name; break;
    case TypeKind::Union: base = "union " + t->name; break;
    default: throw internal_error("array of arrays slipped through declarator");
    }
    return base + " " + stars + name + dims;
}

inline std::string render_type(const Type* t) {
    if (t->kind == TypeKind::Scalar) return t->name;
    if (t->kind == TypeKind::Struct) return "struct " + t->name;
    if (t->kind == TypeKind::Union) return "union " + t->name;
    if (t->kind == TypeKind::Pointer) return render_type(t->pointee) + " *";
    return render_type(t->elem) + "[" + std::to_string(t->extent) + "]";
}

// ---- IR pointer expressions --------------------------------------------------

namespace detail {

// precedence: 0 additive, 2 unary, 3 postfix/atom
inline int pexpr_level(const PointerExpr& e) {
    switch (e.kind) {
    case PointerExpr::Kind::Plus:
    case PointerExpr::Kind::AddrOfPlus: return 0;
    case PointerExpr::Kind::Deref:
    case PointerExpr::Kind::AddrOf: return 2;
    default: return 3;
    }
}

inline std::string render_pexpr(const PointerExpr& e, int need) {
    int lvl = pexpr_level(e);
    std::string s;
    switch (e.kind) {
    case PointerExpr::Kind::Var:
        s = e.name;
        break;
    case PointerExpr::Kind::DotField:
        s = render_pexpr(*e.base, 3) + "." + e.name;
        break;
    case PointerExpr::Kind::ArrowField:
        s = render_pexpr(*e.base, 3) + "->" + e.name;
        break;
    case PointerExpr::Kind::Deref:
        s = "*" + render_pexpr(*e.base, 2);
        break;
    case PointerExpr::Kind::Index:
        s = render_pexpr(*e.base, 3) + "[" + render(e.idx) + "]";
        break;
    case PointerExpr::Kind::Plus:
        s = render_pexpr(*e.base, 2) + " + " + detail::render_idx(e.idx, 1);
        break;
    case PointerExpr::Kind::Malloc:
        s = "malloc(sizeof(" + render_type(e.malloc_type) + "))";
        if (e.type) s = "(" + render_type(e.type) + ") " + s;
        break;
    case PointerExpr::Kind::AddrOf:
        s = "&" + render_pexpr(*e.base, 2);
        break;
    case PointerExpr::Kind::AddrOfPlus:
        s = "&" + render_pexpr(*e.base, 2) + " + " + detail::render_idx(e.idx, 1);
        break;
    }
    return lvl < need ? "(" + s + ")" : s;
}

} // namespace detail

inline std::string render(const PointerExpr& e) { return detail::render_pexpr(e, 0); }

inline std::string render(const Statement& s) {
    if (!s.text.empty()) return s.text;
    switch (s.kind) {
    case Statement::Kind::PtrAssign:
        return render(s.lhs) + " = " + render(s.rhs);
    case Statement::Kind::Use: {
        std::string out = s.is_return ? "return " : "use(";
        bool first = true;
        for (const auto& e : s.use_exprs) {
            if (!first) out += ", ";
            out += render(e);
            first = false;
        }
        return s.is_return ? out : out + ")";
    }
    case Statement::Kind::IntAssign:
        return s.int_var + " = " + render(s.int_rhs);
    case Statement::Kind::Other:
        return "other";
    case Statement::Kind::Start:
        return "start";
    case Statement::Kind::End:
        return "end";
    }
    return "?";
}

// ---- Parsed-tree printer ---------------------------------------------------

namespace detail {

// precedence levels: 0 additive, 1 multiplicative, 2 unary, 3 postfix
inline int ast_level(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 0;
    case Expr::Kind::Mul: return 1;
    case Expr::Kind::Deref:
    case Expr::Kind::AddrOf:
    case Expr::Kind::Neg: return 2;
    case Expr::Kind::Malloc: return 2; // a cast may prefix it
    default: return 3;
    }
}

inline std::string print_expr(const Expr& e, int need) {
    int lvl = ast_level(e);
    std::string s;
    switch (e.kind) {
    case Expr::Kind::Var: s = e.name; break;
    case Expr::Kind::IntLit: s = std::to_string(e.lit); break;
    case Expr::Kind::Dot: s = print_expr(*e.a, 3) + "." + e.name; break;
    case Expr::Kind::Arrow: s = print_expr(*e.a, 3) + "->" + e.name; break;
    case Expr::Kind::Deref: s = "*" + print_expr(*e.a, 2); break;
    case Expr::Kind::Index:
        s = print_expr(*e.a, 3) + "[" + print_expr(*e.b, 0) + "]";
        break;
    case Expr::Kind::AddrOf: s = "&" + print_expr(*e.a, 2); break;
    case Expr::Kind::Add:
        s = print_expr(*e.a, 0) + " + " + print_expr(*e.b, 1);
        break;
    case Expr::Kind::Sub:
        s = print_expr(*e.a, 0) + " - " + print_expr(*e.b, 1);
        break;
    case Expr::Kind::Mul:
        s = print_expr(*e.a, 1) + " * " + print_expr(*e.b, 2);
        break;
    case Expr::Kind::Neg: s = "-" + print_expr(*e.a, 2); break;
    case Expr::Kind::Malloc:
        s = "malloc(sizeof(" + render_type(e.malloc_type) + "))";
        if (e.cast_type)
            s = "(" + render_type(e.cast_type) + ") " + s;
        break;
    }
    return lvl < need ? "(" + s + ")" : s;
}

} // namespace detail

inline std::string print_expr(const Expr& e) { return detail::print_expr(e, 0); }

namespace detail {

inline void print_stmts(const std::vector<AstStmt>& body, int depth, std::string& out);

inline void print_stmt(const AstStmt& s, int depth, std::string& out) {
    std::string ind(static_cast<std::size_t>(depth) * 4, ' ');
    switch (s.kind) {
    case AstStmt::Kind::Assign:
        out += ind + print_expr(*s.lhs) + " = " + print_expr(*s.rhs) + ";\n";
        return;
    case AstStmt::Kind::Use: {
        out += ind + "use(";
        bool first = true;
        for (const auto& a : s.args) {
            if (!first) out += ", ";
            out += print_expr(*a);
            first = false;
        }
        out += ");\n";
        return;
    }
    case AstStmt::Kind::Other:
        out += ind + "other;\n";
        return;
    case AstStmt::Kind::Return:
        out += ind + "return" +
               (s.args.empty() ? "" : " " + print_expr(*s.args.front())) + ";\n";
        return;
    case AstStmt::Kind::If:
    case AstStmt::Kind::While: {
        out += ind + (s.kind == AstStmt::Kind::If ? "if (" : "while (");
        out += print_expr(*s.cond_l);
        if (!s.cond_op.empty()) out += " " + s.cond_op + " " + print_expr(*s.cond_r);
        out += ") {\n";
        print_stmts(s.body, depth + 1, out);
        out += ind + "}";
        if (!s.else_body.empty()) {
            out += " else {\n";
            print_stmts(s.else_body, depth + 1, out);
            out += ind + "}";
        }
        out += "\n";
        return;
    }
    }
}

inline void print_stmts(const std::vector<AstStmt>& body, int depth, std::string& out) {
    for (const auto& s : body) print_stmt(s, depth, out);
}

} // namespace detail

// Prints a parsed program back to source. Record definitions come first
// (anonymous ones under their synthetic tags), then variables one per line,
// then procedures. print(parse(print(parse(t)))) == print(parse(t)).
inline std::string print_program(const SourceProgram& prog, const TypeTable& tt) {
    std::string out;
    for (const Type* rec : tt.record_decl_order()) {
        out += (rec->kind == TypeKind::Union ? "union " : "struct ") + rec->name + " {\n";
        for (const auto& f : rec->fields)
            out += "    " + render_decl(f.type, f.name) + ";\n";
        out += "};\n";
    }
    auto print_vars = [&](const std::vector<std::string>& names, int depth) {
        std::string ind(static_cast<std::size_t>(depth) * 4, ' ');
        for (const auto& v : names)
            out += ind + render_decl(tt.var_type(v), v) + ";\n";
    };
    print_vars(prog.globals, 0);
    for (const auto& p : prog.procs) {
        if (p.implicit) {
            detail::print_stmts(p.body, 0, out);
            continue;
        }
        out += "proc " + p.name + " {\n";
        print_vars(p.locals, 1);
        detail::print_stmts(p.body, 1, out);
        out += "}\n";
    }
    return out;
}

} // namespace lfcpa
