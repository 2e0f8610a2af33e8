#pragma once

// Lowers the checked parse tree to analysis statements.
//
//  * pointer assignments become PtrAssign over pointer expressions, with
//    p[e] rewritten to *(p + e) and &-forms folded or kept per the IR rules
//  * aggregate assignments are expanded member-by-member; assignments to a
//    pointer-bearing union become a single collapsed PtrAssign
//  * integer writes through paths become Use of the paths they read, so the
//    pointers they travel through stay live
//  * i = <pure integer expression> keeps its concrete meaning (IntAssign)
//    but contributes nothing to the pointer analysis
//  * conditions and returns become Use of their pointer-relevant operands

#include <string>
#include <vector>

#include "ast.hpp"
#include "ir.hpp"
#include "pretty.hpp"
#include "type_table.hpp"

namespace lfcpa {

struct NormalStmt {
    enum class Kind { Stmt, If, While };
    Kind kind = Kind::Stmt;
    SrcLoc loc;
    Statement stmt;                    // Kind::Stmt
    std::vector<PointerExpr> cond_exprs; // If/While: reads of the condition
    std::string cond_text;
    std::vector<NormalStmt> body, else_body;
};

struct NormalProc {
    std::string name;
    std::vector<std::string> vars; // globals + locals, declaration order
    std::vector<NormalStmt> body;
};

struct NormalProgram {
    std::vector<NormalProc> procs;
};

namespace detail {

class Lowerer {
public:
    Lowerer(const TypeTable& tt) : tt_(tt) {}

    std::vector<NormalStmt> lower_body(const std::vector<AstStmt>& body,
                                       bool pad_empty) {
        std::vector<NormalStmt> out;
        for (const auto& s : body) lower_stmt(s, out);
        if (out.empty() && pad_empty) {
            // Empty branch blocks still need a node so edge order is fixed.
            NormalStmt n;
            n.kind = NormalStmt::Kind::Stmt;
            n.stmt = Statement::other("skip");
            out.push_back(std::move(n));
        }
        return out;
    }

private:
    const TypeTable& tt_;

    [[noreturn]] static void fail(const Expr& e, const std::string& msg) {
        throw parse_error(e.loc, msg);
    }

    static bool is_path_shape(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::Var:
        case Expr::Kind::Dot:
        case Expr::Kind::Arrow:
        case Expr::Kind::Deref:
        case Expr::Kind::Index:
            return true;
        default:
            return false;
        }
    }

    static bool is_pure_index(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            return true;
        case Expr::Kind::Var:
            return e.type->kind == TypeKind::Scalar;
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
        case Expr::Kind::Mul:
            return is_pure_index(*e.a) && is_pure_index(*e.b);
        case Expr::Kind::Neg:
            return is_pure_index(*e.a);
        default:
            return false;
        }
    }

    IndexExpr lower_index(const Expr& e) {
        switch (e.kind) {
        case Expr::Kind::IntLit:
            return IndexExpr::literal(e.lit);
        case Expr::Kind::Var:
            if (e.type->kind != TypeKind::Scalar) break;
            return IndexExpr::variable(e.name);
        case Expr::Kind::Add:
            return IndexExpr::binary(IndexExpr::Kind::Add, lower_index(*e.a),
                                     lower_index(*e.b));
        case Expr::Kind::Sub:
            return IndexExpr::binary(IndexExpr::Kind::Sub, lower_index(*e.a),
                                     lower_index(*e.b));
        case Expr::Kind::Mul:
            return IndexExpr::binary(IndexExpr::Kind::Mul, lower_index(*e.a),
                                     lower_index(*e.b));
        case Expr::Kind::Neg:
            return IndexExpr::negate(lower_index(*e.a));
        default:
            break;
        }
        fail(e, "index and offset expressions may only read integer literals "
                "and scalar int variables");
    }

    // Builds the analysis form of a pointer-valued or path expression.
    // `top` marks right-hand-side / argument position, the only places the
    // non-compositional forms (&e, &e + k, malloc) may stand.
    PointerExpr build(const Expr& e, bool top) {
        switch (e.kind) {
        case Expr::Kind::Var:
            return PointerExpr::var(e.name, e.type);
        case Expr::Kind::Dot:
            return PointerExpr::field(PointerExpr::Kind::DotField,
                                      build(*e.a, false), e.name, e.type);
        case Expr::Kind::Arrow:
            if (e.a->kind == Expr::Kind::AddrOf) // (&b)->f == b.f
                return PointerExpr::field(PointerExpr::Kind::DotField,
                                          build(*e.a->a, false), e.name, e.type);
            return PointerExpr::field(PointerExpr::Kind::ArrowField,
                                      build(*e.a, false), e.name, e.type);
        case Expr::Kind::Deref: {
            const Expr& inner = *e.a;
            if (inner.kind == Expr::Kind::AddrOf) // *&e == e
                return build(*inner.a, false);
            if (is_shift_of_addr(inner)) // *(&q[3] + 5)
                return PointerExpr::unary(PointerExpr::Kind::Deref,
                                          build_addr_shift(inner), e.type);
            return PointerExpr::unary(PointerExpr::Kind::Deref,
                                      build(inner, false), e.type);
        }
        case Expr::Kind::Index: {
            if (e.a->type->kind == TypeKind::Array)
                return PointerExpr::with_index(PointerExpr::Kind::Index,
                                               build(*e.a, false),
                                               lower_index(*e.b), e.type);
            // p[i] on a pointer is *(p + i)
            const Type* ptr_t = e.a->type;
            PointerExpr sum =
                e.a->kind == Expr::Kind::AddrOf
                    ? PointerExpr::with_index(PointerExpr::Kind::AddrOfPlus,
                                              build(*e.a->a, false),
                                              lower_index(*e.b), ptr_t)
                    : PointerExpr::with_index(PointerExpr::Kind::Plus,
                                              build(*e.a, false),
                                              lower_index(*e.b), ptr_t);
            return PointerExpr::unary(PointerExpr::Kind::Deref, std::move(sum),
                                      e.type);
        }
        case Expr::Kind::AddrOf:
            if (!top)
                fail(e, "'&' may only stand at the top of a right-hand side "
                        "or argument, or under '*'");
            return PointerExpr::unary(PointerExpr::Kind::AddrOf,
                                      build(*e.a, false), e.type);
        case Expr::Kind::Add:
        case Expr::Kind::Sub: {
            if (is_shift_of_addr(e)) {
                if (!top)
                    fail(e, "'&' arithmetic may only stand at the top of a "
                            "right-hand side or argument, or under '*'");
                return build_addr_shift(e);
            }
            const Expr* base = e.a.get();
            const Expr* off = e.b.get();
            if (base->type->kind != TypeKind::Pointer)
                std::swap(base, off); // int + pointer
            IndexExpr idx = lower_index(*off);
            if (e.kind == Expr::Kind::Sub) idx = IndexExpr::negate(std::move(idx));
            return PointerExpr::with_index(PointerExpr::Kind::Plus,
                                           build(*base, false), std::move(idx),
                                           e.type);
        }
        case Expr::Kind::Malloc:
            fail(e, "malloc may only stand alone on a right-hand side");
        default:
            fail(e, "expression has no pointer meaning here");
        }
    }

    // &e + k / &e - k (left operand an address-of)
    static bool is_shift_of_addr(const Expr& e) {
        return (e.kind == Expr::Kind::Add || e.kind == Expr::Kind::Sub) &&
               e.a->kind == Expr::Kind::AddrOf;
    }

    PointerExpr build_addr_shift(const Expr& e) {
        IndexExpr idx = lower_index(*e.b);
        if (e.kind == Expr::Kind::Sub) idx = IndexExpr::negate(std::move(idx));
        return PointerExpr::with_index(PointerExpr::Kind::AddrOfPlus,
                                       build(*e.a->a, false), std::move(idx),
                                       e.type);
    }

    // Maximal path/pointer subexpressions of an arbitrary expression: what a
    // read of `e` touches, as far as the pointer analysis cares. Bare scalar
    // variables carry no pointer content and are dropped.
    void collect_reads(const Expr& e, std::vector<PointerExpr>& out) {
        if (e.kind == Expr::Kind::Var && e.type->kind == TypeKind::Scalar)
            return;
        if (is_path_shape(e) || e.type->kind == TypeKind::Pointer) {
            if (e.kind == Expr::Kind::Malloc)
                fail(e, "malloc may only stand alone on a right-hand side");
            out.push_back(build(e, true));
            return;
        }
        switch (e.kind) {
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
        case Expr::Kind::Mul:
            collect_reads(*e.a, out);
            collect_reads(*e.b, out);
            return;
        case Expr::Kind::Neg:
            collect_reads(*e.a, out);
            return;
        default:
            return; // literals
        }
    }

    // Member-wise expansion of an aggregate assignment.
    void expand_copy(const PointerExpr& l, const PointerExpr& r, const Type* t,
                     std::vector<Statement>& out) {
        switch (t->kind) {
        case TypeKind::Pointer:
            out.push_back(Statement::ptr_assign(l, r, render(l) + " = " + render(r)));
            return;
        case TypeKind::Union:
            if (contains_pointer(t))
                out.push_back(
                    Statement::ptr_assign(l, r, render(l) + " = " + render(r)));
            else
                out.push_back(Statement::use({l, r}, render(l) + " = " + render(r)));
            return;
        case TypeKind::Scalar:
            // keeps the traversed pointers live; the stored number is not
            // tracked
            out.push_back(Statement::use({l, r}, render(l) + " = " + render(r)));
            return;
        case TypeKind::Struct:
            for (const auto& f : t->fields) {
                PointerExpr lf = PointerExpr::field(PointerExpr::Kind::DotField,
                                                    l, f.name, f.type);
                PointerExpr rf = PointerExpr::field(PointerExpr::Kind::DotField,
                                                    r, f.name, f.type);
                expand_copy(lf, rf, f.type, out);
            }
            return;
        case TypeKind::Array:
            for (std::int64_t i = 0; i < t->extent; ++i) {
                PointerExpr le = PointerExpr::with_index(
                    PointerExpr::Kind::Index, l, IndexExpr::literal(i), t->elem);
                PointerExpr re = PointerExpr::with_index(
                    PointerExpr::Kind::Index, r, IndexExpr::literal(i), t->elem);
                expand_copy(le, re, t->elem, out);
            }
            return;
        }
    }

    void push_plain(Statement s, SrcLoc loc, std::vector<NormalStmt>& out) {
        NormalStmt n;
        n.kind = NormalStmt::Kind::Stmt;
        n.loc = loc;
        n.stmt = std::move(s);
        out.push_back(std::move(n));
    }

    void lower_assign(const AstStmt& s, std::vector<NormalStmt>& out) {
        const Type* tl = s.lhs->type;
        std::string text = print_expr(*s.lhs) + " = " + print_expr(*s.rhs);

        if (tl->kind == TypeKind::Pointer) {
            PointerExpr l = build(*s.lhs, false);
            PointerExpr r = s.rhs->kind == Expr::Kind::Malloc
                                ? PointerExpr::malloc_of(s.rhs->malloc_type,
                                                         s.rhs->type)
                                : build(*s.rhs, true);
            // render the lowered form so dumps show what is analyzed
            text = render(l) + " = " + render(r);
            push_plain(Statement::ptr_assign(std::move(l), std::move(r), text),
                       s.loc, out);
            return;
        }

        if (tl->kind == TypeKind::Struct || tl->kind == TypeKind::Union) {
            PointerExpr l = build(*s.lhs, false);
            PointerExpr r = build(*s.rhs, false);
            std::vector<Statement> pieces;
            expand_copy(l, r, tl, pieces);
            for (auto& p : pieces) push_plain(std::move(p), s.loc, out);
            return;
        }

        // integer write
        if (s.lhs->kind == Expr::Kind::Var && is_pure_index(*s.rhs)) {
            push_plain(Statement::int_assign(s.lhs->name, lower_index(*s.rhs), text),
                       s.loc, out);
            return;
        }
        std::vector<PointerExpr> reads;
        if (s.lhs->kind != Expr::Kind::Var)
            collect_reads(*s.lhs, reads);
        collect_reads(*s.rhs, reads);
        Statement st = Statement::use(std::move(reads), text);
        if (s.lhs->kind == Expr::Kind::Var)
            st.clobber_int = s.lhs->name; // value becomes unknown concretely
        push_plain(std::move(st), s.loc, out);
    }

    void lower_stmt(const AstStmt& s, std::vector<NormalStmt>& out) {
        switch (s.kind) {
        case AstStmt::Kind::Assign:
            lower_assign(s, out);
            return;
        case AstStmt::Kind::Use: {
            std::vector<PointerExpr> reads;
            std::string text = "use(";
            bool first = true;
            for (const auto& a : s.args) {
                collect_reads(*a, reads);
                if (!first) text += ", ";
                text += print_expr(*a);
                first = false;
            }
            push_plain(Statement::use(std::move(reads), text + ")"), s.loc, out);
            return;
        }
        case AstStmt::Kind::Other:
            push_plain(Statement::other(), s.loc, out);
            return;
        case AstStmt::Kind::Return: {
            std::vector<PointerExpr> reads;
            std::string text = "return";
            for (const auto& a : s.args) {
                collect_reads(*a, reads);
                text += " " + print_expr(*a);
            }
            Statement st = Statement::use(std::move(reads), text);
            st.is_return = true;
            push_plain(std::move(st), s.loc, out);
            return;
        }
        case AstStmt::Kind::If:
        case AstStmt::Kind::While: {
            NormalStmt n;
            n.kind = s.kind == AstStmt::Kind::If ? NormalStmt::Kind::If
                                                 : NormalStmt::Kind::While;
            n.loc = s.loc;
            collect_reads(*s.cond_l, n.cond_exprs);
            n.cond_text = print_expr(*s.cond_l);
            if (s.cond_r) {
                collect_reads(*s.cond_r, n.cond_exprs);
                n.cond_text += " " + s.cond_op + " " + print_expr(*s.cond_r);
            }
            n.cond_text = (n.kind == NormalStmt::Kind::If ? "if (" : "while (") +
                          n.cond_text + ")";
            n.body = lower_body(s.body, true);
            if (!s.else_body.empty())
                n.else_body = lower_body(s.else_body, true);
            out.push_back(std::move(n));
            return;
        }
        }
    }
};

} // namespace detail

inline NormalProgram normalize(const SourceProgram& prog, const TypeTable& tt) {
    NormalProgram out;
    for (const auto& p : prog.procs) {
        NormalProc np;
        np.name = p.name;
        np.vars = prog.globals;
        np.vars.insert(np.vars.end(), p.locals.begin(), p.locals.end());
        np.body = detail::Lowerer(tt).lower_body(p.body, false);
        out.procs.push_back(std::move(np));
    }
    return out;
}

} // namespace lfcpa
