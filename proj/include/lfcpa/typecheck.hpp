#pragma once

// Static checks over the parsed tree. Annotates every expression with its
// type and rejects programs the analysis has no meaning for: undeclared
// names, dereferencing non-pointers, whole-array assignment, pointer
// arithmetic on non-pointers, malloc whose cast disagrees with its sizeof.

#include <string>

#include "ast.hpp"
#include "type_table.hpp"

namespace lfcpa {

namespace detail {

class Checker {
public:
    explicit Checker(TypeTable& tt) : tt_(tt) {}

    void check_program(SourceProgram& prog) {
        for (auto& p : prog.procs) check_block(p.body);
    }

private:
    TypeTable& tt_;

    [[noreturn]] static void fail(const Expr& e, const std::string& msg) {
        throw parse_error(e.loc, msg);
    }
    [[noreturn]] static void fail(const AstStmt& s, const std::string& msg) {
        throw parse_error(s.loc, msg);
    }

    static bool is_lvalue_shape(const Expr& e) {
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

    const Type* check(Expr& e) {
        e.type = infer(e);
        return e.type;
    }

    const Type* infer(Expr& e) {
        switch (e.kind) {
        case Expr::Kind::Var: {
            const Type* t = tt_.var_type(e.name);
            if (!t) fail(e, "undeclared variable '" + e.name + "'");
            return t;
        }
        case Expr::Kind::IntLit:
            return tt_.int_type();
        case Expr::Kind::Dot: {
            const Type* t = check(*e.a);
            if (t->kind != TypeKind::Struct && t->kind != TypeKind::Union)
                fail(e, "member access on a value that is not a struct or union");
            const FieldDecl* f = t->find_field(e.name);
            if (!f) fail(e, "no member named '" + e.name + "'");
            return f->type;
        }
        case Expr::Kind::Arrow: {
            const Type* t = check(*e.a);
            if (t->kind != TypeKind::Pointer ||
                (t->pointee->kind != TypeKind::Struct &&
                 t->pointee->kind != TypeKind::Union))
                fail(e, "'->' needs a pointer to a struct or union");
            const FieldDecl* f = t->pointee->find_field(e.name);
            if (!f) fail(e, "no member named '" + e.name + "'");
            return f->type;
        }
        case Expr::Kind::Deref: {
            const Type* t = check(*e.a);
            if (t->kind != TypeKind::Pointer)
                fail(e, "cannot dereference a non-pointer value");
            return t->pointee;
        }
        case Expr::Kind::Index: {
            const Type* t = check(*e.a);
            const Type* ti = check(*e.b);
            if (ti->kind != TypeKind::Scalar)
                fail(*e.b, "array index must be an integer");
            if (t->kind == TypeKind::Array) return t->elem;
            if (t->kind == TypeKind::Pointer) return t->pointee;
            fail(e, "subscript on a value that is neither array nor pointer");
        }
        case Expr::Kind::AddrOf: {
            if (!is_lvalue_shape(*e.a))
                fail(e, "'&' needs a named location");
            const Type* t = check(*e.a);
            return tt_.pointer_to(t);
        }
        case Expr::Kind::Add:
        case Expr::Kind::Sub: {
            const Type* ta = check(*e.a);
            const Type* tb = check(*e.b);
            bool sub = e.kind == Expr::Kind::Sub;
            if (ta->kind == TypeKind::Scalar && tb->kind == TypeKind::Scalar)
                return tt_.int_type();
            if (ta->kind == TypeKind::Pointer && tb->kind == TypeKind::Scalar)
                return ta;
            if (!sub && ta->kind == TypeKind::Scalar && tb->kind == TypeKind::Pointer)
                return tb;
            if (sub && ta->kind == TypeKind::Scalar && tb->kind == TypeKind::Pointer)
                fail(e, "cannot subtract a pointer from an integer");
            if (ta->kind == TypeKind::Pointer && tb->kind == TypeKind::Pointer)
                fail(e, "cannot combine two pointers with arithmetic");
            fail(e, sub ? "invalid operands of '-'" : "invalid operands of '+'");
        }
        case Expr::Kind::Mul: {
            const Type* ta = check(*e.a);
            const Type* tb = check(*e.b);
            if (ta->kind != TypeKind::Scalar || tb->kind != TypeKind::Scalar)
                fail(e, "'*' needs integer operands");
            return tt_.int_type();
        }
        case Expr::Kind::Neg: {
            const Type* t = check(*e.a);
            if (t->kind != TypeKind::Scalar)
                fail(e, "unary '-' needs an integer operand");
            return tt_.int_type();
        }
        case Expr::Kind::Malloc: {
            const Type* t = tt_.pointer_to(e.malloc_type);
            if (e.cast_type && e.cast_type != t)
                fail(e, "cast disagrees with the allocated type");
            return t;
        }
        }
        throw internal_error("unhandled expression kind");
    }

    void check_cond_operand(Expr& e) {
        const Type* t = check(e);
        if (t->is_aggregate())
            fail(e, "condition operand has an aggregate type");
    }

    void check_block(std::vector<AstStmt>& body) {
        for (auto& s : body) check_stmt(s);
    }

    void check_stmt(AstStmt& s) {
        switch (s.kind) {
        case AstStmt::Kind::Assign: {
            if (!is_lvalue_shape(*s.lhs))
                fail(s, "left side of '=' is not assignable");
            const Type* tl = check(*s.lhs);
            const Type* tr = check(*s.rhs);
            if (tl->kind == TypeKind::Array)
                fail(s, "cannot assign whole arrays");
            if (tl->kind == TypeKind::Scalar && tr->kind == TypeKind::Scalar)
                return; // int/char interchange freely
            if (tl != tr)
                fail(s, "assignment between incompatible types");
            return;
        }
        case AstStmt::Kind::Use:
        case AstStmt::Kind::Return:
            for (auto& a : s.args) check(*a);
            return;
        case AstStmt::Kind::Other:
            return;
        case AstStmt::Kind::If:
        case AstStmt::Kind::While: {
            check_cond_operand(*s.cond_l);
            if (s.cond_r) {
                check_cond_operand(*s.cond_r);
                bool rel = s.cond_op == "<" || s.cond_op == "<=" ||
                           s.cond_op == ">" || s.cond_op == ">=";
                if (rel && (s.cond_l->type->kind != TypeKind::Scalar ||
                            s.cond_r->type->kind != TypeKind::Scalar))
                    fail(s, "ordered comparison needs integer operands");
                if (!rel && s.cond_l->type != s.cond_r->type &&
                    !(s.cond_l->type->kind == TypeKind::Scalar &&
                      s.cond_r->type->kind == TypeKind::Scalar))
                    fail(s, "comparison between incompatible types");
            }
            check_block(s.body);
            check_block(s.else_body);
            return;
        }
        }
    }
};

} // namespace detail

inline void typecheck(SourceProgram& prog, TypeTable& tt) {
    detail::Checker(tt).check_program(prog);
}

} // namespace lfcpa
