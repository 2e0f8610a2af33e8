#pragma once

// Parsed syntax tree. Expressions are untyped at parse time; the checker
// fills in Expr::type before lowering.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "type_table.hpp"

namespace lfcpa {

struct SrcLoc {
    int line = 0;
    int col = 0;
};

struct parse_error : std::runtime_error {
    parse_error(const SrcLoc& at, const std::string& msg)
        : std::runtime_error(std::to_string(at.line) + ":" +
                             std::to_string(at.col) + ": " + msg),
          loc(at) {}
    SrcLoc loc;
};

struct Expr {
    enum class Kind {
        Var, IntLit, Dot, Arrow, Deref, Index, AddrOf,
        Add, Sub, Mul, Neg, Malloc
    };

    Kind kind = Kind::Var;
    SrcLoc loc;
    std::string name;                 // Var: variable; Dot/Arrow: field
    std::int64_t lit = 0;             // IntLit
    std::unique_ptr<Expr> a, b;       // operands
    const Type* malloc_type = nullptr; // Malloc: sizeof argument
    const Type* cast_type = nullptr;   // Malloc: optional cast
    const Type* type = nullptr;        // set by the checker
};

using ExprPtr = std::unique_ptr<Expr>;

struct AstStmt {
    enum class Kind { Assign, Use, Other, If, While, Return };

    Kind kind = Kind::Other;
    SrcLoc loc;
    ExprPtr lhs, rhs;                 // Assign
    std::vector<ExprPtr> args;        // Use arguments / Return value
    ExprPtr cond_l, cond_r;           // If/While condition operands
    std::string cond_op;              // comparison operator, may be empty
    std::vector<AstStmt> body;        // If: then-branch; While: loop body
    std::vector<AstStmt> else_body;   // If only
};

struct AstProc {
    std::string name;
    std::vector<std::string> locals;
    std::vector<AstStmt> body;
    bool implicit = false; // bare top-level statements
};

struct SourceProgram {
    std::vector<std::string> globals;
    std::vector<AstProc> procs;
};

struct ParseResult {
    std::unique_ptr<TypeTable> types;
    SourceProgram program;
};

} // namespace lfcpa
