#pragma once

// Analysis IR: integer index expressions, pointer expressions, statements,
// and the per-procedure control-flow graph. Expressions are immutable trees
// shared by value; statements are plain copyable values.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "type_table.hpp"

namespace lfcpa {

// ---- Integer expressions (array indices, pointer arithmetic) ------------

struct IndexExpr {
    enum class Kind { Lit, Var, Add, Sub, Mul, Neg };

    Kind kind = Kind::Lit;
    std::int64_t lit = 0;
    std::string var;
    std::shared_ptr<const IndexExpr> a, b;

    static IndexExpr literal(std::int64_t v) {
        IndexExpr e;
        e.kind = Kind::Lit;
        e.lit = v;
        return e;
    }
    static IndexExpr variable(std::string name) {
        IndexExpr e;
        e.kind = Kind::Var;
        e.var = std::move(name);
        return e;
    }
    static IndexExpr binary(Kind k, IndexExpr lhs, IndexExpr rhs) {
        IndexExpr e;
        e.kind = k;
        e.a = std::make_shared<IndexExpr>(std::move(lhs));
        e.b = std::make_shared<IndexExpr>(std::move(rhs));
        return e;
    }
    static IndexExpr negate(IndexExpr operand) {
        IndexExpr e;
        e.kind = Kind::Neg;
        e.a = std::make_shared<IndexExpr>(std::move(operand));
        return e;
    }
};

// ---- Pointer (path) expressions ------------------------------------------
//
// Var, DotField, ArrowField, Deref, Index and Plus form the base grammar;
// Malloc, AddrOf and AddrOfPlus may appear only at the top of a right-hand
// side, except that Deref may wrap AddrOfPlus directly (the one &-form that
// does not fold away).

struct PointerExpr {
    enum class Kind {
        Var, DotField, ArrowField, Deref, Index, Plus,
        Malloc, AddrOf, AddrOfPlus
    };

    Kind kind = Kind::Var;
    std::string name;                        // Var: variable, fields: field name
    std::shared_ptr<const PointerExpr> base; // operand
    IndexExpr idx;                           // Index, Plus, AddrOfPlus
    const Type* malloc_type = nullptr;       // Malloc: sizeof argument
    const Type* type = nullptr;              // static type, set by the frontend

    static PointerExpr var(std::string n, const Type* t = nullptr) {
        PointerExpr e;
        e.kind = Kind::Var;
        e.name = std::move(n);
        e.type = t;
        return e;
    }
    static PointerExpr unary(Kind k, PointerExpr b, const Type* t = nullptr) {
        PointerExpr e;
        e.kind = k;
        e.base = std::make_shared<PointerExpr>(std::move(b));
        e.type = t;
        return e;
    }
    static PointerExpr field(Kind k, PointerExpr b, std::string f,
                             const Type* t = nullptr) {
        PointerExpr e = unary(k, std::move(b), t);
        e.name = std::move(f);
        return e;
    }
    static PointerExpr with_index(Kind k, PointerExpr b, IndexExpr i,
                                  const Type* t = nullptr) {
        PointerExpr e = unary(k, std::move(b), t);
        e.idx = std::move(i);
        return e;
    }
    static PointerExpr malloc_of(const Type* sized, const Type* t = nullptr) {
        PointerExpr e;
        e.kind = Kind::Malloc;
        e.malloc_type = sized;
        e.type = t;
        return e;
    }
};

// ---- Statements -----------------------------------------------------------

struct Statement {
    enum class Kind {
        PtrAssign, // lhs = rhs, both pointer-typed (or collapsed unions)
        Use,       // use(e...), conditions, returns, lowered non-pointer writes
        IntAssign, // i = pure integer expression; Other to the analysis
        Other,     // no pointer effect
        Start,
        End
    };

    Kind kind = Kind::Other;
    PointerExpr lhs, rhs;                  // PtrAssign
    std::vector<PointerExpr> use_exprs;    // Use
    std::string int_var;                   // IntAssign target
    IndexExpr int_rhs;                     // IntAssign source
    std::optional<std::string> clobber_int; // Use that overwrites an int var
    bool is_return = false;                // Use lowered from a return
    std::string text;                      // rendered source, for dumps

    static Statement ptr_assign(PointerExpr l, PointerExpr r, std::string text = {}) {
        Statement s;
        s.kind = Kind::PtrAssign;
        s.lhs = std::move(l);
        s.rhs = std::move(r);
        s.text = std::move(text);
        return s;
    }
    static Statement use(std::vector<PointerExpr> exprs, std::string text = {}) {
        Statement s;
        s.kind = Kind::Use;
        s.use_exprs = std::move(exprs);
        s.text = std::move(text);
        return s;
    }
    static Statement int_assign(std::string var, IndexExpr rhs, std::string text = {}) {
        Statement s;
        s.kind = Kind::IntAssign;
        s.int_var = std::move(var);
        s.int_rhs = std::move(rhs);
        s.text = std::move(text);
        return s;
    }
    static Statement other(std::string text = "other") {
        Statement s;
        s.kind = Kind::Other;
        s.text = std::move(text);
        return s;
    }
};

// ---- Control-flow graph -----------------------------------------------------

struct CfgNode {
    int id = 0;
    Statement stmt;
    std::vector<int> succs; // branch nodes: [taken, not-taken]
    std::vector<int> preds;
};

struct Cfg {
    std::string proc = "main";
    std::vector<CfgNode> nodes; // nodes[id].id == id; 0 = Start, last = End
    int start_id = 0;
    int end_id = 0;
    std::vector<std::string> vars;  // visible variables (globals + locals)
    std::vector<int> malloc_sites;  // labels of allocation statements
    std::map<int, const Type*> heap_types; // site label -> allocated type

    const CfgNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
    CfgNode& node(int id) { return nodes.at(static_cast<std::size_t>(id)); }
    int statement_count() const { return static_cast<int>(nodes.size()) - 2; }

    bool is_malloc_node(int id) const {
        const CfgNode& n = node(id);
        return n.stmt.kind == Statement::Kind::PtrAssign &&
               n.stmt.rhs.kind == PointerExpr::Kind::Malloc;
    }
};

// Heap location introduced by the allocation at `label`. Errors when the
// node is not an allocation.
inline AccessPath get_heap_loc(const Cfg& cfg, int label) {
    if (label <= 0 || label > cfg.statement_count() || !cfg.is_malloc_node(label))
        throw internal_error("no allocation at node " + std::to_string(label));
    return make_heap_loc(label);
}

} // namespace lfcpa
