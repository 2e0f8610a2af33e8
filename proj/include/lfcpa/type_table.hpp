#pragma once

// Types of the mini-language and the program-wide table that resolves
// access paths to types. Types are interned; a const Type* is stable for
// the lifetime of the table.

#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "access_path.hpp"

namespace lfcpa {

enum class TypeKind { Scalar, Pointer, Struct, Union, Array };

struct Type;

struct FieldDecl {
    std::string name;
    const Type* type = nullptr;
};

struct Type {
    TypeKind kind = TypeKind::Scalar;
    std::string name;                  // "int"/"char", struct/union tag
    const Type* pointee = nullptr;     // Pointer
    const Type* elem = nullptr;        // Array
    std::int64_t extent = 0;           // Array
    std::vector<FieldDecl> fields;     // Struct, Union

    const FieldDecl* find_field(const std::string& f) const {
        for (const auto& fd : fields)
            if (fd.name == f) return &fd;
        return nullptr;
    }
    bool is_pointer_kind() const { return kind == TypeKind::Pointer; }
    bool is_aggregate() const {
        return kind == TypeKind::Struct || kind == TypeKind::Union ||
               kind == TypeKind::Array;
    }
};

// Does the type contain a pointer anywhere (transitively)? Union names
// collapse whole instances, so a union that holds a pointer acts as a
// pointer-bearing location under its own name.
inline bool contains_pointer(const Type* t) {
    if (!t) return false;
    switch (t->kind) {
    case TypeKind::Pointer: return true;
    case TypeKind::Scalar: return false;
    case TypeKind::Array: return contains_pointer(t->elem);
    case TypeKind::Struct:
    case TypeKind::Union:
        for (const auto& f : t->fields)
            if (contains_pointer(f.type)) return true;
        return false;
    }
    return false;
}

class TypeTable {
public:
    TypeTable() {
        int_ = &make(Type{TypeKind::Scalar, "int"});
        char_ = &make(Type{TypeKind::Scalar, "char"});
    }
    TypeTable(TypeTable&&) = default;
    TypeTable& operator=(TypeTable&&) = default;
    TypeTable(const TypeTable&) = delete;
    TypeTable& operator=(const TypeTable&) = delete;

    const Type* int_type() const { return int_; }
    const Type* char_type() const { return char_; }

    const Type* pointer_to(const Type* t) {
        auto it = pointers_.find(t);
        if (it != pointers_.end()) return it->second;
        Type p;
        p.kind = TypeKind::Pointer;
        p.pointee = t;
        const Type* made = &make(std::move(p));
        pointers_.emplace(t, made);
        return made;
    }
    const Type* array_of(const Type* elem, std::int64_t extent) {
        auto key = std::make_pair(elem, extent);
        auto it = arrays_.find(key);
        if (it != arrays_.end()) return it->second;
        Type a;
        a.kind = TypeKind::Array;
        a.elem = elem;
        a.extent = extent;
        const Type* made = &make(std::move(a));
        arrays_.emplace(key, made);
        return made;
    }

    // Record definitions are created empty and filled in afterwards so that
    // self-referential fields (struct B { struct B *f; }) work.
    Type* begin_record(TypeKind kind, std::string tag) {
        Type t;
        t.kind = kind;
        t.name = std::move(tag);
        Type* made = &make(std::move(t));
        if (!made->name.empty()) named_[record_key(kind, made->name)] = made;
        decl_order_.push_back(made);
        return made;
    }
    const Type* named_record(TypeKind kind, const std::string& tag) const {
        auto it = named_.find(record_key(kind, tag));
        return it == named_.end() ? nullptr : it->second;
    }
    const std::vector<const Type*>& record_decl_order() const { return decl_order_; }

    // -- variables ------------------------------------------------------

    void declare_var(const std::string& name, const Type* type) {
        if (vars_.count(name))
            throw internal_error("duplicate variable declaration: " + name);
        vars_.emplace(name, type);
        var_order_.push_back(name);
    }
    const Type* var_type(const std::string& name) const {
        auto it = vars_.find(name);
        return it == vars_.end() ? nullptr : it->second;
    }
    const std::vector<std::string>& var_order() const { return var_order_; }

    // -- heap sites -------------------------------------------------------

    void set_heap_type(int label, const Type* type) { heap_[label] = type; }
    const Type* heap_type(int label) const {
        auto it = heap_.find(label);
        return it == heap_.end() ? nullptr : it->second;
    }

    // -- path resolution --------------------------------------------------

    // Type of the cell a path names, or nullptr when the path does not fit
    // the declared layout (undeclared root, bad field, segment past a
    // scalar). Paths never extend past a union: a path whose resolved type
    // is a union names the whole collapsed instance.
    const Type* resolve(const AccessPath& p) const {
        const Type* t = p.root.is_heap() ? heap_type(p.root.heap_label())
                                         : var_type(p.root.var_name());
        for (const auto& s : p.segs) {
            if (!t) return nullptr;
            switch (t->kind) {
            case TypeKind::Struct: {
                if (!s.is_field()) return nullptr;
                const FieldDecl* f = t->find_field(s.field_name());
                t = f ? f->type : nullptr;
                break;
            }
            case TypeKind::Array:
                if (s.is_field()) return nullptr;
                t = t->elem; // any index, in range or not, names an element
                break;
            default:
                return nullptr; // segment after scalar/pointer/union
            }
        }
        return t;
    }

private:
    static std::string record_key(TypeKind kind, const std::string& tag) {
        return (kind == TypeKind::Union ? "u:" : "s:") + tag;
    }
    Type& make(Type t) {
        arena_.push_back(std::move(t));
        return arena_.back();
    }

    std::deque<Type> arena_; // stable addresses
    const Type* int_ = nullptr;
    const Type* char_ = nullptr;
    std::map<const Type*, const Type*> pointers_;
    std::map<std::pair<const Type*, std::int64_t>, const Type*> arrays_;
    std::map<std::string, Type*> named_;
    std::vector<const Type*> decl_order_;
    std::map<std::string, const Type*> vars_;
    std::vector<std::string> var_order_;
    std::map<int, const Type*> heap_;
};

// ---- Location predicates ------------------------------------------------

inline bool is_heap(const AccessPath& p) { return p.root.is_heap(); }

namespace detail {
inline const Type* resolve_checked(const AccessPath& p, const TypeTable& tt) {
    const Type* t = tt.resolve(p);
    if (!t) throw internal_error("unknown location type: " + p.render(true));
    return t;
}
} // namespace detail

// True iff the location's cell has pointer type. Errors on paths that do
// not fit any declared layout.
inline bool is_pointer(const AccessPath& p, const TypeTable& tt) {
    return detail::resolve_checked(p, tt)->kind == TypeKind::Pointer;
}

// True iff the location names a collapsed union instance.
inline bool is_union(const AccessPath& p, const TypeTable& tt) {
    return detail::resolve_checked(p, tt)->kind == TypeKind::Union;
}

// Total variants used by the engine, where synthesized names may fall
// outside the declared layout (they then satisfy neither predicate).
inline bool is_pointer_total(const AccessPath& p, const TypeTable& tt) {
    const Type* t = tt.resolve(p);
    return t && t->kind == TypeKind::Pointer;
}
inline bool is_union_total(const AccessPath& p, const TypeTable& tt) {
    const Type* t = tt.resolve(p);
    return t && t->kind == TypeKind::Union;
}

// A location is approximate when its name may stand for more than one cell
// or for a statically unknown cell: anything heap-rooted (one name per
// allocation site), any ⊥ offset, and collapsed unions. Approximate
// locations never admit strong updates.
inline bool is_approx(const AccessPath& p, const TypeTable& tt) {
    if (is_heap(p) || p.has_bottom()) return true;
    return is_union_total(p, tt);
}

// May the location hold pointer values under its own name? Pointer cells,
// whole heap cells (the source set admits every heap root), and collapsed
// unions that contain a pointer.
inline bool is_pointer_source(const AccessPath& p, const TypeTable& tt) {
    if (p.root.is_heap() && p.segs.empty()) return true;
    const Type* t = tt.resolve(p);
    if (!t) return false;
    if (t->kind == TypeKind::Pointer) return true;
    return t->kind == TypeKind::Union && contains_pointer(t);
}

// ---- Named-location universe ---------------------------------------------
//
// Every location derivable from the declarations: for arrays, each constant
// index 0..n-1 plus the ⊥ variant, so that any synthesized name (including
// out-of-range constants) overlaps something here. Used to materialize
// symbolic universal sets and to bound the solver.

struct Universe {
    std::set<AccessPath> all;      // every named location (aggregates included)
    std::set<AccessPath> sources;  // pointer-bearing subset, plus heap roots
    std::set<AccessPath> killable; // non-approximate subset of `all`
};

namespace detail {
inline void walk_universe(const Type* t, const AccessPath& p, const TypeTable& tt,
                          Universe& u) {
    u.all.insert(p);
    if (is_pointer_source(p, tt)) u.sources.insert(p);
    if (!is_approx(p, tt)) u.killable.insert(p);
    if (!t) return;
    switch (t->kind) {
    case TypeKind::Struct:
        for (const auto& f : t->fields)
            walk_universe(f.type, p.with(Segment::field(f.name)), tt, u);
        break;
    case TypeKind::Array:
        for (std::int64_t i = 0; i < t->extent; ++i)
            walk_universe(t->elem, p.with(Segment::offset(i)), tt, u);
        walk_universe(t->elem, p.with(Segment::bottom()), tt, u);
        break;
    default:
        break; // scalars, pointers: leaf; unions: collapsed at p itself
    }
}
} // namespace detail

inline Universe build_universe(const TypeTable& tt,
                               const std::vector<std::string>& vars,
                               const std::vector<int>& heap_sites) {
    Universe u;
    for (const auto& v : vars)
        detail::walk_universe(tt.var_type(v), AccessPath::of_var(v), tt, u);
    for (int site : heap_sites)
        detail::walk_universe(tt.heap_type(site), AccessPath::of_heap(site), tt, u);
    return u;
}

} // namespace lfcpa
