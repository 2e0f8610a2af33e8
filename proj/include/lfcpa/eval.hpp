#pragma once

// Points-to relations and the four evaluation functions over pointer
// expressions: lval (locations an expression names), rval (values it could
// yield), deref (locations read through to reach the value), ref (locations
// read at all).
//
// Sets can be symbolically universal: a universal TargetSet stands for every
// target including the unknown one (printed "T"), a universal LocSet for
// every named location (printed "T - {?}"). Relations keep a universal
// flag per row; universal sources never occur in stored relations — callers
// materialize them over the finite universe first.

#include <cstdint>
#include <map>
#include <set>
#include <string>

#include "access_path.hpp"
#include "ir.hpp"
#include "type_table.hpp"

namespace lfcpa {

using LivenessSet = std::set<AccessPath>;

// ---- constant folding over index expressions -------------------------------

struct ConstValue {
    bool known = false;
    std::int64_t value = 0;

    static ConstValue unknown() { return {}; }
    static ConstValue of(std::int64_t v) { return {true, v}; }
};

inline ConstValue const_eval(const IndexExpr& e) {
    switch (e.kind) {
    case IndexExpr::Kind::Lit:
        return ConstValue::of(e.lit);
    case IndexExpr::Kind::Var:
        return ConstValue::unknown();
    case IndexExpr::Kind::Add:
    case IndexExpr::Kind::Sub:
    case IndexExpr::Kind::Mul: {
        ConstValue a = const_eval(*e.a);
        ConstValue b = const_eval(*e.b);
        if (!a.known || !b.known) return ConstValue::unknown();
        switch (e.kind) {
        case IndexExpr::Kind::Add: return ConstValue::of(a.value + b.value);
        case IndexExpr::Kind::Sub: return ConstValue::of(a.value - b.value);
        default: return ConstValue::of(a.value * b.value);
        }
    }
    case IndexExpr::Kind::Neg: {
        ConstValue a = const_eval(*e.a);
        return a.known ? ConstValue::of(-a.value) : ConstValue::unknown();
    }
    }
    return ConstValue::unknown();
}

// ---- symbolic sets ---------------------------------------------------------

class TargetSet {
public:
    static TargetSet universal() {
        TargetSet s;
        s.universal_ = true;
        return s;
    }

    void add(Target t) {
        if (!universal_) elems_.insert(std::move(t));
    }
    void add_all(const TargetSet& o) {
        if (universal_) return;
        if (o.universal_) {
            make_universal();
            return;
        }
        elems_.insert(o.elems_.begin(), o.elems_.end());
    }
    void make_universal() {
        universal_ = true;
        elems_.clear();
    }

    bool is_universal() const { return universal_; }
    bool empty() const { return !universal_ && elems_.empty(); }
    std::size_t size() const { return elems_.size(); }
    const std::set<Target>& elems() const {
        if (universal_) throw internal_error("enumerating a universal target set");
        return elems_;
    }
    bool contains(const Target& t) const {
        return universal_ || elems_.count(t) > 0;
    }

    friend bool operator==(const TargetSet&, const TargetSet&) = default;

private:
    bool universal_ = false;
    std::set<Target> elems_;
};

class LocSet {
public:
    static LocSet universal() {
        LocSet s;
        s.universal_ = true;
        return s;
    }

    void add(AccessPath p) {
        if (!universal_) elems_.insert(std::move(p));
    }
    void add_all(const LocSet& o) {
        if (universal_) return;
        if (o.universal_) {
            make_universal();
            return;
        }
        elems_.insert(o.elems_.begin(), o.elems_.end());
    }
    void make_universal() {
        universal_ = true;
        elems_.clear();
    }

    bool is_universal() const { return universal_; }
    bool empty() const { return !universal_ && elems_.empty(); }
    std::size_t size() const { return elems_.size(); }
    const std::set<AccessPath>& elems() const {
        if (universal_) throw internal_error("enumerating a universal location set");
        return elems_;
    }

    friend bool operator==(const LocSet&, const LocSet&) = default;

private:
    bool universal_ = false;
    std::set<AccessPath> elems_;
};

// Locations named by a set of targets: drops the unknown target.
inline LocSet locs_of(const TargetSet& ts) {
    if (ts.is_universal()) return LocSet::universal();
    LocSet out;
    for (const auto& t : ts.elems())
        if (!t.is_unknown()) out.add(t.path());
    return out;
}

inline TargetSet targets_of(const LocSet& ls) {
    if (ls.is_universal()) return TargetSet::universal();
    TargetSet out;
    for (const auto& p : ls.elems()) out.add(Target::loc(p));
    return out;
}

inline std::set<AccessPath> materialize(const LocSet& s,
                                        const std::set<AccessPath>& when_universal) {
    return s.is_universal() ? when_universal : s.elems();
}

// ---- points-to relations ----------------------------------------------------

class PointsToRel {
public:
    void add(const AccessPath& src, Target t) { rows_[src].add(std::move(t)); }
    void add_row(const AccessPath& src, const TargetSet& ts) {
        if (ts.empty()) return;
        rows_[src].add_all(ts);
    }
    void add_all(const PointsToRel& o) {
        for (const auto& [src, ts] : o.rows_) rows_[src].add_all(ts);
    }

    bool empty() const { return rows_.empty(); }
    const std::map<AccessPath, TargetSet>& rows() const { return rows_; }

    // May-image: union over sources that overlap the query.
    TargetSet image(const AccessPath& q) const {
        TargetSet out;
        for (const auto& [src, ts] : rows_)
            if (overlaps(src, q)) out.add_all(ts);
        return out;
    }

    // Single-row lookup under structural equality.
    TargetSet image_exact(const AccessPath& q) const {
        auto it = rows_.find(q);
        return it == rows_.end() ? TargetSet{} : it->second;
    }

    // Removes whole rows under structural equality (strong update).
    void erase_sources(const std::set<AccessPath>& kill) {
        for (const auto& k : kill) rows_.erase(k);
    }

    // Keeps rows whose source overlaps the live set.
    PointsToRel restricted(const LivenessSet& live) const {
        PointsToRel out;
        for (const auto& [src, ts] : rows_)
            if (overlaps_any(src, live)) out.rows_[src] = ts;
        return out;
    }

    // Pair count with universal rows weighted as `universal_weight`.
    std::size_t pair_count(std::size_t universal_weight) const {
        std::size_t n = 0;
        for (const auto& [src, ts] : rows_)
            n += ts.is_universal() ? universal_weight : ts.size();
        return n;
    }

    bool has_pair(const AccessPath& src, const Target& t) const {
        auto it = rows_.find(src);
        return it != rows_.end() && it->second.contains(t);
    }

    friend bool operator==(const PointsToRel&, const PointsToRel&) = default;

private:
    std::map<AccessPath, TargetSet> rows_;
};

// ---- relation views ---------------------------------------------------------

// What the evaluation functions consult. May-mode answers with every target
// of every overlapping source. Must-mode answers only when the relation
// pins the source to one definite target: sources that are approximate, or
// rows naming several targets or an approximate one, yield nothing — and a
// source with no stored row could point anywhere, which is universal.
class RelView {
public:
    static RelView may(const PointsToRel& a) {
        RelView v;
        v.rel_ = &a;
        return v;
    }
    static RelView must_of(const PointsToRel& a, const TypeTable& tt) {
        RelView v;
        v.rel_ = &a;
        v.tt_ = &tt;
        v.must_ = true;
        return v;
    }

    bool is_must() const { return must_; }

    TargetSet image(const AccessPath& src) const {
        if (!must_) return rel_->image(src);
        if (is_approx(src, *tt_)) return {};
        TargetSet row = rel_->image_exact(src);
        if (row.empty()) return TargetSet::universal();
        if (row.is_universal()) return {};
        if (row.size() == 1) {
            const Target& t = *row.elems().begin();
            if (t.is_unknown()) return TargetSet::universal();
            if (!is_approx(t.path(), *tt_)) return row;
        }
        return {};
    }

private:
    const PointsToRel* rel_ = nullptr;
    const TypeTable* tt_ = nullptr;
    bool must_ = false;
};

inline RelView must(const PointsToRel& a, const TypeTable& tt) {
    return RelView::must_of(a, tt);
}

// ---- path extension (collapses at unions) -----------------------------------

inline AccessPath extend_field(const AccessPath& p, const std::string& f,
                               const TypeTable& tt) {
    if (is_union_total(p, tt)) return p;
    return p.with(Segment::field(f));
}

inline AccessPath extend_elem(const AccessPath& p, ConstValue c,
                              const TypeTable& tt) {
    if (is_union_total(p, tt)) return p;
    return p.with(c.known ? Segment::offset(c.value) : Segment::bottom());
}

namespace detail {

inline LocSet extend_field_set(const LocSet& s, const std::string& f,
                               const TypeTable& tt) {
    if (s.is_universal()) return s;
    LocSet out;
    for (const auto& p : s.elems()) out.add(extend_field(p, f, tt));
    return out;
}

inline LocSet extend_elem_set(const LocSet& s, ConstValue c, const TypeTable& tt) {
    if (s.is_universal()) return s;
    LocSet out;
    for (const auto& p : s.elems()) out.add(extend_elem(p, c, tt));
    return out;
}

// Shifts the trailing array offset of each location by `delta`; a location
// with no trailing offset has no shifted name, which widens everything to
// the universal set.
inline TargetSet shift_paths(const LocSet& locs, ConstValue delta) {
    if (locs.is_universal()) return TargetSet::universal();
    TargetSet out;
    for (const auto& p : locs.elems()) {
        if (p.segs.empty()) return TargetSet::universal();
        const Segment& last = p.segs.back();
        if (!last.is_offset() && !last.is_bottom())
            return TargetSet::universal();
        AccessPath q = p;
        if (last.is_bottom() || !delta.known)
            q.segs.back() = Segment::bottom();
        else
            q.segs.back() = Segment::offset(last.offset_value() + delta.value);
        out.add(Target::loc(q));
    }
    return out;
}

} // namespace detail

// ---- evaluation -------------------------------------------------------------

struct EvalContext {
    const TypeTable& tt;
    int node = -1; // label of the statement under evaluation
};

inline LocSet lval(const PointerExpr& e, const RelView& A, const EvalContext& cx);
inline TargetSet rval(const PointerExpr& e, const RelView& A, const EvalContext& cx);

inline LocSet lval(const PointerExpr& e, const RelView& A, const EvalContext& cx) {
    switch (e.kind) {
    case PointerExpr::Kind::Var:
        return [&] {
            LocSet s;
            s.add(AccessPath::of_var(e.name));
            return s;
        }();
    case PointerExpr::Kind::DotField:
        return detail::extend_field_set(lval(*e.base, A, cx), e.name, cx.tt);
    case PointerExpr::Kind::ArrowField:
        return detail::extend_field_set(locs_of(rval(*e.base, A, cx)), e.name,
                                        cx.tt);
    case PointerExpr::Kind::Deref:
        return locs_of(rval(*e.base, A, cx));
    case PointerExpr::Kind::Index:
        return detail::extend_elem_set(lval(*e.base, A, cx), const_eval(e.idx),
                                       cx.tt);
    case PointerExpr::Kind::Plus:
    case PointerExpr::Kind::Malloc:
    case PointerExpr::Kind::AddrOf:
    case PointerExpr::Kind::AddrOfPlus:
        return {}; // value forms name no location
    }
    throw internal_error("unhandled pointer expression kind");
}

inline TargetSet rval(const PointerExpr& e, const RelView& A, const EvalContext& cx) {
    switch (e.kind) {
    case PointerExpr::Kind::AddrOf:
        return targets_of(lval(*e.base, A, cx));
    case PointerExpr::Kind::AddrOfPlus:
        return detail::shift_paths(lval(*e.base, A, cx), const_eval(e.idx));
    case PointerExpr::Kind::Malloc:
        if (cx.node <= 0)
            throw internal_error("allocation evaluated outside a statement");
        return [&] {
            TargetSet s;
            s.add(Target::loc(make_heap_loc(cx.node)));
            return s;
        }();
    case PointerExpr::Kind::Plus: {
        TargetSet base = rval(*e.base, A, cx);
        if (base.is_universal()) return base;
        LocSet locs;
        for (const auto& t : base.elems()) {
            if (t.is_unknown()) return TargetSet::universal();
            locs.add(t.path());
        }
        return detail::shift_paths(locs, const_eval(e.idx));
    }
    default: {
        LocSet locs = lval(e, A, cx);
        if (locs.is_universal()) return TargetSet::universal();
        TargetSet out;
        for (const auto& p : locs.elems()) out.add_all(A.image(p));
        return out;
    }
    }
}

// Locations read through to reach the expression's value.
inline LocSet deref(const PointerExpr& e, const RelView& A, const EvalContext& cx) {
    switch (e.kind) {
    case PointerExpr::Kind::DotField:
    case PointerExpr::Kind::Index:
    case PointerExpr::Kind::Plus:
        return deref(*e.base, A, cx);
    case PointerExpr::Kind::ArrowField:
    case PointerExpr::Kind::Deref: {
        LocSet out = lval(*e.base, A, cx);
        out.add_all(deref(*e.base, A, cx));
        return out;
    }
    case PointerExpr::Kind::Var:
    case PointerExpr::Kind::Malloc:
    case PointerExpr::Kind::AddrOf:
    case PointerExpr::Kind::AddrOfPlus:
        return {};
    }
    throw internal_error("unhandled pointer expression kind");
}

// Everything a read of the expression touches: the dereference chain plus
// the location ultimately read.
inline LocSet ref(const PointerExpr& e, const RelView& A, const EvalContext& cx) {
    switch (e.kind) {
    case PointerExpr::Kind::AddrOf:
    case PointerExpr::Kind::AddrOfPlus:
        return deref(*e.base, A, cx);
    case PointerExpr::Kind::Plus:
        return ref(*e.base, A, cx);
    case PointerExpr::Kind::Malloc:
        return {};
    default: {
        LocSet out = deref(e, A, cx);
        out.add_all(lval(e, A, cx));
        return out;
    }
    }
}

} // namespace lfcpa
