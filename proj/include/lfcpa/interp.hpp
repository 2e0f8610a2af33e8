#pragma once

// A small concrete interpreter over the same graphs the analysis runs on,
// used as a testing oracle. Memory is a map from concrete cells (variable
// or allocation instance, plus constant segments; unions collapse to one
// cell per instance) to values. Branches follow a scripted outcome
// sequence, so any path through the graph can be exercised — the analysis
// is path-insensitive, so every scripted path must be covered by it.
//
// Anything undefined — dereferencing an uninitialized or wild pointer,
// out-of-range constant indexing, reading through a dangling name — stops
// the run; the trace up to that point still counts.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "access_path.hpp"
#include "ir.hpp"
#include "solver.hpp"
#include "type_table.hpp"

namespace lfcpa {

struct ConcreteCell {
    bool heap = false;
    std::string var; // !heap
    int site = 0;    // heap: allocation label
    int serial = 0;  // heap: instance number at that label
    std::vector<Segment> segs;

    friend auto operator<=>(const ConcreteCell&, const ConcreteCell&) = default;

    AccessPath abstract() const {
        AccessPath p = heap ? AccessPath::of_heap(site) : AccessPath::of_var(var);
        p.segs = segs;
        return p;
    }

    std::string render() const {
        std::string s = heap ? "o" + std::to_string(site) + "#" + std::to_string(serial)
                             : var;
        for (const auto& seg : segs) s += "." + seg.render();
        return s;
    }
};

struct ConcreteValue {
    enum class Kind { Cell, Int, Uninit, Wild };
    Kind kind = Kind::Uninit;
    ConcreteCell cell; // Kind::Cell
    std::int64_t num = 0;

    static ConcreteValue of_cell(ConcreteCell c) {
        ConcreteValue v;
        v.kind = Kind::Cell;
        v.cell = std::move(c);
        return v;
    }
    static ConcreteValue of_int(std::int64_t n) {
        ConcreteValue v;
        v.kind = Kind::Int;
        v.num = n;
        return v;
    }
    static ConcreteValue uninit() { return {}; }
    static ConcreteValue wild() {
        ConcreteValue v;
        v.kind = Kind::Wild;
        return v;
    }

    friend auto operator<=>(const ConcreteValue&, const ConcreteValue&) = default;
};

using ConcreteState = std::map<ConcreteCell, ConcreteValue>;

struct TraceStep {
    int node = 0;
    ConcreteState state; // on entry
    std::set<ConcreteCell> reads;
    std::vector<ConcreteCell> writes;
};

struct RunResult {
    std::vector<TraceStep> steps;
    bool reached_end = false;
    bool halted = false;      // undefined behavior stopped the run
    std::string halt_reason;
    int fuel_left = 0;
};

struct RunConfig {
    std::vector<bool> branches; // consumed at each branch; exhausted -> false
    int fuel = 1000;
};

namespace detail {

struct TraceHalt {
    std::string reason;
};

class Interp {
public:
    Interp(const Cfg& cfg, const TypeTable& tt, RunConfig config)
        : cfg_(cfg), tt_(tt), config_(std::move(config)) {}

    RunResult run() {
        for (const auto& v : cfg_.vars)
            alloc(ConcreteCell{false, v, 0, 0, {}}, tt_.var_type(v));

        RunResult out;
        out.fuel_left = config_.fuel;
        int pc = cfg_.node(cfg_.start_id).succs.at(0);
        while (pc != cfg_.end_id && out.fuel_left > 0) {
            const CfgNode& node = cfg_.node(pc);
            --out.fuel_left;
            step_ = TraceStep{};
            step_.node = pc;
            step_.state = state_;
            try {
                exec(node.stmt);
            } catch (const TraceHalt& h) {
                out.steps.push_back(std::move(step_));
                out.halted = true;
                out.halt_reason = h.reason;
                return out;
            }
            int next;
            if (node.succs.size() > 1) {
                bool taken = branch_at_ < config_.branches.size()
                                 ? config_.branches[branch_at_]
                                 : false;
                ++branch_at_;
                next = node.succs.at(taken ? 0 : 1);
            } else {
                next = node.succs.at(0);
            }
            out.steps.push_back(std::move(step_));
            pc = next;
        }
        out.reached_end = pc == cfg_.end_id;
        return out;
    }

private:
    const Cfg& cfg_;
    const TypeTable& tt_;
    RunConfig config_;
    ConcreteState state_;
    std::map<int, int> alloc_count_;
    std::size_t branch_at_ = 0;
    TraceStep step_;

    [[noreturn]] static void halt(std::string reason) { throw TraceHalt{std::move(reason)}; }

    // Registers every value cell under `cell`, uninitialized.
    void alloc(const ConcreteCell& cell, const Type* t) {
        switch (t->kind) {
        case TypeKind::Scalar:
        case TypeKind::Pointer:
        case TypeKind::Union: // one collapsed cell per instance
            state_[cell] = ConcreteValue::uninit();
            return;
        case TypeKind::Struct:
            for (const auto& f : t->fields) {
                ConcreteCell c = cell;
                c.segs.push_back(Segment::field(f.name));
                alloc(c, f.type);
            }
            return;
        case TypeKind::Array:
            for (std::int64_t i = 0; i < t->extent; ++i) {
                ConcreteCell c = cell;
                c.segs.push_back(Segment::offset(i));
                alloc(c, t->elem);
            }
            return;
        }
    }

    struct CellLoc {
        ConcreteCell cell;
        const Type* type = nullptr;
        bool in_union = false;
    };

    const Type* type_of_cell(const ConcreteCell& c) {
        const Type* t = tt_.resolve(c.abstract());
        if (!t) halt("pointer into no declared layout");
        return t;
    }

    CellLoc extend(CellLoc l, const Segment& seg, const Type* next) {
        if (!l.in_union) l.cell.segs.push_back(seg);
        l.type = next;
        l.in_union = l.in_union || next->kind == TypeKind::Union;
        return l;
    }

    std::int64_t eval_int(const IndexExpr& e) {
        switch (e.kind) {
        case IndexExpr::Kind::Lit:
            return e.lit;
        case IndexExpr::Kind::Var: {
            ConcreteCell c{false, e.var, 0, 0, {}};
            auto it = state_.find(c);
            if (it == state_.end()) halt("integer read through no cell");
            step_.reads.insert(c);
            if (it->second.kind != ConcreteValue::Kind::Int)
                halt("uninitialized value in an integer expression");
            return it->second.num;
        }
        case IndexExpr::Kind::Add:
            return eval_int(*e.a) + eval_int(*e.b);
        case IndexExpr::Kind::Sub:
            return eval_int(*e.a) - eval_int(*e.b);
        case IndexExpr::Kind::Mul:
            return eval_int(*e.a) * eval_int(*e.b);
        case IndexExpr::Kind::Neg:
            return -eval_int(*e.a);
        }
        halt("unevaluable integer expression");
    }

    CellLoc deref_value(const ConcreteValue& v) {
        switch (v.kind) {
        case ConcreteValue::Kind::Cell: {
            CellLoc l;
            l.cell = v.cell;
            l.type = type_of_cell(v.cell);
            l.in_union = l.type->kind == TypeKind::Union;
            return l;
        }
        case ConcreteValue::Kind::Uninit:
            halt("dereference of an uninitialized pointer");
        case ConcreteValue::Kind::Wild:
            halt("dereference of a wild pointer");
        case ConcreteValue::Kind::Int:
            halt("dereference of a non-pointer value");
        }
        halt("dereference of a non-pointer value");
    }

    CellLoc loc_of(const PointerExpr& e) {
        switch (e.kind) {
        case PointerExpr::Kind::Var: {
            CellLoc l;
            l.cell = ConcreteCell{false, e.name, 0, 0, {}};
            l.type = tt_.var_type(e.name);
            l.in_union = l.type->kind == TypeKind::Union;
            return l;
        }
        case PointerExpr::Kind::DotField: {
            CellLoc l = loc_of(*e.base);
            const FieldDecl* f = l.type->find_field(e.name);
            if (!f) throw internal_error("field vanished: " + e.name);
            return extend(std::move(l), Segment::field(e.name), f->type);
        }
        case PointerExpr::Kind::ArrowField: {
            CellLoc l = deref_value(val_of(*e.base));
            if (l.type->kind != TypeKind::Struct && l.type->kind != TypeKind::Union)
                halt("pointer does not reach a struct or union");
            const FieldDecl* f = l.type->find_field(e.name);
            if (!f) halt("pointer reaches a layout without this member");
            return extend(std::move(l), Segment::field(e.name), f->type);
        }
        case PointerExpr::Kind::Deref:
            return deref_value(val_of(*e.base));
        case PointerExpr::Kind::Index: {
            CellLoc l = loc_of(*e.base);
            std::int64_t i = eval_int(e.idx);
            if (l.type->kind != TypeKind::Array || i < 0 || i >= l.type->extent)
                halt("array index out of range");
            return extend(std::move(l), Segment::offset(i), l.type->elem);
        }
        default:
            throw internal_error("expression is not a location");
        }
    }

    ConcreteValue shift_cell(const ConcreteValue& v, std::int64_t delta) {
        if (v.kind == ConcreteValue::Kind::Uninit) return v;
        if (v.kind != ConcreteValue::Kind::Cell) return ConcreteValue::wild();
        ConcreteCell c = v.cell;
        if (c.segs.empty() || !c.segs.back().is_offset())
            return ConcreteValue::wild();
        c.segs.back() = Segment::offset(c.segs.back().offset_value() + delta);
        return ConcreteValue::of_cell(std::move(c));
    }

    ConcreteValue val_of(const PointerExpr& e) {
        switch (e.kind) {
        case PointerExpr::Kind::AddrOf:
            return ConcreteValue::of_cell(loc_of(*e.base).cell);
        case PointerExpr::Kind::AddrOfPlus: {
            CellLoc l = loc_of(*e.base);
            std::int64_t delta = eval_int(e.idx);
            ConcreteCell c = l.cell;
            if (c.segs.empty() || !c.segs.back().is_offset())
                return ConcreteValue::wild();
            c.segs.back() = Segment::offset(c.segs.back().offset_value() + delta);
            return ConcreteValue::of_cell(std::move(c));
        }
        case PointerExpr::Kind::Plus:
            return shift_cell(val_of(*e.base), eval_int(e.idx));
        case PointerExpr::Kind::Malloc: {
            int serial = ++alloc_count_[step_.node];
            ConcreteCell root{true, "", step_.node, serial, {}};
            alloc(root, tt_.heap_type(step_.node));
            return ConcreteValue::of_cell(std::move(root));
        }
        default: {
            CellLoc l = loc_of(e);
            auto it = state_.find(l.cell);
            if (it == state_.end())
                halt("read through a dangling or out-of-range pointer");
            step_.reads.insert(l.cell);
            return it->second;
        }
        }
    }

    void write(const ConcreteCell& cell, ConcreteValue v) {
        auto it = state_.find(cell);
        if (it == state_.end())
            halt("write through a dangling or out-of-range pointer");
        it->second = std::move(v);
        step_.writes.push_back(cell);
    }

    void exec(const Statement& st) {
        switch (st.kind) {
        case Statement::Kind::PtrAssign: {
            ConcreteValue v = val_of(st.rhs);
            CellLoc l = loc_of(st.lhs);
            write(l.cell, std::move(v));
            return;
        }
        case Statement::Kind::Use:
            for (const auto& e : st.use_exprs) (void)val_of(e);
            if (st.clobber_int)
                write(ConcreteCell{false, *st.clobber_int, 0, 0, {}},
                      ConcreteValue::uninit());
            return;
        case Statement::Kind::IntAssign: {
            std::int64_t v = eval_int(st.int_rhs);
            write(ConcreteCell{false, st.int_var, 0, 0, {}},
                  ConcreteValue::of_int(v));
            return;
        }
        case Statement::Kind::Other:
            return;
        case Statement::Kind::Start:
        case Statement::Kind::End:
            return;
        }
    }
};

} // namespace detail

inline RunResult run_program(const Cfg& cfg, const TypeTable& tt,
                             RunConfig config = {}) {
    return detail::Interp(cfg, tt, std::move(config)).run();
}

// ---- soundness check against an analysis result -----------------------------
//
// For every trace point i and pointer-bearing cell p whose entry value is
// still observably read at some later step (before being overwritten), the
// analysis at node(i) must list p as live, and must cover the concrete
// (cell, value) pair: some stored pair's source overlaps p and its target
// abstracts the value. A read is "observable" when it feeds a use, a
// condition, a return, or an assignment whose own result is observable —
// the operands of a dead assignment don't count, mirroring how the
// transfer functions skip the right-hand side of a dead definition. The
// unknown target stands for uninitialized cells only; a wild value needs a
// universal row.

struct SoundnessViolation {
    std::size_t step = 0;
    int node = 0;
    ConcreteCell cell;
    std::string detail;
};

struct SoundnessReport {
    std::vector<SoundnessViolation> violations;
    long witnesses = 0;

    bool ok() const { return violations.empty(); }
};

namespace detail {

inline bool target_covers(const Target& t, const ConcreteValue& v) {
    if (t.is_unknown()) return v.kind == ConcreteValue::Kind::Uninit;
    return v.kind == ConcreteValue::Kind::Cell &&
           overlaps(t.path(), v.cell.abstract());
}

inline bool ain_covers(const PointsToRel& ain, const AccessPath& src,
                       const ConcreteValue& v) {
    for (const auto& [s, ts] : ain.rows()) {
        if (!overlaps(s, src)) continue;
        if (ts.is_universal()) return true;
        for (const auto& t : ts.elems())
            if (target_covers(t, v)) return true;
    }
    return false;
}

// Which of each step's reads fed an observable value? Uses, conditions and
// returns observe their reads outright; an assignment's reads matter only
// while the cell it writes is still wanted downstream. A dead assignment
// still touches its operands, but the analysis is free to ignore that.
inline std::vector<std::set<ConcreteCell>> observed_reads(const Cfg& cfg,
                                                          const RunResult& run) {
    std::vector<std::set<ConcreteCell>> counted(run.steps.size());
    std::set<ConcreteCell> wanted;
    for (std::size_t j = run.steps.size(); j-- > 0;) {
        const TraceStep& s = run.steps[j];
        const Statement& st = cfg.node(s.node).stmt;
        bool live_def = false;
        for (const auto& w : s.writes)
            if (wanted.count(w)) live_def = true;
        for (const auto& w : s.writes) wanted.erase(w);
        if (st.kind == Statement::Kind::Use || live_def) {
            counted[j] = s.reads;
            for (const auto& r : s.reads) wanted.insert(r);
        }
    }
    return counted;
}

} // namespace detail

inline SoundnessReport check_soundness(const Cfg& cfg, const RunResult& run,
                                       const AnalysisResult& res,
                                       const TypeTable& tt) {
    SoundnessReport rep;
    std::vector<std::set<ConcreteCell>> counted = detail::observed_reads(cfg, run);
    for (std::size_t i = 0; i < run.steps.size(); ++i) {
        const TraceStep& at = run.steps[i];
        const NodeFacts& facts = res.facts[static_cast<std::size_t>(at.node)];
        for (const auto& [cell, value] : at.state) {
            AccessPath abs = cell.abstract();
            if (!is_pointer_source(abs, tt)) continue;

            // Is the entry value still observably read, before any overwrite?
            bool witnessed = false;
            for (std::size_t j = i; j < run.steps.size(); ++j) {
                if (counted[j].count(cell)) {
                    witnessed = true;
                    break;
                }
                bool overwritten = false;
                for (const auto& w : run.steps[j].writes)
                    if (w == cell) { overwritten = true; break; }
                if (overwritten) break;
            }
            if (!witnessed) continue;
            ++rep.witnesses;

            if (!overlaps_any(abs, facts.lin)) {
                rep.violations.push_back(
                    {i, at.node, cell,
                     "read later but not live: " + cell.render()});
                continue;
            }
            if (value.kind == ConcreteValue::Kind::Uninit ||
                value.kind == ConcreteValue::Kind::Wild ||
                value.kind == ConcreteValue::Kind::Cell) {
                if (!detail::ain_covers(facts.ain, abs, value))
                    rep.violations.push_back(
                        {i, at.node, cell,
                         "value not covered by the points-to pairs: " +
                             cell.render()});
            }
        }
    }
    return rep;
}

} // namespace lfcpa
