#pragma once

// Per-statement transfer-function ingredients, computed against the current
// points-to estimate and the liveness after the statement:
//
//   def     locations the statement may write
//   kill    locations it certainly overwrites (strong update; never
//           approximate names)
//   ref     locations it reads — for an assignment, the pointers traversed
//           on the left, plus the whole right-hand side when some written
//           location is live afterwards
//   pointee targets the stored value may have
//
// Symbolically universal results are materialized over the finite universe:
// def/ref over the pointer-bearing locations, kill over the strongly
// updatable ones. The pointee set stays symbolic.

#include <set>

#include "eval.hpp"
#include "ir.hpp"
#include "type_table.hpp"

namespace lfcpa {

struct ExtractorResult {
    std::set<AccessPath> def, kill, ref;
    TargetSet pointee;

    friend bool operator==(const ExtractorResult&, const ExtractorResult&) = default;
};

inline ExtractorResult extract(const Statement& st, int node,
                               const PointsToRel& ain, const LivenessSet& lout,
                               const TypeTable& tt, const Universe& uni) {
    ExtractorResult r;
    EvalContext cx{tt, node};
    RelView A = RelView::may(ain);

    switch (st.kind) {
    case Statement::Kind::PtrAssign: {
        LocSet def_l = lval(st.lhs, A, cx);
        r.def = materialize(def_l, uni.sources);

        LocSet kill_l = lval(st.lhs, must(ain, tt), cx);
        if (kill_l.is_universal()) {
            r.kill = uni.killable;
        } else {
            for (const auto& p : kill_l.elems())
                if (!is_approx(p, tt)) r.kill.insert(p);
        }

        bool def_live = false;
        if (def_l.is_universal()) {
            def_live = !lout.empty();
        } else {
            for (const auto& p : def_l.elems())
                if (overlaps_any(p, lout)) { def_live = true; break; }
        }
        LocSet ref_l = deref(st.lhs, A, cx);
        if (def_live) ref_l.add_all(ref(st.rhs, A, cx));
        r.ref = materialize(ref_l, uni.sources);

        r.pointee = rval(st.rhs, A, cx);
        return r;
    }
    case Statement::Kind::Use: {
        LocSet ref_l;
        for (const auto& e : st.use_exprs) ref_l.add_all(ref(e, A, cx));
        r.ref = materialize(ref_l, uni.sources);
        return r;
    }
    case Statement::Kind::IntAssign:
    case Statement::Kind::Other:
    case Statement::Kind::Start:
    case Statement::Kind::End:
        return r;
    }
    return r;
}

} // namespace lfcpa
