#pragma once

// The coupled fixpoint: a backward liveness pass and a forward points-to
// pass alternate in rounds, each continuing from the other's latest
// estimate, until one whole round changes nothing. Both passes are
// monotone over finite lattices, so the result is the least fixpoint and
// independent of visit order.
//
//   Lout(n) = ∅ at End, otherwise ∪ Lin(succ)
//   Lin(n)  = (Lout(n) − Kill(n)) ∪ Ref(n)
//   Ain(n)  = Lin(n) × {?} at Start, otherwise (∪ Aout(pred)) restricted
//             to Lin(n)
//   Aout(n) = ((Ain(n) − Kill(n) × T) ∪ Def(n) × Pointee(n)) restricted
//             to Lout(n)
//
// In baseline mode every location counts as live everywhere and only the
// points-to rounds run.

#include <deque>
#include <vector>

#include "cfg_build.hpp"
#include "extract.hpp"
#include "ir.hpp"

namespace lfcpa {

enum class SolveMode { Lfcpa, Baseline };

// Scheduling order of the worklists; any order converges to the same
// fixpoint, which the tests exercise.
enum class WorklistOrder { Natural, Reversed };

struct SolveOptions {
    SolveMode mode = SolveMode::Lfcpa;
    WorklistOrder order = WorklistOrder::Natural;
    bool collect_rounds = false;
};

struct NodeFacts {
    LivenessSet lin, lout;
    PointsToRel ain, aout;

    friend bool operator==(const NodeFacts&, const NodeFacts&) = default;
};

struct SolveStats {
    int rounds = 0;
    long node_visits = 0;
};

struct AnalysisResult {
    std::vector<NodeFacts> facts; // indexed by node id
    Universe universe;
    SolveStats stats;
    std::vector<std::vector<NodeFacts>> round_snapshots; // if requested
};

// ---- single equation applications ------------------------------------------

namespace detail {

inline LivenessSet compute_lout(const Cfg& cfg, const std::vector<NodeFacts>& facts,
                                int n) {
    if (n == cfg.end_id) return {};
    LivenessSet out;
    for (int s : cfg.node(n).succs)
        out.insert(facts[static_cast<std::size_t>(s)].lin.begin(),
                   facts[static_cast<std::size_t>(s)].lin.end());
    return out;
}

inline LivenessSet compute_lin(const LivenessSet& lout, const ExtractorResult& ex) {
    LivenessSet in;
    for (const auto& p : lout)
        if (!ex.kill.count(p)) in.insert(p);
    in.insert(ex.ref.begin(), ex.ref.end());
    return in;
}

inline PointsToRel compute_ain(const Cfg& cfg, const std::vector<NodeFacts>& facts,
                               int n) {
    const NodeFacts& f = facts[static_cast<std::size_t>(n)];
    if (n == cfg.start_id) {
        PointsToRel a;
        for (const auto& p : f.lin) a.add(p, Target::unknown());
        return a;
    }
    PointsToRel a;
    for (int p : cfg.node(n).preds)
        a.add_all(facts[static_cast<std::size_t>(p)].aout);
    return a.restricted(f.lin);
}

inline PointsToRel compute_aout(const PointsToRel& ain, const LivenessSet& lout,
                                const ExtractorResult& ex) {
    PointsToRel t = ain;
    t.erase_sources(ex.kill);
    for (const auto& d : ex.def) t.add_row(d, ex.pointee);
    return t.restricted(lout);
}

} // namespace detail

class Solver {
public:
    Solver(const Cfg& cfg, TypeTable& tt, SolveOptions opts)
        : cfg_(cfg), tt_(tt), opts_(opts) {}

    AnalysisResult run() {
        install_heap_types(cfg_, tt_);
        AnalysisResult res;
        res.universe = build_universe(tt_, cfg_.vars, cfg_.malloc_sites);
        uni_ = &res.universe;
        facts_.assign(cfg_.nodes.size(), NodeFacts{});

        if (opts_.mode == SolveMode::Baseline)
            for (auto& f : facts_) {
                f.lin = res.universe.sources;
                f.lout = res.universe.sources;
            }

        std::size_t s = res.universe.all.size();
        visit_budget_ = static_cast<long>(cfg_.nodes.size()) *
                            static_cast<long>(s + s * (s + 2) + 4) * 4 +
                        10000;

        for (;;) {
            ++stats_.rounds;
            bool changed = false;
            if (opts_.mode == SolveMode::Lfcpa) changed |= liveness_pass();
            changed |= pointsto_pass();
            if (opts_.collect_rounds) res.round_snapshots.push_back(facts_);
            if (!changed) break;
        }

        res.facts = std::move(facts_);
        res.stats = stats_;
        return res;
    }

private:
    const Cfg& cfg_;
    TypeTable& tt_;
    SolveOptions opts_;
    const Universe* uni_ = nullptr;
    std::vector<NodeFacts> facts_;
    SolveStats stats_;
    long visit_budget_ = 0;

    void charge_visit() {
        ++stats_.node_visits;
        if (stats_.node_visits > visit_budget_)
            throw internal_error("analysis failed to converge within its budget");
    }

    std::vector<int> seed_order(bool backward) const {
        std::vector<int> ids;
        ids.reserve(cfg_.nodes.size());
        for (const auto& n : cfg_.nodes) ids.push_back(n.id);
        bool descending = backward == (opts_.order == WorklistOrder::Natural);
        if (descending) std::reverse(ids.begin(), ids.end());
        return ids;
    }

    bool liveness_pass() {
        std::deque<int> q;
        std::vector<char> queued(cfg_.nodes.size(), 1);
        for (int id : seed_order(true)) q.push_back(id);
        bool changed = false;
        while (!q.empty()) {
            int n = q.front();
            q.pop_front();
            queued[static_cast<std::size_t>(n)] = 0;
            charge_visit();
            NodeFacts& f = facts_[static_cast<std::size_t>(n)];
            LivenessSet lout = detail::compute_lout(cfg_, facts_, n);
            ExtractorResult ex =
                extract(cfg_.node(n).stmt, n, f.ain, lout, tt_, *uni_);
            LivenessSet lin = detail::compute_lin(lout, ex);
            bool lin_grew = lin != f.lin;
            if (lout != f.lout || lin_grew) changed = true;
            f.lout = std::move(lout);
            f.lin = std::move(lin);
            if (lin_grew)
                for (int p : cfg_.node(n).preds)
                    if (!queued[static_cast<std::size_t>(p)]) {
                        queued[static_cast<std::size_t>(p)] = 1;
                        q.push_back(p);
                    }
        }
        return changed;
    }

    bool pointsto_pass() {
        std::deque<int> q;
        std::vector<char> queued(cfg_.nodes.size(), 1);
        for (int id : seed_order(false)) q.push_back(id);
        bool changed = false;
        while (!q.empty()) {
            int n = q.front();
            q.pop_front();
            queued[static_cast<std::size_t>(n)] = 0;
            charge_visit();
            NodeFacts& f = facts_[static_cast<std::size_t>(n)];
            PointsToRel ain = detail::compute_ain(cfg_, facts_, n);
            ExtractorResult ex =
                extract(cfg_.node(n).stmt, n, ain, f.lout, tt_, *uni_);
            PointsToRel aout = detail::compute_aout(ain, f.lout, ex);
            bool aout_grew = aout != f.aout;
            if (ain != f.ain || aout_grew) changed = true;
            f.ain = std::move(ain);
            f.aout = std::move(aout);
            if (aout_grew)
                for (int s : cfg_.node(n).succs)
                    if (!queued[static_cast<std::size_t>(s)]) {
                        queued[static_cast<std::size_t>(s)] = 1;
                        q.push_back(s);
                    }
        }
        return changed;
    }
};

inline AnalysisResult solve(const Cfg& cfg, TypeTable& tt, SolveOptions opts = {}) {
    return Solver(cfg, tt, opts).run();
}

// One more application of every equation must be a no-op on a fixpoint.
inline bool equations_stable(const Cfg& cfg, TypeTable& tt,
                             const AnalysisResult& res) {
    install_heap_types(cfg, tt);
    for (const auto& node : cfg.nodes) {
        int n = node.id;
        const NodeFacts& f = res.facts[static_cast<std::size_t>(n)];
        LivenessSet lout = detail::compute_lout(cfg, res.facts, n);
        if (lout != f.lout) return false;
        ExtractorResult ex = extract(node.stmt, n, f.ain, f.lout, tt, res.universe);
        if (detail::compute_lin(lout, ex) != f.lin) return false;
        if (detail::compute_ain(cfg, res.facts, n) != f.ain) return false;
        if (detail::compute_aout(f.ain, f.lout, ex) != f.aout) return false;
    }
    return true;
}

// Extractor values at the fixpoint, for dumps and tests.
inline std::vector<ExtractorResult> node_extractors(const Cfg& cfg, TypeTable& tt,
                                                    const AnalysisResult& res) {
    install_heap_types(cfg, tt);
    std::vector<ExtractorResult> out;
    out.reserve(cfg.nodes.size());
    for (const auto& node : cfg.nodes)
        out.push_back(extract(node.stmt, node.id,
                              res.facts[static_cast<std::size_t>(node.id)].ain,
                              res.facts[static_cast<std::size_t>(node.id)].lout,
                              tt, res.universe));
    return out;
}

} // namespace lfcpa
