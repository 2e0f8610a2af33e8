#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lfcpa/lfcpa.hpp"
#include "lfcpa/solver.hpp"
#include "support/progen.hpp"
#include "support/scalar_ref.hpp"

using namespace lfcpa;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(LFCPA_TESTDATA_DIR) + "/" + name);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

using Names = std::set<std::string>;
using PairSet = std::set<std::pair<std::string, std::string>>;

Names lnames(const LivenessSet& s) {
    Names out;
    for (const auto& p : s) out.insert(p.render());
    return out;
}

PairSet pnames(const PointsToRel& r) {
    PairSet out;
    for (const auto& [src, ts] : r.rows()) {
        if (ts.is_universal()) {
            out.insert({src.render(), "T"});
            continue;
        }
        for (const auto& t : ts.elems()) out.insert({src.render(), t.render()});
    }
    return out;
}

bool rel_subset(const PointsToRel& a, const PointsToRel& b) {
    for (const auto& [src, ts] : a.rows()) {
        if (ts.is_universal()) {
            bool ok = false;
            for (const auto& [bs, bt] : b.rows())
                if (bs == src && bt.is_universal()) ok = true;
            if (!ok) return false;
        } else {
            for (const auto& t : ts.elems())
                if (!b.has_pair(src, t)) return false;
        }
    }
    return true;
}

// Every recorded source must overlap the matching live set.
bool restricted_to(const PointsToRel& r, const LivenessSet& live) {
    for (const auto& [src, ts] : r.rows())
        if (!overlaps_any(src, live)) return false;
    return true;
}

void check_shape_invariants(const Cfg& cfg, const AnalysisResult& res) {
    const NodeFacts& start = res.facts[static_cast<std::size_t>(cfg.start_id)];
    const NodeFacts& end = res.facts[static_cast<std::size_t>(cfg.end_id)];
    CHECK(end.lout.empty());
    CHECK(end.aout.empty());
    // at entry, every live pointer is deemed to point anywhere
    PairSet want;
    for (const auto& p : start.lin) want.insert({p.render(), "?"});
    CHECK(pnames(start.ain) == want);
    for (const auto& node : cfg.nodes) {
        const NodeFacts& f = res.facts[static_cast<std::size_t>(node.id)];
        CHECK(restricted_to(f.ain, f.lin));
        CHECK(restricted_to(f.aout, f.lout));
    }
}

} // namespace

TEST_CASE("the coupled fixpoint on the heap/struct chain") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    AnalysisResult res = solve(cfg, *prog.types);
    REQUIRE(cfg.nodes.size() == 7);

    struct Want {
        int node;
        Names lin, lout;
        PairSet ain, aout;
    };
    const std::vector<Want> table = {
        {0, {"o1.g.f"}, {"o1.g.f"}, {{"o1.g.f", "?"}}, {{"o1.g.f", "?"}}},
        {1,
         {"o1.g.f"},
         {"a", "o1.g.f"},
         {{"o1.g.f", "?"}},
         {{"a", "o1"}, {"o1.g.f", "?"}}},
        {2,
         {"a", "o1.g.f"},
         {"y", "o1.g.f"},
         {{"a", "o1"}, {"o1.g.f", "?"}},
         {{"y", "o1.g"}, {"o1.g.f", "?"}}},
        {3,
         {"y", "o1.g.f"},
         {"b.f", "o1.g.f"},
         {{"y", "o1.g"}, {"o1.g.f", "?"}},
         {{"b.f", "o1.g"}, {"o1.g.f", "?"}}},
        {4,
         {"b.f", "o1.g.f"},
         {"x", "b.f", "o1.g.f"},
         {{"b.f", "o1.g"}, {"o1.g.f", "?"}},
         {{"x", "b"}, {"b.f", "o1.g"}, {"o1.g.f", "?"}}},
        {5,
         {"x", "b.f", "o1.g.f"},
         {},
         {{"x", "b"}, {"b.f", "o1.g"}, {"o1.g.f", "?"}},
         {}},
        {6, {}, {}, {}, {}},
    };
    for (const auto& w : table) {
        INFO("node " << w.node << ": " << cfg.node(w.node).stmt.text);
        const NodeFacts& f = res.facts[static_cast<std::size_t>(w.node)];
        CHECK(lnames(f.lin) == w.lin);
        CHECK(lnames(f.lout) == w.lout);
        CHECK(pnames(f.ain) == w.ain);
        CHECK(pnames(f.aout) == w.aout);
    }

    CHECK(equations_stable(cfg, *prog.types, res));
    check_shape_invariants(cfg, res);
    CHECK(res.stats.rounds >= 2);
    CHECK(res.stats.node_visits > 0);
}

TEST_CASE("dead pointers carry no points-to information") {
    // u is never read, so it never shows up in any estimate
    CompiledProgram prog = compile(
        "int i;\n"
        "int *p;\n"
        "int *u;\n"
        "p = &i;\n"
        "u = &i;\n"
        "use(*p);\n");
    const Cfg& cfg = prog.main();
    AnalysisResult res = solve(cfg, *prog.types);
    for (const auto& node : cfg.nodes) {
        const NodeFacts& f = res.facts[static_cast<std::size_t>(node.id)];
        for (const auto& [src, ts] : f.ain.rows()) CHECK(src.render() != "u");
        CHECK(lnames(f.lin).count("u") == 0);
    }
    // while p carries its target where it matters; i itself is read through
    // *p, so it is live and enters with the unknown target
    CHECK(pnames(res.facts[3].ain) == PairSet{{"p", "i"}, {"i", "?"}});
}

TEST_CASE("an empty program has an empty analysis") {
    CompiledProgram prog = compile("int i;\n");
    const Cfg& cfg = prog.main();
    AnalysisResult res = solve(cfg, *prog.types);
    REQUIRE(cfg.nodes.size() == 2);
    for (const auto& f : res.facts) {
        CHECK(f.lin.empty());
        CHECK(f.lout.empty());
        CHECK(f.ain.empty());
        CHECK(f.aout.empty());
    }
    CHECK(equations_stable(cfg, *prog.types, res));
}

TEST_CASE("both worklist orders land on the same fixpoint") {
    std::vector<std::string> sources = {slurp("heap_struct_chain.mc")};
    for (unsigned seed = 1; seed <= 10; ++seed)
        sources.push_back(progen::ScalarGen(seed).generate(25).source);

    for (std::size_t i = 0; i < sources.size(); ++i) {
        INFO("program " << i);
        CompiledProgram prog = compile(sources[i]);
        const Cfg& cfg = prog.main();
        SolveOptions nat, rev;
        rev.order = WorklistOrder::Reversed;
        AnalysisResult a = solve(cfg, *prog.types, nat);
        AnalysisResult b = solve(cfg, *prog.types, rev);
        CHECK(a.facts == b.facts);
    }
}

TEST_CASE("liveness filtering only ever shrinks the relation") {
    std::vector<std::string> sources = {slurp("heap_struct_chain.mc")};
    for (unsigned seed = 11; seed <= 22; ++seed)
        sources.push_back(progen::ScalarGen(seed).generate(25).source);

    for (std::size_t i = 0; i < sources.size(); ++i) {
        INFO("program " << i);
        CompiledProgram prog = compile(sources[i]);
        const Cfg& cfg = prog.main();
        AnalysisResult lf = solve(cfg, *prog.types);
        SolveOptions all;
        all.mode = SolveMode::Baseline;
        AnalysisResult base = solve(cfg, *prog.types, all);
        for (const auto& node : cfg.nodes) {
            const NodeFacts& f = lf.facts[static_cast<std::size_t>(node.id)];
            const NodeFacts& g = base.facts[static_cast<std::size_t>(node.id)];
            CHECK(rel_subset(f.ain, g.ain));
            CHECK(rel_subset(f.aout, g.aout));
        }
    }
}

TEST_CASE("the baseline keeps strictly more pairs on the running example") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    AnalysisResult lf = solve(cfg, *prog.types);
    SolveOptions all;
    all.mode = SolveMode::Baseline;
    AnalysisResult base = solve(cfg, *prog.types, all);

    std::size_t w = lf.universe.sources.size() + 1;
    long lf_total = 0, base_total = 0;
    bool some_node_strict = false;
    for (const auto& node : cfg.nodes) {
        long a = static_cast<long>(
            lf.facts[static_cast<std::size_t>(node.id)].ain.pair_count(w));
        long b = static_cast<long>(
            base.facts[static_cast<std::size_t>(node.id)].ain.pair_count(w));
        lf_total += a;
        base_total += b;
        if (b > a) some_node_strict = true;
    }
    CHECK(lf_total == 11);
    CHECK(base_total == 42);
    CHECK(some_node_strict);
}

TEST_CASE("scalar programs agree with the single-level reference solver") {
    int checked = 0;
    for (unsigned seed = 1; seed <= 24; ++seed) {
        progen::ScalarGen gen(seed);
        progen::ScalarProgram sp = gen.generate(30);
        INFO("seed " << seed << "\n" << sp.source);
        CompiledProgram prog = compile(sp.source);
        const Cfg& cfg = prog.main();
        AnalysisResult res = solve(cfg, *prog.types);
        scalar_ref::LSet ptrs(sp.pointers.begin(), sp.pointers.end());
        scalar_ref::Result ref = scalar_ref::solve(cfg, ptrs);

        for (const auto& node : cfg.nodes) {
            const NodeFacts& f = res.facts[static_cast<std::size_t>(node.id)];
            const scalar_ref::NodeValues& v =
                ref.values[static_cast<std::size_t>(node.id)];
            INFO("node " << node.id << ": " << node.stmt.text);
            CHECK(lnames(f.lin) == Names(v.lin.begin(), v.lin.end()));
            CHECK(lnames(f.lout) == Names(v.lout.begin(), v.lout.end()));
            CHECK(pnames(f.ain) == PairSet(v.ain.begin(), v.ain.end()));
            CHECK(pnames(f.aout) == PairSet(v.aout.begin(), v.aout.end()));
        }
        ++checked;
    }
    CHECK(checked == 24);
}

TEST_CASE("a pointer that walks an array in a loop exhausts the budget") {
    CompiledProgram prog = compile(
        "int q[5];\n"
        "int *p;\n"
        "int i;\n"
        "p = &q[0];\n"
        "while (i < 3) {\n"
        "  p = p + 1;\n"
        "  use(p);\n"
        "}\n"
        "use(*p);\n");
    const Cfg& cfg = prog.main();
    CHECK_THROWS_AS(solve(cfg, *prog.types), internal_error);
    CHECK_THROWS_WITH(solve(cfg, *prog.types),
                      Catch::Matchers::ContainsSubstring("budget"));
}

TEST_CASE("per-round snapshots narrate the fixpoint computation") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    SolveOptions opts;
    opts.collect_rounds = true;
    AnalysisResult res = solve(cfg, *prog.types, opts);
    REQUIRE(!res.round_snapshots.empty());
    CHECK(res.round_snapshots.size() == static_cast<std::size_t>(res.stats.rounds));
    CHECK(res.round_snapshots.back() == res.facts);
}

TEST_CASE("procedures are analyzed independently") {
    CompiledProgram prog = compile(
        "struct node { int d; struct node *next; };\n"
        "int *p;\n"
        "int i;\n"
        "struct node *s;\n"
        "proc first { p = &i; use(*p); }\n"
        "proc second { s = (struct node *) malloc(sizeof(struct node)); use(s->next); }\n");
    REQUIRE(prog.cfgs.size() == 2);
    AnalysisResult r1 = solve(prog.cfg("first"), *prog.types);
    AnalysisResult r2 = solve(prog.cfg("second"), *prog.types);
    CHECK(equations_stable(prog.cfg("first"), *prog.types, r1));
    CHECK(equations_stable(prog.cfg("second"), *prog.types, r2));
    CHECK(pnames(r1.facts[2].ain) == PairSet{{"p", "i"}, {"i", "?"}});
    // the second procedure's allocation is named after its node
    bool saw_heap = false;
    for (const auto& [src, ts] : r2.facts[2].ain.rows())
        if (src.render() == "s") {
            saw_heap = true;
            CHECK(pnames(r2.facts[2].ain).count({"s", "o1"}) == 1);
        }
    CHECK(saw_heap);
}

TEST_CASE("fixpoint invariants hold across a generated corpus") {
    for (unsigned seed = 30; seed <= 45; ++seed) {
        progen::ScalarGen gen(seed);
        progen::ScalarProgram sp = gen.generate(28);
        INFO("seed " << seed << "\n" << sp.source);
        CompiledProgram prog = compile(sp.source);
        const Cfg& cfg = prog.main();
        AnalysisResult res = solve(cfg, *prog.types);
        CHECK(equations_stable(cfg, *prog.types, res));
        check_shape_invariants(cfg, res);
        // solving twice is idempotent
        AnalysisResult again = solve(cfg, *prog.types);
        CHECK(again.facts == res.facts);
    }
}
