#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "lfcpa/cfg_build.hpp"
#include "lfcpa/extract.hpp"
#include "lfcpa/lfcpa.hpp"

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

Names names(const std::set<AccessPath>& s) {
    Names out;
    for (const auto& p : s) out.insert(p.render());
    return out;
}

Names names(const TargetSet& s) {
    if (s.is_universal()) return {"T"};
    Names out;
    for (const auto& t : s.elems()) out.insert(t.render());
    return out;
}

AccessPath ap(const std::string& root, const std::vector<std::string>& fields = {}) {
    AccessPath p = AccessPath::of_var(root);
    for (const auto& f : fields) p = p.with(Segment::field(f));
    return p;
}

} // namespace

TEST_CASE("transfer ingredients of the heap/struct chain, statement by statement") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    install_heap_types(cfg, tt);
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);

    AccessPath o1 = make_heap_loc(1);
    AccessPath o1g = o1.with(Segment::field("g"));
    AccessPath o1gf = o1g.with(Segment::field("f"));
    Target unk = Target::unknown();

    // statement 1: a = malloc  (nothing points anywhere yet)
    {
        PointsToRel ain;
        ain.add(o1gf, unk);
        LivenessSet lout = {ap("a"), o1gf};
        ExtractorResult r = extract(cfg.node(1).stmt, 1, ain, lout, tt, uni);
        CHECK(names(r.def) == Names{"a"});
        CHECK(names(r.kill) == Names{"a"});
        CHECK(names(r.ref) == Names{});
        CHECK(names(r.pointee) == Names{"o1"});
    }
    // statement 2: y = &a->g
    {
        PointsToRel ain;
        ain.add(ap("a"), Target::loc(o1));
        ain.add(o1gf, unk);
        LivenessSet lout = {ap("y"), o1gf};
        ExtractorResult r = extract(cfg.node(2).stmt, 2, ain, lout, tt, uni);
        CHECK(names(r.def) == Names{"y"});
        CHECK(names(r.kill) == Names{"y"});
        CHECK(names(r.ref) == Names{"a"});
        CHECK(names(r.pointee) == Names{"o1.g"});
    }
    // statement 3: b.f = y — the right side is read because b.f is live after
    {
        PointsToRel ain;
        ain.add(ap("y"), Target::loc(o1g));
        ain.add(o1gf, unk);
        LivenessSet lout = {ap("b", {"f"}), o1gf};
        ExtractorResult r = extract(cfg.node(3).stmt, 3, ain, lout, tt, uni);
        CHECK(names(r.def) == Names{"b.f"});
        CHECK(names(r.kill) == Names{"b.f"});
        CHECK(names(r.ref) == Names{"y"});
        CHECK(names(r.pointee) == Names{"o1.g"});
    }
    // statement 4: x = &b
    {
        PointsToRel ain;
        ain.add(ap("b", {"f"}), Target::loc(o1g));
        ain.add(o1gf, unk);
        LivenessSet lout = {ap("x"), ap("b", {"f"}), o1gf};
        ExtractorResult r = extract(cfg.node(4).stmt, 4, ain, lout, tt, uni);
        CHECK(names(r.def) == Names{"x"});
        CHECK(names(r.kill) == Names{"x"});
        CHECK(names(r.ref) == Names{});
        CHECK(names(r.pointee) == Names{"b"});
    }
    // statement 5: return x->f->f
    {
        PointsToRel ain;
        ain.add(ap("x"), Target::loc(ap("b")));
        ain.add(ap("b", {"f"}), Target::loc(o1g));
        ain.add(o1gf, unk);
        ExtractorResult r = extract(cfg.node(5).stmt, 5, ain, {}, tt, uni);
        CHECK(names(r.def) == Names{});
        CHECK(names(r.kill) == Names{});
        CHECK(names(r.ref) == Names{"x", "b.f", "o1.g.f"});
        CHECK(r.pointee.empty());
    }
}

TEST_CASE("a dead definition reads only its left side") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    install_heap_types(cfg, tt);
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);

    PointsToRel ain;
    ain.add(ap("a"), Target::loc(make_heap_loc(1)));

    // y = &a->g with y dead afterwards: no reason to read a
    ExtractorResult r = extract(cfg.node(2).stmt, 2, ain, {}, tt, uni);
    CHECK(names(r.def) == Names{"y"});
    CHECK(names(r.kill) == Names{"y"});
    CHECK(names(r.ref) == Names{});
    // the stored value is still reported
    CHECK(names(r.pointee) == Names{"o1.g"});
}

TEST_CASE("an unresolved index writes weakly and overlaps every offset") {
    CompiledProgram prog = compile(
        "int *q[5];\n"
        "int *p0;\n"
        "int i;\n"
        "q[i] = p0;\n");
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);
    const Statement& st = cfg.node(1).stmt;
    REQUIRE(st.text == "q[i] = p0");

    PointsToRel ain;
    // q.bot defines some cell of q, but strongly updates none
    {
        ExtractorResult r = extract(st, 1, ain, {ap("q").with(Segment::offset(2))},
                                    tt, uni);
        CHECK(names(r.def) == Names{"q.⊥"});
        CHECK(names(r.kill) == Names{});
        // q.2 live after and q.bot may be q.2: the right side is read
        CHECK(names(r.ref) == Names{"p0"});
    }
    {
        ExtractorResult r = extract(st, 1, ain, {ap("p0")}, tt, uni);
        // nothing the write could hit is live: the read disappears
        CHECK(names(r.ref) == Names{});
    }
}

TEST_CASE("writes through unknown pointers kill nothing but define everything live") {
    CompiledProgram prog = compile(
        "int **pp;\n"
        "int *q;\n"
        "int *r;\n"
        "*pp = q;\n");
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);
    const Statement& st = cfg.node(1).stmt;

    // no estimate for pp at all
    {
        PointsToRel ain;
        ExtractorResult r = extract(st, 1, ain, {ap("q")}, tt, uni);
        CHECK(r.def.empty());
        // an absent row must-points everywhere, so nothing is safely killed...
        // ...except that materializing "kill everything" is the whole universe
        CHECK(r.kill == uni.killable);
    }
    // pp -> ? : same story
    {
        PointsToRel ain;
        ain.add(ap("pp"), Target::unknown());
        ExtractorResult r = extract(st, 1, ain, {ap("q")}, tt, uni);
        CHECK(r.def.empty());
        CHECK(r.kill == uni.killable);
    }
    // pp -> r : a definite single target is both defined and killed
    {
        PointsToRel ain;
        ain.add(ap("pp"), Target::loc(ap("r")));
        ain.add(ap("q"), Target::unknown());
        ExtractorResult r = extract(st, 1, ain, {ap("r")}, tt, uni);
        CHECK(names(r.def) == Names{"r"});
        CHECK(names(r.kill) == Names{"r"});
        CHECK(names(r.ref) == Names{"pp", "q"});
        CHECK(names(r.pointee) == Names{"?"});
    }
    // pp -> {q, r} : weak update, no kill
    {
        PointsToRel ain;
        ain.add(ap("pp"), Target::loc(ap("q")));
        ain.add(ap("pp"), Target::loc(ap("r")));
        ExtractorResult r = extract(st, 1, ain, {ap("r")}, tt, uni);
        CHECK(names(r.def) == Names{"q", "r"});
        CHECK(names(r.kill) == Names{});
    }
}

TEST_CASE("a shifted destination widens to the whole universe") {
    CompiledProgram prog = compile(
        "int **pp;\n"
        "int *q;\n"
        "*(pp + 1) = q;\n");
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);
    const Statement& st = cfg.node(1).stmt;

    PointsToRel ain;
    ain.add(ap("pp"), Target::loc(ap("q")));
    ExtractorResult r = extract(st, 1, ain, {ap("q")}, tt, uni);
    CHECK(r.def == uni.sources);
    CHECK(r.kill == uni.killable);
    CHECK(names(r.ref) == Names{"q"});
}

TEST_CASE("only assignments and uses contribute") {
    TypeTable tt;
    Universe uni;
    PointsToRel ain;
    ExtractorResult empty;
    CHECK(extract(Statement::int_assign("i", IndexExpr::literal(3)), 1, ain, {},
                  tt, uni) == empty);
    CHECK(extract(Statement::other("skip"), 1, ain, {}, tt, uni) == empty);
    Statement s;
    s.kind = Statement::Kind::Start;
    CHECK(extract(s, 0, ain, {}, tt, uni) == empty);
    s.kind = Statement::Kind::End;
    CHECK(extract(s, 9, ain, {}, tt, uni) == empty);
}

TEST_CASE("use statements read through the whole expression") {
    CompiledProgram prog = compile(slurp("heap_struct_chain.mc"));
    const Cfg& cfg = prog.main();
    TypeTable& tt = *prog.types;
    install_heap_types(cfg, tt);
    Universe uni = build_universe(tt, cfg.vars, cfg.malloc_sites);

    // with no estimate, traversing x->f->f still reads x, and b.f once x -> b
    PointsToRel ain;
    ExtractorResult r0 = extract(cfg.node(5).stmt, 5, ain, {}, tt, uni);
    CHECK(names(r0.ref) == Names{"x"});

    ain.add(ap("x"), Target::loc(ap("b")));
    ExtractorResult r1 = extract(cfg.node(5).stmt, 5, ain, {}, tt, uni);
    CHECK(names(r1.ref) == Names{"x", "b.f"});
}
