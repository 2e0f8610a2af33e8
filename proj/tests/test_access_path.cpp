#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "lfcpa/access_path.hpp"

using namespace lfcpa;

namespace {

AccessPath var(const std::string& name) { return AccessPath::of_var(name); }

AccessPath path(const std::string& root,
                const std::vector<Segment>& segs) {
    AccessPath p = AccessPath::of_var(root);
    for (const Segment& s : segs) p = p.with(s);
    return p;
}

} // namespace

TEST_CASE("roots render and compare") {
    CHECK(Root::var("x").render() == "x");
    CHECK(Root::heap(3).render() == "o3");
    CHECK(Root::var("x") == Root::var("x"));
    CHECK(Root::var("x") != Root::heap(1));
    CHECK_FALSE(Root::var("o3") == Root::heap(3));
}

TEST_CASE("paths render with fields, offsets, and bottom") {
    AccessPath p = make_heap_loc(1).with(Segment::field("g")).with(Segment::field("f"));
    CHECK(p.render() == "o1.g.f");
    AccessPath q = path("a", {Segment::offset(7), Segment::offset(3),
                              Segment::field("f"), Segment::field("g"),
                              Segment::offset(5), Segment::field("h")});
    CHECK(q.render() == "a.7.3.f.g.5.h");
    AccessPath b = path("q", {Segment::bottom()});
    CHECK(b.render() == "q.⊥");
    CHECK(b.render(true) == "q.bot");
    CHECK(b.has_bottom());
    CHECK_FALSE(q.has_bottom());
}

TEST_CASE("heap labels must be positive") {
    CHECK_THROWS_AS(make_heap_loc(0), internal_error);
    CHECK_THROWS_AS(make_heap_loc(-2), internal_error);
    CHECK(make_heap_loc(2).root.is_heap());
}

TEST_CASE("overlap is reflexive and symmetric") {
    std::vector<AccessPath> samples = {
        var("x"),
        make_heap_loc(1),
        path("a", {Segment::offset(2)}),
        path("a", {Segment::bottom()}),
        path("b", {Segment::field("f")}),
        path("a", {Segment::offset(2), Segment::field("f")}),
        path("a", {Segment::bottom(), Segment::field("f")}),
    };
    for (const auto& p : samples) {
        CHECK(overlaps(p, p));
        for (const auto& q : samples) CHECK(overlaps(p, q) == overlaps(q, p));
    }
}

TEST_CASE("overlap without bottom is structural equality") {
    std::vector<AccessPath> plain = {
        var("x"),
        var("y"),
        path("a", {Segment::offset(1)}),
        path("a", {Segment::offset(2)}),
        path("a", {Segment::offset(1), Segment::field("f")}),
        make_heap_loc(1).with(Segment::field("g")),
        make_heap_loc(2).with(Segment::field("g")),
    };
    for (const auto& p : plain)
        for (const auto& q : plain) CHECK(overlaps(p, q) == (p == q));
}

TEST_CASE("bottom matches any offset in its dimension") {
    AccessPath any = path("a", {Segment::bottom()});
    CHECK(overlaps(any, path("a", {Segment::offset(0)})));
    CHECK(overlaps(any, path("a", {Segment::offset(9)})));
    CHECK(overlaps(any, any));
    // but not a field in that position, a different root, or another length
    CHECK_FALSE(overlaps(any, path("a", {Segment::field("f")})));
    CHECK_FALSE(overlaps(any, path("b", {Segment::bottom()})));
    CHECK_FALSE(overlaps(any, var("a")));
    CHECK_FALSE(overlaps(any, path("a", {Segment::bottom(), Segment::field("f")})));

    AccessPath deep = path("a", {Segment::offset(7), Segment::bottom(), Segment::field("f")});
    CHECK(overlaps(deep, path("a", {Segment::offset(7), Segment::offset(3), Segment::field("f")})));
    CHECK_FALSE(overlaps(deep, path("a", {Segment::offset(6), Segment::offset(3), Segment::field("f")})));
}

TEST_CASE("overlaps_any scans a set") {
    std::set<AccessPath> live = {var("x"), path("q", {Segment::offset(3)})};
    CHECK(overlaps_any(var("x"), live));
    CHECK(overlaps_any(path("q", {Segment::bottom()}), live));
    CHECK_FALSE(overlaps_any(var("q"), live));
    CHECK_FALSE(overlaps_any(var("z"), live));
}

TEST_CASE("targets order unknown first and render as ?") {
    Target u = Target::unknown();
    Target t = Target::loc(var("x"));
    CHECK(u.is_unknown());
    CHECK(u.render() == "?");
    CHECK(t.render() == "x");
    CHECK(u < t);
    CHECK(Target::loc(make_heap_loc(1)).render() == "o1");
}

TEST_CASE("paths order deterministically") {
    std::set<AccessPath> s;
    s.insert(var("b"));
    s.insert(var("a"));
    s.insert(path("a", {Segment::offset(1)}));
    s.insert(make_heap_loc(1));
    CHECK(s.size() == 4);
    CHECK(overlaps_any(path("a", {Segment::offset(1)}), s));
}
