#include <doctest.h>

#include <set>

#include "ramcube/theta.hpp"

using namespace ramcube;

TEST_CASE("theta^3 cell counts") {
    DecoratedComplex x = build_theta3();
    CHECK(x.num_vertices() == 8);
    CHECK(x.num_edges() == 48);
    CHECK(x.num_squares() == 96);
    CHECK(x.num_cubes() == 64);
    int ram_v = 0, ram_e = 0;
    for (int v = 0; v < 8; ++v) ram_v += x.vertex(v).ramified;
    for (int e = 0; e < 48; ++e) ram_e += x.edge(e).ramified;
    CHECK(ram_v == 6);
    CHECK(ram_e == 12);
    CHECK(!x.vertex(pack(0, 1, 0)).ramified);
    CHECK(!x.vertex(pack(1, 0, 1)).ramified);
}

TEST_CASE("theta^3 links are F*F*F and flag") {
    DecoratedComplex x = build_theta3();
    for (int v = 0; v < 8; ++v) {
        LinkComplex l = link(x, v);
        CHECK(l.size() == 12);
        CHECK(l.edges.size() == 48);
        CHECK(l.tris.size() == 64);
        CHECK(!check_flag(l));
        LinkComplex up = ascending_link(l);
        CHECK(up.size() == 6);
        CHECK(up.tris.size() == 8);  // octahedron
    }
}

TEST_CASE("square and cube ramification invariants") {
    DecoratedComplex x = build_theta3();
    CheckReport r = local_checks(x, [](int) { return false; }, false);
    CHECK(r.ok);
    CHECK(r.squares_checked == 96);
    CHECK(r.cubes_checked == 64);
}

TEST_CASE("placements") {
    Placement bad;
    bad.v = {0, 0, 0, 0, 1, 1};
    CHECK_THROWS_AS(build_theta3(bad), InvalidPlacement);
    Placement other;
    other.v = {1, 1, 1, 0, 0, 0};
    DecoratedComplex x = build_theta3(other);
    CheckReport r = local_checks(x, [](int) { return false; }, false);
    CHECK(r.ok);
}

TEST_CASE("morse heights on theta^3 are inconsistent but fine on a cube") {
    DecoratedComplex x = build_theta3();
    CHECK_THROWS_AS(morse_heights(x, 0), InconsistentHeight);
}

TEST_CASE("frozen complex rejects edits") {
    DecoratedComplex x = build_theta3();
    CHECK_THROWS_AS(x.add_vertex({}), FrozenComplex);
}

TEST_CASE("malformed square is rejected") {
    DecoratedComplex x;
    for (int i = 0; i < 4; ++i) x.add_vertex({});
    EdgeRec e;
    e.ends = {0, 1};
    x.add_edge(e);
    e.ends = {1, 2};
    x.add_edge(e);
    e.ends = {2, 3};
    x.add_edge(e);
    e.ends = {0, 2};
    x.add_edge(e);
    CHECK_THROWS_AS(x.add_square({{0, 1, 2, 3}}), MalformedCell);
}
