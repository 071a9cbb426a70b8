#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "ramcube/atlas.hpp"
#include "ramcube/filling.hpp"

using namespace ramcube;

namespace {

// Boundary of a square at the root spanned by the first pair of adjacent up ends.
std::vector<int> square_loop(Development& d) {
    int r = d.root(), p = d.base(r);
    const Atlas& a = d.atlas();
    for (int e1 = 0; e1 < d.num_ends(r); ++e1)
        for (int e2 = e1 + 1; e2 < d.num_ends(r); ++e2)
            if (a.up(p, e1) && a.up(p, e2) && a.adjacent(p, e1, e2))
                return {r, d.neighbour(r, e1), d.square_corner(r, e1, e2), d.neighbour(r, e2)};
    return {};
}

long area(Development& d, const std::vector<int>& loop) {
    Diagram D = dyadic_fill(d, loop);
    DiagramCheck ck = check_diagram(d, D, loop);
    REQUIRE_MESSAGE(ck.ok, ck.error);
    return diagram_stats(d, D).area;
}

}  // namespace

TEST_CASE("flat square fills with two triangles") {
    for (int base : {0, 2}) {
        Development d(default_atlas(), base);
        std::vector<int> sq = square_loop(d);
        REQUIRE(sq.size() == 4);
        CHECK(area(d, sq) == 2);
    }
}

TEST_CASE("short loops have area 0") {
    Development d(default_atlas(), 0);
    int r = d.root();
    int n = d.neighbour(r, 0);
    CHECK(area(d, {}) == 0);
    CHECK(area(d, {r}) == 0);
    CHECK(area(d, {r, n}) == 0);
    CHECK(area(d, {r, n, r, n}) == 0);
}

TEST_CASE("cubical conversion of level loops") {
    Development d(default_atlas(), 0);
    for (uint64_t seed = 0; seed < 10; ++seed) {
        std::vector<int> loop = random_level_loop(d, d.root(), 12, seed);
        REQUIRE(is_level_loop(d, loop, 0));
        int cost = -1;
        std::vector<int> cub = to_cubical_loop(d, loop, &cost);
        CHECK(cost == static_cast<int>(loop.size()));
        CHECK(cub.size() == 2 * loop.size());
        int back_cost = -1;
        std::vector<int> back = to_sliced_loop(d, cub, &back_cost);
        CHECK(back == loop);
        CHECK(back_cost == cost);
        // the two loops are homotopic: their difference bounds a diagram
        std::vector<int> diff = loop;
        diff.push_back(loop[0]);
        for (size_t k = cub.size(); k-- > 1;) diff.push_back(cub[k]);
        std::vector<int> closed;
        for (int v : diff)
            if (closed.empty() || closed.back() != v) closed.push_back(v);
        while (closed.size() > 1 && closed.back() == closed.front()) closed.pop_back();
        CHECK(area(d, closed) >= 0);
    }
    std::vector<int> sq = square_loop(d);
    int cost = -1;
    CHECK(to_cubical_loop(d, sq, &cost) == sq);
    CHECK(cost == 0);
}

TEST_CASE("dyadic decomposition shape") {
    Development d(default_atlas(), 0);
    for (int n : {16, 32, 64}) {
        for (uint64_t seed = 0; seed < 4; ++seed) {
            std::vector<int> loop = random_level_loop(d, d.root(), n, seed);
            FillStats st;
            Diagram D = dyadic_fill(d, loop, &st);
            CHECK(check_diagram(d, D, loop).ok);
            int m = st.cubical_length;
            CHECK(st.triangles <= 2 * m);
            CHECK(st.depth <= static_cast<int>(std::ceil(std::log2(m))));
            CHECK(st.max_leaf_perimeter <= kLeafPerimeter);
        }
    }
}

TEST_CASE("classify_face") {
    Development d(default_atlas(), 0);
    std::vector<int> sq = square_loop(d);
    CHECK(classify_face(d, sq[0], sq[1], sq[3]) == FaceKind::HalfSquare);
    CHECK(classify_face(d, sq[1], sq[2], sq[3]) == FaceKind::HalfSquare);
    CHECK(classify_face(d, sq[0], sq[1], sq[2]) == FaceKind::Invalid);
    CHECK(classify_face(d, sq[0], sq[1], sq[0]) == FaceKind::Degenerate);
    CHECK(is_diagonal(d, sq[1], sq[3]));
    CHECK_FALSE(is_diagonal(d, sq[0], sq[2]));
}

TEST_CASE("push preconditions") {
    Development d(default_atlas(), 0);
    std::vector<int> sq = square_loop(d);
    Diagram D = dyadic_fill(d, sq);
    // the square has corners at heights 0, 1, 2 on the boundary
    auto comps = level_components(d, D, 2);
    REQUIRE(comps.size() == 1);
    CHECK_THROWS_AS(push_step(d, D, comps[0]), InvalidDiagram);
    auto zero = level_components(d, D, 0);
    REQUIRE_FALSE(zero.empty());
    CHECK_THROWS_AS(push_step(d, D, zero[0]), InvalidDiagram);
}

TEST_CASE("push pipeline invariants") {
    for (int base : {0, 2, 3, 4}) {
        for (uint64_t seed = 0; seed < 6; ++seed) {
            Development d(default_atlas(), base);
            std::vector<int> loop = random_level_loop(d, d.root(), 8 + 8 * static_cast<int>(seed % 3), seed);
            Diagram D;
            PipelineRun r = run_pipeline(d, loop, true, true, &D);
            CHECK_MESSAGE(r.ok(), r.error);
            CHECK(D.boundary_word() == loop);
            CHECK(r.pushes.size() == static_cast<size_t>(r.height));
            for (size_t k = 0; k < r.pushes.size(); ++k) {
                const PushLedger& p = r.pushes[k];
                CHECK(p.height_before == r.height - static_cast<int>(k));
                CHECK(p.height_after == r.height - static_cast<int>(k) - 1);
                CHECK(p.max_cell_expansion <= expansion_bound(20));
                CHECK(p.max_link_loop <= 5);
                CHECK(p.max_link_area <= 20);
            }
            DiagramStats st = diagram_stats(d, D);
            CHECK(st.height == 0);
            // every boundary edge bounds a face
            CHECK(st.area >= static_cast<long>(loop.size()) / 2 - 1);
        }
    }
}

TEST_CASE("height-1 filling of a short level loop") {
    Development d(default_atlas(), 0);
    std::vector<int> loop = random_level_loop(d, d.root(), 8, 1000);
    Diagram D = dyadic_fill(d, loop);
    DiagramStats before = diagram_stats(d, D);
    REQUIRE(before.height == 1);
    std::vector<PushLedger> led = push_to_level(d, D, 20, true);
    REQUIRE(led.size() == 1);
    DiagramStats after = diagram_stats(d, D);
    CHECK(after.height == 0);
    CHECK(after.area <= 61 * before.area + static_cast<long>(loop.size()));
    CHECK(D.boundary_word() == loop);
}

TEST_CASE("level-0 diagram needs no push") {
    Development d(default_atlas(), 0);
    Diagram D;
    D.boundary = {D.add_vertex(d.root())};
    CHECK(push_to_level(d, D).empty());
}

TEST_CASE("octahedron oracle agrees with the sphere filling") {
    LinkComplex oct = oracle::octahedron();
    int checked = 0;
    for (const auto& w : oracle::octahedron_walks(5)) {
        int want = oracle::octahedron_area(w);
        REQUIRE(want >= 0);
        CHECK(filling_area_oracle(oct, w) == want);
        ++checked;
    }
    CHECK(checked > 1000);
    LinkAreaStats st = link_area_bound({oct});
    CHECK(st.T == 4);
}

TEST_CASE("end words from vertices over one base") {
    const Atlas& a = default_atlas();
    Development d(a, 0);
    d.grow_ball(2);
    std::vector<int> same;
    for (int v = 1; v < d.size(); ++v)
        if (d.base(v) == d.base(d.root())) same.push_back(v);
    REQUIRE_FALSE(same.empty());
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        int v = same[rng() % same.size()];
        int x = d.root(), y = v;
        for (int step = 0; step < 8; ++step) {
            REQUIRE(d.base(x) == d.base(y));
            int e = static_cast<int>(rng() % d.num_ends(x));
            int e2 = static_cast<int>(rng() % d.num_ends(x));
            if (e2 != e && a.adjacent(d.base(x), e, e2)) {
                int cx = d.square_corner(x, e, e2), cy = d.square_corner(y, e, e2);
                CHECK(d.base(cx) == d.base(cy));
                CHECK(d.height(cx) - d.height(x) == d.height(cy) - d.height(y));
            }
            x = d.neighbour(x, e);
            y = d.neighbour(y, e);
            CHECK(d.height(x) - d.height(d.root()) == d.height(y) - d.height(v));
        }
    }
}

TEST_CASE("loop words survive redevelopment") {
    Development d(default_atlas(), 3);
    std::vector<int> loop = random_level_loop(d, d.root(), 20, 5);
    nlohmann::ordered_json j = loop_to_json(d, loop);
    Development e(default_atlas(), 3);
    std::vector<int> again = loop_from_json(e, nlohmann::json::parse(j.dump()));
    CHECK(loop_to_json(e, again) == j);
    CHECK(is_level_loop(e, again, 0));
    Development f(default_atlas(), 0);
    CHECK_THROWS_AS(loop_from_json(f, nlohmann::json::parse(j.dump())), FormatError);
}

TEST_CASE("exponent report") {
    ExponentReport r = exponent_report();
    CHECK(r.exponent == doctest::Approx(1.0 + 16.0 * std::log2(61.0)));
    CHECK(std::fabs(r.exponent - 95.90) <= 0.01);
    CHECK(r.exponent <= 96.0);
    CHECK(r.to_json()["exponent"].get<double>() == doctest::Approx(95.9));
}

TEST_CASE("dehn sampling is deterministic across thread counts") {
    const Atlas& a = default_atlas();
    auto one = dehn_sample(a, 0, {8, 16}, 3, 0, 1);
    auto four = dehn_sample(a, 0, {8, 16}, 3, 0, 4);
    CHECK(dehn_csv(one) == dehn_csv(four));
    for (const auto& r : one) CHECK(r.run.ok());
}

TEST_CASE("loops whose fillers fold back over a square") {
    // a backtracking 96-loop at u and a 56-loop at r3 once left closed spheres behind
    struct Case {
        BaseType t;
        int target;
        uint64_t seed;
    };
    for (const Case& c : {Case{BaseType::Unramified, 96, 8814435274545621876ULL},
                          Case{BaseType::R3, 56, 8567143796127762618ULL}}) {
        const Atlas& a = default_atlas();
        Development d(a, base_vertex_for(c.t, a.placement()));
        std::vector<int> loop = random_level_loop(d, d.root(), c.target, c.seed);
        PipelineRun r = run_pipeline(d, loop, true, true);
        CHECK_MESSAGE(r.ok(), r.error);
    }
}
