#include <doctest.h>

#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "ramcube/development.hpp"

using namespace ramcube;

namespace {

// Distances inside the explicit ball by breadth-first search.
std::vector<int> bfs(const BallView& b, int src) {
    std::vector<int> d(b.size(), -1);
    std::deque<int> q{src};
    d[src] = 0;
    std::vector<EndRef> es;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        b.ends(v, es);
        for (const EndRef& r : es)
            if (d[r.nbr] < 0) {
                d[r.nbr] = d[v] + 1;
                q.push_back(r.nbr);
            }
    }
    return d;
}

}  // namespace

TEST_CASE("branch placement search") {
    PlacementSearch s = place_branch_loci();
    CHECK(s.chosen.v == std::array<int, 6>{0, 0, 0, 1, 1, 1});
    for (const Placement& p : s.solutions) CHECK_NOTHROW(p.validate());
    CHECK(s.solutions.size() == 8);
}

TEST_CASE("base types") {
    Placement pl;
    CHECK(base_vertex_for(BaseType::Unramified, pl) == 2);
    CHECK(base_vertex_for(BaseType::R1, pl) == 0);
    CHECK(base_vertex_for(BaseType::R2, pl) == 4);
    CHECK(base_vertex_for(BaseType::R3, pl) == 3);
    CHECK(parse_base_type("r2") == BaseType::R2);
    CHECK_THROWS_AS(parse_base_type("x"), FormatError);
}

TEST_CASE("radius-1 balls are stars") {
    const Atlas& a = default_atlas();
    Development u(a, 2);
    u.grow_ball(1);
    CHECK(u.size() == 13);
    DecoratedComplex x = ball_complex(u);
    CHECK(x.num_edges() == 12);
    CHECK(x.num_squares() == 0);
    Development r(a, 0);
    r.grow_ball(1);
    CHECK(r.size() == 45);
}

TEST_CASE("ball sizes and verification up to radius 3") {
    const Atlas& a = default_atlas();
    const std::array<int, 4> n3{10541, 25613, 25613, 25613};
    for (int t = 0; t < 4; ++t) {
        int p = base_vertex_for(static_cast<BaseType>(t), a.placement());
        Development d(a, p);
        d.grow_ball(3);
        CHECK(d.size() == n3[t]);
        BallReport r = verify_ball(d, a, 3);
        CHECK(r.ok);
        CHECK(r.min_height == -3);
        CHECK(r.max_height == 3);
        CHECK(r.cubes_checked > 0);
    }
}

TEST_CASE("explicit radius-3 ball passes the cell checks at full-link vertices") {
    Development d(default_atlas(), 2);
    d.grow_ball(3);
    DecoratedComplex x = ball_complex(d);
    CheckReport r = local_checks(x, [&](int v) { return x.vertex(v).dist == 0; });
    CHECK(r.ok);
    CHECK(r.cubes_checked > 0);
    CHECK(r.four_cycles_checked > 0);
    LinkComplex l = link(x, 0);
    CHECK(l.size() == 12);
    CHECK(l.tris.size() == 64);
}

TEST_CASE("hyperplane distances agree with breadth-first search") {
    Development d(default_atlas(), 0);
    d.grow_ball(4);
    std::mt19937 rng(7);
    int inner = d.layer_starts()[3];
    for (int trial = 0; trial < 30; ++trial) {
        int s = static_cast<int>(rng() % inner);
        std::vector<int> ref = bfs(d, s);
        for (int v = 0; v < inner; ++v) REQUIRE(d.distance(s, v) == ref[v]);
        int t = static_cast<int>(rng() % inner);
        std::vector<int> g = d.geodesic(s, t);
        CHECK(static_cast<int>(g.size()) == ref[t] + 1);
        for (size_t k = 0; k + 1 < g.size(); ++k) CHECK(d.adjacent(g[k], g[k + 1]));
    }
}

TEST_CASE("lazy development matches the grown ball") {
    const Atlas& a = default_atlas();
    Development full(a, 0);
    full.grow_ball(3);
    Development lazy(a, 0);
    std::mt19937 rng(3);
    // Random walks create vertices out of layer order; distances stay exact.
    for (int w = 0; w < 200; ++w) {
        int v = 0;
        for (int s = 0; s < 6; ++s) v = lazy.neighbour(v, static_cast<int>(rng() % lazy.num_ends(v)));
        CHECK(lazy.distance(0, v) == lazy.dist(v));
    }
    CHECK_THROWS_AS(lazy.grow_ball(2), DevelopmentError);
}

TEST_CASE("json round trip keeps the digest") {
    const Atlas& a = default_atlas();
    Development d(a, 4);
    d.grow_ball(2);
    Development e(a, 4);
    e.grow_ball(2);
    CHECK(d.digest() == e.digest());
    BallData b = BallData::from_json(nlohmann::json::parse(d.to_json(true).dump()));
    CHECK(b.digest() == d.digest());
    CHECK(verify_ball(b, a, 2).ok);
    CHECK_THROWS_AS(BallData::from_json(d.to_json(false)), FormatError);
}

TEST_CASE("verification catches a deleted edge") {
    const Atlas& a = default_atlas();
    Development d(a, 2);
    d.grow_ball(3);
    nlohmann::json j = nlohmann::json::parse(d.to_json(true).dump());
    int victim = d.layer_starts()[2];
    auto& down = j["vertices"][victim][3];
    down.erase(down.begin());
    BallData b = BallData::from_json(j);
    BallReport r = verify_ball(b, a, 3);
    CHECK(!r.ok);
    CHECK(r.violations_count > 0);
}

TEST_CASE("a deleted cube breaks the flag condition at its eight corners") {
    Development d(default_atlas(), 2);
    d.grow_ball(3);
    DecoratedComplex x = ball_complex(d);
    REQUIRE(x.num_cubes() > 0);
    nlohmann::json j = x.to_json();
    j["cubes"].erase(j["cubes"].begin());
    DecoratedComplex y = DecoratedComplex::from_json(j);
    // All three faces at each corner survive, so every corner link keeps a
    // pairwise adjacent triple that no longer spans a triangle.
    int failing = 0;
    for (int v : x.cube_vertices(0)) {
        LinkComplex lx = link(x, v), ly = link(y, v);
        CHECK(ly.edges.size() == lx.edges.size());
        CHECK(ly.tris.size() + 1 == lx.tris.size());
        for (size_t t = 0; t < lx.tris.size(); ++t) {
            if (lx.tri_cell[t] != 0) continue;
            auto [a, b, c] = lx.tris[t];
            failing += ly.adjacent(a, b) && ly.adjacent(b, c) && ly.adjacent(a, c) && !ly.has_triangle(a, b, c);
        }
    }
    CHECK(failing == 8);
}

TEST_CASE("slicing a single cube") {
    DecoratedComplex x;
    for (int p = 0; p < 8; ++p) {
        VertexRec v;
        v.height = bit(p, 0) + bit(p, 1) + bit(p, 2);
        x.add_vertex(v);
    }
    std::map<std::pair<int, int>, int> eid;
    for (int p = 0; p < 8; ++p)
        for (int c = 0; c < 3; ++c)
            if (!bit(p, c)) {
                EdgeRec e;
                e.ends = {p, flip(p, c)};
                e.coord = c;
                eid[{p, flip(p, c)}] = x.add_edge(e);
            }
    auto E = [&](int a, int b) { return eid.at({std::min(a, b), std::max(a, b)}); };
    std::vector<int> faces;
    for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = c1 + 1; c2 < 3; ++c2) {
            int c3 = 3 - c1 - c2;
            for (int t = 0; t < 2; ++t) {
                int p = t << c3, q = flip(p, c1), r = flip(q, c2), s = flip(p, c2);
                faces.push_back(x.add_square({{E(p, q), E(q, r), E(r, s), E(s, p)}}));
            }
        }
    x.add_cube({{faces[0], faces[1], faces[2], faces[3], faces[4], faces[5]}});
    x.freeze();
    SlicedComplex s = slice(x);
    CHECK(s.diagonals.size() == 6);
    CHECK(s.triangles.size() == 12);
    CHECK(s.level_triangles.size() == 2);
    LevelSet l1 = level_set(s, 1), l2 = level_set(s, 2);
    CHECK(l1.vertices.size() == 3);
    CHECK(l1.triangles.size() == 1);
    CHECK(l1.diagonals.size() == 3);
    CHECK(l2.triangles.size() == 1);
    CHECK(level_set(s, 0).diagonals.empty());
}

TEST_CASE("sliced ball") {
    Development d(default_atlas(), 0);
    d.grow_ball(3);
    DecoratedComplex x = ball_complex(d);
    CHECK(x.num_cubes() > 0);
    SlicedComplex s = slice(x);
    CHECK(s.diagonals.size() == static_cast<size_t>(x.num_squares()));
    CHECK(s.triangles.size() == 2 * static_cast<size_t>(x.num_squares()));
    CHECK(s.level_triangles.size() == 2 * static_cast<size_t>(x.num_cubes()));
}

TEST_CASE("level sets of the interior are connected and every vertex has both directions") {
    const int R = 4;
    Development d(default_atlas(), 2);
    d.grow_ball(R);
    DecoratedComplex x = ball_complex(d);
    SlicedComplex s = slice(x);
    // Union-find over height-k vertices at distance <= R - 1 joined by level diagonals.
    std::vector<int> parent(x.num_vertices());
    for (int v = 0; v < x.num_vertices(); ++v) parent[v] = v;
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    auto inner = [&](int v) { return x.vertex(v).dist <= R - 1; };
    for (const auto& e : s.diagonals)
        if (inner(e[0]) && inner(e[1])) parent[find(e[0])] = find(e[1]);
    for (int k = -(R - 2); k <= R - 2; ++k) {
        std::set<int> roots;
        for (int v = 0; v < x.num_vertices(); ++v)
            if (inner(v) && s.height[v] == k) roots.insert(find(v));
        CHECK_MESSAGE(roots.size() == 1, "level ", k);
    }
    for (int v = 0; v < d.layer_starts()[R]; ++v) {
        bool up = false, down = false;
        for (int e = 0; e < d.num_ends(v); ++e) (d.atlas().up(d.base(v), e) ? up : down) = true;
        REQUIRE((up && down));
    }
}

TEST_CASE("ramified ends project five-to-one onto transverse base ends") {
    const Atlas& a = default_atlas();
    for (int p = 0; p < 8; ++p) {
        int b = a.branch(p);
        if (b < 0) continue;
        std::map<std::pair<int, int>, int> count;
        for (int e = 0; e < a.num_ends(p); ++e) {
            const EndLabel& l = a.label(p, e);
            if (l.coord != b) ++count[{l.coord, l.letter}];
        }
        CHECK(count.size() == 8);
        for (const auto& [k, n] : count) CHECK(n == 5);
    }
}
