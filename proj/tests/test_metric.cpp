#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ramcube/grid.hpp"
#include "ramcube/metric.hpp"

using namespace ramcube;

namespace {

std::vector<int> inner(const Development& d, int r) {
    std::vector<int> out;
    for (int v = 0; v < d.size(); ++v)
        if (d.dist(v) <= r) out.push_back(v);
    return out;
}

}  // namespace

TEST_CASE("gromov product and four-point sums") {
    CHECK(gromov_product(3, 4, 5) == doctest::Approx(1.0));
    CHECK(gromov_product(2, 2, 4) == doctest::Approx(0.0));
    FourPointRecord tri = four_point({1, 1, 1, 1, 1, 1}, {0, 1, 2, 3});
    CHECK(tri.delta() == 0);
    // corners of an l1 square of side 4, in cyclic order
    FourPointRecord sq = four_point({4, 8, 4, 4, 8, 4}, {0, 1, 2, 3});
    CHECK(sq.S == 8);
    CHECK(sq.M == 8);
    CHECK(sq.L == 16);
    CHECK(sq.delta() == 4);
}

TEST_CASE("distances, medians and four-point sums against breadth-first search") {
    Development d(default_atlas(), 2);
    d.grow_ball(4);
    std::vector<int> pool = inner(d, 2);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        int u = pool[rng() % pool.size()], v = pool[rng() % pool.size()], w = pool[rng() % pool.size()];
        auto du = oracle::bfs(d, u), dv = oracle::bfs(d, v), dw = oracle::bfs(d, w);
        CHECK(d.distance(u, v) == du[v]);
        CHECK(d.distance(v, w) == dv[w]);
        std::vector<int> meds = oracle::interval_medians(du, dv, dw, u, v, w);
        REQUIRE(meds.size() == 1);
        MedianResult m = median(d, u, v, w);
        CHECK(m.unique);
        CHECK(m.median == meds[0]);
        int x = pool[rng() % pool.size()];
        FourPointRecord r = four_point(d, {u, v, w, x});
        FourPointRecord o = four_point({du[v], du[w], du[x], dv[w], dv[x], dw[x]}, {u, v, w, x});
        CHECK(r.S == o.S);
        CHECK(r.L == o.L);
        CHECK(gromov_product(d, u, v, w) == doctest::Approx(gromov_product(du[v], du[w], dv[w])));
    }
}

TEST_CASE("geodesics are shortest and listed without repeats") {
    Development d(default_atlas(), 0);
    std::vector<int> pool = sample_ball(d, d.root(), 5, 50, 3);
    for (int v : pool) CHECK(d.dist(v) <= 5);
    for (size_t k = 0; k + 1 < pool.size(); k += 2) {
        int u = pool[k], v = pool[k + 1];
        auto gs = all_geodesics(d, u, v, 50);
        REQUIRE_FALSE(gs.empty());
        CHECK(gs.front() == d.geodesic(u, v));
        std::set<std::vector<int>> seen(gs.begin(), gs.end());
        CHECK(seen.size() == gs.size());
        for (const auto& g : gs) {
            CHECK(static_cast<int>(g.size()) - 1 == d.distance(u, v));
            for (size_t t = 0; t + 1 < g.size(); ++t) CHECK(d.adjacent(g[t], g[t + 1]));
        }
    }
}

TEST_CASE("triangle thinness against the tripod at integer points") {
    Development d(default_atlas(), 0);
    std::vector<int> pool = sample_ball(d, d.root(), 6, 60, 9);
    for (size_t k = 0; k + 2 < pool.size(); k += 3) {
        int x = pool[k], y = pool[k + 1], z = pool[k + 2];
        std::array<std::vector<int>, 3> s{d.geodesic(x, y), d.geodesic(y, z), d.geodesic(z, x)};
        TriangleRecord r = triangle_thinness(d, s);
        int lx = (d.distance(x, y) + d.distance(x, z) - d.distance(y, z)) / 2;
        int ly = (d.distance(x, y) + d.distance(y, z) - d.distance(x, z)) / 2;
        int lz = (d.distance(x, z) + d.distance(y, z) - d.distance(x, y)) / 2;
        CHECK(r.legs == std::array<int, 3>{lx, ly, lz});
        int worst = 0;
        std::array<int, 3> legs{lx, ly, lz};
        for (int c = 0; c < 3; ++c) {
            const auto& out = s[c];
            const auto& in = s[(c + 2) % 3];
            for (int t = 0; t <= legs[c]; ++t)
                worst = std::max(worst, d.distance(out[t], in[in.size() - 1 - t]));
        }
        CHECK(r.thinness2 >= 2 * worst);
        CHECK(r.thinness2 <= 2 * worst + 2);
        CHECK(r.thinness2 >= r.insize2);
    }
}

TEST_CASE("corners of an isometric 2-square have four-point delta 2") {
    std::array<int, 4> corners{};
    bool found = false;
    Development* dev = nullptr;
    square_search(default_atlas(), 2, 2, {0}, [&](Development& d, int, const GridEmbedding& g) {
        if (found) return;
        corners = {g.at(0, 0), g.at(2, 0), g.at(2, 2), g.at(0, 2)};
        CHECK(is_isometric(d, g));
        CHECK(four_point(d, corners).delta() == 2);
        FourPointStats st = four_point_exhaustive(d, std::vector<int>(g.v.begin(), g.v.end()));
        CHECK(st.max_delta == 2);
        dev = &d;
        found = true;
    });
    CHECK(found);
    (void)dev;
}

TEST_CASE("scans are reproducible for a fixed seed") {
    Development d(default_atlas(), 0);
    std::vector<int> pool = sample_ball(d, d.root(), 5, 200, 1);
    FourPointStats a = four_point_scan(d, pool, 5000, 42);
    FourPointStats b = four_point_scan(d, pool, 5000, 42);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.max_delta <= 4);
    TriangleStats t = thin_triangle_scan(d, pool, 500, 42);
    CHECK(t.max_thinness2 <= 32);
}
