#include <doctest.h>

#include "ramcube/grid.hpp"

using namespace ramcube;

TEST_CASE("decoration symmetries") {
    GridDecoration g = figure_4square();
    CHECK(g.width() == 4);
    CHECK(g.cells_ok());
    std::string c = g.canonical();
    for (int s = 0; s < 8; ++s) {
        GridDecoration t = g.transformed(s);
        CHECK(t.canonical() == c);
        CHECK(t.cells_ok());
    }
    CHECK(g.transformed(0).key() == g.key());
    CHECK(figure_3x5_u1().width() * figure_3x5_u1().height() == 15);
}

TEST_CASE("4-cycle catalogue") {
    const Atlas& a = default_atlas();
    PatchCatalogue cat = build_catalogue(a);
    CHECK(cat.cycles_by_type.at(CycleType::U1) == 1728);
    CHECK(cat.cycles_by_type.at(CycleType::U2) == 4608);
    CHECK(cat.cycles_by_type.at(CycleType::R1) == 201600);
    CHECK(cat.cycles_by_type.at(CycleType::R2) == 69120);
    CHECK(cat.patterns.size() == 22);
}

TEST_CASE("grid certificates") {
    PatchCatalogue cat = build_catalogue(default_atlas());
    GridCertificate c22 = grid_certificate(cat, 2, 2);
    CHECK(c22.solutions.size() == 22);
    CHECK(c22.classes.size() == 7);
    GridCertificate c44 = grid_certificate(cat, 4, 4);
    CHECK(c44.classes.size() == 4);
    CHECK(c44.classes.count(figure_4square().canonical()) == 1);
    GridCertificate c53 = grid_certificate(cat, 5, 3);
    CHECK(c53.classes.size() == 3);
    CHECK(grid_certificate(cat, 5, 5).solutions.empty());
    for (const auto& s : c44.solutions) {
        CHECK(s.cells_ok());
        CHECK_FALSE(s.has_interior_component());
    }
}

TEST_CASE("unit squares at the root: two per link edge") {
    const Atlas& a = default_atlas();
    SquareSearchResult r = square_search(a, 1, 1);
    for (int p = 0; p < 8; ++p) CHECK(r.per_base[p] == 2 * static_cast<long>(a.link(p).edges.size()));
}

TEST_CASE("2-squares: search classes equal certificate classes") {
    const Atlas& a = default_atlas();
    long seen = 0, sampled = 0, isometric = 0;
    SquareSearchResult r = square_search(a, 2, 2, {}, [&](Development& d, int, const GridEmbedding& g) {
        if (seen++ % 97 != 0) return;
        ++sampled;
        isometric += is_isometric(d, g);
    });
    CHECK(r.total == 203328);
    PatchCatalogue cat = build_catalogue(a);
    GridCertificate c = grid_certificate(cat, 2, 2);
    std::set<std::string> found;
    for (const auto& [k, n] : r.classes) found.insert(k);
    CHECK(found == c.classes);
    CHECK(sampled > 0);
    CHECK(isometric == sampled);
}
