#include <doctest.h>

#include <set>

#include "ramcube/atlas.hpp"
#include "ramcube/gamma.hpp"

using namespace ramcube;

TEST_CASE("K44 has 36 four-cycles") {
    CHECK(enumerate_4cycles(BipartiteGraph::complete(4, 4)).size() == 36);
    CHECK(enumerate_4cycles(BipartiteGraph::complete(2, 3)).size() == 3);
}

TEST_CASE("lexicographic search finds the recorded assignment") {
    SearchStats st;
    auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::Lex, &st);
    REQUIRE(va);
    CHECK(st.nodes == 6128);
    // Frozen from an independent search: each voltage is the shift s -> s + k.
    const int shift[4][4] = {{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 4, 1}, {0, 3, 1, 4}};
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q)
            for (int s = 0; s < 5; ++s) CHECK(va->at(p, q)[s] == (s + shift[p][q]) % 5);
    for (const auto& c : enumerate_4cycles(va->graph)) CHECK(is_full_cycle(va->holonomy(c)));
}

TEST_CASE("reverse order also succeeds and gives a valid cover") {
    SearchStats st;
    auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::ReverseLex, &st);
    REQUIRE(va);
    CHECK(st.nodes == 395);
    GammaReport r = check_gamma(build_gamma(*va));
    CHECK(r.ok());
}

TEST_CASE("gamma properties") {
    auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::Lex);
    Gamma g = build_gamma(*va);
    CHECK(g.num_vertices() == 40);
    CHECK(g.edges().size() == 80);
    GammaReport r = check_gamma(g);
    CHECK(r.connected);
    CHECK(r.bipartite);
    CHECK(r.four_regular);
    CHECK(r.girth >= 6);
    CHECK(r.covering);
    CHECK(r.cycles_lift_to_20);
    CHECK(r.cyclic_deck);
}

TEST_CASE("identity voltages are rejected") {
    VoltageAssignment va;
    va.graph = BipartiteGraph::complete(4, 4);
    va.vol.assign(16, perm_identity());
    CHECK_THROWS_AS(validate_voltages(va), InvalidVoltage);
    CHECK_THROWS_AS(build_gamma(va), InvalidVoltage);
}

TEST_CASE("json round trip") {
    auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::Lex);
    auto back = VoltageAssignment::from_json(va->to_json());
    CHECK(back.vol == va->vol);
}

TEST_CASE("atlas links") {
    const Atlas& a = default_atlas();
    for (int p = 0; p < 8; ++p) {
        const LinkComplex& l = a.link(p);
        bool ram = a.branch(p) >= 0;
        CHECK(l.size() == (ram ? 44 : 12));
        CHECK(l.edges.size() == (ram ? 80u + 160u : 48u));
        CHECK(l.tris.size() == (ram ? 320u : 64u));
        CHECK(!check_flag(l));
        CHECK(l.connected());
        LinkComplex up = a.ascending(p), dn = a.descending(p);
        CHECK(up.euler_characteristic() == 2);
        CHECK(dn.euler_characteristic() == 2);
        CHECK(up.size() == (ram ? 22 : 6));
        if (ram) {
            // Suspension of a 20-cycle: the two poles are the ends along the branching line.
            int poles = 0;
            auto nb = up.neighbours();
            for (int v = 0; v < up.size(); ++v)
                if (nb[v].size() == 20) ++poles;
            CHECK(poles == 2);
        }
    }
}

TEST_CASE("link filling bound") {
    LinkAreaStats st = link_area_bound(default_atlas());
    CHECK(st.T == 20);
    CHECK(st.nonsimple_reduced == 0);
    CHECK(st.discs_ok);
    CHECK(expansion_bound(st.T) == 61);
}
