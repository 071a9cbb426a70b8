#include "ramcube/report.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "ramcube/atlas.hpp"
#include "ramcube/filling.hpp"
#include "ramcube/grid.hpp"
#include "ramcube/metric.hpp"

namespace ramcube {

std::string CriterionResult::line() const {
    std::ostringstream s;
    s << "criterion " << id << ' ' << (pass ? "PASS" : "FAIL") << ' ' << title << ": " << summary;
    return s.str();
}

namespace {

struct StopSearch {};

// Runs `fn` on anchored isometric C-squares until it returns true.
bool with_grid(const Atlas& a, int c, const std::vector<int>& bases,
               const std::function<bool(Development&, const GridEmbedding&)>& fn) {
    bool found = false;
    try {
        square_search(a, c, c, bases, [&](Development& d, int, const GridEmbedding& g) {
            if (fn(d, g)) {
                found = true;
                throw StopSearch{};
            }
        });
    } catch (const StopSearch&) {
    }
    return found;
}

std::array<int, 4> grid_corners(const GridEmbedding& g) {
    return {g.at(0, 0), g.at(g.width, 0), g.at(g.width, g.height), g.at(0, g.height)};
}

// Triangle (0,0) -> (C,0) -> (C,C) -> back along the top row and left column.
std::array<std::vector<int>, 3> boundary_triangle(const GridEmbedding& g) {
    int c = g.width;
    std::array<std::vector<int>, 3> s;
    for (int x = 0; x <= c; ++x) s[0].push_back(g.at(x, 0));
    for (int y = 0; y <= c; ++y) s[1].push_back(g.at(c, y));
    for (int x = c; x >= 0; --x) s[2].push_back(g.at(x, c));
    for (int y = c - 1; y >= 0; --y) s[2].push_back(g.at(0, y));
    return s;
}

bool same_decoration(const GridDecoration& s, const GridDecoration& f, bool superset) {
    if (s.width() != f.width() || s.height() != f.height()) return false;
    for (int y = 0; y <= f.height(); ++y)
        for (int x = 0; x <= f.width(); ++x) {
            auto cmp = [&](bool a, bool b) { return superset ? (!b || a) : a == b; };
            if (!cmp(s.vertex(x, y), f.vertex(x, y))) return false;
            if (x < f.width() && !cmp(s.hedge(x, y), f.hedge(x, y))) return false;
            if (y < f.height() && !cmp(s.vedge(x, y), f.vedge(x, y))) return false;
        }
    return true;
}

// `s` equals (or, with superset, extends) `f` up to a symmetry of the grid.
bool matches_figure(const GridDecoration& s, const GridDecoration& f, bool superset) {
    for (int sym = 0; sym < 8; ++sym)
        if (same_decoration(s.transformed(sym), f, superset)) return true;
    return false;
}

LinkComplex octahedron() {
    LinkComplex l;
    l.verts.resize(6);
    for (int a = 0; a < 6; ++a)
        for (int b = a + 1; b < 6; ++b)
            if (b != (a ^ 1)) l.edges.push_back({a, b});
    for (int x : {0, 1})
        for (int y : {2, 3})
            for (int z : {4, 5}) l.tris.push_back({x, y, z});
    l.finalize();
    return l;
}

// ---------------------------------------------------------------------------

CriterionResult gamma_certificate(const AcceptanceOptions&) {
    CriterionResult r{1, "gamma certificate", false, {}, {}, 0};
    auto t0 = std::chrono::steady_clock::now();
    BipartiteGraph k44 = BipartiteGraph::complete(4, 4);
    SearchStats st;
    auto va = search_monodromy(k44, SearchOrder::Lex, &st);
    if (!va) {
        r.summary = "monodromy search failed";
        return r;
    }
    auto cycles = enumerate_4cycles(k44);
    int full = 0;
    for (const auto& c : cycles) full += is_full_cycle(va->holonomy(c));
    Gamma g = build_gamma(*va);
    GammaReport gr = check_gamma(g);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    int nv = g.num_vertices(), ne = static_cast<int>(g.edges().size());
    r.pass = cycles.size() == 36 && full == 36 && nv == 40 && ne == 80 && gr.girth > 4 && gr.covering &&
             gr.cycles_lift_to_20 && secs < kGammaSeconds;
    r.data = {{"search_nodes", st.nodes},   {"four_cycles", cycles.size()}, {"five_cycle_holonomies", full},
              {"vertices", nv},             {"edges", ne},                  {"girth", gr.girth},
              {"lifts_close_at_20", gr.cycles_lift_to_20}, {"seconds", secs}};
    std::ostringstream s;
    s << full << "/36 holonomies are 5-cycles, Gamma has " << nv << " vertices, " << ne << " edges, girth "
      << gr.girth << ", lifts close at 20: " << (gr.cycles_lift_to_20 ? "yes" : "no");
    r.summary = s.str();
    return r;
}

CriterionResult link_atlas(const AcceptanceOptions&) {
    CriterionResult r{2, "link atlas", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    bool ok = true;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (int p = 0; p < 8; ++p) {
        const LinkComplex& l = a.link(p);
        bool ram = a.branch(p) >= 0;
        std::array<size_t, 3> want = ram ? std::array<size_t, 3>{44, 240, 320} : std::array<size_t, 3>{12, 48, 64};
        std::array<size_t, 3> got{static_cast<size_t>(l.size()), l.edges.size(), l.tris.size()};
        bool flag = !check_flag(l);
        LinkComplex up = a.ascending(p), dn = a.descending(p);
        int dup = up.diameter(), ddn = dn.diameter();
        bool gamma_cycles = true;
        if (ram)
            for (const LinkComplex* h : {&up, &dn}) {
                // remove the two poles of the suspension; what is left must be one 20-cycle
                auto nb = h->neighbours();
                std::vector<int> keep;
                for (int v = 0; v < h->size(); ++v)
                    if (nb[v].size() != 20) keep.push_back(v);
                LinkComplex g = h->full_subcomplex(keep);
                auto gn = g.neighbours();
                bool cyc = g.size() == 20 && g.connected();
                for (const auto& x : gn) cyc = cyc && x.size() == 2;
                gamma_cycles = gamma_cycles && cyc;
            }
        bool pass = got == want && flag && dup == 2 && ddn == 2 && gamma_cycles;
        ok = ok && pass;
        per.push_back({{"base", p},
                       {"ramified", ram},
                       {"cells", got},
                       {"flag", flag},
                       {"diam_up", dup},
                       {"diam_down", ddn},
                       {"gamma_20_cycles", ram ? nlohmann::ordered_json(gamma_cycles) : nlohmann::ordered_json()}});
    }
    r.pass = ok;
    r.data = {{"bases", per}};
    r.summary = ok ? "cell counts (12,48,64) and (44,240,320), flag, Gamma up/down single 20-cycles, diameters 2"
                   : "a link check failed, see data";
    return r;
}

CriterionResult constants(const AcceptanceOptions&) {
    CriterionResult r{3, "constants", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    LinkAreaStats st = link_area_bound(a);
    int p = st.witness_link / 2;
    LinkComplex wl = st.witness_link % 2 ? a.ascending(p) : a.descending(p);
    int sphere = filling_area_oracle(wl, st.witness);
    int c3 = expansion_bound(st.T);
    r.pass = st.T == 20 && st.witness.size() == 4 && sphere == 20 && c3 == 61;
    r.data = {{"T", st.T},
              {"C3", c3},
              {"loops", st.loops},
              {"discs_ok", st.discs_ok},
              {"witness_base", p},
              {"witness_link", st.witness_link % 2 ? "ascending" : "descending"},
              {"witness", st.witness},
              {"witness_sphere_area", sphere}};
    std::ostringstream s;
    s << "T=" << st.T << " over " << st.loops << " cycles, witness " << st.witness.size() << "-cycle of area " << sphere
      << ", C3=" << c3;
    r.summary = s.str();
    return r;
}

CriterionResult placement(const AcceptanceOptions&) {
    CriterionResult r{4, "branch placement", false, {}, {}, 0};
    PlacementSearch ps = place_branch_loci();
    bool ineq = !ps.solutions.empty();
    for (const Placement& p : ps.solutions) ineq = ineq && p.v[1] != p.v[3] && p.v[0] != p.v[5] && p.v[2] != p.v[4];
    DecoratedComplex x = build_theta3(ps.chosen);
    CheckReport cr = local_checks(x, [](int) { return false; }, false);
    r.pass = ineq && cr.ok && cr.squares_checked == 96 && cr.cubes_checked == 64;
    r.data = {{"solutions", ps.solutions.size()},
              {"chosen", ps.chosen.v},
              {"squares_checked", cr.squares_checked},
              {"cubes_checked", cr.cubes_checked},
              {"violations", cr.violations}};
    std::ostringstream s;
    s << ps.solutions.size() << " of 64 placements valid, chosen " << ps.chosen.str() << " passes "
      << cr.squares_checked << " square and " << cr.cubes_checked << " cube checks";
    r.summary = s.str();
    return r;
}

CriterionResult development(const AcceptanceOptions& o) {
    CriterionResult r{5, "development", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    bool ok = true;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    std::ostringstream s;
    for (BaseType t : {BaseType::Unramified, BaseType::R1}) {
        int p = base_vertex_for(t, a.placement());
        Development d(a, p);
        d.grow_ball(o.ball_radius);
        BallReport br = verify_ball(d, a, o.ball_radius, o.threads);
        std::string j1 = d.to_json(false).dump();
        Development e(a, p);
        e.grow_ball(o.ball_radius);
        std::string j2 = e.to_json(false).dump();
        bool same = j1 == j2 && d.digest() == e.digest();
        ok = ok && br.ok && br.violations_count == 0 && same;
        per.push_back({{"base", base_type_name(t)},
                       {"vertices", d.size()},
                       {"digest", d.digest()},
                       {"violations", br.violations_count},
                       {"double_run_identical", same}});
        s << base_type_name(t) << ": " << d.size() << " vertices, " << br.violations_count << " violations, "
          << (same ? "identical" : "different") << " rerun; ";
    }
    r.pass = ok;
    r.data = {{"radius", o.ball_radius}, {"balls", per}};
    r.summary = "radius " + std::to_string(o.ball_radius) + ", " + s.str();
    r.summary.resize(r.summary.size() - 2);
    return r;
}

CriterionResult four_point_constant(const AcceptanceOptions& o) {
    CriterionResult r{6, "four-point constant", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    FourPointStats st;
    bool witness_ok = false;
    std::array<int, 4> corners{};
    with_grid(a, 4, {0}, [&](Development& d, const GridEmbedding& g) {
        corners = grid_corners(g);
        int center = g.at(2, 2);
        std::vector<int> pool = sample_ball(d, center, 7, o.pool_size, o.seed);
        for (int v : g.v) pool.push_back(v);
        st = four_point_scan(d, pool, o.four_point_samples, o.seed, {corners});
        std::set<int> w(st.witness.pts.begin(), st.witness.pts.end()), c(corners.begin(), corners.end());
        witness_ok = w == c && is_isometric(d, g);
        return true;
    });
    r.pass = st.quadruples >= o.four_point_samples && st.max_delta == 4 && witness_ok;
    r.data = st.to_json();
    r.data["samples_requested"] = o.four_point_samples;
    r.data["witness_is_square_corners"] = witness_ok;
    std::ostringstream s;
    s << st.quadruples << " quadruples in B_7, max (L-M)/2 = " << st.max_delta
      << (witness_ok ? ", witness = corners of an isometric 4-square" : ", witness is not the 4-square");
    r.summary = s.str();
    return r;
}

CriterionResult squares(const AcceptanceOptions& o) {
    CriterionResult r{7, "squares", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    std::string fig = figure_4square().canonical();
    int fig_base = -1;
    for (int p : {0, 1, 3, 4, 6, 7}) {
        if (with_grid(a, 4, {p}, [&](Development& d, const GridEmbedding& g) {
                return decorate(d, g).canonical() == fig && is_isometric(d, g);
            })) {
            fig_base = p;
            break;
        }
    }
    long fives = -1;
    int five_reach = 0;
    if (o.five_square_search) {
        SquareSearchResult s5 = square_search(a, 5, 5, {}, {}, true);
        fives = s5.total;
        five_reach = s5.explored_distance;
    }
    PatchCatalogue cat = build_catalogue(a);
    GridCertificate c55 = grid_certificate(cat, 5, 5);
    GridCertificate c35 = grid_certificate(cat, 3, 5);
    std::vector<GridDecoration> figs{figure_3x5_u1(), figure_3x5_u2()};
    int equal = 0, extending = 0;
    for (const auto& sol : c35.solutions) {
        bool eq = false, ext = false;
        for (const auto& f : figs) {
            eq = eq || matches_figure(sol, f, false);
            ext = ext || matches_figure(sol, f, true);
        }
        equal += eq;
        extending += ext;
    }
    bool figures_ok = !c35.solutions.empty() && equal == static_cast<int>(c35.solutions.size());
    r.pass = fig_base >= 0 && fives == 0 && c55.solutions.empty() && figures_ok;
    r.data = {{"four_square_with_figure_decoration_base", fig_base},
              {"five_squares", fives},
              {"five_search_reach", five_reach},
              {"cert_5x5_solutions", c55.solutions.size()},
              {"cert_3x5_solutions", c35.solutions.size()},
              {"cert_3x5_classes", c35.classes.size()},
              {"cert_3x5_equal_to_figures", equal},
              {"cert_3x5_extending_figures", extending}};
    std::ostringstream s;
    s << "4-square with the figure decoration " << (fig_base >= 0 ? "found" : "not found") << ", 5-squares: "
      << (fives < 0 ? std::string("not searched") : std::to_string(fives)) << " (partial grids explored out to distance "
      << five_reach << "), cert(5,5) " << c55.solutions.size() << " solutions, cert(3,5) " << c35.solutions.size()
      << " solutions of which " << equal << " equal and " << extending << " extend the 3x5 figures";
    r.summary = s.str();
    return r;
}

CriterionResult triangles(const AcceptanceOptions& o) {
    CriterionResult r{8, "thin triangles", false, {}, {}, 0};
    TriangleStats st;
    TriangleRecord wit;
    with_grid(default_atlas(), 4, {0}, [&](Development& d, const GridEmbedding& g) {
        std::vector<int> pool = sample_ball(d, g.at(2, 2), 7, o.pool_size, o.seed + 1);
        st = thin_triangle_scan(d, pool, o.triangle_samples, o.seed);
        wit = triangle_thinness(d, boundary_triangle(g));
        st.add(wit);
        return true;
    });
    r.pass = st.max_thinness2 <= 32 && wit.thinness2 >= 16;
    r.data = st.to_json();
    r.data["square_witness_thinness"] = wit.thinness2 / 2.0;
    std::ostringstream s;
    s << st.triangles << " triangles, max thinness " << st.max_thinness2 / 2.0 << " (bound 16), 4-square triangle "
      << wit.thinness2 / 2.0 << " (needs >= 8)";
    r.summary = s.str();
    return r;
}

CriterionResult medians(const AcceptanceOptions& o) {
    CriterionResult r{9, "median", false, {}, {}, 0};
    Development d(default_atlas(), 0);
    std::vector<int> pool = sample_ball(d, d.root(), 7, o.pool_size, o.seed + 2);
    std::mt19937_64 rng(o.seed);
    long unique = 0, tested = 0, budget = 0;
    while (tested < o.median_triples) {
        int u = pool[rng() % pool.size()], v = pool[rng() % pool.size()], w = pool[rng() % pool.size()];
        if (u == v || v == w || u == w) continue;
        MedianResult m = median(d, u, v, w);
        ++tested;
        unique += m.unique && !m.budget_hit;
        budget += m.budget_hit;
    }
    r.pass = tested >= 10000 && unique == tested;
    r.data = {{"triples", tested}, {"unique", unique}, {"budget_hits", budget}};
    std::ostringstream s;
    s << unique << "/" << tested << " triples in B_7 have a unique median";
    r.summary = s.str();
    return r;
}

CriterionResult filling_corpus(const AcceptanceOptions& o) {
    CriterionResult r{10, "filling pipeline", false, {}, {}, 0};
    const Atlas& a = default_atlas();
    std::vector<DehnRow> all;
    nlohmann::ordered_json per = nlohmann::ordered_json::array();
    for (BaseType t : {BaseType::Unramified, BaseType::R1, BaseType::R2, BaseType::R3}) {
        int p = base_vertex_for(t, a.placement());
        auto rows = dehn_sample(a, p, o.corpus_lengths, o.corpus_per_length, o.seed, o.threads);
        per.push_back({{"base", base_type_name(t)}, {"summary", summarize(rows).to_json()}});
        all.insert(all.end(), rows.begin(), rows.end());
    }
    DehnSummary s = summarize(all);
    long in_range = 0;
    for (const auto& row : all) in_range += row.run.n >= 8 && row.run.n <= 64;
    bool bounds = s.max_cell_expansion <= expansion_bound(20) && s.max_link_loop <= 5 && s.max_link_area <= 20;
    r.pass = in_range >= 500 && s.failed == 0 && bounds;
    r.data = s.to_json();
    r.data["loops_with_length_8_to_64"] = in_range;
    r.data["bases"] = per;
    std::ostringstream m;
    m << s.loops << " loops (" << in_range << " of length 8-64), " << s.failed << " failed; max cell expansion "
      << s.max_cell_expansion << " (<= 61), link loops <= " << s.max_link_loop << ", link area <= "
      << s.max_link_area << "; measured C1 " << s.C1 << ", C2 " << s.C2 << ", C1' " << s.C1prime;
    r.summary = m.str();
    return r;
}

CriterionResult exponent(const AcceptanceOptions&) {
    CriterionResult r{11, "exponent", false, {}, {}, 0};
    ExponentReport e = exponent_report(16, 61);
    r.pass = std::fabs(e.exponent - kExponentTarget) <= kExponentTolerance && e.exponent <= kExponentCeiling;
    r.data = e.to_json();
    std::ostringstream s;
    s.precision(6);
    s << "1 + 16 log2(61) = " << e.exponent << " (target " << kExponentTarget << " +- " << kExponentTolerance
      << ", ceiling " << kExponentCeiling << ")";
    r.summary = s.str();
    return r;
}

CriterionResult cross_checks(const AcceptanceOptions&) {
    CriterionResult r{12, "cross-checks", false, {}, {}, 0};
    LinkComplex oct = octahedron();
    long walks = 0, agree = 0;
    std::vector<int> w;
    auto rec = [&](auto&& self) -> void {
        if (w.size() >= 2 && oct.adjacent(w.back(), w.front())) {
            ++walks;
            agree += relator_area(oct, w) == filling_area_oracle(oct, w);
        }
        if (w.size() == 5) return;
        for (int v = 0; v < 6; ++v)
            if (oct.adjacent(w.back(), v)) {
                w.push_back(v);
                self(self);
                w.pop_back();
            }
    };
    for (int s = 0; s < 6; ++s) {
        w = {s};
        rec(rec);
    }
    nlohmann::ordered_json sq = nlohmann::ordered_json::array();
    bool implication = true;
    for (int c = 1; c <= 4; ++c) {
        int delta = -1;
        bool found = with_grid(default_atlas(), c, {0}, [&](Development& d, const GridEmbedding& g) {
            delta = four_point(d, grid_corners(g)).delta();
            return true;
        });
        implication = implication && (!found || delta >= c);
        sq.push_back({{"C", c}, {"square_found", found}, {"corner_delta", delta}});
    }
    r.pass = walks > 0 && agree == walks && implication;
    r.data = {{"octahedron_walks", walks}, {"oracle_agreements", agree}, {"squares", sq}};
    std::ostringstream s;
    s << "octahedron: " << agree << "/" << walks << " closed walks of length <= 5 agree with exhaustive search; "
      << "C-square found implies four-point max >= C for C = 1..4: " << (implication ? "yes" : "no");
    r.summary = s.str();
    return r;
}

}  // namespace

CriterionResult check_criterion(int id, const AcceptanceOptions& o) {
    using Fn = CriterionResult (*)(const AcceptanceOptions&);
    static const Fn table[kCriteria] = {gamma_certificate, link_atlas,    constants,      placement,
                                        development,       four_point_constant, squares, triangles,
                                        medians,           filling_corpus, exponent,      cross_checks};
    if (id < 1 || id > kCriteria) throw FormatError("no acceptance criterion " + std::to_string(id));
    auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = table[id - 1](o);
    } catch (const Error& e) {
        static const char* titles[kCriteria] = {
            "gamma certificate", "link atlas",     "constants", "branch placement", "development", "four-point constant",
            "squares",           "thin triangles", "median",    "filling pipeline", "exponent",    "cross-checks"};
        r.id = id;
        r.title = titles[id - 1];
        r.pass = false;
        r.summary = e.kind() + ": " + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o, const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& each) {
    std::vector<int> todo = ids;
    if (todo.empty())
        for (int i = 1; i <= kCriteria; ++i) todo.push_back(i);
    std::vector<CriterionResult> out;
    for (int id : todo) {
        out.push_back(check_criterion(id, o));
        if (each) each(out.back());
    }
    return out;
}

}  // namespace ramcube
