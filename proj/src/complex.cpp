#include "ramcube/complex.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace ramcube {

namespace {

int shared_vertex(const EdgeRec& a, const EdgeRec& b) {
    int hits = 0, v = -1;
    for (int x : a.ends)
        for (int y : b.ends)
            if (x == y) { ++hits; v = x; }
    return hits == 1 ? v : -1;
}

}  // namespace

void DecoratedComplex::require_mutable() const {
    if (frozen_) throw FrozenComplex("complex is frozen");
}

int DecoratedComplex::add_vertex(const VertexRec& v) {
    require_mutable();
    if (v.base < 0 || v.base >= 8) throw MalformedCell("base vertex out of range");
    verts_.push_back(v);
    return num_vertices() - 1;
}

int DecoratedComplex::add_edge(const EdgeRec& e) {
    require_mutable();
    for (int x : e.ends)
        if (x < 0 || x >= num_vertices()) throw MalformedCell("edge endpoint is not a vertex");
    if (e.ends[0] == e.ends[1]) throw MalformedCell("edge is a loop");
    if (e.coord < 0 || e.coord > 2 || e.letter < 0 || e.letter > 3)
        throw MalformedCell("edge label out of range");
    edges_.push_back(e);
    return num_edges() - 1;
}

int DecoratedComplex::add_square(const SquareRec& s) {
    require_mutable();
    std::array<int, 4> vs{};
    for (int k = 0; k < 4; ++k) {
        int a = s.edges[k], b = s.edges[(k + 1) % 4];
        if (a < 0 || a >= num_edges() || b < 0 || b >= num_edges())
            throw MalformedCell("square edge is not an edge");
        int v = shared_vertex(edges_[a], edges_[b]);
        if (v < 0) throw MalformedCell("square edges do not form a cycle");
        vs[(k + 1) % 4] = v;
    }
    std::array<int, 4> sorted = vs;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw MalformedCell("square has a repeated vertex");
    for (int k = 0; k < 4; ++k) {
        const EdgeRec& e = edges_[s.edges[k]];
        std::array<int, 2> want{vs[k], vs[(k + 1) % 4]};
        if (!((e.ends[0] == want[0] && e.ends[1] == want[1]) ||
              (e.ends[0] == want[1] && e.ends[1] == want[0])))
            throw MalformedCell("square edges do not form a cycle");
    }
    squares_.push_back(s);
    sq_verts_.push_back(vs);
    return num_squares() - 1;
}

int DecoratedComplex::add_cube(const CubeRec& c) {
    require_mutable();
    std::map<int, int> edge_count, vert_count;
    for (int f : c.faces) {
        if (f < 0 || f >= num_squares()) throw MalformedCell("cube face is not a square");
        for (int e : squares_[f].edges) ++edge_count[e];
        for (int v : sq_verts_[f]) ++vert_count[v];
    }
    if (edge_count.size() != 12 || vert_count.size() != 8)
        throw MalformedCell("cube faces do not close up");
    for (auto [e, n] : edge_count)
        if (n != 2) throw MalformedCell("cube edge not in exactly two faces");
    for (auto [v, n] : vert_count)
        if (n != 3) throw MalformedCell("cube vertex not in exactly three faces");
    std::array<int, 8> vs{};
    int k = 0;
    for (auto [v, n] : vert_count) vs[k++] = v;
    cubes_.push_back(c);
    cube_verts_.push_back(vs);
    return num_cubes() - 1;
}

void DecoratedComplex::freeze() {
    if (frozen_) return;
    edges_at_.assign(verts_.size(), {});
    sq_at_.assign(verts_.size(), {});
    cube_at_.assign(verts_.size(), {});
    for (int e = 0; e < num_edges(); ++e)
        for (int v : edges_[e].ends) edges_at_[v].push_back(e);
    for (int s = 0; s < num_squares(); ++s) {
        for (int k = 0; k < 4; ++k) {
            Corner c;
            c.cell = s;
            c.edges = {squares_[s].edges[(k + 3) % 4], squares_[s].edges[k], -1};
            sq_at_[sq_verts_[s][k]].push_back(c);
        }
    }
    for (int q = 0; q < num_cubes(); ++q) {
        std::set<int> es;
        for (int f : cubes_[q].faces)
            for (int e : squares_[f].edges) es.insert(e);
        for (int v : cube_verts_[q]) {
            Corner c;
            c.cell = q;
            int k = 0;
            for (int e : es)
                if (edges_[e].ends[0] == v || edges_[e].ends[1] == v) {
                    if (k == 3) throw MalformedCell("cube corner with more than three edges");
                    c.edges[k++] = e;
                }
            if (k != 3) throw MalformedCell("cube corner with fewer than three edges");
            cube_at_[v].push_back(c);
        }
    }
    frozen_ = true;
}

const VertexRec& DecoratedComplex::vertex(int v) const {
    if (v < 0 || v >= num_vertices()) throw NotAVertex("no vertex " + std::to_string(v));
    return verts_[v];
}

VertexRec& DecoratedComplex::mutable_vertex(int v) {
    if (v < 0 || v >= num_vertices()) throw NotAVertex("no vertex " + std::to_string(v));
    return verts_[v];
}

const std::vector<int>& DecoratedComplex::edges_at(int v) const {
    vertex(v);
    if (!frozen_) throw FrozenComplex("incidences need a frozen complex");
    return edges_at_[v];
}

const std::vector<Corner>& DecoratedComplex::square_corners(int v) const {
    vertex(v);
    if (!frozen_) throw FrozenComplex("incidences need a frozen complex");
    return sq_at_[v];
}

const std::vector<Corner>& DecoratedComplex::cube_corners(int v) const {
    vertex(v);
    if (!frozen_) throw FrozenComplex("incidences need a frozen complex");
    return cube_at_[v];
}

int DecoratedComplex::other_end(int e, int v) const {
    const EdgeRec& r = edges_.at(e);
    return r.ends[0] == v ? r.ends[1] : r.ends[0];
}

nlohmann::ordered_json DecoratedComplex::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "ramcube.complex/1";
    auto& vs = j["vertices"] = nlohmann::ordered_json::array();
    for (const auto& v : verts_)
        vs.push_back({v.base, v.ramified ? 1 : 0, v.branch, v.dist, v.height});
    auto& es = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& e : edges_)
        es.push_back({e.ends[0], e.ends[1], e.coord, e.letter, e.ramified ? 1 : 0,
                      e.sheet[0], e.sheet[1]});
    auto& ss = j["squares"] = nlohmann::ordered_json::array();
    for (const auto& s : squares_) ss.push_back(s.edges);
    auto& cs = j["cubes"] = nlohmann::ordered_json::array();
    for (const auto& c : cubes_) cs.push_back(c.faces);
    return j;
}

DecoratedComplex DecoratedComplex::from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "ramcube.complex/1")
        throw FormatError("expected schema ramcube.complex/1");
    DecoratedComplex x;
    try {
        for (const auto& v : j.at("vertices")) {
            VertexRec r;
            r.base = v.at(0);
            r.ramified = v.at(1).get<int>() != 0;
            r.branch = v.at(2);
            r.dist = v.at(3);
            r.height = v.at(4);
            x.add_vertex(r);
        }
        for (const auto& e : j.at("edges")) {
            EdgeRec r;
            r.ends = {e.at(0).get<int>(), e.at(1).get<int>()};
            r.coord = e.at(2);
            r.letter = e.at(3);
            r.ramified = e.at(4).get<int>() != 0;
            r.sheet = {e.at(5).get<int>(), e.at(6).get<int>()};
            x.add_edge(r);
        }
        for (const auto& s : j.at("squares")) x.add_square({s.get<std::array<int, 4>>()});
        for (const auto& c : j.at("cubes")) x.add_cube({c.get<std::array<int, 6>>()});
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad complex json: ") + ex.what());
    }
    x.freeze();
    return x;
}

// ---------------------------------------------------------------------------

void LinkComplex::finalize() {
    int n = size();
    adj_.assign(static_cast<size_t>(n) * n, 0);
    for (auto [a, b] : edges) adj_[a * n + b] = adj_[b * n + a] = 1;
}

bool LinkComplex::has_triangle(int a, int b, int c) const {
    std::array<int, 3> q{a, b, c};
    std::sort(q.begin(), q.end());
    for (auto t : tris) {
        std::sort(t.begin(), t.end());
        if (t == q) return true;
    }
    return false;
}

std::vector<std::vector<int>> LinkComplex::neighbours() const {
    std::vector<std::vector<int>> nb(size());
    for (auto [a, b] : edges) {
        nb[a].push_back(b);
        nb[b].push_back(a);
    }
    for (auto& l : nb) std::sort(l.begin(), l.end());
    return nb;
}

LinkComplex LinkComplex::full_subcomplex(const std::vector<int>& keep) const {
    std::vector<int> idx(size(), -1);
    LinkComplex out;
    for (int v : keep) {
        idx[v] = out.size();
        out.verts.push_back(verts[v]);
    }
    for (size_t k = 0; k < edges.size(); ++k) {
        auto [a, b] = edges[k];
        if (idx[a] >= 0 && idx[b] >= 0) {
            out.edges.push_back({idx[a], idx[b]});
            out.edge_cell.push_back(k < edge_cell.size() ? edge_cell[k] : -1);
        }
    }
    for (size_t k = 0; k < tris.size(); ++k) {
        auto [a, b, c] = tris[k];
        if (idx[a] >= 0 && idx[b] >= 0 && idx[c] >= 0) {
            out.tris.push_back({idx[a], idx[b], idx[c]});
            out.tri_cell.push_back(k < tri_cell.size() ? tri_cell[k] : -1);
        }
    }
    out.finalize();
    return out;
}

namespace {

std::vector<int> bfs_dist(const std::vector<std::vector<int>>& nb, int s) {
    std::vector<int> d(nb.size(), -1);
    std::deque<int> q{s};
    d[s] = 0;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : nb[u])
            if (d[w] < 0) {
                d[w] = d[u] + 1;
                q.push_back(w);
            }
    }
    return d;
}

}  // namespace

bool LinkComplex::connected() const {
    if (size() == 0) return true;
    auto d = bfs_dist(neighbours(), 0);
    return std::find(d.begin(), d.end(), -1) == d.end();
}

int LinkComplex::diameter() const {
    auto nb = neighbours();
    int best = 0;
    for (int s = 0; s < size(); ++s) {
        auto d = bfs_dist(nb, s);
        for (int x : d) {
            if (x < 0) return -1;
            best = std::max(best, x);
        }
    }
    return best;
}

int LinkComplex::euler_characteristic() const {
    return size() - static_cast<int>(edges.size()) + static_cast<int>(tris.size());
}

LinkComplex link(const DecoratedComplex& x, int v) {
    LinkComplex l;
    const auto& es = x.edges_at(v);
    std::unordered_map<int, int> idx;
    for (int e : es) {
        const EdgeRec& r = x.edge(e);
        int k = r.ends[0] == v ? 0 : 1;
        LinkVertex lv;
        lv.coord = r.coord;
        lv.letter = r.letter;
        lv.up = (k == 0);
        lv.sheet = r.sheet[k];
        lv.edge = e;
        idx[e] = l.size();
        l.verts.push_back(lv);
    }
    for (const Corner& c : x.square_corners(v)) {
        l.edges.push_back({idx.at(c.edges[0]), idx.at(c.edges[1])});
        l.edge_cell.push_back(c.cell);
    }
    for (const Corner& c : x.cube_corners(v)) {
        l.tris.push_back({idx.at(c.edges[0]), idx.at(c.edges[1]), idx.at(c.edges[2])});
        l.tri_cell.push_back(c.cell);
    }
    l.finalize();
    return l;
}

std::optional<std::array<int, 3>> check_flag(const LinkComplex& l) {
    int n = l.size();
    std::set<std::array<int, 3>> tri;
    for (auto t : l.tris) {
        std::sort(t.begin(), t.end());
        tri.insert(t);
    }
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (!l.adjacent(a, b)) continue;
            for (int c = b + 1; c < n; ++c)
                if (l.adjacent(a, c) && l.adjacent(b, c) && !tri.count({a, b, c}))
                    return std::array<int, 3>{a, b, c};
        }
    return std::nullopt;
}

LinkComplex ascending_link(const LinkComplex& l) {
    std::vector<int> keep;
    for (int i = 0; i < l.size(); ++i)
        if (l.verts[i].up) keep.push_back(i);
    return l.full_subcomplex(keep);
}

LinkComplex descending_link(const LinkComplex& l) {
    std::vector<int> keep;
    for (int i = 0; i < l.size(); ++i)
        if (!l.verts[i].up) keep.push_back(i);
    return l.full_subcomplex(keep);
}

std::vector<int> morse_heights(const DecoratedComplex& x, int base_vertex) {
    x.vertex(base_vertex);
    std::vector<int> h(x.num_vertices(), 0);
    std::vector<char> seen(x.num_vertices(), 0);
    std::deque<int> q{base_vertex};
    seen[base_vertex] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int e : x.edges_at(u)) {
            const EdgeRec& r = x.edge(e);
            int w = x.other_end(e, u);
            int hw = r.ends[0] == u ? h[u] + 1 : h[u] - 1;
            if (!seen[w]) {
                seen[w] = 1;
                h[w] = hw;
                q.push_back(w);
            } else if (h[w] != hw) {
                throw InconsistentHeight("edge " + std::to_string(e) + " breaks the height function");
            }
        }
    }
    return h;
}

const char* cycle_type_name(CycleType t) {
    switch (t) {
        case CycleType::U1: return "U.1";
        case CycleType::U2: return "U.2";
        case CycleType::R1: return "R.1";
        case CycleType::R2: return "R.2";
    }
    return "?";
}

CycleType classify_4cycle(const LinkComplex& l, bool ramified, const std::array<int, 4>& c) {
    for (int k = 0; k < 4; ++k) {
        if (c[k] < 0 || c[k] >= l.size()) throw NotACycle("cycle vertex out of range");
        for (int m = k + 1; m < 4; ++m)
            if (c[k] == c[m]) throw NotACycle("cycle repeats a vertex");
        if (!l.adjacent(c[k], c[(k + 1) % 4])) throw NotACycle("consecutive cycle vertices not adjacent");
    }
    bool diag = l.adjacent(c[0], c[2]) || l.adjacent(c[1], c[3]);
    if (ramified) return diag ? CycleType::R2 : CycleType::R1;
    return diag ? CycleType::U2 : CycleType::U1;
}

CycleType classify_4cycle(const DecoratedComplex& x, int v, const std::array<int, 4>& cycle) {
    return classify_4cycle(link(x, v), x.vertex(v).ramified, cycle);
}

void CheckReport::fail(std::string msg) {
    ok = false;
    if (violations.size() < 200) violations.push_back(std::move(msg));
}

namespace {

int far_corner_square(const DecoratedComplex& x, int s, int v) {
    const auto& vs = x.square_vertices(s);
    for (int k = 0; k < 4; ++k)
        if (vs[k] == v) return vs[(k + 2) % 4];
    return -1;
}

void check_block(const DecoratedComplex& x, int v, const std::array<std::array<int, 2>, 3>& pick,
                 const std::map<std::pair<int, int>, int>& sq,
                 const std::map<std::array<int, 3>, int>& cu, CheckReport& rep) {
    // Every cube of the block must be present, otherwise the link check reports it.
    std::vector<int> cubes;
    for (int m = 0; m < 8; ++m) {
        std::array<int, 3> es{pick[0][m & 1], pick[1][(m >> 1) & 1], pick[2][(m >> 2) & 1]};
        std::sort(es.begin(), es.end());
        auto it = cu.find(es);
        if (it == cu.end()) return;
        cubes.push_back(it->second);
    }
    ++rep.blocks_checked;
    std::string at = "2x2x2 block at vertex " + std::to_string(v) + ": ";
    std::array<int, 3> sigma{-1, -1, -1};
    std::map<int, int> face_coord;  // face-centre vertex -> its direction
    for (int c = 0; c < 3; ++c)
        for (int e : pick[c]) {
            int n = x.other_end(e, v);
            const VertexRec& r = x.vertex(n);
            if (!r.ramified || r.branch == c) {
                rep.fail(at + "face centre " + std::to_string(n) + " has the wrong branching");
                return;
            }
            if (sigma[c] >= 0 && sigma[c] != r.branch) {
                rep.fail(at + "opposite face centres branch differently");
                return;
            }
            sigma[c] = r.branch;
            face_coord[n] = c;
        }
    if (sigma[0] == sigma[1] || sigma[0] == sigma[2] || sigma[1] == sigma[2]) {
        rep.fail(at + "face-centre branching is not a cyclic permutation");
        return;
    }
    for (int c = 0; c < 3; ++c)
        for (int d = c + 1; d < 3; ++d)
            for (int e : pick[c])
                for (int f : pick[d]) {
                    auto it = sq.find({std::min(e, f), std::max(e, f)});
                    if (it == sq.end()) continue;
                    int m = far_corner_square(x, it->second, v);
                    if (!x.vertex(m).ramified) rep.fail(at + "edge midpoint " + std::to_string(m) + " unramified");
                }
    std::set<int> block_edges;
    for (int q : cubes) {
        for (int f : x.cube(q).faces)
            for (int e : x.square(f).edges) block_edges.insert(e);
        // The corner opposite v is the cube vertex at distance three.
        for (int u : x.cube_vertices(q)) {
            bool touches = (u == v);
            for (int f : x.cube(q).faces) {
                const auto& sv = x.square_vertices(f);
                if (std::find(sv.begin(), sv.end(), v) != sv.end() &&
                    std::find(sv.begin(), sv.end(), u) != sv.end())
                    touches = true;
            }
            if (!touches && x.vertex(u).ramified)
                rep.fail(at + "block corner " + std::to_string(u) + " ramified");
        }
    }
    int ram = 0;
    for (int e : block_edges) {
        const EdgeRec& r = x.edge(e);
        if (!r.ramified) continue;
        ++ram;
        bool ok = false;
        for (int u : r.ends) {
            auto it = face_coord.find(u);
            if (it != face_coord.end() && sigma[it->second] == r.coord) ok = true;
        }
        if (!ok) rep.fail(at + "ramified edge " + std::to_string(e) + " off the face segments");
    }
    if (ram != 12) rep.fail(at + std::to_string(ram) + " ramified edges instead of 12");
}

}  // namespace

CheckReport local_checks(const DecoratedComplex& x, const std::function<bool(int)>& interior,
                         bool check_four_cycles) {
    CheckReport rep;
    for (int s = 0; s < x.num_squares(); ++s) {
        ++rep.squares_checked;
        int red = -1, nred = 0;
        for (int e : x.square(s).edges)
            if (x.edge(e).ramified) { ++nred; red = e; }
        if (nred != 1) {
            rep.fail("square " + std::to_string(s) + " has " + std::to_string(nred) + " ramified edges");
            continue;
        }
        int off = 0;
        for (int u : x.square_vertices(s))
            if (x.vertex(u).ramified && u != x.edge(red).ends[0] && u != x.edge(red).ends[1]) ++off;
        if (off != 1)
            rep.fail("square " + std::to_string(s) + " has " + std::to_string(off) + " off-edge ramified vertices");
    }
    for (int q = 0; q < x.num_cubes(); ++q) {
        ++rep.cubes_checked;
        std::set<int> es;
        for (int f : x.cube(q).faces)
            for (int e : x.square(f).edges) es.insert(e);
        std::set<int> coords, ends;
        int n = 0;
        for (int e : es) {
            const EdgeRec& r = x.edge(e);
            if (!r.ramified) continue;
            ++n;
            coords.insert(r.coord);
            ends.insert(r.ends[0]);
            ends.insert(r.ends[1]);
        }
        if (n != 3 || coords.size() != 3 || ends.size() != 6)
            rep.fail("cube " + std::to_string(q) + " does not have three disjoint ramified edges");
    }

    std::set<std::array<int, 4>> square_edge_sets;
    if (check_four_cycles)
        for (int s = 0; s < x.num_squares(); ++s) {
            auto es = x.square(s).edges;
            std::sort(es.begin(), es.end());
            square_edge_sets.insert(es);
        }

    for (int v = 0; v < x.num_vertices(); ++v) {
        if (!interior(v)) continue;
        if (!x.vertex(v).ramified) {
            std::map<std::pair<int, int>, int> sq;
            for (const Corner& c : x.square_corners(v))
                sq[{std::min(c.edges[0], c.edges[1]), std::max(c.edges[0], c.edges[1])}] = c.cell;
            std::map<std::array<int, 3>, int> cu;
            for (const Corner& c : x.cube_corners(v)) {
                auto es = c.edges;
                std::sort(es.begin(), es.end());
                cu[es] = c.cell;
            }
            std::array<std::vector<int>, 3> by_coord;
            for (int e : x.edges_at(v)) by_coord[x.edge(e).coord].push_back(e);
            std::vector<std::array<int, 2>> pairs[3];
            for (int c = 0; c < 3; ++c)
                for (size_t i = 0; i < by_coord[c].size(); ++i)
                    for (size_t j = i + 1; j < by_coord[c].size(); ++j)
                        pairs[c].push_back({by_coord[c][i], by_coord[c][j]});
            for (const auto& p0 : pairs[0])
                for (const auto& p1 : pairs[1])
                    for (const auto& p2 : pairs[2]) check_block(x, v, {p0, p1, p2}, sq, cu, rep);
        }
        if (!check_four_cycles) continue;
        // Paths v - a - c through each neighbour a, grouped by the far end c.
        std::map<int, std::vector<std::pair<int, int>>> via;
        for (int e : x.edges_at(v)) {
            int a = x.other_end(e, v);
            for (int f : x.edges_at(a)) {
                int c = x.other_end(f, a);
                if (c != v) via[c].push_back({e, f});
            }
        }
        for (const auto& [c, paths] : via)
            for (size_t i = 0; i < paths.size(); ++i)
                for (size_t j = i + 1; j < paths.size(); ++j) {
                    if (x.other_end(paths[i].first, v) == x.other_end(paths[j].first, v)) continue;
                    ++rep.four_cycles_checked;
                    std::array<int, 4> es{paths[i].first, paths[i].second, paths[j].first, paths[j].second};
                    std::sort(es.begin(), es.end());
                    if (!square_edge_sets.count(es))
                        rep.fail("4-cycle through vertex " + std::to_string(v) + " bounds no square");
                }
    }
    return rep;
}

nlohmann::ordered_json LinkComplex::to_json() const {
    nlohmann::ordered_json vs = nlohmann::ordered_json::array();
    for (const auto& v : verts)
        vs.push_back({{"coord", v.coord}, {"letter", v.letter}, {"up", v.up}, {"sheet", v.sheet}, {"edge", v.edge}});
    return {{"schema", "ramcube.link/1"}, {"vertices", vs}, {"edges", edges}, {"triangles", tris}};
}

}  // namespace ramcube
