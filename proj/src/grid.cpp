#include "ramcube/grid.hpp"

#include <algorithm>
#include <numeric>

namespace ramcube {

GridDecoration::GridDecoration(int w, int h)
    : w_(w), h_(h), vram_((w + 1) * (h + 1), 0), hram_(w * (h + 1), 0), vedge_((w + 1) * h, 0) {
    if (w < 1 || h < 1) throw FormatError("grid needs at least one cell");
}

void GridDecoration::add_segment(int x0, int y0, int x1, int y1) {
    if (x0 != x1 && y0 != y1) throw FormatError("segment is not axis parallel");
    if (x0 > x1) std::swap(x0, x1);
    if (y0 > y1) std::swap(y0, y1);
    for (int x = x0; x <= x1; ++x)
        for (int y = y0; y <= y1; ++y) set_vertex(x, y, true);
    for (int x = x0; x < x1; ++x) set_hedge(x, y0, true);
    for (int y = y0; y < y1; ++y) set_vedge(x0, y, true);
}

namespace {

std::array<int, 2> map_point(int s, int w, int h, int x, int y) {
    if (s & 4) {
        std::swap(x, y);
        std::swap(w, h);
    }
    if (s & 1) x = w - x;
    if (s & 2) y = h - y;
    return {x, y};
}

void set_edge(GridDecoration& g, std::array<int, 2> a, std::array<int, 2> b, bool r) {
    if (a[1] == b[1]) {
        g.set_hedge(std::min(a[0], b[0]), a[1], r);
    } else {
        g.set_vedge(a[0], std::min(a[1], b[1]), r);
    }
}

}  // namespace

GridDecoration GridDecoration::transformed(int s) const {
    GridDecoration out = (s & 4) ? GridDecoration(h_, w_) : GridDecoration(w_, h_);
    for (int x = 0; x <= w_; ++x)
        for (int y = 0; y <= h_; ++y) {
            auto p = map_point(s, w_, h_, x, y);
            out.set_vertex(p[0], p[1], vertex(x, y));
            if (x < w_) set_edge(out, p, map_point(s, w_, h_, x + 1, y), hedge(x, y));
            if (y < h_) set_edge(out, p, map_point(s, w_, h_, x, y + 1), vedge(x, y));
        }
    return out;
}

std::string GridDecoration::key() const {
    std::string k = std::to_string(w_) + "x" + std::to_string(h_) + ":";
    for (char c : vram_) k += c ? '1' : '0';
    k += '/';
    for (char c : hram_) k += c ? '1' : '0';
    k += '/';
    for (char c : vedge_) k += c ? '1' : '0';
    return k;
}

std::string GridDecoration::canonical() const {
    std::string best;
    for (int s = 0; s < 8; ++s) {
        std::string k = transformed(s).key();
        if (best.empty() || k < best) best = k;
    }
    return best;
}

std::string GridDecoration::str() const {
    std::string out;
    for (int y = h_; y >= 0; --y) {
        for (int x = 0; x <= w_; ++x) {
            out += vertex(x, y) ? '*' : 'o';
            if (x < w_) out += hedge(x, y) ? "===" : "---";
        }
        out += '\n';
        if (y == 0) break;
        for (int x = 0; x <= w_; ++x) {
            out += vedge(x, y - 1) ? '#' : '|';
            if (x < w_) out += "   ";
        }
        out += '\n';
    }
    return out;
}

bool GridDecoration::cells_ok() const {
    for (int x = 0; x < w_; ++x)
        for (int y = 0; y < h_; ++y) {
            if (hedge(x, y) && !(vertex(x, y) && vertex(x + 1, y))) return false;
            if (vedge(x, y) && !(vertex(x, y) && vertex(x, y + 1))) return false;
            std::array<std::array<int, 2>, 4> c{{{x, y}, {x + 1, y}, {x + 1, y + 1}, {x, y + 1}}};
            std::array<bool, 4> e{hedge(x, y), vedge(x + 1, y), hedge(x, y + 1), vedge(x, y)};
            int red = -1, nred = 0;
            for (int k = 0; k < 4; ++k)
                if (e[k]) {
                    ++nred;
                    red = k;
                }
            if (nred != 1) return false;
            int off = 0;
            for (int k = 0; k < 4; ++k)
                if (k != red && k != (red + 1) % 4 && vertex(c[k][0], c[k][1])) ++off;
            if (off != 1) return false;
        }
    // Edges on the last row and column.
    for (int x = 0; x < w_; ++x)
        if (hedge(x, h_) && !(vertex(x, h_) && vertex(x + 1, h_))) return false;
    for (int y = 0; y < h_; ++y)
        if (vedge(w_, y) && !(vertex(w_, y) && vertex(w_, y + 1))) return false;
    return true;
}

bool GridDecoration::has_interior_component() const {
    const int n = (w_ + 1) * (h_ + 1);
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    auto id = [&](int x, int y) { return y * (w_ + 1) + x; };
    for (int x = 0; x <= w_; ++x)
        for (int y = 0; y <= h_; ++y) {
            if (x < w_ && hedge(x, y)) parent[find(id(x, y))] = find(id(x + 1, y));
            if (y < h_ && vedge(x, y)) parent[find(id(x, y))] = find(id(x, y + 1));
        }
    std::vector<char> touches(n, 0), present(n, 0);
    for (int x = 0; x <= w_; ++x)
        for (int y = 0; y <= h_; ++y) {
            if (!vertex(x, y)) continue;
            int r = find(id(x, y));
            present[r] = 1;
            if (x == 0 || y == 0 || x == w_ || y == h_) touches[r] = 1;
        }
    for (int r = 0; r < n; ++r)
        if (present[r] && !touches[r]) return true;
    return false;
}

int patch_vertex_bit(int dx, int dy) { return (dx + 1) + 3 * (dy + 1); }
int patch_hedge_bit(int dx, int dy) { return 9 + 2 * (dy + 1) + (dx + 1); }
int patch_vedge_bit(int dx, int dy) { return 15 + 3 * (dy + 1) + (dx + 1); }

uint32_t GridDecoration::patch(int x, int y) const {
    if (x < 1 || y < 1 || x >= w_ || y >= h_) throw FormatError("patch needs an interior vertex");
    uint32_t p = 0;
    for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
            if (vertex(x + dx, y + dy)) p |= 1u << patch_vertex_bit(dx, dy);
            if (dx < 1 && hedge(x + dx, y + dy)) p |= 1u << patch_hedge_bit(dx, dy);
            if (dy < 1 && vedge(x + dx, y + dy)) p |= 1u << patch_vedge_bit(dx, dy);
        }
    return p;
}

nlohmann::ordered_json GridDecoration::to_json() const {
    nlohmann::ordered_json j;
    j["width"] = w_;
    j["height"] = h_;
    j["key"] = key();
    std::vector<std::string> rows;
    std::string s = str(), line;
    for (char c : s) {
        if (c == '\n') {
            rows.push_back(line);
            line.clear();
        } else {
            line += c;
        }
    }
    j["picture"] = rows;
    return j;
}

GridDecoration figure_4square() {
    GridDecoration g(4, 4);
    g.add_segment(0, 4, 2, 4);
    g.add_segment(2, 3, 4, 3);
    g.add_segment(0, 2, 2, 2);
    g.add_segment(2, 1, 4, 1);
    g.add_segment(0, 0, 2, 0);
    for (auto [x, y] : {std::pair{4, 0}, {0, 1}, {4, 2}, {0, 3}, {4, 4}}) g.set_vertex(x, y, true);
    return g;
}

GridDecoration figure_3x5_u1() {
    GridDecoration g(5, 3);
    g.add_segment(0, 3, 2, 3);
    g.add_segment(2, 0, 3, 0);
    g.add_segment(2, 2, 5, 2);
    g.add_segment(0, 1, 2, 1);
    g.add_segment(4, 0, 4, 1);
    for (auto [x, y] : {std::pair{0, 2}, {2, 2}, {4, 3}, {2, 0}, {3, 0}, {4, 1}, {5, 0}}) g.set_vertex(x, y, true);
    return g;
}

GridDecoration figure_3x5_u2() {
    GridDecoration g(5, 3);
    g.add_segment(0, 1, 1, 1);
    g.add_segment(0, 3, 1, 3);
    g.add_segment(2, 0, 2, 3);
    g.add_segment(4, 0, 4, 1);
    g.add_segment(3, 2, 5, 2);
    for (auto [x, y] : {std::pair{1, 3}, {4, 3}, {0, 2}, {3, 2}, {4, 1}, {1, 1}, {3, 0}, {0, 0}})
        g.set_vertex(x, y, true);
    return g;
}

// ---------------------------------------------------------------------------

PatchCatalogue build_catalogue(const Atlas& a) {
    PatchCatalogue cat;
    const Placement& pl = a.placement();
    for (int p = 0; p < 8; ++p) {
        const LinkComplex& lk = a.link(p);
        const bool ram = a.branch(p) >= 0;
        auto nb = lk.neighbours();
        const int n = lk.size();
        for (int e = 0; e < n; ++e)
            for (int nn : nb[e])
                for (int w : nb[nn]) {
                    if (w == e) continue;
                    for (int s : nb[w]) {
                        if (s == e || s == nn || !lk.adjacent(s, e)) continue;
                        std::array<int, 4> cyc{e, nn, w, s};  // east, north, west, south
                        CycleType t = classify_4cycle(lk, ram, cyc);
                        bool all_gamma = ram;
                        for (int k : cyc) all_gamma = all_gamma && lk.verts[k].coord != a.branch(p);
                        if (all_gamma) ++cat.gamma_only_cycles;
                        int cE = lk.verts[e].coord, cN = lk.verts[nn].coord;
                        int cW = lk.verts[w].coord, cS = lk.verts[s].coord;
                        auto base_at = [&](int dx, int dy) {
                            int q = p;
                            if (dx == 1) q = flip(q, cE);
                            if (dx == -1) q = flip(q, cW);
                            if (dy == 1) q = flip(q, cN);
                            if (dy == -1) q = flip(q, cS);
                            return q;
                        };
                        uint32_t bits = 0;
                        for (int dx = -1; dx <= 1; ++dx)
                            for (int dy = -1; dy <= 1; ++dy) {
                                int q = base_at(dx, dy);
                                if (pl.ramified(q)) bits |= 1u << patch_vertex_bit(dx, dy);
                                if (dx < 1 && pl.edge_ramified(q, dx == -1 ? cW : cE))
                                    bits |= 1u << patch_hedge_bit(dx, dy);
                                if (dy < 1 && pl.edge_ramified(q, dy == -1 ? cS : cN))
                                    bits |= 1u << patch_vedge_bit(dx, dy);
                            }
                        cat.patterns.insert(bits);
                        cat.by_type[t].insert(bits);
                        ++cat.cycles_by_type[t];
                    }
                }
    }
    return cat;
}

nlohmann::ordered_json GridCertificate::to_json() const {
    nlohmann::ordered_json j;
    j["width"] = width;
    j["height"] = height;
    j["nodes"] = nodes;
    j["rejected_interior_component"] = rejected_interior;
    j["solutions"] = solutions.size();
    j["classes"] = classes.size();
    nlohmann::ordered_json reps = nlohmann::ordered_json::array();
    std::set<std::string> shown;
    for (const auto& g : solutions)
        if (shown.insert(g.canonical()).second) reps.push_back(g.to_json());
    j["representatives"] = reps;
    return j;
}

GridCertificate grid_certificate(const PatchCatalogue& cat, int w, int h) {
    GridCertificate out;
    out.width = w;
    out.height = h;
    GridDecoration probe(w, h);  // validates the size
    const int nv = (w + 1) * (h + 1);
    std::vector<int8_t> vb(nv, -1), hb(w * (h + 1), -1), eb((w + 1) * h, -1);
    std::vector<int8_t*> trail;
    auto vid = [&](int x, int y) { return y * (w + 1) + x; };
    auto assign = [&](int8_t& slot, int8_t val) {
        if (slot == -1) {
            slot = val;
            trail.push_back(&slot);
            return true;
        }
        return slot == val;
    };
    auto patch_ok = [&](int x, int y) {
        uint32_t p = 0;
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy) {
                if (vb[vid(x + dx, y + dy)] == 1) p |= 1u << patch_vertex_bit(dx, dy);
                if (dx < 1 && hb[(y + dy) * w + x + dx] == 1) p |= 1u << patch_hedge_bit(dx, dy);
                if (dy < 1 && eb[vid(x + dx, y + dy)] == 1) p |= 1u << patch_vedge_bit(dx, dy);
            }
        return cat.contains(p);
    };
    std::function<void(int)> rec = [&](int c) {
        ++out.nodes;
        if (c == w * h) {
            GridDecoration g(w, h);
            for (int x = 0; x <= w; ++x)
                for (int y = 0; y <= h; ++y) {
                    g.set_vertex(x, y, vb[vid(x, y)] == 1);
                    if (x < w) g.set_hedge(x, y, hb[y * w + x] == 1);
                    if (y < h) g.set_vedge(x, y, eb[vid(x, y)] == 1);
                }
            if (g.has_interior_component()) {
                ++out.rejected_interior;
                return;
            }
            out.classes.insert(g.canonical());
            out.solutions.push_back(std::move(g));
            return;
        }
        const int i = c % w, j = c / w;
        std::array<int, 4> corner{vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
        std::array<int8_t*, 4> edge{&hb[j * w + i], &eb[vid(i + 1, j)], &hb[(j + 1) * w + i], &eb[vid(i, j)]};
        for (int k = 0; k < 8; ++k) {
            const int red = k / 2;
            const int off = (red + 2 + k % 2) % 4;
            const size_t mark = trail.size();
            bool ok = true;
            for (int m = 0; m < 4 && ok; ++m) {
                bool rv = m == red || m == (red + 1) % 4 || m == off;
                ok = assign(vb[corner[m]], rv) && assign(*edge[m], m == red);
            }
            if (ok && i >= 1 && j >= 1) ok = patch_ok(i, j);
            if (ok) rec(c + 1);
            while (trail.size() > mark) {
                *trail.back() = -1;
                trail.pop_back();
            }
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------

GridDecoration decorate(const Development& d, const GridEmbedding& g) {
    GridDecoration out(g.width, g.height);
    const Placement& pl = d.atlas().placement();
    auto edge_ram = [&](int u, int v) {
        int e = d.end_toward(u, v);
        if (e < 0) throw DevelopmentError("grid edge is not an edge");
        return pl.edge_ramified(d.base(u), d.label(u, e).coord);
    };
    for (int x = 0; x <= g.width; ++x)
        for (int y = 0; y <= g.height; ++y) {
            out.set_vertex(x, y, d.ramified(g.at(x, y)));
            if (x < g.width) out.set_hedge(x, y, edge_ram(g.at(x, y), g.at(x + 1, y)));
            if (y < g.height) out.set_vedge(x, y, edge_ram(g.at(x, y), g.at(x, y + 1)));
        }
    return out;
}

bool is_isometric(Development& d, const GridEmbedding& g) {
    const int n = static_cast<int>(g.v.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            int xa = a % (g.width + 1), ya = a / (g.width + 1);
            int xb = b % (g.width + 1), yb = b / (g.width + 1);
            if (d.distance(g.v[a], g.v[b]) != std::abs(xa - xb) + std::abs(ya - yb)) return false;
        }
    return true;
}

nlohmann::ordered_json SquareSearchResult::to_json() const {
    nlohmann::ordered_json j;
    j["width"] = width;
    j["height"] = height;
    j["total"] = total;
    j["per_base"] = per_base;
    j["nodes_per_level"] = nodes_per_level;
    j["decoration_classes"] = classes.size();
    j["vertices_created"] = vertices_created;
    j["max_distance"] = max_distance;
    j["explored_distance"] = explored_distance;
    j["transpose_cut"] = transpose_cut;
    return j;
}

namespace {

struct Searcher {
    Development& d;
    const Atlas& a;
    int base;
    int W, H;
    SquareSearchResult& res;
    const std::function<void(Development&, int, const GridEmbedding&)>& found;
    bool transpose_cut;
    std::vector<std::vector<int>> g;  // g[x][y]

    int corner(int p, int b, int c) {
        int eb = d.end_toward(p, b), ec = d.end_toward(p, c);
        if (eb < 0 || ec < 0) throw DevelopmentError("grid corner without edges");
        if (!a.adjacent(d.base(p), eb, ec)) return -1;
        return d.square_corner(p, eb, ec);
    }

    std::vector<int> up_ends(int v) const {
        std::vector<int> out;
        for (int e = 0; e < d.num_ends(v); ++e)
            if (!d.is_down(v, e)) out.push_back(e);
        return out;
    }

    void emit() {
        ++res.total;
        ++res.per_base[base];
        GridEmbedding e;
        e.width = W;
        e.height = H;
        for (int y = 0; y <= H; ++y)
            for (int x = 0; x <= W; ++x) e.v.push_back(g[x][y]);
        res.max_distance = std::max(res.max_distance, d.dist(g[W][H]));
        ++res.classes[decorate(d, e).canonical()];
        if (found) found(d, base, e);
    }

    void count(int level) {
        if (static_cast<int>(res.nodes_per_level.size()) <= level) res.nodes_per_level.resize(level + 1, 0);
        ++res.nodes_per_level[level];
    }

    // The first square of a new column or row must exist in the atlas link.
    bool column_viable(int r) const {
        const auto& last = g.back();
        return last.size() < 2 || a.adjacent(d.base(last[0]), r, d.end_toward(last[0], last[1]));
    }
    bool row_viable(int u) const {
        int v = g[0].back();
        return g.size() < 2 || a.adjacent(d.base(v), u, d.end_toward(v, g[1].back()));
    }

    // Column x = size of g, next to the last one.
    bool build_column(int v0, std::vector<int>& col) {
        const auto& last = g.back();
        col.assign(1, v0);
        for (size_t y = 1; y < last.size(); ++y) {
            int c = corner(last[y - 1], col[y - 1], last[y]);
            if (c < 0) return false;
            col.push_back(c);
        }
        return true;
    }

    bool build_row(int v0, std::vector<int>& row) {
        row.assign(1, v0);
        for (size_t x = 1; x < g.size(); ++x) {
            int top = g[x - 1].back();
            int c = corner(top, g[x].back(), row[x - 1]);
            if (c < 0) return false;
            row.push_back(c);
        }
        return true;
    }

    void rec() {
        const int w = static_cast<int>(g.size()) - 1, h = static_cast<int>(g[0].size()) - 1;
        count(w + h);
        res.explored_distance = std::max(res.explored_distance, d.dist(g[w][h]));
        if (w == W && h == H) {
            emit();
            return;
        }
        const bool grow_w = w < W, grow_h = h < H;
        if (grow_w && grow_h) {
            // Square step: one column then one row.
            std::vector<int> col, row;
            for (int r : up_ends(g[w][0])) {
                if (!column_viable(r) || !build_column(d.neighbour(g[w][0], r), col)) continue;
                g.push_back(col);
                for (int u : up_ends(g[0][h])) {
                    // A grid and its transpose are the same square; keep one of them.
                    if (transpose_cut && w == 0 && u <= r) continue;
                    if (!row_viable(u) || !build_row(d.neighbour(g[0][h], u), row)) continue;
                    for (size_t x = 0; x < g.size(); ++x) g[x].push_back(row[x]);
                    rec();
                    for (auto& c : g) c.pop_back();
                }
                g.pop_back();
            }
        } else if (grow_w) {
            std::vector<int> col;
            for (int r : up_ends(g[w][0])) {
                if (!column_viable(r) || !build_column(d.neighbour(g[w][0], r), col)) continue;
                g.push_back(col);
                rec();
                g.pop_back();
            }
        } else {
            std::vector<int> row;
            for (int u : up_ends(g[0][h])) {
                if (!row_viable(u) || !build_row(d.neighbour(g[0][h], u), row)) continue;
                for (size_t x = 0; x < g.size(); ++x) g[x].push_back(row[x]);
                rec();
                for (auto& c : g) c.pop_back();
            }
        }
    }
};

}  // namespace

SquareSearchResult square_search(const Atlas& a, int w, int h, const std::vector<int>& bases,
                                 const std::function<void(Development&, int, const GridEmbedding&)>& found,
                                 bool transpose_cut) {
    if (w < 1 || h < 1) throw FormatError("grid needs at least one cell");
    SquareSearchResult res;
    res.width = w;
    res.height = h;
    res.transpose_cut = transpose_cut && w == h;
    std::vector<int> bs = bases;
    if (bs.empty())
        for (int p = 0; p < 8; ++p) bs.push_back(p);
    for (int p : bs) {
        Development d(a, p);
        Searcher s{d, a, p, w, h, res, found, transpose_cut && w == h, {{0}}};
        s.rec();
        res.vertices_created += d.size();
    }
    return res;
}

}  // namespace ramcube
