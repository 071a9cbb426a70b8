#include "ramcube/filling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "ramcube/errors.hpp"

namespace ramcube {

namespace {

int sign_of(int x) { return (x > 0) - (x < 0); }

// Middle corners of the square with diagonal a-b: {first geodesic corner, other}.
// The second entry is -1 when the two hyperplanes do not cross.
std::array<int, 2> square_middles(Development& d, int a, int b) {
    if (a == b || d.distance(a, b) != 2) return {-1, -1};
    int c = d.geodesic(a, b)[1];
    int ea = d.end_toward(c, a), eb = d.end_toward(c, b);
    if (!d.atlas().adjacent(d.base(c), ea, eb)) return {c, -1};
    return {c, d.square_corner(c, ea, eb)};
}

// Middle corner of the square of diagonal a-b on the given side of its height.
int square_corner_toward(Development& d, int a, int b, int side) {
    auto m = square_middles(d, a, b);
    if (m[1] < 0) throw NotACycle("not a diagonal");
    int want = d.height(a) + side;
    if (d.height(m[0]) == want) return m[0];
    if (d.height(m[1]) == want) return m[1];
    throw DevelopmentError("diagonal square has no corner at the expected height");
}

int edge_hyperplane(Development& d, int a, int b) {
    return d.dist(b) > d.dist(a) ? d.hyperplane(b, a) : d.hyperplane(a, b);
}

std::vector<int> used_vertices(const Diagram& D) {
    std::vector<char> seen(D.image.size(), 0);
    for (const auto& f : D.faces)
        for (int v : f) seen[v] = 1;
    for (int v : D.boundary) seen[v] = 1;
    std::vector<int> out;
    for (size_t v = 0; v < seen.size(); ++v)
        if (seen[v]) out.push_back(static_cast<int>(v));
    return out;
}

struct UnionFind {
    std::vector<int> p;
    explicit UnionFind(size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) {
        while (p[x] != x) x = p[x] = p[p[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        p[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

// Frontier reductions shared by every filler.  A cycle lists diagram
// vertices; the edge i runs from cyc[i] to cyc[i+1].  Each reduction adds one
// degenerate face and shortens the cycle by one.
void face(Diagram& D, int a, int b, int c) { D.faces.push_back({a, b, c}); }

// Removes cyc[i], whose incoming or outgoing edge is degenerate.
void collapse_at(Diagram& D, std::vector<int>& cyc, int i) {
    int L = static_cast<int>(cyc.size());
    int prev = cyc[(i - 1 + L) % L], next = cyc[(i + 1) % L];
    face(D, prev, cyc[i], next);
    cyc.erase(cyc.begin() + i);
}

// Cancels everything that needs no square: degenerate edges and backtracks.
// Closes cycles of length 3.  Returns true when the cycle is used up.
bool reduce_cycle(Diagram& D, std::vector<int>& cyc) {
    for (;;) {
        int L = static_cast<int>(cyc.size());
        bool changed = false;
        // repeated diagram vertices: a zero-length edge or a spur needs no face
        for (int i = 0; i < L && !changed && L >= 2; ++i) {
            if (cyc[i] == cyc[(i + 1) % L]) {
                cyc.erase(cyc.begin() + i);
                changed = true;
            } else if (L >= 3 && cyc[(i - 1 + L) % L] == cyc[(i + 1) % L]) {
                int j = (i + 1) % L;
                cyc.erase(cyc.begin() + std::max(i, j));
                cyc.erase(cyc.begin() + std::min(i, j));
                changed = true;
            }
        }
        if (changed) continue;
        if (L <= 2) {
            cyc.clear();
            return true;
        }
        if (L == 3) {
            face(D, cyc[0], cyc[1], cyc[2]);
            cyc.clear();
            return true;
        }
        for (int i = 0; i < L && !changed; ++i) {
            int a = D.image[cyc[i]], b = D.image[cyc[(i + 1) % L]];
            if (a == b) {
                // degenerate edge i: drop its head, merging into edge i-1
                collapse_at(D, cyc, (i + 1) % L);
                changed = true;
            }
        }
        for (int i = 0; i < L && !changed; ++i) {
            int a = D.image[cyc[(i - 1 + L) % L]], c = D.image[cyc[(i + 1) % L]];
            if (a == c) {
                collapse_at(D, cyc, i);
                changed = true;
            }
        }
        if (!changed) return false;
    }
}

// Removes pairs of faces on the same three diagram vertices with opposite
// orientations.  They cancel in the face chain; a flip that undoes the square
// of a converted diagonal produces such a pair.
void cancel_folds(Diagram& D) {
    std::map<std::array<int, 3>, std::vector<size_t>> by_set;
    for (size_t k = 0; k < D.faces.size(); ++k) {
        std::array<int, 3> key = D.faces[k];
        std::sort(key.begin(), key.end());
        by_set[key].push_back(k);
    }
    auto parity = [](const std::array<int, 3>& f) {
        // even iff f is a rotation of its sorted order
        return (f[0] < f[1]) + (f[1] < f[2]) + (f[2] < f[0]) == 2;
    };
    std::vector<char> drop(D.faces.size(), 0);
    for (const auto& [key, ks] : by_set) {
        std::vector<size_t> pos, neg;
        for (size_t k : ks) (parity(D.faces[k]) ? pos : neg).push_back(k);
        for (size_t t = 0; t < std::min(pos.size(), neg.size()); ++t) drop[pos[t]] = drop[neg[t]] = 1;
    }
    size_t w = 0;
    for (size_t k = 0; k < D.faces.size(); ++k)
        if (!drop[k]) D.faces[w++] = D.faces[k];
    D.faces.resize(w);
}

bool has_doubled_edge(const Diagram& D) {
    std::set<std::pair<int, int>> seen;
    for (const auto& f : D.faces)
        for (int k = 0; k < 3; ++k)
            if (!seen.insert({f[k], f[(k + 1) % 3]}).second) return true;
    return false;
}

// Removes closed spheres that fillers leave behind when they cross a square
// and come back: vertices joined by an edge with a single image are merged
// (never two boundary vertices), faces with a repeated vertex dropped, and
// the folds this exposes cancelled.
void repair_spheres(Diagram& D) {
    std::vector<char> onB(D.image.size(), 0);
    for (int b : D.boundary) onB[b] = 1;
    UnionFind uf(D.image.size());
    std::vector<char> hasB = onB;
    for (const auto& f : D.faces)
        for (int k = 0; k < 3; ++k) {
            int a = uf.find(f[k]), b = uf.find(f[(k + 1) % 3]);
            if (a == b || D.image[a] != D.image[b] || (hasB[a] && hasB[b])) continue;
            if (hasB[b]) std::swap(a, b);
            uf.p[b] = a;  // the boundary vertex, if any, stays the representative
            hasB[a] = hasB[a] || hasB[b];
        }
    size_t w = 0;
    for (auto f : D.faces) {
        for (int& x : f) x = uf.find(x);
        if (f[0] != f[1] && f[1] != f[2] && f[0] != f[2]) D.faces[w++] = f;
    }
    D.faces.resize(w);
    cancel_folds(D);
}

// Orients a disc of link triangles so that the face chain bounds `cyc`.
std::vector<std::array<int, 3>> orient_disc(const std::vector<std::array<int, 3>>& tris,
                                            const std::vector<int>& cyc) {
    std::map<std::pair<int, int>, std::vector<int>> at_edge;
    for (size_t t = 0; t < tris.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            int a = tris[t][k], b = tris[t][(k + 1) % 3];
            at_edge[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
        }
    std::vector<std::array<int, 3>> out(tris.size());
    std::vector<char> done(tris.size(), 0);
    auto orient = [&](int t, int a, int b) {
        // triangle t must contain the directed edge a->b
        const auto& tr = tris[t];
        int c = tr[0] + tr[1] + tr[2] - a - b;
        out[t] = {a, b, c};
        done[t] = 1;
    };
    int a0 = cyc[0], b0 = cyc[1];
    auto it = at_edge.find({std::min(a0, b0), std::max(a0, b0)});
    if (it == at_edge.end() || it->second.size() != 1) throw InvalidDiagram("link disc misses its boundary");
    orient(it->second[0], a0, b0);
    std::vector<int> stack{it->second[0]};
    while (!stack.empty()) {
        int t = stack.back();
        stack.pop_back();
        for (int k = 0; k < 3; ++k) {
            int a = out[t][k], b = out[t][(k + 1) % 3];
            for (int u : at_edge[{std::min(a, b), std::max(a, b)}])
                if (!done[u]) {
                    orient(u, b, a);
                    stack.push_back(u);
                }
        }
    }
    if (std::find(done.begin(), done.end(), 0) != done.end()) throw InvalidDiagram("link disc is disconnected");
    return out;
}

// Directional link data at each base: descending (dir 0) or ascending (dir 1).
struct DirLink {
    LinkComplex lk;
    std::vector<int> ends;      // sub index -> end
    std::vector<int> sub;       // end -> sub index or -1
    std::vector<int> dist;      // n x n
    int n = 0;

    std::vector<int> geodesic(int ea, int eb) const {
        int a = sub[ea], b = sub[eb];
        if (a < 0 || b < 0) throw DevelopmentError("end outside the directional link");
        std::vector<int> path{ea};
        while (a != b) {
            int next = -1;
            for (int c = 0; c < n && next < 0; ++c)
                if (lk.adjacent(a, c) && dist[c * n + b] == dist[a * n + b] - 1) next = c;
            if (next < 0) throw DevelopmentError("directional link is disconnected");
            a = next;
            path.push_back(ends[a]);
        }
        return path;
    }
};

struct LinkTables {
    std::array<std::array<DirLink, 2>, 8> t;
};

const LinkTables& link_tables(const Atlas& a) {
    static std::mutex mu;
    static std::map<const Atlas*, std::unique_ptr<LinkTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[&a];
    if (!slot) {
        slot = std::make_unique<LinkTables>();
        for (int p = 0; p < 8; ++p)
            for (int dir = 0; dir < 2; ++dir) {
                DirLink& L = slot->t[p][dir];
                const LinkComplex& full = a.link(p);
                for (int e = 0; e < full.size(); ++e)
                    if (full.verts[e].up == (dir == 1)) L.ends.push_back(e);
                L.sub.assign(full.size(), -1);
                for (size_t k = 0; k < L.ends.size(); ++k) L.sub[L.ends[k]] = static_cast<int>(k);
                L.lk = dir ? a.ascending(p) : a.descending(p);
                L.n = L.lk.size();
                L.dist.assign(static_cast<size_t>(L.n) * L.n, -1);
                auto nb = L.lk.neighbours();
                for (int s = 0; s < L.n; ++s) {
                    std::vector<int> q{s};
                    L.dist[s * L.n + s] = 0;
                    for (size_t h = 0; h < q.size(); ++h)
                        for (int w : nb[q[h]])
                            if (L.dist[s * L.n + w] < 0) {
                                L.dist[s * L.n + w] = L.dist[s * L.n + q[h]] + 1;
                                q.push_back(w);
                            }
                }
            }
    }
    return *slot;
}

}  // namespace

// ---------------------------------------------------------------------------
// Diagrams

std::vector<int> Diagram::boundary_word() const {
    std::vector<int> w;
    for (int v : boundary) w.push_back(image[v]);
    return w;
}

bool is_diagonal(Development& d, int a, int b) {
    return a != b && d.height(a) == d.height(b) && square_middles(d, a, b)[1] >= 0;
}

bool is_sliced_edge(Development& d, int a, int b) {
    return a != b && (d.adjacent(a, b) || is_diagonal(d, a, b));
}

FaceKind classify_face(Development& d, int a, int b, int c) {
    if (a == b && b == c) return FaceKind::Degenerate;
    if (a == b || b == c || a == c) {
        int x = a, y = (a == b) ? c : b;
        return is_sliced_edge(d, x, y) ? FaceKind::Degenerate : FaceKind::Invalid;
    }
    std::array<int, 3> v{a, b, c};
    for (int k = 0; k < 3; ++k) {
        int t = v[k], p = v[(k + 1) % 3], q = v[(k + 2) % 3];
        int ep = d.end_toward(t, p), eq = d.end_toward(t, q);
        if (ep < 0 || eq < 0 || d.height(p) != d.height(q)) continue;
        if (d.atlas().adjacent(d.base(t), ep, eq)) return FaceKind::HalfSquare;
    }
    if (d.height(a) != d.height(b) || d.height(b) != d.height(c)) return FaceKind::Invalid;
    auto m = square_middles(d, a, b);
    if (m[1] < 0) return FaceKind::Invalid;
    for (int t : m) {
        int ea = d.end_toward(t, a), eb = d.end_toward(t, b), ec = d.end_toward(t, c);
        if (ec < 0) continue;
        const Atlas& at = d.atlas();
        int p = d.base(t);
        if (at.adjacent(p, ea, eb) && at.adjacent(p, ea, ec) && at.adjacent(p, eb, ec))
            return FaceKind::LevelTriangle;
    }
    return FaceKind::Invalid;
}

nlohmann::ordered_json DiagramStats::to_json() const {
    return {{"area", area},     {"degenerate_faces", degenerate}, {"vertices", vertices},
            {"radius", radius}, {"height", height},               {"min_height", min_height},
            {"max_height", max_height}};
}

DiagramStats diagram_stats(const Development& d, const Diagram& D) {
    DiagramStats st;
    for (const auto& f : D.faces) {
        int a = D.image[f[0]], b = D.image[f[1]], c = D.image[f[2]];
        if (a == b || b == c || a == c)
            ++st.degenerate;
        else
            ++st.area;
    }
    std::vector<int> used = used_vertices(D);
    st.vertices = static_cast<long>(used.size());
    for (int v : used) {
        int h = d.height(D.image[v]);
        st.min_height = std::min(st.min_height, h);
        st.max_height = std::max(st.max_height, h);
    }
    st.height = std::max(st.max_height, -st.min_height);
    // radius: BFS in the diagram 1-skeleton from the boundary
    std::vector<std::vector<int>> adj(D.image.size());
    auto link = [&](int a, int b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (const auto& f : D.faces)
        for (int k = 0; k < 3; ++k) link(f[k], f[(k + 1) % 3]);
    std::vector<int> dist(D.image.size(), -1);
    std::vector<int> q;
    for (int v : D.boundary)
        if (dist[v] < 0) {
            dist[v] = 0;
            q.push_back(v);
        }
    for (size_t h = 0; h < q.size(); ++h)
        for (int w : adj[q[h]])
            if (dist[w] < 0) {
                dist[w] = dist[q[h]] + 1;
                q.push_back(w);
            }
    for (int v : used) st.radius = std::max(st.radius, dist[v]);
    return st;
}

DiagramCheck check_diagram(Development& d, const Diagram& D, const std::vector<int>& loop) {
    DiagramCheck ck;
    if (D.boundary_word() != loop) ck.fail("boundary word differs from the loop");
    int nb = static_cast<int>(D.boundary.size());
    if (nb >= 2)
        for (int i = 0; i < nb; ++i) {
            int a = D.image[D.boundary[i]], b = D.image[D.boundary[(i + 1) % nb]];
            if (!is_sliced_edge(d, a, b)) ck.fail("boundary edge is not a sliced edge");
        }
    std::map<std::pair<int, int>, int> directed, undirected;
    for (const auto& f : D.faces) {
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) ck.fail("face with a repeated corner");
        if (classify_face(d, D.image[f[0]], D.image[f[1]], D.image[f[2]]) == FaceKind::Invalid)
            ck.fail("face does not map to a sliced 2-cell");
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (++directed[{a, b}] > 1) ck.fail("directed edge used by two faces");
            if (++undirected[{std::min(a, b), std::max(a, b)}] > 2) ck.fail("edge used by three faces");
        }
    }
    // boundary of the face chain minus the boundary cycle must vanish
    std::map<std::pair<int, int>, int> net;
    auto add = [&](int a, int b, int s) {
        if (a < b)
            net[{a, b}] += s;
        else
            net[{b, a}] -= s;
    };
    for (const auto& [e, n] : directed) add(e.first, e.second, n);
    if (nb >= 2)
        for (int i = 0; i < nb; ++i) add(D.boundary[i], D.boundary[(i + 1) % nb], -1);
    for (const auto& [e, n] : net)
        if (n != 0) {
            ck.fail("face chain does not bound the boundary cycle");
            break;
        }
    // Euler characteristic and connectivity
    std::set<std::pair<int, int>> edges;
    for (const auto& [e, n] : undirected) edges.insert(e);
    if (nb >= 2)
        for (int i = 0; i < nb; ++i) {
            int a = D.boundary[i], b = D.boundary[(i + 1) % nb];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    std::vector<int> used = used_vertices(D);
    ck.euler = static_cast<int>(used.size()) - static_cast<int>(edges.size()) + static_cast<int>(D.faces.size());
    if (!used.empty() && ck.euler != 1) ck.fail("Euler characteristic is not 1");
    UnionFind uf(D.image.size());
    int comps = static_cast<int>(used.size());
    for (const auto& e : edges)
        if (uf.unite(e.first, e.second)) --comps;
    if (comps > 1) ck.fail("diagram is disconnected");
    // vertex links: arcs at the boundary, circles inside
    std::vector<char> on_boundary(D.image.size(), 0);
    for (int v : D.boundary) on_boundary[v] = 1;
    std::vector<std::vector<std::array<int, 2>>> lk(D.image.size());
    for (const auto& f : D.faces)
        for (int k = 0; k < 3; ++k) lk[f[k]].push_back({f[(k + 1) % 3], f[(k + 2) % 3]});
    for (int v : used) {
        const auto& es = lk[v];
        if (es.empty()) continue;
        std::map<int, int> deg;
        std::map<int, int> id;
        for (const auto& e : es) {
            ++deg[e[0]];
            ++deg[e[1]];
            id.emplace(e[0], static_cast<int>(id.size()));
            id.emplace(e[1], static_cast<int>(id.size()));
        }
        UnionFind u(id.size());
        int c = static_cast<int>(id.size());
        for (const auto& e : es)
            if (u.unite(id[e[0]], id[e[1]])) --c;
        bool maxdeg2 = std::all_of(deg.begin(), deg.end(), [](const auto& x) { return x.second <= 2; });
        size_t want = on_boundary[v] ? id.size() - 1 : id.size();
        if (c != 1 || !maxdeg2 || es.size() != want) {
            ck.fail("vertex link is not an arc or a circle");
            break;
        }
    }
    return ck;
}

// ---------------------------------------------------------------------------
// Loops

bool is_sliced_loop(Development& d, const std::vector<int>& loop) {
    int n = static_cast<int>(loop.size());
    if (n <= 1) return true;
    for (int i = 0; i < n; ++i)
        if (!is_sliced_edge(d, loop[i], loop[(i + 1) % n])) return false;
    return true;
}

bool is_level_loop(Development& d, const std::vector<int>& loop, int level) {
    for (int v : loop)
        if (d.height(v) != level) return false;
    return is_sliced_loop(d, loop);
}

std::vector<int> to_cubical_loop(Development& d, const std::vector<int>& loop, int* cost) {
    int n = static_cast<int>(loop.size()), c = 0;
    std::vector<int> out;
    for (int i = 0; i < n; ++i) {
        int a = loop[i], b = loop[(i + 1) % n];
        out.push_back(a);
        if (n < 2 || d.adjacent(a, b)) continue;
        if (!is_diagonal(d, a, b)) throw NotACycle("consecutive loop vertices are not joined by a sliced edge");
        out.push_back(square_corner_toward(d, a, b, -1));
        ++c;
    }
    if (cost) *cost = c;
    return out;
}

std::vector<int> to_sliced_loop(Development& d, const std::vector<int>& loop, int* cost) {
    int n = static_cast<int>(loop.size()), c = 0;
    if (n <= 1) {
        if (cost) *cost = 0;
        return loop;
    }
    std::vector<int> out{loop[0]};
    for (int i = 1; i < n; ++i) {
        int x = out.back(), y = loop[i], z = loop[(i + 1) % n];
        int ex = d.end_toward(y, x), ez = d.end_toward(y, z);
        if (x != z && ex >= 0 && ez >= 0 && d.height(x) == d.height(z) && d.atlas().adjacent(d.base(y), ex, ez)) {
            ++c;
            continue;
        }
        out.push_back(y);
    }
    if (cost) *cost = c;
    return out;
}

// ---------------------------------------------------------------------------
// Cubical filler

void CubicalFiller::apply_flip(std::vector<int>& cyc, int i) {
    int L = static_cast<int>(cyc.size());
    int x = cyc[(i - 1 + L) % L], y = cyc[i], z = cyc[(i + 1) % L];
    int X = D_.image[x], Y = D_.image[y], Z = D_.image[z];
    int ex = d_.end_toward(Y, X), ez = d_.end_toward(Y, Z);
    if (ex < 0 || ez < 0 || ex == ez || !d_.atlas().adjacent(d_.base(Y), ex, ez))
        throw NoSolution("corner spans no square");
    int w = D_.add_vertex(d_.square_corner(Y, ex, ez));
    if (d_.height(X) == d_.height(Z)) {
        face(D_, x, y, z);
        face(D_, x, z, w);
    } else {
        face(D_, x, y, w);
        face(D_, y, z, w);
    }
    cyc[i] = w;
    ++st_.flips;
}

void CubicalFiller::apply_backtrack(std::vector<int>& cyc, int i) {
    int L = static_cast<int>(cyc.size());
    if (D_.image[cyc[(i - 1 + L) % L]] != D_.image[cyc[(i + 1) % L]]) throw NoSolution("not a backtrack");
    collapse_at(D_, cyc, i);
}

void CubicalFiller::apply_collapse(std::vector<int>& cyc, int i) {
    int L = static_cast<int>(cyc.size());
    if (D_.image[cyc[(i - 1 + L) % L]] != D_.image[cyc[i]]) throw NoSolution("not a degenerate edge");
    collapse_at(D_, cyc, i);
}

bool CubicalFiller::reduce(std::vector<int>& cyc, std::vector<int>* chord, std::vector<Op>* script) {
    // Only degenerate edges are collapsed here; backtracks are driven by the
    // pairing.  A collapse at j merges edge j-1 and the degenerate edge j.
    for (;;) {
        int L = static_cast<int>(cyc.size());
        if (L <= 2) {
            cyc.clear();
            return true;
        }
        if (L == 3) {
            face(D_, cyc[0], cyc[1], cyc[2]);
            if (script) script->push_back({'Z', 0});
            cyc.clear();
            return true;
        }
        int j = -1;
        for (int i = 0; i < L && j < 0; ++i)
            if (D_.image[cyc[i]] == D_.image[cyc[(i + 1) % L]]) j = (i + 1) % L;
        if (j < 0) return false;
        apply_collapse(cyc, j);
        if (script) script->push_back({'C', j});
        if (chord) {
            // edge j (after the removed vertex) disappears; edge j-1 keeps its chord
            int prev = (j - 1 + L) % L;
            int keep = (*chord)[prev] >= 0 ? (*chord)[prev] : (*chord)[j];
            (*chord)[prev] = keep;
            chord->erase(chord->begin() + j);
        }
    }
}

bool CubicalFiller::realise(std::vector<int> cyc, std::vector<int> chord, std::vector<Op>& script) {
    long steps = 0;
    long limit = 4L * static_cast<long>(cyc.size()) * static_cast<long>(cyc.size()) + 64;
    try {
        for (;;) {
            if (reduce(cyc, &chord, &script)) return true;
            if (++steps > limit) return false;
            int L = static_cast<int>(cyc.size());
            std::map<int, std::array<int, 2>> pos;
            for (int i = 0; i < L; ++i) {
                auto it = pos.find(chord[i]);
                if (it == pos.end())
                    pos[chord[i]] = {i, -1};
                else
                    it->second[1] = i;
            }
            int best = -1, bp = 0, bq = 0, bspan = L + 1;
            bool inner = true;
            for (const auto& [c, pq] : pos) {
                if (pq[1] < 0) return false;
                int in = pq[1] - pq[0] - 1, out = L - (pq[1] - pq[0]) - 1;
                int span = std::min(in, out);
                if (span < bspan) {
                    bspan = span;
                    best = c;
                    bp = pq[0];
                    bq = pq[1];
                    inner = in <= out;
                }
            }
            (void)best;
            if (bspan == 0) {
                int at = inner ? bq : 0;  // vertex between the two edges
                apply_backtrack(cyc, at);
                script.push_back({'B', at});
                // the two edges become one degenerate edge at index at-1
                int prev = (at - 1 + L) % L;
                chord[prev] = -1;
                chord.erase(chord.begin() + at);
                continue;
            }
            int at = inner ? bp + 1 : (bq + 1) % L;
            int e0 = (at - 1 + L) % L;
            apply_flip(cyc, at);
            script.push_back({'F', at});
            std::swap(chord[e0], chord[at]);
        }
    } catch (const NoSolution&) {
        return false;
    }
}

bool CubicalFiller::replay(std::vector<int> cyc, const std::vector<Op>& script) {
    try {
        for (const Op& op : script) {
            switch (op.kind) {
                case 'F': apply_flip(cyc, op.at); break;
                case 'B': apply_backtrack(cyc, op.at); break;
                case 'C': apply_collapse(cyc, op.at); break;
                case 'Z':
                    if (cyc.size() != 3) return false;
                    face(D_, cyc[0], cyc[1], cyc[2]);
                    cyc.clear();
                    break;
                default: return false;
            }
        }
    } catch (const NoSolution&) {
        return false;
    }
    return cyc.size() <= 2;
}

std::string CubicalFiller::key(const std::vector<int>& cyc) const {
    std::ostringstream s;
    int L = static_cast<int>(cyc.size());
    s << d_.base(D_.image[cyc[0]]);
    for (int i = 0; i < L; ++i) s << ',' << d_.end_toward(D_.image[cyc[i]], D_.image[cyc[(i + 1) % L]]);
    return s.str();
}

void CubicalFiller::fill(std::vector<int> cyc, bool memo) {
    if (reduce_cycle(D_, cyc)) return;
    int L = static_cast<int>(cyc.size());
    for (int i = 0; i < L; ++i)
        if (!d_.adjacent(D_.image[cyc[i]], D_.image[cyc[(i + 1) % L]]))
            throw InvalidDiagram("cubical filler met a non-cube edge");
    std::string k;
    if (memo) {
        k = key(cyc);
        auto it = memo_.find(k);
        if (it != memo_.end()) {
            size_t nf = D_.faces.size(), nv = D_.image.size();
            if (replay(cyc, it->second)) {
                ++st_.memo_hits;
                return;
            }
            D_.faces.resize(nf);
            D_.image.resize(nv);
        }
    }
    // crossings of each hyperplane, in cyclic order
    std::vector<int> hyp(L);
    std::map<int, std::vector<int>> by_h;
    std::vector<int> order;
    for (int i = 0; i < L; ++i) {
        hyp[i] = edge_hyperplane(d_, D_.image[cyc[i]], D_.image[cyc[(i + 1) % L]]);
        auto& v = by_h[hyp[i]];
        if (v.empty()) order.push_back(hyp[i]);
        v.push_back(i);
    }
    // non-crossing perfect matchings of each crossing list
    std::vector<std::vector<std::vector<std::array<int, 2>>>> options;
    long combos = 1;
    for (int h : order) {
        const auto& p = by_h[h];
        if (p.size() % 2) throw InvalidDiagram("loop crosses a hyperplane an odd number of times");
        std::vector<std::vector<std::array<int, 2>>> ms;
        std::vector<std::array<int, 2>> cur;
        auto rec = [&](auto&& self, std::vector<int> rest) -> void {
            if (rest.empty()) {
                ms.push_back(cur);
                return;
            }
            for (size_t j = 1; j < rest.size(); j += 2) {
                cur.push_back({rest[0], rest[j]});
                std::vector<int> inside(rest.begin() + 1, rest.begin() + j);
                std::vector<int> outside(rest.begin() + j + 1, rest.end());
                // inside and outside are matched independently
                std::vector<std::vector<std::array<int, 2>>> ins;
                {
                    auto saved = std::move(ms);
                    ms.clear();
                    auto cur_saved = cur;
                    cur.clear();
                    self(self, inside);
                    ins = std::move(ms);
                    ms = std::move(saved);
                    cur = cur_saved;
                }
                for (const auto& in : ins) {
                    size_t mark = cur.size();
                    cur.insert(cur.end(), in.begin(), in.end());
                    self(self, outside);
                    cur.resize(mark);
                }
                cur.pop_back();
            }
        };
        rec(rec, p);
        combos *= static_cast<long>(ms.size());
        if (combos > budget_) throw BudgetExceeded("small-loop filler: too many hyperplane pairings");
        options.push_back(std::move(ms));
    }
    // rank every combination by its interleaving count
    std::vector<std::pair<long, long>> ranked;
    std::vector<std::array<int, 3>> chords;  // p, q, hyperplane slot
    for (long c = 0; c < combos; ++c) {
        chords.clear();
        long r = c;
        for (size_t s = 0; s < options.size(); ++s) {
            long m = static_cast<long>(options[s].size());
            for (const auto& pq : options[s][r % m]) chords.push_back({pq[0], pq[1], static_cast<int>(s)});
            r /= m;
        }
        long inter = 0;
        for (size_t a = 0; a < chords.size(); ++a)
            for (size_t b = a + 1; b < chords.size(); ++b) {
                if (chords[a][2] == chords[b][2]) continue;
                bool in1 = chords[b][0] > chords[a][0] && chords[b][0] < chords[a][1];
                bool in2 = chords[b][1] > chords[a][0] && chords[b][1] < chords[a][1];
                if (in1 != in2) ++inter;
            }
        ranked.push_back({inter, c});
    }
    std::stable_sort(ranked.begin(), ranked.end());
    for (const auto& [inter, c] : ranked) {
        ++st_.pairings_tried;
        std::vector<int> chord(L, -1);
        long r = c;
        int id = 0;
        for (size_t s = 0; s < options.size(); ++s) {
            long m = static_cast<long>(options[s].size());
            for (const auto& pq : options[s][r % m]) {
                chord[pq[0]] = id;
                chord[pq[1]] = id;
                ++id;
            }
            r /= m;
        }
        size_t nf = D_.faces.size(), nv = D_.image.size();
        std::vector<Op> script;
        if (realise(cyc, chord, script)) {
            if (memo) memo_[k] = std::move(script);
            return;
        }
        D_.faces.resize(nf);
        D_.image.resize(nv);
    }
    throw InvalidDiagram("no hyperplane pairing is realisable");
}

// ---------------------------------------------------------------------------
// Dyadic filling

Diagram dyadic_fill(Development& d, const std::vector<int>& loop, FillStats* stats) {
    if (!is_sliced_loop(d, loop)) throw NotACycle("loop is not closed in the sliced 1-skeleton");
    FillStats local;
    FillStats& st = stats ? *stats : local;
    Diagram D;
    for (int v : loop) D.boundary.push_back(D.add_vertex(v));
    int n = static_cast<int>(loop.size());
    if (n <= 1) return D;
    std::vector<int> Q;
    for (int i = 0; i < n; ++i) {
        int a = D.boundary[i], b = D.boundary[(i + 1) % n];
        Q.push_back(a);
        if (n >= 2 && !d.adjacent(loop[i], loop[(i + 1) % n])) {
            int x = D.add_vertex(square_corner_toward(d, loop[i], loop[(i + 1) % n], -1));
            face(D, a, b, x);
            Q.push_back(x);
            ++st.conversion_cost;
        }
    }
    int m = static_cast<int>(Q.size());
    st.cubical_length = m;
    CubicalFiller filler(d, D, st);
    auto chord = [&](int a, int b) {
        std::vector<int> g = d.geodesic(D.image[a], D.image[b]);
        std::vector<int> path{a};
        for (size_t k = 1; k + 1 < g.size(); ++k) path.push_back(D.add_vertex(g[k]));
        path.push_back(b);
        return path;
    };
    auto at = [&](int i) { return Q[i % m]; };
    // region: arc Q[i..j] followed by the chord `ch` (Q[i] -> Q[j]) backwards
    auto region = [&](auto&& self, int i, int j, const std::vector<int>& ch, int depth) -> void {
        st.depth = std::max(st.depth, depth);
        if (j - i <= kLeafPerimeter / 2) {
            std::vector<int> cyc;
            for (int k = i; k <= j; ++k) cyc.push_back(at(k));
            for (size_t k = ch.size() - 2; k >= 1 && k < ch.size(); --k) cyc.push_back(ch[k]);
            st.max_leaf_perimeter = std::max(st.max_leaf_perimeter, static_cast<int>(cyc.size()));
            ++st.leaves;
            filler.fill(cyc, true);
            return;
        }
        int k = (i + j) / 2;
        std::vector<int> c1 = chord(at(i), at(k)), c2 = chord(at(k), at(j));
        std::vector<int> tri(c1.begin(), c1.end() - 1);
        tri.insert(tri.end(), c2.begin(), c2.end() - 1);
        for (size_t t = ch.size() - 1; t >= 1; --t) tri.push_back(ch[t]);
        st.max_triangle_perimeter = std::max(st.max_triangle_perimeter, static_cast<int>(tri.size()));
        ++st.triangles;
        filler.fill(tri, false);
        self(self, i, k, c1, depth + 1);
        self(self, k, j, c2, depth + 1);
    };
    if (m <= kLeafPerimeter) {
        ++st.leaves;
        st.max_leaf_perimeter = std::max(st.max_leaf_perimeter, m);
        filler.fill(Q, true);
        cancel_folds(D);
        return D;
    }
    int half = m / 2;
    std::vector<int> g = chord(Q[0], Q[half]);
    std::vector<int> back(g.rbegin(), g.rend());
    region(region, 0, half, g, 1);
    region(region, half, m, back, 1);
    cancel_folds(D);
    if (has_doubled_edge(D)) repair_spheres(D);
    return D;
}

// ---------------------------------------------------------------------------
// Pushing

void PushLedger::merge(const PushLedger& o) {
    components += o.components;
    cells_pushed += o.cells_pushed;
    cells_extended += o.cells_extended;
    step2_area += o.step2_area;
    step3_area += o.step3_area;
    max_cell_expansion = std::max(max_cell_expansion, o.max_cell_expansion);
    max_link_loop = std::max(max_link_loop, o.max_link_loop);
    max_link_area = std::max(max_link_area, o.max_link_area);
    link_loops += o.link_loops;
    choices.max_mu = std::max(choices.max_mu, o.choices.max_mu);
    choices.max_nu = std::max(choices.max_nu, o.choices.max_nu);
    choices.max_eta = std::max(choices.max_eta, o.choices.max_eta);
    choices.mu_paths += o.choices.mu_paths;
    choices.nu_paths += o.choices.nu_paths;
    choices.eta_paths += o.choices.eta_paths;
}

nlohmann::ordered_json PushLedger::to_json() const {
    double factor = area_before > 0 ? static_cast<double>(area_after) / static_cast<double>(area_before) : 0.0;
    return {{"level", level},
            {"components", components},
            {"height_before", height_before},
            {"height_after", height_after},
            {"area_before", area_before},
            {"area_after", area_after},
            {"expansion_factor", factor},
            {"cells_pushed", cells_pushed},
            {"cells_extended", cells_extended},
            {"step2_area", step2_area},
            {"step3_area", step3_area},
            {"max_cell_expansion", max_cell_expansion},
            {"max_link_loop", max_link_loop},
            {"max_link_area", max_link_area},
            {"link_loops", link_loops},
            {"max_mu", choices.max_mu},
            {"max_nu", choices.max_nu},
            {"max_eta", choices.max_eta}};
}

std::vector<std::vector<int>> level_components(const Development& d, const Diagram& D, int h) {
    std::vector<int> used = used_vertices(D);
    std::vector<char> at(D.image.size(), 0);
    for (int v : used)
        if (d.height(D.image[v]) == h) at[v] = 1;
    UnionFind uf(D.image.size());
    for (const auto& f : D.faces)
        for (int k = 0; k < 3; ++k) {
            int a = f[k], b = f[(k + 1) % 3];
            if (at[a] && at[b]) uf.unite(a, b);
        }
    std::map<int, std::vector<int>> comp;
    for (int v : used)
        if (at[v]) comp[uf.find(v)].push_back(v);
    std::vector<std::vector<int>> out;
    for (auto& [r, vs] : comp) out.push_back(std::move(vs));
    return out;
}

namespace {

struct Pusher {
    Development& d;
    Diagram& D;
    int T;
    int s;       // sign of the pushed height
    int dir;     // 0 descending link, 1 ascending
    const LinkTables& tabs;
    PushLedger led;
    std::vector<char> inC;
    std::map<int, int> prime;  // pushed vertex -> its image vertex one level closer to 0

    struct EdgeImage {
        std::vector<int> path;  // from the smaller to the larger diagram vertex
        int meet = -1;
    };
    std::map<std::pair<int, int>, EdgeImage> edges;

    const DirLink& L(int X) const { return tabs.t[d.base(X)][dir]; }

    int end_to(int X, int Y) {
        int e = d.end_toward(X, Y);
        if (e < 0 || L(X).sub[e] < 0) throw InvalidDiagram("pushed neighbour is not in the directional link");
        return e;
    }

    // Images of a link path at X as fresh diagram vertices, endpoints given.
    std::vector<int> spokes(int X, const std::vector<int>& ends, int first, int last) {
        std::vector<int> out{first};
        for (size_t k = 1; k + 1 < ends.size(); ++k) out.push_back(D.add_vertex(d.neighbour(X, ends[k])));
        if (ends.size() >= 2 || first != last) out.push_back(last);
        return out;
    }

    const EdgeImage& edge(int a, int b) {
        std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto it = edges.find(key);
        if (it != edges.end()) return it->second;
        auto [lo, hi] = key;
        EdgeImage im;
        int Xlo = D.image[lo], Xhi = D.image[hi];
        if (inC[lo] && inC[hi]) {
            if (Xlo == Xhi) {
                im.path = {prime[lo], prime[hi]};
                im.meet = 0;
            } else {
                // Step 1: the diagonal goes to mu(lo) . mu(hi)^-1 through the
                // corner of its square one level closer to 0
                int b = square_corner_toward(d, Xlo, Xhi, -s);
                std::vector<int> m1 = L(Xlo).geodesic(choices_w(lo), end_to(Xlo, b));
                std::vector<int> m2 = L(Xhi).geodesic(choices_w(hi), end_to(Xhi, b));
                led.choices.max_mu = std::max({led.choices.max_mu, static_cast<int>(m1.size()) - 1,
                                               static_cast<int>(m2.size()) - 1});
                led.choices.mu_paths += 2;
                int meet;
                if (m1.size() == 1)
                    meet = prime[lo];
                else if (m2.size() == 1)
                    meet = prime[hi];
                else
                    meet = D.add_vertex(b);
                std::vector<int> p1 = spokes(Xlo, m1, prime[lo], meet);
                std::vector<int> p2 = spokes(Xhi, m2, prime[hi], meet);
                im.path = p1;
                im.meet = static_cast<int>(p1.size()) - 1;
                for (size_t k = p2.size() - 1; k-- > 0;) im.path.push_back(p2[k]);
                if (m1.size() == 1 && m2.size() == 1) {
                    im.path = {prime[lo], prime[hi]};
                    im.meet = 0;
                }
            }
        } else if (inC[lo] || inC[hi]) {
            // Step 3: the vertical edge u-v goes to eta from u to v'
            int v = inC[lo] ? lo : hi, u = inC[lo] ? hi : lo;
            int X = D.image[v];
            std::vector<int> eta = L(X).geodesic(end_to(X, D.image[u]), choices_w(v));
            led.choices.max_eta = std::max(led.choices.max_eta, static_cast<int>(eta.size()) - 1);
            ++led.choices.eta_paths;
            std::vector<int> p = spokes(X, eta, u, prime[v]);
            if (p.size() == 1) p.push_back(prime[v]);
            if (u == lo) {
                im.path = p;
                im.meet = 0;
            } else {
                im.path.assign(p.rbegin(), p.rend());
                im.meet = static_cast<int>(p.size()) - 1;
            }
        } else {
            im.path = {lo, hi};
        }
        return edges.emplace(key, std::move(im)).first->second;
    }

    int choices_w(int v) { return led.choices.w.at(v); }

    // Fills a corner cycle inside the directional link at X; returns its area.
    int fill_corner(std::vector<int> cyc, int X) {
        if (reduce_cycle(D, cyc)) return 0;
        int n = static_cast<int>(cyc.size());
        const DirLink& lk = L(X);
        std::vector<int> walk;
        for (int v : cyc) walk.push_back(lk.sub[end_to(X, D.image[v])]);
        ++led.link_loops;
        led.max_link_loop = std::max(led.max_link_loop, n);
        if (n > 5) throw BoundExceeded("link loop longer than 5");
        if (std::set<int>(walk.begin(), walk.end()).size() != walk.size())
            throw InvalidDiagram("reduced link loop is not simple");
        ChainResult r = min_bounding_chain(lk.lk, walk);
        if (r.area < 0) throw InvalidDiagram("link loop does not bound");
        if (r.area > T) throw BoundExceeded("link loop needs more than T cells");
        std::vector<std::array<int, 3>> tris;
        for (int t : r.tris) tris.push_back(lk.lk.tris[t]);
        if (!is_disc_with_boundary(lk.lk, r.tris, walk)) throw InvalidDiagram("link filling is not a disc");
        std::map<int, int> dv;
        for (int k = 0; k < n; ++k) dv[walk[k]] = cyc[k];
        for (auto& tr : tris)
            for (int& x : tr) {
                auto it = dv.find(x);
                if (it == dv.end()) it = dv.emplace(x, D.add_vertex(d.neighbour(X, lk.ends[x]))).first;
                x = it->second;
            }
        for (const auto& f : orient_disc(tris, cyc)) face(D, f[0], f[1], f[2]);
        led.max_link_area = std::max(led.max_link_area, r.area);
        return r.area;
    }

    // Central polygon: must reduce to nothing or one triangle.
    void fill_central(std::vector<int> cyc) {
        if (!reduce_cycle(D, cyc)) throw InvalidDiagram("central polygon does not reduce to a triangle");
    }

    int nondegenerate_since(size_t nf) const {
        int area = 0;
        for (size_t k = nf; k < D.faces.size(); ++k) {
            const auto& f = D.faces[k];
            int a = D.image[f[0]], b = D.image[f[1]], c = D.image[f[2]];
            if (a != b && b != c && a != c) ++area;
        }
        return area;
    }

    void replace_face(const std::array<int, 3>& F) {
        size_t nf = D.faces.size();
        std::array<std::vector<int>, 3> P;
        std::array<int, 3> meet;
        for (int k = 0; k < 3; ++k) {
            int a = F[k], b = F[(k + 1) % 3];
            const EdgeImage& im = edge(a, b);
            if (a < b) {
                P[k] = im.path;
                meet[k] = im.meet;
            } else {
                P[k].assign(im.path.rbegin(), im.path.rend());
                meet[k] = im.meet < 0 ? -1 : static_cast<int>(im.path.size()) - 1 - im.meet;
            }
        }
        std::vector<int> central;
        for (int k = 0; k < 3; ++k) {
            int k1 = (k + 1) % 3;
            central.push_back(meet[k] < 0 ? F[k] : P[k][meet[k]]);
            int v = F[k1];
            if (!inC[v]) continue;
            int X = D.image[v];
            int Mk = P[k][meet[k]], Mk1 = P[k1][meet[k1]];
            // Step 2: nu joins the two meeting points inside the link at v
            std::vector<int> nu = L(X).geodesic(end_to(X, D.image[Mk]), end_to(X, D.image[Mk1]));
            led.choices.max_nu = std::max(led.choices.max_nu, static_cast<int>(nu.size()) - 1);
            ++led.choices.nu_paths;
            std::vector<int> nup = spokes(X, nu, Mk, Mk1);
            if (nup.size() == 1) nup.push_back(Mk1);
            for (size_t t = 1; t + 1 < nup.size(); ++t) central.push_back(nup[t]);
            std::vector<int> corner(P[k].begin() + meet[k], P[k].end());
            corner.insert(corner.end(), P[k1].begin() + 1, P[k1].begin() + meet[k1] + 1);
            for (size_t t = nup.size() - 1; t-- > 1;) corner.push_back(nup[t]);
            std::vector<int> c;
            for (int x : corner)
                if (c.empty() || c.back() != x) c.push_back(x);
            while (c.size() > 1 && c.front() == c.back()) c.pop_back();
            fill_corner(c, X);
        }
        fill_central(central);
        int area = nondegenerate_since(nf);
        bool pushed = inC[F[0]] && inC[F[1]] && inC[F[2]];
        if (pushed) {
            ++led.cells_pushed;
            led.step2_area += area;
        } else {
            ++led.cells_extended;
            led.step3_area += area;
        }
        led.max_cell_expansion = std::max(led.max_cell_expansion, area);
        if (area > expansion_bound(T)) throw BoundExceeded("2-cell replacement exceeds 3T+1");
    }
};

}  // namespace

PushLedger push_step(Development& d, Diagram& D, const std::vector<int>& component, int T) {
    if (component.empty()) throw InvalidDiagram("empty component");
    int H = d.height(D.image[component[0]]);
    if (H == 0) throw InvalidDiagram("component already at height 0");
    Pusher pu{d, D, T, sign_of(H), H > 0 ? 0 : 1, link_tables(d.atlas()), {}, {}, {}, {}};
    pu.led.level = H;
    pu.led.components = 1;
    pu.inC.assign(D.image.size(), 0);
    for (int v : component) {
        if (d.height(D.image[v]) != H) throw InvalidDiagram("component is not at a single height");
        pu.inC[v] = 1;
    }
    for (int v : D.boundary)
        if (pu.inC[v]) throw InvalidDiagram("component touches the diagram boundary at nonzero height");
    // Step 1: w_v is the least end of the directional link
    for (int v : component) {
        int X = D.image[v];
        int w = pu.L(X).ends.at(0);
        pu.led.choices.w[v] = w;
        pu.prime[v] = D.add_vertex(d.neighbour(X, w));
    }
    std::vector<std::array<int, 3>> keep, touched;
    for (const auto& f : D.faces)
        (pu.inC[f[0]] || pu.inC[f[1]] || pu.inC[f[2]] ? touched : keep).push_back(f);
    D.faces = std::move(keep);
    for (const auto& f : touched) pu.replace_face(f);
    // a central triangle can fold back onto one made by a neighbouring face
    cancel_folds(D);
    if (has_doubled_edge(D)) repair_spheres(D);
    return pu.led;
}

std::vector<PushLedger> push_to_level(Development& d, Diagram& D, int T, bool check_each) {
    std::vector<PushLedger> out;
    std::vector<int> loop = D.boundary_word();
    int m = diagram_stats(d, D).height;
    for (int k = 0; k < m; ++k) {
        int level = m - k;
        PushLedger led;
        DiagramStats before = diagram_stats(d, D);
        led.level = level;
        led.height_before = before.height;
        led.area_before = before.area;
        for (int sgn : {1, -1})
            for (const auto& comp : level_components(d, D, sgn * level)) led.merge(push_step(d, D, comp, T));
        DiagramStats after = diagram_stats(d, D);
        led.height_after = after.height;
        led.area_after = after.area;
        if (check_each) {
            DiagramCheck ck = check_diagram(d, D, loop);
            if (!ck.ok) throw InvalidDiagram("push produced an invalid diagram: " + ck.error);
        }
        out.push_back(led);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Loops in the 0-level set

namespace {

std::vector<int> level_neighbours(Development& d, int v) {
    std::vector<int> out;
    int p = d.base(v), n = d.num_ends(v);
    const Atlas& a = d.atlas();
    for (int e1 = 0; e1 < n; ++e1) {
        if (!a.up(p, e1)) continue;
        for (int e2 = 0; e2 < n; ++e2)
            if (!a.up(p, e2) && a.adjacent(p, e1, e2)) out.push_back(d.square_corner(v, e1, e2));
    }
    return out;
}

// Best-first path in the level set from a to b guided by the cube distance.
std::vector<int> level_path(Development& d, int a, int b, long budget) {
    using Item = std::tuple<int, int, long, int>;  // distance, steps, order, vertex
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    std::map<int, int> parent;
    parent[a] = -1;
    long order = 0;
    pq.push({d.distance(a, b), 0, order++, a});
    long expanded = 0;
    while (!pq.empty()) {
        auto [h, g, o, v] = pq.top();
        pq.pop();
        if (v == b) {
            std::vector<int> path;
            for (int x = b; x >= 0; x = parent[x]) path.push_back(x);
            std::reverse(path.begin(), path.end());
            return path;
        }
        if (++expanded > budget) return {};
        for (int w : level_neighbours(d, v))
            if (!parent.count(w)) {
                parent[w] = v;
                pq.push({d.distance(w, b), g + 1, order++, w});
            }
    }
    return {};
}

}  // namespace

std::vector<int> random_level_loop(Development& d, int start, int target, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> best;
    for (int attempt = 0; attempt < 12; ++attempt) {
        int k = std::max(1, target / 2 - attempt * std::max(1, target / 16));
        std::vector<int> walk{start};
        for (int s = 0; s < k; ++s) {
            std::vector<int> nb = level_neighbours(d, walk.back());
            int w;
            do {
                w = nb[rng() % nb.size()];
            } while (walk.size() >= 2 && w == walk[walk.size() - 2] && nb.size() > 1);
            walk.push_back(w);
        }
        std::vector<int> back = level_path(d, walk.back(), start, 20000);
        if (back.empty()) continue;
        std::vector<int> loop = walk;
        loop.insert(loop.end(), back.begin() + 1, back.end() - 1);
        int len = static_cast<int>(loop.size());
        if (best.empty() || std::abs(len - target) < std::abs(static_cast<int>(best.size()) - target)) best = loop;
        if (len <= target && 4 * len >= 3 * target) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Pipeline

nlohmann::ordered_json PipelineRun::to_json() const {
    nlohmann::ordered_json pj = nlohmann::ordered_json::array();
    for (const auto& p : pushes) pj.push_back(p.to_json());
    return {{"n", n},
            {"height", height},
            {"area_dyadic", area_dyadic},
            {"area_final", area_final},
            {"radius_dyadic", radius_dyadic},
            {"radius_final", radius_final},
            {"fill",
             {{"cubical_length", fill.cubical_length},
              {"conversion_cost", fill.conversion_cost},
              {"triangles", fill.triangles},
              {"depth", fill.depth},
              {"leaves", fill.leaves},
              {"max_leaf_perimeter", fill.max_leaf_perimeter},
              {"max_triangle_perimeter", fill.max_triangle_perimeter},
              {"memo_hits", fill.memo_hits},
              {"pairings_tried", fill.pairings_tried},
              {"flips", fill.flips}}},
            {"pushes", pj},
            {"boundary_ok", boundary_ok},
            {"valid", valid},
            {"level0", level0},
            {"heights_ok", heights_ok},
            {"error", error}};
}

PipelineRun run_pipeline(Development& d, const std::vector<int>& loop, bool push, bool check_each, Diagram* out) {
    PipelineRun run;
    run.n = static_cast<int>(loop.size());
    try {
        Diagram D = dyadic_fill(d, loop, &run.fill);
        DiagramCheck ck = check_diagram(d, D, loop);
        run.valid = ck.ok;
        run.boundary_ok = D.boundary_word() == loop;
        if (!ck.ok) run.error = "dyadic fill: " + ck.error;
        DiagramStats st = diagram_stats(d, D);
        run.height = st.height;
        run.area_dyadic = st.area;
        run.radius_dyadic = st.radius;
        if (push) {
            run.pushes = push_to_level(d, D, 20, check_each);
            for (size_t k = 0; k < run.pushes.size(); ++k)
                if (run.pushes[k].height_after != run.height - static_cast<int>(k) - 1) run.heights_ok = false;
            DiagramCheck fin = check_diagram(d, D, loop);
            run.valid = run.valid && fin.ok;
            run.boundary_ok = run.boundary_ok && D.boundary_word() == loop;
            if (!fin.ok && run.error.empty()) run.error = "pushed: " + fin.error;
            st = diagram_stats(d, D);
            run.level0 = st.height == 0;
        } else {
            run.level0 = st.height == 0;
        }
        run.area_final = st.area;
        run.radius_final = st.radius;
        if (out) *out = std::move(D);
    } catch (const Error& e) {
        run.error = e.kind() + ": " + e.what();
    }
    return run;
}

std::vector<DehnRow> dehn_sample(const Atlas& a, int root_base, const std::vector<int>& lengths, int count,
                                 uint64_t seed, int threads, bool check_each) {
    std::vector<DehnRow> rows;
    for (int n : lengths)
        for (int i = 0; i < count; ++i) {
            DehnRow r;
            r.target = n;
            uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<uint64_t>(n) * 1000003ULL + i + 1);
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            r.seed = z ^ (z >> 31);
            rows.push_back(r);
        }
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t k; (k = next++) < rows.size();) {
            Development d(a, root_base);
            std::vector<int> loop = random_level_loop(d, d.root(), rows[k].target, rows[k].seed);
            rows[k].run = run_pipeline(d, loop, true, check_each);
        }
    };
    int nt = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < nt; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

std::string dehn_csv(const std::vector<DehnRow>& rows) {
    std::ostringstream s;
    s << "n,target,seed,height,area_dyadic,area_level0,radius_dyadic,radius_level0,pushes,max_cell_expansion,"
         "max_link_loop,max_link_area,step3_area,ok\n";
    for (const auto& r : rows) {
        int mce = 0, mll = 0, mla = 0;
        long s3 = 0;
        for (const auto& p : r.run.pushes) {
            mce = std::max(mce, p.max_cell_expansion);
            mll = std::max(mll, p.max_link_loop);
            mla = std::max(mla, p.max_link_area);
            s3 += p.step3_area;
        }
        s << r.run.n << ',' << r.target << ',' << r.seed << ',' << r.run.height << ',' << r.run.area_dyadic << ','
          << r.run.area_final << ',' << r.run.radius_dyadic << ',' << r.run.radius_final << ','
          << r.run.pushes.size() << ',' << mce << ',' << mll << ',' << mla << ',' << s3 << ','
          << (r.run.ok() ? 1 : 0) << '\n';
    }
    return s.str();
}

DehnSummary summarize(const std::vector<DehnRow>& rows) {
    DehnSummary s;
    s.C2 = rows.empty() ? 0 : -1e9;
    for (const auto& row : rows) {
        const PipelineRun& r = row.run;
        s.min_n = s.loops ? std::min(s.min_n, r.n) : r.n;
        s.max_n = std::max(s.max_n, r.n);
        ++s.loops;
        s.max_height = std::max(s.max_height, r.height);
        for (const PushLedger& p : r.pushes) {
            s.max_cell_expansion = std::max(s.max_cell_expansion, p.max_cell_expansion);
            s.max_link_loop = std::max(s.max_link_loop, p.max_link_loop);
            s.max_link_area = std::max(s.max_link_area, p.max_link_area);
            if (p.area_before > 0) s.C1prime = std::max(s.C1prime, static_cast<double>(p.step3_area) / p.area_before);
        }
        if (!r.ok()) {
            ++s.failed;
            if (s.first_error.empty()) s.first_error = r.error.empty() ? "invariant violated" : r.error;
        }
        if (r.n >= 2) {
            double lg = std::log2(static_cast<double>(r.n));
            s.C1 = std::max(s.C1, r.area_dyadic / (r.n * lg));
            s.C2 = std::max(s.C2, r.radius_dyadic - 16.0 * lg);
        }
    }
    return s;
}

nlohmann::ordered_json DehnSummary::to_json() const {
    return {{"loops", loops},
            {"failed", failed},
            {"first_error", first_error},
            {"min_length", min_n},
            {"max_length", max_n},
            {"max_height", max_height},
            {"max_cell_expansion", max_cell_expansion},
            {"max_link_loop", max_link_loop},
            {"max_link_area", max_link_area},
            {"C1_measured", C1},
            {"C2_measured", C2},
            {"C1prime_measured", C1prime}};
}

nlohmann::ordered_json ExponentReport::to_json() const {
    // three significant figures
    double scale = std::pow(10.0, 2 - static_cast<int>(std::floor(std::log10(std::fabs(exponent)))));
    return {{"delta", delta}, {"C3", C3}, {"exponent", std::round(exponent * scale) / scale},
            {"exponent_exact", exponent}};
}

ExponentReport exponent_report(int delta, int C3) {
    ExponentReport r;
    r.delta = delta;
    r.C3 = C3;
    r.exponent = 1.0 + delta * std::log2(static_cast<double>(C3));
    return r;
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json diagram_to_json(const Diagram& D) {
    return {{"schema", "ramcube.diagram/1"}, {"image", D.image}, {"faces", D.faces}, {"boundary", D.boundary}};
}

nlohmann::ordered_json loop_to_json(Development& d, const std::vector<int>& loop) {
    nlohmann::ordered_json steps = nlohmann::ordered_json::array();
    int n = static_cast<int>(loop.size());
    // prefix: geodesic from the root to the first vertex
    std::vector<int> g = d.geodesic(d.root(), n ? loop[0] : d.root());
    nlohmann::ordered_json prefix = nlohmann::ordered_json::array();
    for (size_t k = 0; k + 1 < g.size(); ++k) prefix.push_back(d.end_toward(g[k], g[k + 1]));
    for (int i = 0; n >= 2 && i < n; ++i) {
        int a = loop[i], b = loop[(i + 1) % n];
        if (d.adjacent(a, b)) {
            steps.push_back({d.end_toward(a, b)});
        } else {
            int c = square_middles(d, a, b)[0];
            steps.push_back({d.end_toward(a, c), d.end_toward(c, b)});
        }
    }
    return {{"schema", "ramcube.loop/1"}, {"root_base", d.base(d.root())}, {"prefix", prefix}, {"steps", steps}};
}

std::vector<int> loop_from_json(Development& d, const nlohmann::json& j) {
    if (j.value("schema", "") != "ramcube.loop/1") throw FormatError("expected schema ramcube.loop/1");
    if (j.at("root_base").get<int>() != d.base(d.root())) throw FormatError("loop was recorded at another root base");
    int v = d.root();
    auto step = [&](int e) {
        if (e < 0 || e >= d.num_ends(v)) throw FormatError("end index out of range");
        v = d.neighbour(v, e);
    };
    for (const auto& e : j.at("prefix")) step(e.get<int>());
    std::vector<int> loop{v};
    for (const auto& s : j.at("steps")) {
        for (const auto& e : s) step(e.get<int>());
        loop.push_back(v);
    }
    if (loop.size() >= 2) {
        if (loop.back() != loop.front()) throw FormatError("loop steps do not close up");
        loop.pop_back();
    }
    return loop;
}

}  // namespace ramcube
