#include "ramcube/atlas.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <set>

namespace ramcube {

namespace {

void transverse_coords(int i, int& j, int& k) {
    j = i == 0 ? 1 : 0;
    k = i == 2 ? 1 : 2;
}

}  // namespace

Atlas::Atlas(const Gamma& gamma, const Placement& pl) : gamma_(gamma), pl_(pl) {
    pl_.validate();
    validate_voltages(gamma_.va);
    if (gamma_.va.graph.na != 4 || gamma_.va.graph.nb != 4)
        throw InvalidVoltage("atlas needs a voltage assignment on K_{4,4}");
    for (int l = 0; l < 4; ++l)
        for (int m = 0; m < 4; ++m) {
            vol_[l * 4 + m] = gamma_.va.at(l, m);
            vol_inv_[l * 4 + m] = perm_inverse(vol_[l * 4 + m]);
        }
    for (int p = 0; p < 8; ++p) {
        int i = pl_.branch(p);
        branch_[p] = i;
        index_[p].fill(-1);
        for (int c = 0; c < 3; ++c)
            for (int l = 0; l < 4; ++l) {
                if (i < 0 || c == i) {
                    index_[p][(c * 4 + l) * 6] = static_cast<int>(labels_[p].size());
                    labels_[p].push_back({int8_t(c), int8_t(l), -1});
                } else {
                    for (int s = 0; s < 5; ++s) {
                        index_[p][(c * 4 + l) * 6 + s + 1] = static_cast<int>(labels_[p].size());
                        labels_[p].push_back({int8_t(c), int8_t(l), int8_t(s)});
                    }
                }
            }
        int n = num_ends(p);
        ups_[p].resize(n);
        for (int e = 0; e < n; ++e) ups_[p][e] = end_goes_up(p, labels_[p][e].coord, labels_[p][e].letter);
        adj_[p].assign(static_cast<size_t>(n) * n, 0);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const EndLabel &x = labels_[p][a], &y = labels_[p][b];
                if (x.coord == y.coord) continue;
                bool ok = i < 0 || x.coord == i || y.coord == i;
                if (!ok) {
                    EndLabel g = gamma_neighbour(p, x, y.coord, y.letter);
                    ok = g.sheet == y.sheet;
                }
                adj_[p][a * n + b] = ok;
            }
        LinkComplex& lk = links_[p];
        for (int e = 0; e < n; ++e) {
            LinkVertex v;
            v.coord = labels_[p][e].coord;
            v.letter = labels_[p][e].letter;
            v.sheet = labels_[p][e].sheet;
            v.up = ups_[p][e];
            lk.verts.push_back(v);
        }
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b)
                if (adjacent(p, a, b)) {
                    lk.edges.push_back({a, b});
                    lk.edge_cell.push_back(-1);
                    for (int c = b + 1; c < n; ++c)
                        if (adjacent(p, a, c) && adjacent(p, b, c)) {
                            lk.tris.push_back({a, b, c});
                            lk.tri_cell.push_back(-1);
                        }
                }
        lk.finalize();
    }
}

int Atlas::end_index(int p, int coord, int letter, int sheet) const {
    if (coord < 0 || coord > 2 || letter < 0 || letter > 3 || sheet < -1 || sheet > 4) return -1;
    return index_[p][(coord * 4 + letter) * 6 + sheet + 1];
}

EndLabel Atlas::gamma_neighbour(int p, const EndLabel& e, int coord, int letter) const {
    int i = branch_[p], j, k;
    transverse_coords(i, j, k);
    if (e.coord == j && coord == k)
        return {int8_t(k), int8_t(letter), int8_t(vol_[e.letter * 4 + letter][e.sheet])};
    if (e.coord == k && coord == j)
        return {int8_t(j), int8_t(letter), int8_t(vol_inv_[letter * 4 + e.letter][e.sheet])};
    throw DevelopmentError("gamma neighbour between non-transverse coordinates");
}

int Atlas::transport(int p, int arrival, const EndLabel& src) const {
    int i = branch_[p];
    if (i < 0 || src.coord == i) return end_index(p, src.coord, src.letter, -1);
    const EndLabel& arr = labels_[p][arrival];
    if (arr.coord == i) {
        if (src.sheet < 0) throw DevelopmentError("transport along a branching line needs a sheet");
        return end_index(p, src.coord, src.letter, src.sheet);
    }
    EndLabel g = gamma_neighbour(p, arr, src.coord, src.letter);
    return end_index(p, g.coord, g.letter, g.sheet);
}

const Atlas& default_atlas() {
    static const Atlas atlas = [] {
        auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::Lex);
        if (!va) throw NoSolution("no voltage assignment on K_{4,4}");
        return Atlas(build_gamma(*va));
    }();
    return atlas;
}

// ---------------------------------------------------------------------------

namespace {

using Bits = std::vector<uint64_t>;

inline bool test(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1; }
inline void flipb(Bits& b, int i) { b[i >> 6] ^= uint64_t(1) << (i & 63); }
inline void xorb(Bits& a, const Bits& b) {
    for (size_t k = 0; k < a.size(); ++k) a[k] ^= b[k];
}
inline bool zero(const Bits& b) {
    return std::all_of(b.begin(), b.end(), [](uint64_t w) { return w == 0; });
}
inline int popcount(const Bits& b) {
    int n = 0;
    for (uint64_t w : b) n += __builtin_popcountll(w);
    return n;
}
int lowest(const Bits& b) {
    for (size_t k = 0; k < b.size(); ++k)
        if (b[k]) return static_cast<int>(k * 64 + __builtin_ctzll(b[k]));
    return -1;
}

}  // namespace

ChainResult min_bounding_chain(const LinkComplex& l, const std::vector<int>& walk) {
    std::map<std::pair<int, int>, int> eidx;
    for (size_t k = 0; k < l.edges.size(); ++k) {
        auto [a, b] = l.edges[k];
        eidx[{std::min(a, b), std::max(a, b)}] = static_cast<int>(k);
    }
    int E = static_cast<int>(l.edges.size()), T = static_cast<int>(l.tris.size());
    size_t we = (E + 63) / 64, wt = (T + 63) / 64;
    Bits z(we, 0);
    for (size_t k = 0; k < walk.size(); ++k) {
        int a = walk[k], b = walk[(k + 1) % walk.size()];
        if (a == b) continue;
        auto it = eidx.find({std::min(a, b), std::max(a, b)});
        if (it == eidx.end()) throw NotACycle("walk uses a non-edge of the link");
        flipb(z, it->second);
    }
    struct Row {
        Bits b, comb;
        int pivot;
    };
    std::vector<Row> rows;
    std::vector<Bits> kernel;
    for (int t = 0; t < T; ++t) {
        Row r{Bits(we, 0), Bits(wt, 0), -1};
        const auto& tri = l.tris[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            flipb(r.b, eidx.at({std::min(a, b), std::max(a, b)}));
        }
        flipb(r.comb, t);
        for (const Row& p : rows)
            if (test(r.b, p.pivot)) {
                xorb(r.b, p.b);
                xorb(r.comb, p.comb);
            }
        if (zero(r.b)) {
            kernel.push_back(r.comb);
        } else {
            r.pivot = lowest(r.b);
            rows.push_back(std::move(r));
        }
    }
    Bits sol(wt, 0);
    for (const Row& p : rows)
        if (test(z, p.pivot)) {
            xorb(z, p.b);
            xorb(sol, p.comb);
        }
    ChainResult res;
    if (!zero(z)) return res;
    if (kernel.size() > 20) throw BudgetExceeded("kernel too large for exhaustive minimisation");
    Bits best = sol;
    int bestw = popcount(sol);
    for (uint64_t m = 1; m < (uint64_t(1) << kernel.size()); ++m) {
        Bits c = sol;
        for (size_t k = 0; k < kernel.size(); ++k)
            if ((m >> k) & 1) xorb(c, kernel[k]);
        int w = popcount(c);
        if (w < bestw) {
            bestw = w;
            best = c;
        }
    }
    res.area = bestw;
    for (int t = 0; t < T; ++t)
        if (test(best, t)) res.tris.push_back(t);
    return res;
}

bool is_disc_with_boundary(const LinkComplex& l, const std::vector<int>& tris,
                           const std::vector<int>& loop) {
    if (tris.empty()) return loop.size() <= 1;
    std::set<int> lv(loop.begin(), loop.end());
    if (lv.size() != loop.size() || loop.size() < 3) return false;
    std::map<std::pair<int, int>, int> ecount;
    std::set<int> verts;
    for (int t : tris)
        for (int k = 0; k < 3; ++k) {
            int a = l.tris[t][k], b = l.tris[t][(k + 1) % 3];
            ++ecount[{std::min(a, b), std::max(a, b)}];
            verts.insert(a);
        }
    std::set<std::pair<int, int>> bd;
    for (size_t k = 0; k < loop.size(); ++k) {
        int a = loop[k], b = loop[(k + 1) % loop.size()];
        bd.insert({std::min(a, b), std::max(a, b)});
    }
    for (auto [e, n] : ecount) {
        if (bd.count(e) ? n != 1 : n != 2) return false;
    }
    for (auto e : bd)
        if (!ecount.count(e)) return false;
    int chi = static_cast<int>(verts.size()) - static_cast<int>(ecount.size()) + static_cast<int>(tris.size());
    if (chi != 1) return false;
    // Vertex links: cycles inside, paths on the boundary.
    for (int v : verts) {
        std::map<int, std::vector<int>> g;
        int ne = 0;
        for (int t : tris) {
            const auto& tr = l.tris[t];
            int k = std::find(tr.begin(), tr.end(), v) - tr.begin();
            if (k == 3) continue;
            int a = tr[(k + 1) % 3], b = tr[(k + 2) % 3];
            g[a].push_back(b);
            g[b].push_back(a);
            ++ne;
        }
        int nv = static_cast<int>(g.size());
        int deg1 = 0;
        for (auto& [u, ns] : g) {
            if (ns.size() > 2) return false;
            if (ns.size() == 1) ++deg1;
        }
        // connected?
        std::set<int> seen{g.begin()->first};
        std::vector<int> st{g.begin()->first};
        while (!st.empty()) {
            int u = st.back();
            st.pop_back();
            for (int w : g[u])
                if (seen.insert(w).second) st.push_back(w);
        }
        if (static_cast<int>(seen.size()) != nv) return false;
        if (lv.count(v)) {
            if (deg1 != 2 || ne != nv - 1) return false;
        } else {
            if (deg1 != 0 || ne != nv) return false;
        }
    }
    return true;
}

LinkAreaStats link_area_bound(const Atlas& a) {
    std::vector<LinkComplex> links;
    for (int p = 0; p < 8; ++p) {
        links.push_back(a.descending(p));
        links.push_back(a.ascending(p));
    }
    return link_area_bound(links);
}

LinkAreaStats link_area_bound(const std::vector<LinkComplex>& links) {
    LinkAreaStats st;
    for (size_t li = 0; li < links.size(); ++li) {
        const LinkComplex& l = links[li];
        auto nb = l.neighbours();
        std::set<std::vector<int>> cycles;
        int n = l.size();
        std::vector<int> w;
        // Non-backtracking closed walks of length 3..5.
        auto rec = [&](auto&& self) -> void {
            int len = static_cast<int>(w.size());
            if (len >= 3 && l.adjacent(w.back(), w[0]) && w[1] != w.back() &&
                w[len - 2] != w[0]) {
                std::set<int> s(w.begin(), w.end());
                if (static_cast<int>(s.size()) != len) {
                    ++st.nonsimple_reduced;
                } else {
                    // canonical rotation/reflection
                    std::vector<int> best;
                    for (int r = 0; r < len; ++r)
                        for (int d = 0; d < 2; ++d) {
                            std::vector<int> c(len);
                            for (int k = 0; k < len; ++k)
                                c[k] = w[((d ? -k : k) + r + 2 * len) % len];
                            if (best.empty() || c < best) best = c;
                        }
                    cycles.insert(best);
                }
            }
            if (len == 5) return;
            for (int x : nb[w.back()]) {
                if (len >= 2 && x == w[len - 2]) continue;
                w.push_back(x);
                self(self);
                w.pop_back();
            }
        };
        for (int s = 0; s < n; ++s) {
            w = {s};
            rec(rec);
        }
        for (const auto& c : cycles) {
            ++st.loops;
            ChainResult r = min_bounding_chain(l, c);
            if (r.area < 0 || !is_disc_with_boundary(l, r.tris, c)) st.discs_ok = false;
            if (r.area > st.T || (r.area == st.T && c.size() < st.witness.size())) {
                st.witness = c;
                st.witness_link = static_cast<int>(li);
            }
            st.T = std::max(st.T, r.area);
        }
    }
    return st;
}

std::vector<int> reduce_closed_walk(std::vector<int> w) {
    std::vector<int> out;
    for (int x : w) {
        if (!out.empty() && out.back() == x) continue;
        if (out.size() >= 2 && out[out.size() - 2] == x) {
            out.pop_back();
            continue;
        }
        out.push_back(x);
    }
    while (out.size() >= 2 && out.front() == out.back()) out.pop_back();
    while (out.size() >= 3 && out[1] == out.back()) {
        out.erase(out.begin());
        out.pop_back();
    }
    if (out.size() == 2) out.pop_back();
    if (out.size() <= 1) out.clear();
    return out;
}

int filling_area_oracle(const LinkComplex& sphere, const std::vector<int>& loop) {
    std::map<std::pair<int, int>, int> faces_per_edge;
    for (const auto& t : sphere.tris)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            ++faces_per_edge[{std::min(a, b), std::max(a, b)}];
        }
    bool closed = faces_per_edge.size() == sphere.edges.size();
    for (const auto& [e, n] : faces_per_edge) closed = closed && n == 2;
    if (!closed || sphere.euler_characteristic() != 2) throw MalformedCell("link is not a 2-sphere");
    if (loop.size() > 6) throw BoundExceeded("oracle loops have length at most 6");
    for (size_t k = 0; k < loop.size(); ++k) {
        int a = loop[k], b = loop[(k + 1) % loop.size()];
        if (a != b && !sphere.adjacent(a, b)) throw NotACycle("loop uses a non-edge");
    }
    std::vector<int> w = reduce_closed_walk(loop);
    if (w.empty()) return 0;
    ChainResult r = min_bounding_chain(sphere, w);
    if (r.area < 0) throw NotACycle("loop is not null-homotopic on the sphere");
    std::set<int> distinct(w.begin(), w.end());
    if (distinct.size() == w.size() && !is_disc_with_boundary(sphere, r.tris, w))
        throw InvalidDiagram("minimal chain is not a disc");
    return r.area;
}

}  // namespace ramcube

namespace ramcube {

int relator_area(const LinkComplex& l, const std::vector<int>& loop, int max_len) {
    using Word = std::vector<int>;
    auto rotate_min = [](Word w) {
        if (w.size() <= 2) return Word{};
        Word best = w;
        for (size_t r = 1; r < w.size(); ++r) {
            std::rotate(w.begin(), w.begin() + 1, w.end());
            best = std::min(best, w);
        }
        return best;
    };
    int n = static_cast<int>(loop.size());
    for (int i = 0; i < n && n >= 2; ++i)
        if (!l.adjacent(loop[i], loop[(i + 1) % n])) throw NotACycle("walk leaves the 1-skeleton");
    std::vector<std::vector<int>> apex(static_cast<size_t>(l.size()) * l.size());
    for (const auto& t : l.tris)
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3], c = t[(k + 2) % 3];
            apex[a * l.size() + b].push_back(c);
            apex[b * l.size() + a].push_back(c);
        }
    std::map<Word, int> dist;
    std::deque<std::pair<int, Word>> q;
    auto relax = [&](const Word& w0, int d, bool free) {
        Word w = rotate_min(w0);
        auto it = dist.find(w);
        if (it != dist.end() && it->second <= d) return;
        dist[w] = d;
        if (free)
            q.push_front({d, w});
        else
            q.push_back({d, w});
    };
    relax(loop, 0, true);
    while (!q.empty()) {
        auto [d, w] = q.front();
        q.pop_front();
        if (dist[w] < d) continue;
        if (w.empty()) return d;
        size_t m = w.size();
        for (size_t i = 0; i < m; ++i) {
            int a = w[i], b = w[(i + 1) % m], c = w[(i + 2) % m];
            size_t j = (i + 1) % m;
            if (a == c) {
                Word x;
                for (size_t k = 0; k < m; ++k)
                    if (k != j && k != (i + 2) % m) x.push_back(w[k]);
                relax(x, d, true);
            }
            const auto& ap = apex[a * l.size() + c];
            if (std::find(ap.begin(), ap.end(), b) != ap.end()) {
                Word x = w;
                x.erase(x.begin() + static_cast<long>(j));
                relax(x, d + 1, false);
            }
            if (static_cast<int>(m) < max_len)
                for (int t : apex[a * l.size() + b]) {
                    Word x = w;
                    x.insert(x.begin() + static_cast<long>(i + 1), t);
                    relax(x, d + 1, false);
                }
        }
    }
    return -1;
}

}  // namespace ramcube
