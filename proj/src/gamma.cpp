#include "ramcube/gamma.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace ramcube {

Perm perm_identity() { return {0, 1, 2, 3, 4}; }

Perm perm_compose(const Perm& p, const Perm& q) {
    Perm r{};
    for (int i = 0; i < 5; ++i) r[i] = p[q[i]];
    return r;
}

Perm perm_inverse(const Perm& p) {
    Perm r{};
    for (int i = 0; i < 5; ++i) r[p[i]] = i;
    return r;
}

bool is_permutation(const Perm& p) {
    std::array<int, 5> seen{};
    for (int x : p) {
        if (x < 0 || x >= 5 || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

bool is_full_cycle(const Perm& p) {
    int x = 0;
    for (int k = 1; k <= 5; ++k) {
        x = p[x];
        if (x == 0) return k == 5;
    }
    return false;
}

std::string perm_str(const Perm& p) {
    std::ostringstream os;
    os << "(" << p[0];
    for (int i = 1; i < 5; ++i) os << "," << p[i];
    os << ")";
    return os.str();
}

BipartiteGraph BipartiteGraph::complete(int na, int nb) {
    BipartiteGraph g;
    g.na = na;
    g.nb = nb;
    for (int p = 0; p < na; ++p)
        for (int q = 0; q < nb; ++q) g.edges.push_back({p, q});
    return g;
}

int BipartiteGraph::edge_index(int p, int q) const {
    for (size_t k = 0; k < edges.size(); ++k)
        if (edges[k][0] == p && edges[k][1] == q) return static_cast<int>(k);
    return -1;
}

std::vector<FourCycle> enumerate_4cycles(const BipartiteGraph& g) {
    std::vector<FourCycle> out;
    for (int p1 = 0; p1 < g.na; ++p1)
        for (int p2 = p1 + 1; p2 < g.na; ++p2)
            for (int q1 = 0; q1 < g.nb; ++q1)
                for (int q2 = q1 + 1; q2 < g.nb; ++q2)
                    if (g.edge_index(p1, q1) >= 0 && g.edge_index(p2, q1) >= 0 &&
                        g.edge_index(p2, q2) >= 0 && g.edge_index(p1, q2) >= 0)
                        out.push_back({p1, q1, p2, q2});
    return out;
}

const Perm& VoltageAssignment::at(int p, int q) const {
    int k = graph.edge_index(p, q);
    if (k < 0) throw InvalidVoltage("no edge a" + std::to_string(p) + "-b" + std::to_string(q));
    return vol[k];
}

Perm VoltageAssignment::holonomy(const FourCycle& c) const {
    // a_p1 -> b_q1 -> a_p2 -> b_q2 -> a_p1
    Perm h = at(c.p1, c.q1);
    h = perm_compose(perm_inverse(at(c.p2, c.q1)), h);
    h = perm_compose(at(c.p2, c.q2), h);
    h = perm_compose(perm_inverse(at(c.p1, c.q2)), h);
    return h;
}

nlohmann::ordered_json VoltageAssignment::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "ramcube.gamma/1";
    j["sheets"] = 5;
    j["na"] = graph.na;
    j["nb"] = graph.nb;
    auto& es = j["edges"] = nlohmann::ordered_json::array();
    for (size_t k = 0; k < graph.edges.size(); ++k)
        es.push_back({graph.edges[k][0], graph.edges[k][1], vol[k]});
    return j;
}

VoltageAssignment VoltageAssignment::from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "ramcube.gamma/1") throw FormatError("expected schema ramcube.gamma/1");
    VoltageAssignment va;
    try {
        if (j.at("sheets").get<int>() != 5) throw FormatError("only 5 sheets are supported");
        va.graph.na = j.at("na");
        va.graph.nb = j.at("nb");
        for (const auto& e : j.at("edges")) {
            va.graph.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
            va.vol.push_back(e.at(2).get<Perm>());
        }
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad gamma json: ") + ex.what());
    }
    return va;
}

void validate_voltages(const VoltageAssignment& va) {
    if (va.vol.size() != va.graph.edges.size()) throw InvalidVoltage("one voltage per edge expected");
    for (size_t k = 0; k < va.vol.size(); ++k)
        if (!is_permutation(va.vol[k]))
            throw InvalidVoltage("voltage on edge " + std::to_string(k) + " is not a permutation");
    for (const FourCycle& c : enumerate_4cycles(va.graph)) {
        Perm h = va.holonomy(c);
        if (!is_full_cycle(h)) {
            std::ostringstream os;
            os << "4-cycle a" << c.p1 << " b" << c.q1 << " a" << c.p2 << " b" << c.q2
               << " has holonomy " << perm_str(h) << ", not a 5-cycle";
            throw InvalidVoltage(os.str());
        }
    }
}

std::optional<VoltageAssignment> search_monodromy(const BipartiteGraph& g, SearchOrder order,
                                                  SearchStats* stats) {
    std::vector<Perm> perms;
    Perm p = perm_identity();
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    if (order == SearchOrder::ReverseLex) std::reverse(perms.begin(), perms.end());

    // BFS spanning tree from a_0; graph vertices: a_p -> p, b_q -> na + q.
    int nv = g.na + g.nb;
    std::vector<char> seen(nv, 0), tree(g.edges.size(), 0);
    std::deque<int> bfs{0};
    seen[0] = 1;
    while (!bfs.empty()) {
        int u = bfs.front();
        bfs.pop_front();
        for (size_t k = 0; k < g.edges.size(); ++k) {
            int a = g.edges[k][0], b = g.na + g.edges[k][1];
            int w = u == a ? b : (u == b ? a : -1);
            if (w < 0 || seen[w]) continue;
            seen[w] = 1;
            tree[k] = 1;
            bfs.push_back(w);
        }
    }
    std::vector<int> free_edges;  // lexicographic (p, q) order
    for (size_t k = 0; k < g.edges.size(); ++k)
        if (!tree[k]) free_edges.push_back(static_cast<int>(k));
    std::sort(free_edges.begin(), free_edges.end(),
              [&](int x, int y) { return g.edges[x] < g.edges[y]; });

    VoltageAssignment va;
    va.graph = g;
    va.vol.assign(g.edges.size(), perm_identity());
    std::vector<int> pos(g.edges.size(), -1);
    for (size_t i = 0; i < free_edges.size(); ++i) pos[free_edges[i]] = static_cast<int>(i);

    // Each 4-cycle is tested once its last free edge is assigned.
    std::vector<std::vector<FourCycle>> due(free_edges.size() + 1);
    for (const FourCycle& c : enumerate_4cycles(g)) {
        int last = -1;
        for (auto [a, b] : {std::array<int, 2>{c.p1, c.q1}, {c.p2, c.q1}, {c.p2, c.q2}, {c.p1, c.q2}})
            last = std::max(last, pos[g.edge_index(a, b)]);
        due[last + 1].push_back(c);
    }
    for (const FourCycle& c : due[0])
        if (!is_full_cycle(va.holonomy(c))) return std::nullopt;

    long nodes = 0;
    auto dfs = [&](auto&& self, size_t i) -> bool {
        if (i == free_edges.size()) return true;
        for (const Perm& cand : perms) {
            ++nodes;
            va.vol[free_edges[i]] = cand;
            bool ok = true;
            for (const FourCycle& c : due[i + 1])
                if (!is_full_cycle(va.holonomy(c))) { ok = false; break; }
            if (ok && self(self, i + 1)) return true;
        }
        va.vol[free_edges[i]] = perm_identity();
        return false;
    };
    bool found = dfs(dfs, 0);
    if (stats) stats->nodes = nodes;
    if (!found) return std::nullopt;
    return va;
}

Gamma build_gamma(const VoltageAssignment& va) {
    validate_voltages(va);
    return Gamma{va};
}

std::vector<std::array<int, 2>> Gamma::edges() const {
    std::vector<std::array<int, 2>> out;
    for (size_t k = 0; k < va.graph.edges.size(); ++k) {
        auto [p, q] = va.graph.edges[k];
        for (int s = 0; s < 5; ++s) out.push_back({a_vertex(p, s), b_vertex(q, va.vol[k][s])});
    }
    return out;
}

std::vector<std::vector<int>> Gamma::adjacency() const {
    std::vector<std::vector<int>> nb(num_vertices());
    for (auto [u, w] : edges()) {
        nb[u].push_back(w);
        nb[w].push_back(u);
    }
    return nb;
}

GammaReport check_gamma(const Gamma& g) {
    GammaReport r;
    auto nb = g.adjacency();
    int n = g.num_vertices();
    std::vector<int> color(n, -1);
    std::deque<int> q{0};
    color[0] = 0;
    r.bipartite = true;
    while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (int w : nb[u]) {
            if (color[w] < 0) {
                color[w] = 1 - color[u];
                q.push_back(w);
            } else if (color[w] == color[u]) {
                r.bipartite = false;
            }
        }
    }
    r.connected = std::find(color.begin(), color.end(), -1) == color.end();
    r.four_regular = std::all_of(nb.begin(), nb.end(), [](const auto& l) { return l.size() == 4; });

    // Girth by BFS from every vertex.
    r.girth = 1 << 20;
    for (int s = 0; s < n; ++s) {
        std::vector<int> d(n, -1), par(n, -1);
        std::deque<int> b{s};
        d[s] = 0;
        while (!b.empty()) {
            int u = b.front();
            b.pop_front();
            for (int w : nb[u]) {
                if (d[w] < 0) {
                    d[w] = d[u] + 1;
                    par[w] = u;
                    b.push_back(w);
                } else if (par[u] != w) {
                    r.girth = std::min(r.girth, d[u] + d[w] + 1);
                }
            }
        }
    }

    // Covering: over each base edge the lifted edges form a perfect matching of fibres.
    r.covering = true;
    const auto& ge = g.va.graph.edges;
    for (size_t k = 0; k < ge.size(); ++k)
        if (!is_permutation(g.va.vol[k])) r.covering = false;
    for (int v = 0; v < n; ++v) {
        std::vector<int> base;
        for (int w : nb[v]) base.push_back(g.project(w));
        std::sort(base.begin(), base.end());
        if (std::adjacent_find(base.begin(), base.end()) != base.end()) r.covering = false;
    }

    // A base 4-cycle lifts to a single cycle of length 20 iff its holonomy is a 5-cycle.
    r.cycles_lift_to_20 = true;
    for (const FourCycle& c : enumerate_4cycles(g.va.graph)) {
        int len = 0, s = 0;
        do {
            s = g.va.holonomy(c)[s];
            len += 4;
        } while (s != 0);
        if (len != 20) r.cycles_lift_to_20 = false;
    }

    Perm shift{1, 2, 3, 4, 0};
    r.cyclic_deck = true;
    for (const Perm& v : g.va.vol)
        if (perm_compose(v, shift) != perm_compose(shift, v)) r.cyclic_deck = false;
    return r;
}

}  // namespace ramcube
