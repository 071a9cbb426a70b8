#ifndef RAMCUBE_TESTS_ORACLES_HPP
#define RAMCUBE_TESTS_ORACLES_HPP

// Brute-force references used by the unit and acceptance tests.  Nothing here
// calls into the solvers it is compared against.

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <vector>

#include "ramcube/complex.hpp"
#include "ramcube/development.hpp"

namespace oracle {

// Octahedron: antipodal pairs (0,1), (2,3), (4,5).
inline ramcube::LinkComplex octahedron() {
    ramcube::LinkComplex l;
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

inline bool octa_adjacent(int a, int b) { return a != b && b != (a ^ 1); }

inline bool octa_triangle(int a, int b, int c) {
    return octa_adjacent(a, b) && octa_adjacent(b, c) && octa_adjacent(a, c);
}

// Least rotation of a closed walk (vertex sequence).
inline std::vector<int> canonical(const std::vector<int>& w) {
    if (w.empty()) return w;
    std::vector<int> best = w;
    for (size_t r = 1; r < w.size(); ++r) {
        std::vector<int> c(w.begin() + r, w.end());
        c.insert(c.end(), w.begin(), w.begin() + r);
        best = std::min(best, c);
    }
    return best;
}

// Minimal number of triangle relators needed to reduce a closed walk on the
// octahedron to a point.  0-1 shortest path over cyclic words of length <= cap;
// cancelling a backtrack is free, inserting or deleting a triangle detour costs 1.
inline int octahedron_area(const std::vector<int>& loop, size_t cap = 8) {
    using Word = std::vector<int>;
    std::map<Word, int> dist;
    std::deque<std::pair<int, Word>> q;
    Word start = canonical(loop);
    dist[start] = 0;
    q.push_back({0, start});
    auto relax = [&](Word w, int d, bool front) {
        if (w.size() <= 2) w.clear();
        w = canonical(w);
        auto it = dist.find(w);
        if (it != dist.end() && it->second <= d) return;
        dist[w] = d;
        if (front)
            q.push_front({d, w});
        else
            q.push_back({d, w});
    };
    while (!q.empty()) {
        auto [d, w] = q.front();
        q.pop_front();
        if (dist[w] < d) continue;
        if (w.empty()) return d;
        size_t n = w.size();
        for (size_t i = 0; i < n; ++i) {
            int a = w[i], b = w[(i + 1) % n], c = w[(i + 2) % n];
            if (a == c) {
                // a b a -> a
                Word x;
                for (size_t k = 0; k < n; ++k)
                    if (k != (i + 1) % n && k != (i + 2) % n) x.push_back(w[k]);
                relax(x, d, true);
            }
            if (octa_adjacent(a, c) && octa_triangle(a, b, c)) {
                Word x = w;
                x.erase(x.begin() + static_cast<long>((i + 1) % n));
                relax(x, d + 1, false);
            }
            if (n + 1 <= cap)
                for (int m = 0; m < 6; ++m)
                    if (octa_triangle(a, b, m)) {
                        Word x = w;
                        x.insert(x.begin() + static_cast<long>(i + 1), m);
                        relax(x, d + 1, false);
                    }
        }
    }
    return -1;
}

// All closed walks of length 2..maxlen on the octahedron.
inline std::vector<std::vector<int>> octahedron_walks(int maxlen) {
    std::vector<std::vector<int>> out;
    std::vector<int> w;
    auto rec = [&](auto&& self) -> void {
        if (w.size() >= 2 && octa_adjacent(w.back(), w.front())) out.push_back(w);
        if (static_cast<int>(w.size()) == maxlen) return;
        for (int v = 0; v < 6; ++v)
            if (octa_adjacent(w.back(), v)) {
                w.push_back(v);
                self(self);
                w.pop_back();
            }
    };
    for (int s = 0; s < 6; ++s) {
        w = {s};
        rec(rec);
    }
    return out;
}

// Breadth-first distances in an explicit ball.
inline std::vector<int> bfs(const ramcube::BallView& b, int src) {
    std::vector<int> d(b.size(), -1);
    std::deque<int> q{src};
    d[src] = 0;
    std::vector<ramcube::EndRef> es;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        b.ends(v, es);
        for (const auto& r : es)
            if (d[r.nbr] < 0) {
                d[r.nbr] = d[v] + 1;
                q.push_back(r.nbr);
            }
    }
    return d;
}

// Vertices on geodesics between every pair of a triple, from BFS tables.
inline std::vector<int> interval_medians(const std::vector<int>& du, const std::vector<int>& dv,
                                         const std::vector<int>& dw, int u, int v, int w) {
    std::vector<int> out;
    int uv = du[v], uw = du[w], vw = dv[w];
    for (size_t x = 0; x < du.size(); ++x) {
        if (du[x] < 0 || dv[x] < 0 || dw[x] < 0) continue;
        if (du[x] + dv[x] == uv && du[x] + dw[x] == uw && dv[x] + dw[x] == vw) out.push_back(static_cast<int>(x));
    }
    return out;
}

}  // namespace oracle

#endif
