#include "ramcube/metric.hpp"

#include <algorithm>
#include <deque>
#include <random>
#include <unordered_set>

namespace ramcube {

std::vector<int> all_distances(const BallView& b, int src) {
    std::vector<int> d(b.size(), -1);
    std::deque<int> q{src};
    d[src] = 0;
    std::vector<EndRef> es;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        b.ends(v, es);
        for (const EndRef& r : es)
            if (d[r.nbr] < 0) {
                d[r.nbr] = d[v] + 1;
                q.push_back(r.nbr);
            }
    }
    return d;
}

std::vector<std::vector<int>> all_distances(const BallView& b, const std::vector<int>& sources) {
    std::vector<std::vector<int>> out;
    out.reserve(sources.size());
    for (int s : sources) out.push_back(all_distances(b, s));
    return out;
}

double gromov_product(int dxy, int dxz, int dyz) { return 0.5 * (dxy + dxz - dyz); }

double gromov_product(Development& d, int x, int y, int z) {
    return gromov_product(d.distance(x, y), d.distance(x, z), d.distance(y, z));
}

// d = {d01, d02, d03, d12, d13, d23}
FourPointRecord four_point(const std::array<int, 6>& d, const std::array<int, 4>& pts) {
    std::array<int, 3> s{d[0] + d[5], d[1] + d[4], d[2] + d[3]};
    std::sort(s.begin(), s.end());
    FourPointRecord r;
    r.pts = pts;
    r.S = s[0];
    r.M = s[1];
    r.L = s[2];
    return r;
}

FourPointRecord four_point(Development& dev, const std::array<int, 4>& p) {
    std::array<int, 6> d{dev.distance(p[0], p[1]), dev.distance(p[0], p[2]), dev.distance(p[0], p[3]),
                         dev.distance(p[1], p[2]), dev.distance(p[1], p[3]), dev.distance(p[2], p[3])};
    return four_point(d, p);
}

void FourPointStats::add(const FourPointRecord& r) {
    ++quadruples;
    int dl = r.delta();
    if (static_cast<int>(histogram.size()) <= dl) histogram.resize(dl + 1, 0);
    ++histogram[dl];
    if (dl > max_delta) {
        max_delta = dl;
        witness = r;
    }
}

nlohmann::ordered_json FourPointStats::to_json() const {
    nlohmann::ordered_json j;
    j["quadruples"] = quadruples;
    j["max"] = max_delta;
    j["witness"] = {{"points", witness.pts}, {"S", witness.S}, {"M", witness.M}, {"L", witness.L}};
    j["histogram"] = histogram;
    return j;
}

std::vector<int> sample_ball(Development& d, int center, int radius, int count, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> out;
    out.reserve(count);
    std::vector<int> order;
    for (int i = 0; i < count; ++i) {
        int k = static_cast<int>(rng() % static_cast<uint64_t>(radius + 1));
        int cur = center;
        for (int step = 0; step < k; ++step) {
            int ne = d.num_ends(cur);
            order.resize(ne);
            for (int e = 0; e < ne; ++e) order[e] = e;
            for (int e = ne - 1; e > 0; --e) std::swap(order[e], order[rng() % static_cast<uint64_t>(e + 1)]);
            int next = -1;
            for (int e : order) {
                int w = d.neighbour(cur, e);
                if (d.distance(center, w) == step + 1) {
                    next = w;
                    break;
                }
            }
            if (next < 0) throw DevelopmentError("no vertex farther from the center");
            cur = next;
        }
        out.push_back(cur);
    }
    return out;
}

FourPointStats four_point_scan(Development& d, const std::vector<int>& pool, long samples, uint64_t seed,
                               const std::vector<std::array<int, 4>>& forced,
                               const std::function<void(const FourPointRecord&)>& sink) {
    FourPointStats st;
    for (const auto& q : forced) {
        FourPointRecord r = four_point(d, q);
        st.add(r);
        if (sink) sink(r);
    }
    const size_t n = pool.size();
    if (n < 4 || samples <= 0) return st;
    std::vector<uint16_t> dm(n * n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) dm[i * n + j] = dm[j * n + i] = static_cast<uint16_t>(d.distance(pool[i], pool[j]));
    std::mt19937_64 rng(seed);
    for (long s = 0; s < samples; ++s) {
        std::array<size_t, 4> ix;
        for (int k = 0; k < 4; ++k) {
            bool fresh;
            do {
                ix[k] = rng() % n;
                fresh = true;
                for (int m = 0; m < k; ++m) fresh = fresh && ix[m] != ix[k];
            } while (!fresh);
        }
        std::array<int, 6> dd{dm[ix[0] * n + ix[1]], dm[ix[0] * n + ix[2]], dm[ix[0] * n + ix[3]],
                              dm[ix[1] * n + ix[2]], dm[ix[1] * n + ix[3]], dm[ix[2] * n + ix[3]]};
        FourPointRecord r = four_point(dd, {pool[ix[0]], pool[ix[1]], pool[ix[2]], pool[ix[3]]});
        st.add(r);
        if (sink) sink(r);
    }
    return st;
}

FourPointStats four_point_exhaustive(Development& d, const std::vector<int>& pts) {
    const size_t n = pts.size();
    std::vector<int> dm(n * n, 0);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) dm[i * n + j] = dm[j * n + i] = d.distance(pts[i], pts[j]);
    FourPointStats st;
    for (size_t a = 0; a < n; ++a)
        for (size_t b = a + 1; b < n; ++b)
            for (size_t c = b + 1; c < n; ++c)
                for (size_t e = c + 1; e < n; ++e)
                    st.add(four_point({dm[a * n + b], dm[a * n + c], dm[a * n + e], dm[b * n + c], dm[b * n + e],
                                       dm[c * n + e]},
                                      {pts[a], pts[b], pts[c], pts[e]}));
    return st;
}

namespace {

std::vector<int32_t> halfspace_copy(Development& d, int v) {
    const int32_t* s = d.halfspaces(v);
    return std::vector<int32_t>(s, s + d.dist(v));
}

int edge_hyperplane(Development& d, int a, int b) {
    return d.dist(b) > d.dist(a) ? d.hyperplane(b, a) : d.hyperplane(a, b);
}

}  // namespace

MedianResult median(Development& d, int u, int v, int w, long budget) {
    std::vector<int32_t> su = halfspace_copy(d, u), sv = halfspace_copy(d, v), sw = halfspace_copy(d, w);
    std::vector<int32_t> all;
    all.insert(all.end(), su.begin(), su.end());
    all.insert(all.end(), sv.begin(), sv.end());
    all.insert(all.end(), sw.begin(), sw.end());
    std::sort(all.begin(), all.end());
    std::vector<int32_t> maj;
    for (size_t i = 0; i < all.size();) {
        size_t j = i;
        while (j < all.size() && all[j] == all[i]) ++j;
        if (j - i >= 2) maj.push_back(all[i]);
        i = j;
    }
    MedianResult res;
    int cur = u;
    for (;;) {
        std::vector<int32_t> sc = halfspace_copy(d, cur);
        if (sc == maj) break;
        int next = -1;
        for (int e = 0; e < d.num_ends(cur) && next < 0; ++e) {
            int x = d.neighbour(cur, e);
            int h = edge_hyperplane(d, cur, x);
            bool in_m = std::binary_search(maj.begin(), maj.end(), h);
            if (in_m != d.separates(h, cur)) next = x;
        }
        if (next < 0) throw DevelopmentError("majority halfspaces do not describe a vertex");
        cur = next;
    }
    res.median = cur;

    const int duv = d.distance(u, v), duw = d.distance(u, w), dvw = d.distance(v, w);
    std::unordered_set<int> seen{u};
    std::deque<int> q{u};
    bool found_other = false;
    while (!q.empty()) {
        int x = q.front();
        q.pop_front();
        if (d.distance(v, x) + d.distance(x, w) == dvw) {
            ++res.candidates;
            if (x != res.median) found_other = true;
        }
        int dx = d.distance(u, x);
        for (int e = 0; e < d.num_ends(x); ++e) {
            int y = d.neighbour(x, e);
            if (seen.count(y)) continue;
            if (d.distance(u, y) != dx + 1) continue;
            if (dx + 1 + d.distance(y, v) != duv || dx + 1 + d.distance(y, w) != duw) continue;
            if (static_cast<long>(seen.size()) >= budget) {
                res.budget_hit = true;
                q.clear();
                break;
            }
            seen.insert(y);
            q.push_back(y);
        }
    }
    res.unique = !res.budget_hit && res.candidates == 1 && !found_other;
    return res;
}

std::vector<std::vector<int>> all_geodesics(Development& d, int u, int v, int budget) {
    std::vector<std::vector<int>> out;
    std::vector<int> path{u};
    std::function<void(int)> rec = [&](int cur) {
        if (static_cast<int>(out.size()) >= budget) return;
        if (cur == v) {
            out.push_back(path);
            return;
        }
        int dc = d.distance(cur, v);
        for (int e = 0; e < d.num_ends(cur); ++e) {
            int w = d.neighbour(cur, e);
            if (d.distance(w, v) != dc - 1) continue;
            path.push_back(w);
            rec(w);
            path.pop_back();
            if (static_cast<int>(out.size()) >= budget) return;
        }
    };
    rec(u);
    return out;
}

namespace {

// Point of a path at `pos2` half-edges from its start: a vertex or an edge midpoint.
struct PathPoint {
    int a, b;  // b == -1 for a vertex
};

PathPoint at(const std::vector<int>& p, int pos2) {
    if (pos2 % 2 == 0) return {p[pos2 / 2], -1};
    return {p[(pos2 - 1) / 2], p[(pos2 + 1) / 2]};
}

int dist2(Development& d, const PathPoint& x, const PathPoint& y) {
    if (x.b < 0 && y.b < 0) return 2 * d.distance(x.a, y.a);
    if (x.b < 0 || y.b < 0) {
        const PathPoint& v = x.b < 0 ? x : y;
        const PathPoint& m = x.b < 0 ? y : x;
        return 1 + 2 * std::min(d.distance(v.a, m.a), d.distance(v.a, m.b));
    }
    if ((x.a == y.a && x.b == y.b) || (x.a == y.b && x.b == y.a)) return 0;
    int best = std::min({d.distance(x.a, y.a), d.distance(x.a, y.b), d.distance(x.b, y.a), d.distance(x.b, y.b)});
    return 2 + 2 * best;
}

}  // namespace

TriangleRecord triangle_thinness(Development& d, const std::array<std::vector<int>, 3>& s) {
    TriangleRecord r;
    for (int k = 0; k < 3; ++k) {
        if (s[k].empty()) throw DevelopmentError("empty triangle side");
        r.corners[k] = s[k].front();
        r.sides[k] = static_cast<int>(s[k].size()) - 1;
        if (s[k].back() != s[(k + 1) % 3].front()) throw DevelopmentError("triangle sides do not close up");
    }
    const int dxy = r.sides[0], dyz = r.sides[1], dzx = r.sides[2];
    r.legs = {(dxy + dzx - dyz) / 2, (dxy + dyz - dzx) / 2, (dyz + dzx - dxy) / 2};
    int worst = 0;
    // Leg at corner k is shared by side k (leaving the corner) and side k-1 (arriving).
    for (int k = 0; k < 3; ++k) {
        const auto& out = s[k];
        const auto& in = s[(k + 2) % 3];
        int len_in2 = 2 * (static_cast<int>(in.size()) - 1);
        for (int t = 0; t <= 2 * r.legs[k]; ++t) worst = std::max(worst, dist2(d, at(out, t), at(in, len_in2 - t)));
    }
    PathPoint c0 = at(s[0], 2 * r.legs[0]), c1 = at(s[1], 2 * r.legs[1]), c2 = at(s[2], 2 * r.legs[2]);
    r.insize2 = std::max({dist2(d, c0, c1), dist2(d, c1, c2), dist2(d, c0, c2)});
    r.thinness2 = std::max(worst, r.insize2);
    return r;
}

void TriangleStats::add(const TriangleRecord& r) {
    ++triangles;
    if (r.thinness2 > max_thinness2) {
        max_thinness2 = r.thinness2;
        witness = r;
    }
    if (r.insize2 > max_insize2) {
        max_insize2 = r.insize2;
        insize_witness = r;
    }
}

nlohmann::ordered_json TriangleStats::to_json() const {
    auto rec = [](const TriangleRecord& r) {
        return nlohmann::ordered_json{{"corners", r.corners},
                                      {"sides", r.sides},
                                      {"legs", r.legs},
                                      {"thinness", r.thinness2 / 2.0},
                                      {"insize", r.insize2 / 2.0}};
    };
    nlohmann::ordered_json j;
    j["triangles"] = triangles;
    j["max_thinness"] = max_thinness2 / 2.0;
    j["max_insize"] = max_insize2 / 2.0;
    j["witness"] = rec(witness);
    j["insize_witness"] = rec(insize_witness);
    return j;
}

TriangleStats thin_triangle_scan(Development& d, const std::vector<int>& pool, long samples, uint64_t seed,
                                 int geodesic_budget, const std::function<void(const TriangleRecord&)>& sink) {
    TriangleStats st;
    const size_t n = pool.size();
    if (n < 3) return st;
    std::mt19937_64 rng(seed);
    for (long s = 0; s < samples; ++s) {
        std::array<int, 3> c;
        for (int k = 0; k < 3; ++k) c[k] = pool[rng() % n];
        std::array<std::vector<std::vector<int>>, 3> g;
        for (int k = 0; k < 3; ++k) {
            int a = c[k], b = c[(k + 1) % 3];
            if (geodesic_budget <= 1)
                g[k] = {d.geodesic(a, b)};
            else
                g[k] = all_geodesics(d, a, b, geodesic_budget);
        }
        for (const auto& p0 : g[0])
            for (const auto& p1 : g[1])
                for (const auto& p2 : g[2]) {
                    TriangleRecord r = triangle_thinness(d, {p0, p1, p2});
                    st.add(r);
                    if (sink) sink(r);
                }
    }
    return st;
}

}  // namespace ramcube
