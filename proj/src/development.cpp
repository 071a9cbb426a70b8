#include "ramcube/development.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <mutex>
#include <thread>

#include "ramcube/digest.hpp"

namespace ramcube {

BaseType parse_base_type(const std::string& s) {
    if (s == "u") return BaseType::Unramified;
    if (s == "r1") return BaseType::R1;
    if (s == "r2") return BaseType::R2;
    if (s == "r3") return BaseType::R3;
    throw FormatError("base type must be one of u, r1, r2, r3");
}

const char* base_type_name(BaseType t) {
    switch (t) {
        case BaseType::Unramified: return "u";
        case BaseType::R1: return "r1";
        case BaseType::R2: return "r2";
        case BaseType::R3: return "r3";
    }
    return "?";
}

int base_vertex_for(BaseType t, const Placement& pl) {
    int want = t == BaseType::Unramified ? -1 : static_cast<int>(t) - 1;
    for (int p = 0; p < 8; ++p)
        if (pl.branch(p) == want) return p;
    throw InvalidPlacement("no base vertex of the requested type");
}

PlacementSearch place_branch_loci() {
    PlacementSearch out;
    for (int mask = 0; mask < 64; ++mask) {
        Placement pl;
        for (int k = 0; k < 6; ++k) pl.v[k] = (mask >> (5 - k)) & 1;
        DecoratedComplex x = build_theta3(pl, false);
        if (local_checks(x, [](int) { return false; }, false).ok) out.solutions.push_back(pl);
    }
    if (out.solutions.empty()) throw NoSolution("no branch placement passes the theta^3 checks");
    out.chosen = out.solutions.front();
    return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr int kSlots = 44;
}

Development::Development(const Atlas& atlas, int root_base) : atlas_(&atlas) {
    if (root_base < 0 || root_base >= 8) throw NotAVertex("root base out of range");
    base_.push_back(static_cast<uint8_t>(root_base));
    dist_.push_back(0);
    height_.push_back(0);
    ndown_.push_back(0);
    for (int k = 0; k < 3; ++k) {
        down_end_.push_back(0);
        down_rev_.push_back(0);
        down_nbr_.push_back(-1);
    }
    slot_block_.push_back(-1);
    layer_start_ = {0, 1};
    ball_radius_ = 0;
}

bool Development::is_down(int v, int e) const {
    for (int k = 0; k < ndown_[v]; ++k)
        if (down_end_[3 * v + k] == e) return true;
    return false;
}

int Development::peek(int v, int e) const {
    for (int k = 0; k < ndown_[v]; ++k)
        if (down_end_[3 * v + k] == e) return down_nbr_[3 * v + k];
    int b = slot_block_[v];
    return b < 0 ? -1 : slot_nbr_[static_cast<size_t>(b) * kSlots + e];
}

int Development::reverse_end(int v, int e) const {
    for (int k = 0; k < ndown_[v]; ++k)
        if (down_end_[3 * v + k] == e) return down_rev_[3 * v + k];
    int b = slot_block_[v];
    if (b < 0 || slot_nbr_[static_cast<size_t>(b) * kSlots + e] < 0)
        throw DevelopmentError("reverse_end of an uncreated edge");
    return slot_rev_[static_cast<size_t>(b) * kSlots + e];
}

int Development::end_toward(int v, int w) const {
    if (dist_[w] == dist_[v] - 1) {
        for (int k = 0; k < ndown_[v]; ++k)
            if (down_nbr_[3 * v + k] == w) return down_end_[3 * v + k];
    } else if (dist_[w] == dist_[v] + 1) {
        for (int k = 0; k < ndown_[w]; ++k)
            if (down_nbr_[3 * w + k] == v) return down_rev_[3 * w + k];
    }
    return -1;
}

int Development::neighbour(int v, int e) {
    int n = peek(v, e);
    return n >= 0 ? n : create(v, e);
}

int Development::alloc_slots(int v) {
    if (slot_block_[v] < 0) {
        slot_block_[v] = static_cast<int32_t>(slot_nbr_.size() / kSlots);
        slot_nbr_.resize(slot_nbr_.size() + kSlots, -1);
        slot_rev_.resize(slot_rev_.size() + kSlots, 0);
    }
    return slot_block_[v];
}

int Development::common_down(int a, int b) const {
    for (int i = 0; i < ndown_[a]; ++i)
        for (int j = 0; j < ndown_[b]; ++j)
            if (down_nbr_[3 * a + i] == down_nbr_[3 * b + j]) return down_nbr_[3 * a + i];
    return -1;
}

int Development::create(int y, int e) {
    const Atlas& A = *atlas_;
    const int py = base_[y];
    const EndLabel ly = A.label(py, e);
    struct Member {
        int v, end;
    };
    std::array<Member, 4> mem{};
    int n = 0;
    mem[n++] = {y, e};
    for (int k = 0; k < ndown_[y]; ++k) {
        int dl = down_end_[3 * y + k];
        if (!A.adjacent(py, e, dl)) continue;
        int z = down_nbr_[3 * y + k];
        int dz = down_rev_[3 * y + k];
        int zeta = A.transport(base_[z], dz, ly);
        int q = neighbour(z, zeta);
        int qz = reverse_end(z, zeta);
        int eps = A.transport(base_[q], qz, A.label(base_[z], dz));
        if (peek(q, eps) >= 0) throw DevelopmentError("square closes onto an existing vertex");
        if (n == 3) throw DevelopmentError("more than three descending neighbours");
        mem[n++] = {q, eps};
    }
    if (int done = peek(y, e); done >= 0) return done;
    std::sort(mem.begin(), mem.begin() + n, [](const Member& a, const Member& b) { return a.v < b.v; });

    const int px = flip(py, ly.coord);
    const int bx = A.branch(px);
    // Gauge anchor: the end along the branching line if there is one, else the
    // end of least coordinate.  Depends only on x, not on the creation order.
    int f = 0;
    for (int m = 1; m < n; ++m) {
        int cm = A.label(base_[mem[m].v], mem[m].end).coord, cf = A.label(base_[mem[f].v], mem[f].end).coord;
        if (cf != bx && (cm == bx || cm < cf)) f = m;
    }
    std::array<int, 3> xe{};
    {
        const EndLabel& l0 = A.label(base_[mem[f].v], mem[f].end);
        xe[f] = A.end_index(px, l0.coord, l0.letter, (bx < 0 || l0.coord == bx) ? -1 : 0);
    }
    for (int m = 0; m < n; ++m) {
        if (m == f) continue;
        int z = common_down(mem[f].v, mem[m].v);
        if (z < 0) throw DevelopmentError("descending neighbours without a common neighbour");
        int d0 = end_toward(mem[f].v, z);
        xe[m] = A.transport(px, xe[f], A.label(base_[mem[f].v], d0));
    }
    for (int m = 0; m < n; ++m) {
        const EndLabel& a = A.label(px, xe[m]);
        const EndLabel& b = A.label(base_[mem[m].v], mem[m].end);
        if (a.coord != b.coord || a.letter != b.letter)
            throw DevelopmentError("edge label mismatch at a new vertex");
        for (int k = 0; k < m; ++k)
            if (xe[k] == xe[m] || !A.adjacent(px, xe[k], xe[m]))
                throw DevelopmentError("descending ends of a new vertex are not a cube corner");
    }

    const int x = size();
    base_.push_back(static_cast<uint8_t>(px));
    dist_.push_back(static_cast<int16_t>(dist_[y] + 1));
    height_.push_back(static_cast<int16_t>(height_[y] + (A.up(py, e) ? 1 : -1)));
    ndown_.push_back(static_cast<uint8_t>(n));
    slot_block_.push_back(-1);
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.begin() + n, [&](int a, int b) { return xe[a] < xe[b]; });
    for (int k = 0; k < 3; ++k) {
        if (k < n) {
            const Member& m = mem[order[k]];
            down_end_.push_back(static_cast<uint8_t>(xe[order[k]]));
            down_rev_.push_back(static_cast<uint8_t>(m.end));
            down_nbr_.push_back(m.v);
        } else {
            down_end_.push_back(0);
            down_rev_.push_back(0);
            down_nbr_.push_back(-1);
        }
    }
    for (int m = 0; m < n; ++m) {
        size_t s = static_cast<size_t>(alloc_slots(mem[m].v)) * kSlots + mem[m].end;
        slot_nbr_[s] = x;
        slot_rev_[s] = static_cast<uint8_t>(xe[m]);
    }
    return x;
}

std::pair<int, int> BallView::across(int v, int e) const {
    std::vector<EndRef> es;
    ends(v, es);
    for (const EndRef& r : es)
        if (r.end == e) return {r.nbr, r.rev};
    return {-1, -1};
}

std::pair<int, int> Development::across(int v, int e) const {
    int n = peek(v, e);
    return n < 0 ? std::pair<int, int>{-1, -1} : std::pair<int, int>{n, reverse_end(v, e)};
}

void Development::ends(int v, std::vector<EndRef>& out) const {
    out.clear();
    for (int k = 0; k < ndown_[v]; ++k)
        out.push_back({down_end_[3 * v + k], down_nbr_[3 * v + k], down_rev_[3 * v + k]});
    int b = slot_block_[v];
    if (b >= 0) {
        int ne = num_ends(v);
        size_t s = static_cast<size_t>(b) * kSlots;
        for (int e = 0; e < ne; ++e)
            if (slot_nbr_[s + e] >= 0) out.push_back({e, slot_nbr_[s + e], slot_rev_[s + e]});
    }
    std::sort(out.begin(), out.end(), [](const EndRef& a, const EndRef& b) { return a.end < b.end; });
}

int Development::square_corner(int v, int e1, int e2) {
    if (!atlas_->adjacent(base_[v], e1, e2)) throw DevelopmentError("ends span no square");
    int a = neighbour(v, e1);
    int r = reverse_end(v, e1);
    int t = atlas_->transport(base_[a], r, atlas_->label(base_[v], e2));
    return neighbour(a, t);
}

void Development::grow_ball(int r) {
    if (size() != layer_start_.back())
        throw DevelopmentError("grow_ball after out-of-order lazy creation");
    for (int L = ball_radius_; L < r; ++L) {
        int lo = layer_start_[L], hi = layer_start_[L + 1];
        for (int v = lo; v < hi; ++v) {
            int ne = num_ends(v);
            for (int e = 0; e < ne; ++e)
                if (!is_down(v, e)) neighbour(v, e);
        }
        for (int v = hi; v < size(); ++v)
            if (dist_[v] != L + 1) throw DevelopmentError("layer growth created a vertex out of order");
        layer_start_.push_back(size());
        ball_radius_ = L + 1;
    }
}

// ---------------------------------------------------------------------------

int Development::hyperplane(int upper, int lower) const {
    int x = upper, y = lower;
    if (dist_[y] != dist_[x] - 1 || end_toward(x, y) < 0)
        throw DevelopmentError("hyperplane of a non-descending edge");
    while (ndown_[x] > 1) {
        int x2 = down_nbr_[3 * x] != y ? down_nbr_[3 * x] : down_nbr_[3 * x + 1];
        int z = common_down(y, x2);
        if (z < 0) throw DevelopmentError("descending square without a bottom corner");
        x = x2;
        y = z;
    }
    return x;
}

const int32_t* Development::halfspaces(int v) {
    static const int32_t empty = 0;
    if (v == 0) return &empty;
    if (hs_off_.size() < base_.size()) hs_off_.resize(base_.size(), 0);
    if (hs_off_[v]) return hs_pool_.data() + (hs_off_[v] - 1);
    int y = down_nbr_[3 * v];
    halfspaces(y);
    int h = hyperplane(v, y);
    int dy = dist_[y];
    size_t off = hs_pool_.size();
    hs_pool_.resize(off + dy + 1);
    const int32_t* py = y == 0 ? &empty : hs_pool_.data() + (hs_off_[y] - 1);
    int32_t* out = hs_pool_.data() + off;
    int k = 0, i = 0;
    bool placed = false;
    for (; i < dy; ++i) {
        if (!placed && h < py[i]) {
            out[k++] = h;
            placed = true;
        }
        if (py[i] == h) throw DevelopmentError("hyperplane crossed twice on a descending path");
        out[k++] = py[i];
    }
    if (!placed) out[k++] = h;
    hs_off_[v] = static_cast<uint32_t>(off + 1);
    return out;
}

int Development::distance(int u, int v) {
    halfspaces(u);
    halfspaces(v);
    const int32_t* a = halfspaces(u);
    const int32_t* b = halfspaces(v);
    int na = dist_[u], nb = dist_[v], i = 0, j = 0, common = 0;
    while (i < na && j < nb) {
        if (a[i] == b[j]) {
            ++common;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return na + nb - 2 * common;
}

bool Development::separates(int h, int v) {
    const int32_t* s = halfspaces(v);
    return std::binary_search(s, s + dist_[v], h);
}

std::vector<int> Development::geodesic(int u, int v) {
    std::vector<int> path{u};
    int cur = u;
    int remaining = distance(u, v);
    while (cur != v) {
        int ne = num_ends(cur);
        int next = -1;
        for (int e = 0; e < ne && next < 0; ++e) {
            int w = neighbour(cur, e);
            int h = dist_[w] > dist_[cur] ? hyperplane(w, cur) : hyperplane(cur, w);
            if (separates(h, cur) != separates(h, v)) next = w;
        }
        if (next < 0 || --remaining < 0) throw DevelopmentError("geodesic step not found");
        cur = next;
        path.push_back(cur);
    }
    return path;
}

// ---------------------------------------------------------------------------

namespace {

void stream_vertex(Sha256& h, int base, int dist, int height, const std::vector<EndRef>& down) {
    uint8_t buf[6 + 3 * 6];
    size_t n = 0;
    buf[n++] = static_cast<uint8_t>(base);
    buf[n++] = static_cast<uint8_t>(dist & 0xff);
    buf[n++] = static_cast<uint8_t>((dist >> 8) & 0xff);
    buf[n++] = static_cast<uint8_t>(height & 0xff);
    buf[n++] = static_cast<uint8_t>((height >> 8) & 0xff);
    buf[n++] = static_cast<uint8_t>(down.size());
    for (const EndRef& r : down) {
        buf[n++] = static_cast<uint8_t>(r.end);
        for (int k = 0; k < 4; ++k) buf[n++] = static_cast<uint8_t>((r.nbr >> (8 * k)) & 0xff);
        buf[n++] = static_cast<uint8_t>(r.rev);
    }
    h.update(buf, n);
}

}  // namespace

std::string Development::digest() const {
    Sha256 h;
    std::vector<EndRef> down;
    for (int v = 0; v < size(); ++v) {
        down.clear();
        for (int k = 0; k < ndown_[v]; ++k)
            down.push_back({down_end_[3 * v + k], down_nbr_[3 * v + k], down_rev_[3 * v + k]});
        stream_vertex(h, base_[v], dist_[v], height_[v], down);
    }
    return h.hex();
}

nlohmann::ordered_json Development::to_json(bool full) const {
    nlohmann::ordered_json j;
    j["schema"] = "ramcube.ball/1";
    j["root_base"] = static_cast<int>(base_[0]);
    j["radius"] = ball_radius_;
    j["placement"] = atlas_->placement().v;
    j["gamma"] = atlas_->gamma().va.to_json();
    j["vertex_count"] = size();
    std::vector<int> layers;
    for (size_t k = 0; k + 1 < layer_start_.size(); ++k) layers.push_back(layer_start_[k + 1] - layer_start_[k]);
    j["layer_sizes"] = layers;
    j["digest"] = digest();
    j["full"] = full;
    if (full) {
        auto& vs = j["vertices"] = nlohmann::ordered_json::array();
        for (int v = 0; v < size(); ++v) {
            nlohmann::ordered_json down = nlohmann::ordered_json::array();
            for (int k = 0; k < ndown_[v]; ++k)
                down.push_back({down_end_[3 * v + k], down_nbr_[3 * v + k], down_rev_[3 * v + k]});
            vs.push_back({base_[v], dist_[v], height_[v], down});
        }
    }
    return j;
}

BallData BallData::from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "ramcube.ball/1") throw FormatError("expected schema ramcube.ball/1");
    if (!j.value("full", false)) throw FormatError("ball file carries no vertex data");
    BallData b;
    try {
        b.root_base = j.at("root_base");
        b.radius = j.at("radius");
        const auto& vs = j.at("vertices");
        int n = static_cast<int>(vs.size());
        b.base_.resize(n);
        b.dist_.resize(n);
        b.height_.resize(n);
        b.down_.resize(n);
        b.all_.resize(n);
        for (int v = 0; v < n; ++v) {
            const auto& r = vs[v];
            b.base_[v] = r.at(0);
            b.dist_[v] = r.at(1);
            b.height_[v] = r.at(2);
            for (const auto& d : r.at(3)) {
                EndRef e{d.at(0).get<int>(), d.at(1).get<int>(), d.at(2).get<int>()};
                if (e.nbr < 0 || e.nbr >= n) throw FormatError("neighbour id out of range");
                b.down_[v].push_back(e);
            }
        }
    } catch (const nlohmann::json::exception& ex) {
        throw FormatError(std::string("bad ball json: ") + ex.what());
    }
    for (int v = 0; v < b.size(); ++v)
        for (const EndRef& e : b.down_[v]) {
            b.all_[v].push_back(e);
            b.all_[e.nbr].push_back({e.rev, v, e.end});
        }
    for (auto& l : b.all_)
        std::sort(l.begin(), l.end(), [](const EndRef& a, const EndRef& c) { return a.end < c.end; });
    return b;
}

void BallData::ends(int v, std::vector<EndRef>& out) const { out = all_[v]; }

std::pair<int, int> BallData::across(int v, int e) const {
    const auto& l = all_[v];
    auto it = std::lower_bound(l.begin(), l.end(), e, [](const EndRef& x, int k) { return x.end < k; });
    if (it == l.end() || it->end != e) return {-1, -1};
    return {it->nbr, it->rev};
}

std::string BallData::digest() const {
    Sha256 h;
    for (int v = 0; v < size(); ++v) stream_vertex(h, base_[v], dist_[v], height_[v], down_[v]);
    return h.hex();
}

// ---------------------------------------------------------------------------

void BallReport::fail(std::string msg) {
    ok = false;
    ++violations_count;
    if (violations.size() < 50) violations.push_back(std::move(msg));
}

nlohmann::ordered_json BallReport::to_json() const {
    nlohmann::ordered_json j;
    j["ok"] = ok;
    j["radius"] = radius;
    j["vertices"] = vertices;
    j["interior_vertices"] = interior_vertices;
    j["full_link_vertices"] = full_link_vertices;
    j["squares_checked"] = squares_checked;
    j["cubes_checked"] = cubes_checked;
    j["height_range"] = {min_height, max_height};
    j["violations_count"] = violations_count;
    j["violations"] = violations;
    return j;
}

namespace {

struct VerifyCtx {
    const BallView& b;
    const Atlas& a;
    int radius;
    std::array<std::vector<std::array<int, 3>>, 8> tris;
};

bool vram(const VerifyCtx& c, int v) { return c.a.branch(c.b.base(v)) >= 0; }

bool eram(const VerifyCtx& c, int u, int w, int coord) {
    return c.a.branch(c.b.base(u)) == coord && c.a.branch(c.b.base(w)) == coord;
}

void verify_range(const VerifyCtx& c, int lo, int hi, BallReport& rep) {
    const BallView& b = c.b;
    const Atlas& A = c.a;
    std::vector<EndRef> E, Ea, Eb, Ec;
    std::vector<std::pair<int, int>> cv;
    std::vector<int> found;
    auto where = [](int v) { return "vertex " + std::to_string(v) + ": "; };
    for (int v = lo; v < hi; ++v) {
        const int p = b.base(v), d = b.dist(v), h = b.height(v);
        rep.min_height = std::min(rep.min_height, h);
        rep.max_height = std::max(rep.max_height, h);
        ++rep.vertices;
        if (d > c.radius) rep.fail(where(v) + "outside the radius");
        if (std::abs(h) > d || ((h - d) & 1)) rep.fail(where(v) + "height inconsistent with distance");
        b.ends(v, E);
        for (const EndRef& r : E) {
            if (r.end < 0 || r.end >= A.num_ends(p)) {
                rep.fail(where(v) + "end index out of range");
                continue;
            }
            const EndLabel& l = A.label(p, r.end);
            int w = r.nbr, pw = b.base(w);
            if (pw != flip(p, l.coord)) rep.fail(where(v) + "neighbour over the wrong base vertex");
            if (r.rev < 0 || r.rev >= A.num_ends(pw)) {
                rep.fail(where(v) + "reverse end out of range");
                continue;
            }
            const EndLabel& lw = A.label(pw, r.rev);
            if (lw.coord != l.coord || lw.letter != l.letter) rep.fail(where(v) + "edge labels disagree");
            if (b.height(w) != h + (A.up(p, r.end) ? 1 : -1)) rep.fail(where(v) + "edge breaks the height function");
            if (std::abs(b.dist(w) - d) != 1) rep.fail(where(v) + "edge within a distance layer");
            if (b.dist(w) == d - 1) {
                if (b.across(w, r.rev) != std::pair<int, int>{v, r.end})
                    rep.fail(where(v) + "edge not registered at both ends");
            }
        }
        if (d > c.radius - 1) continue;
        ++rep.interior_vertices;
        if (d <= c.radius - 3) ++rep.full_link_vertices;
        const int ne = A.num_ends(p);
        bool complete = static_cast<int>(E.size()) == ne;
        for (int k = 0; complete && k < ne; ++k) complete = E[k].end == k;
        if (!complete) {
            rep.fail(where(v) + "link does not have the atlas vertex set");
            continue;
        }
        // Squares at v from common neighbours of pairs of neighbours.
        cv.clear();
        for (const EndRef& r : E) {
            b.ends(r.nbr, Ea);
            for (const EndRef& s : Ea)
                if (s.nbr != v) cv.push_back({s.nbr, r.end});
        }
        std::sort(cv.begin(), cv.end());
        found.assign(static_cast<size_t>(ne) * ne, -1);
        for (size_t i = 0; i < cv.size();) {
            size_t j = i;
            while (j < cv.size() && cv[j].first == cv[i].first) ++j;
            if (j - i > 2) {
                rep.fail(where(v) + "three neighbours share a second common neighbour");
            } else if (j - i == 2) {
                int e1 = cv[i].second, e2 = cv[i + 1].second;
                if (e1 == e2)
                    rep.fail(where(v) + "double edge");
                else
                    found[e1 * ne + e2] = found[e2 * ne + e1] = cv[i].first;
            }
            i = j;
        }
        std::vector<int> step(ne);
        for (int e = 0; e < ne; ++e) step[e] = b.dist(E[e].nbr) - d;
        for (int e1 = 0; e1 < ne; ++e1)
            for (int e2 = e1 + 1; e2 < ne; ++e2) {
                int corner = found[e1 * ne + e2];
                if (!A.adjacent(p, e1, e2)) {
                    if (corner >= 0) rep.fail(where(v) + "4-cycle through non-adjacent link vertices");
                    continue;
                }
                if (d + step[e1] + step[e2] > c.radius) continue;
                if (corner < 0) {
                    rep.fail(where(v) + "missing square");
                    continue;
                }
                ++rep.squares_checked;
                int x = E[e1].nbr, y = E[e2].nbr;
                if (v < x && v < y && v < corner) {
                    int c1 = A.label(p, e1).coord, c2 = A.label(p, e2).coord;
                    int red = eram(c, v, x, c1) + eram(c, x, corner, c2) + eram(c, corner, y, c1) + eram(c, y, v, c2);
                    std::array<int, 4> cyc{v, x, corner, y};
                    int nram = 0;
                    for (int u : cyc) nram += vram(c, u);
                    // One ramified edge plus exactly one more ramified vertex.
                    if (red != 1 || nram != 3) rep.fail(where(v) + "square violates the ramification pattern");
                }
            }
        // Cubes.
        for (const auto& t : c.tris[p]) {
            int far = d + step[t[0]] + step[t[1]] + step[t[2]];
            if (far > c.radius) continue;
            std::array<int, 3> corner{found[t[1] * ne + t[2]], found[t[0] * ne + t[2]], found[t[0] * ne + t[1]]};
            std::vector<int> avail;
            for (int k = 0; k < 3; ++k)
                if (corner[k] >= 0) avail.push_back(k);
            if (avail.size() < 2) continue;
            b.ends(corner[avail[0]], Eb);
            b.ends(corner[avail[1]], Ec);
            int top = -1, hits = 0;
            for (const EndRef& r : Eb) {
                int u = r.nbr;
                if (u == E[t[0]].nbr || u == E[t[1]].nbr || u == E[t[2]].nbr) continue;
                for (const EndRef& s : Ec)
                    if (s.nbr == u) {
                        top = u;
                        ++hits;
                    }
            }
            if (hits != 1) {
                rep.fail(where(v) + "missing cube (flag condition)");
                continue;
            }
            if (avail.size() == 3) {
                b.ends(corner[avail[2]], Eb);
                bool adj = false;
                for (const EndRef& r : Eb) adj |= r.nbr == top;
                if (!adj) {
                    rep.fail(where(v) + "cube does not close");
                    continue;
                }
            }
            ++rep.cubes_checked;
            if (avail.size() == 3) {
                std::array<int, 8> cv8{v, E[t[0]].nbr, E[t[1]].nbr, E[t[2]].nbr, corner[0], corner[1], corner[2], top};
                if (*std::min_element(cv8.begin(), cv8.end()) != v) continue;
                std::array<int, 3> co{A.label(p, t[0]).coord, A.label(p, t[1]).coord, A.label(p, t[2]).coord};
                // Edges parallel to direction k: v-a_k, a_i-c_j, a_j-c_i, c_k-top (i, j the others).
                int nred = 0;
                std::array<int, 3> per{};
                std::vector<int> touched;
                for (int k = 0; k < 3; ++k) {
                    int i = (k + 1) % 3, j = (k + 2) % 3;
                    std::array<std::array<int, 2>, 4> es{{{v, E[t[k]].nbr},
                                                          {E[t[i]].nbr, corner[j]},
                                                          {E[t[j]].nbr, corner[i]},
                                                          {corner[k], top}}};
                    for (auto [x, y] : es)
                        if (eram(c, x, y, co[k])) {
                            ++nred;
                            ++per[k];
                            touched.push_back(x);
                            touched.push_back(y);
                        }
                }
                std::sort(touched.begin(), touched.end());
                bool disjoint = std::adjacent_find(touched.begin(), touched.end()) == touched.end();
                if (nred != 3 || per != std::array<int, 3>{1, 1, 1} || !disjoint)
                    rep.fail(where(v) + "cube violates the ramification pattern");
            }
        }
    }
}

}  // namespace

BallReport verify_ball(const BallView& b, const Atlas& a, int radius, int threads) {
    VerifyCtx ctx{b, a, radius, {}};
    for (int p = 0; p < 8; ++p) ctx.tris[p] = a.link(p).tris;
    threads = std::max(1, threads);
    std::vector<BallReport> parts(threads);
    int n = b.size();
    if (threads == 1) {
        verify_range(ctx, 0, n, parts[0]);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            int lo = static_cast<int>(static_cast<long>(n) * t / threads);
            int hi = static_cast<int>(static_cast<long>(n) * (t + 1) / threads);
            pool.emplace_back([&, lo, hi, t] { verify_range(ctx, lo, hi, parts[t]); });
        }
        for (auto& th : pool) th.join();
    }
    BallReport rep;
    rep.radius = radius;
    for (const BallReport& p : parts) {
        rep.ok = rep.ok && p.ok;
        rep.vertices += p.vertices;
        rep.interior_vertices += p.interior_vertices;
        rep.full_link_vertices += p.full_link_vertices;
        rep.squares_checked += p.squares_checked;
        rep.cubes_checked += p.cubes_checked;
        rep.violations_count += p.violations_count;
        rep.min_height = std::min(rep.min_height, p.min_height);
        rep.max_height = std::max(rep.max_height, p.max_height);
        for (const auto& s : p.violations)
            if (rep.violations.size() < 50) rep.violations.push_back(s);
    }
    return rep;
}

// ---------------------------------------------------------------------------

DecoratedComplex ball_complex(const Development& d) {
    const Atlas& A = d.atlas();
    DecoratedComplex x;
    for (int v = 0; v < d.size(); ++v) {
        VertexRec r;
        r.base = d.base(v);
        r.branch = A.branch(r.base);
        r.ramified = r.branch >= 0;
        r.dist = d.dist(v);
        r.height = d.height(v);
        x.add_vertex(r);
    }
    std::vector<int> eid(3 * static_cast<size_t>(d.size()), -1);
    for (int v = 0; v < d.size(); ++v)
        for (int k = 0; k < d.num_down(v); ++k) {
            int w = d.down_nbr(v, k), e = d.down_end(v, k), r = d.reverse_end(v, e);
            const EndLabel& l = A.label(d.base(v), e);
            EdgeRec rec;
            bool v_low = A.up(d.base(v), e);
            rec.ends = v_low ? std::array<int, 2>{v, w} : std::array<int, 2>{w, v};
            rec.coord = l.coord;
            rec.letter = l.letter;
            rec.ramified = A.branch(d.base(v)) == l.coord && A.branch(d.base(w)) == l.coord;
            int sv = l.sheet, sw = A.label(d.base(w), r).sheet;
            rec.sheet = v_low ? std::array<int, 2>{sv, sw} : std::array<int, 2>{sw, sv};
            eid[3 * v + k] = x.add_edge(rec);
        }
    auto down_index = [&](int v, int w) {
        for (int k = 0; k < d.num_down(v); ++k)
            if (d.down_nbr(v, k) == w) return k;
        throw DevelopmentError("missing descending edge");
    };
    std::map<std::array<int, 3>, int> sq;  // (top, k1, k2)
    for (int t = 0; t < d.size(); ++t)
        for (int k1 = 0; k1 < d.num_down(t); ++k1)
            for (int k2 = k1 + 1; k2 < d.num_down(t); ++k2) {
                int y1 = d.down_nbr(t, k1), y2 = d.down_nbr(t, k2);
                int z = -1;
                for (int i = 0; i < d.num_down(y1) && z < 0; ++i)
                    for (int j = 0; j < d.num_down(y2); ++j)
                        if (d.down_nbr(y1, i) == d.down_nbr(y2, j)) z = d.down_nbr(y1, i);
                if (z < 0) throw DevelopmentError("square without a bottom corner");
                SquareRec s;
                s.edges = {eid[3 * t + k1], eid[3 * y1 + down_index(y1, z)], eid[3 * y2 + down_index(y2, z)],
                           eid[3 * t + k2]};
                sq[{t, k1, k2}] = x.add_square(s);
            }
    auto square_at = [&](int top, int a, int b) {
        int ka = down_index(top, a), kb = down_index(top, b);
        return sq.at({top, std::min(ka, kb), std::max(ka, kb)});
    };
    for (int t = 0; t < d.size(); ++t) {
        if (d.num_down(t) != 3) continue;
        std::array<int, 3> y{d.down_nbr(t, 0), d.down_nbr(t, 1), d.down_nbr(t, 2)};
        auto bottom = [&](int a, int b) {
            for (int i = 0; i < d.num_down(a); ++i)
                for (int j = 0; j < d.num_down(b); ++j)
                    if (d.down_nbr(a, i) == d.down_nbr(b, j)) return d.down_nbr(a, i);
            throw DevelopmentError("square without a bottom corner");
        };
        int z01 = bottom(y[0], y[1]), z02 = bottom(y[0], y[2]), z12 = bottom(y[1], y[2]);
        CubeRec c;
        c.faces = {sq.at({t, 0, 1}), sq.at({t, 0, 2}), sq.at({t, 1, 2}), square_at(y[0], z01, z02),
                   square_at(y[1], z01, z12), square_at(y[2], z02, z12)};
        x.add_cube(c);
    }
    x.freeze();
    return x;
}

SlicedComplex slice(const DecoratedComplex& x) {
    SlicedComplex s;
    s.height.resize(x.num_vertices());
    for (int v = 0; v < x.num_vertices(); ++v) s.height[v] = x.vertex(v).height;
    for (int q = 0; q < x.num_squares(); ++q) {
        const auto& vs = x.square_vertices(q);
        int lo = 0;
        for (int k = 1; k < 4; ++k)
            if (s.height[vs[k]] < s.height[vs[lo]]) lo = k;
        int top = vs[(lo + 2) % 4], m1 = vs[(lo + 1) % 4], m2 = vs[(lo + 3) % 4];
        if (s.height[m1] != s.height[m2] || s.height[top] != s.height[vs[lo]] + 2)
            throw InconsistentHeight("square heights are not h, h+1, h+1, h+2");
        s.diagonals.push_back({std::min(m1, m2), std::max(m1, m2)});
        s.triangles.push_back({m1, m2, vs[lo]});
        s.triangles.push_back({m1, m2, top});
    }
    for (int q = 0; q < x.num_cubes(); ++q) {
        const auto& vs = x.cube_vertices(q);
        int lo = vs[0], hi = vs[0];
        for (int v : vs) {
            if (s.height[v] < s.height[lo]) lo = v;
            if (s.height[v] > s.height[hi]) hi = v;
        }
        std::set<int> cube_edges;
        for (int f : x.cube(q).faces)
            for (int e : x.square(f).edges) cube_edges.insert(e);
        for (int corner : {lo, hi}) {
            std::vector<int> nb;
            for (int e : cube_edges) {
                const EdgeRec& r = x.edge(e);
                if (r.ends[0] == corner) nb.push_back(r.ends[1]);
                if (r.ends[1] == corner) nb.push_back(r.ends[0]);
            }
            if (nb.size() != 3) throw MalformedCell("cube corner without three edges");
            std::sort(nb.begin(), nb.end());
            s.level_triangles.push_back({nb[0], nb[1], nb[2]});
        }
    }
    return s;
}

LevelSet level_set(const SlicedComplex& s, int k) {
    LevelSet l;
    for (int v = 0; v < static_cast<int>(s.height.size()); ++v)
        if (s.height[v] == k) l.vertices.push_back(v);
    for (const auto& d : s.diagonals)
        if (s.height[d[0]] == k) l.diagonals.push_back(d);
    for (const auto& t : s.level_triangles)
        if (s.height[t[0]] == k) l.triangles.push_back(t);
    return l;
}

}  // namespace ramcube
