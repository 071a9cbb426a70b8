#ifndef RAMCUBE_METRIC_HPP
#define RAMCUBE_METRIC_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/development.hpp"

namespace ramcube {

// Breadth-first distances in the 1-skeleton of a ball; -1 where unreachable.
std::vector<int> all_distances(const BallView& b, int src);
std::vector<std::vector<int>> all_distances(const BallView& b, const std::vector<int>& sources);

// (y.z)_x from d(x,y), d(x,z), d(y,z).
double gromov_product(int dxy, int dxz, int dyz);
double gromov_product(Development& d, int x, int y, int z);

// Opposite-pair sums S <= M <= L of a quadruple; delta = (L - M) / 2.
struct FourPointRecord {
    std::array<int, 4> pts{-1, -1, -1, -1};
    int S = 0, M = 0, L = 0;
    int delta() const { return (L - M) / 2; }
};
FourPointRecord four_point(const std::array<int, 6>& d, const std::array<int, 4>& pts);
FourPointRecord four_point(Development& dev, const std::array<int, 4>& pts);

struct FourPointStats {
    long quadruples = 0;
    int max_delta = -1;
    FourPointRecord witness;
    std::vector<long> histogram;  // by delta

    void add(const FourPointRecord& r);
    nlohmann::ordered_json to_json() const;
};

// Vertices of B_r(center): random walks from the center that move away from it
// at every step, with a uniformly random target distance in [0, r].
std::vector<int> sample_ball(Development& d, int center, int radius, int count, uint64_t seed);

// Seeded sampling of quadruples from a pool, distances precomputed pairwise.
// `forced` quadruples (e.g. square corners) are always included.
FourPointStats four_point_scan(Development& d, const std::vector<int>& pool, long samples, uint64_t seed,
                               const std::vector<std::array<int, 4>>& forced = {},
                               const std::function<void(const FourPointRecord&)>& sink = {});
FourPointStats four_point_exhaustive(Development& d, const std::vector<int>& pts);

struct MedianResult {
    int median = -1;
    bool unique = false;
    long candidates = 0;   // vertices on geodesics between all three pairs
    bool budget_hit = false;
};
// Median from majority halfspaces, confirmed by enumerating I(u,v) n I(u,w) n I(v,w).
MedianResult median(Development& d, int u, int v, int w, long budget = 200000);

// All geodesics from u to v, lexicographic by end index, at most `budget`.
std::vector<std::vector<int>> all_geodesics(Development& d, int u, int v, int budget);

// Tripod comparison of a geodesic triangle with sides x->y, y->z, z->x.
// Distances are reported doubled so that edge midpoints stay integral.
struct TriangleRecord {
    std::array<int, 3> corners{};
    std::array<int, 3> sides{};   // d(x,y), d(y,z), d(z,x)
    std::array<int, 3> legs{};    // Gromov products at x, y, z
    int thinness2 = 0;            // max fibre diameter, doubled
    int insize2 = 0;              // central fibre diameter, doubled
};
TriangleRecord triangle_thinness(Development& d, const std::array<std::vector<int>, 3>& sides);

struct TriangleStats {
    long triangles = 0;
    int max_thinness2 = -1;
    int max_insize2 = -1;
    TriangleRecord witness;
    TriangleRecord insize_witness;

    void add(const TriangleRecord& r);
    nlohmann::ordered_json to_json() const;
};

// Sampled triangles from a pool.  geodesic_budget = 1 uses the canonical
// geodesic per side; larger values enumerate up to that many per side and
// evaluate every combination.
TriangleStats thin_triangle_scan(Development& d, const std::vector<int>& pool, long samples, uint64_t seed,
                                 int geodesic_budget = 1,
                                 const std::function<void(const TriangleRecord&)>& sink = {});

}  // namespace ramcube

#endif
