#ifndef RAMCUBE_GRID_HPP
#define RAMCUBE_GRID_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/development.hpp"

namespace ramcube {

// Ramification decoration of a grid with W x H cells; vertices (x, y) with
// 0 <= x <= W, 0 <= y <= H.
class GridDecoration {
public:
    GridDecoration() = default;
    GridDecoration(int w, int h);

    int width() const { return w_; }
    int height() const { return h_; }
    bool vertex(int x, int y) const { return vram_[y * (w_ + 1) + x]; }
    bool hedge(int x, int y) const { return hram_[y * w_ + x]; }   // (x,y)-(x+1,y)
    bool vedge(int x, int y) const { return vedge_[y * (w_ + 1) + x]; }  // (x,y)-(x,y+1)
    void set_vertex(int x, int y, bool r) { vram_[y * (w_ + 1) + x] = r; }
    void set_hedge(int x, int y, bool r) { hram_[y * w_ + x] = r; }
    void set_vedge(int x, int y, bool r) { vedge_[y * (w_ + 1) + x] = r; }

    // Marks a straight ramified segment and its vertices.
    void add_segment(int x0, int y0, int x1, int y1);

    // Image under one of the 8 symmetries of the square (4..7 transpose).
    GridDecoration transformed(int sym) const;
    std::string key() const;        // exact encoding, dimensions included
    std::string canonical() const;  // least key over all symmetries
    std::string str() const;        // ascii picture, top row first

    // Every cell has one ramified edge and one ramified vertex off it;
    // endpoints of ramified edges are ramified.
    bool cells_ok() const;
    // Some connected component of the ramified subgraph misses the boundary.
    bool has_interior_component() const;
    // 3x3 patch bits around an interior vertex (see patch_bit_*).
    uint32_t patch(int x, int y) const;

    nlohmann::ordered_json to_json() const;

private:
    int w_ = 0, h_ = 0;
    std::vector<char> vram_, hram_, vedge_;
};

// Decorations of the figures for the 4-square and the two 3x5 rectangles.
GridDecoration figure_4square();
GridDecoration figure_3x5_u1();
GridDecoration figure_3x5_u2();

// Patch bit layout: vertex (dx,dy) in {-1,0,1}^2 -> (dx+1) + 3(dy+1);
// horizontal edge from (dx,dy), dx in {-1,0} -> 9 + 2(dy+1) + (dx+1);
// vertical edge from (dx,dy), dy in {-1,0} -> 15 + 3(dy+1) + (dx+1).
int patch_vertex_bit(int dx, int dy);
int patch_hedge_bit(int dx, int dy);
int patch_vedge_bit(int dx, int dy);

// Ramification patterns of the four squares around a vertex, one per 4-cycle
// (east, north, west, south) in a link of the atlas.
struct PatchCatalogue {
    std::set<uint32_t> patterns;
    std::map<CycleType, std::set<uint32_t>> by_type;
    std::map<CycleType, long> cycles_by_type;  // ordered 4-cycles
    long gamma_only_cycles = 0;                // 4-cycles with every vertex in Gamma

    bool contains(uint32_t p) const { return patterns.count(p) != 0; }
};
PatchCatalogue build_catalogue(const Atlas& a);

struct GridCertificate {
    int width = 0, height = 0;
    long nodes = 0;
    long rejected_interior = 0;  // complete decorations killed by an interior ramified component
    std::vector<GridDecoration> solutions;
    std::set<std::string> classes;  // canonical keys

    nlohmann::ordered_json to_json() const;
};
// Exhaustive search over decorations of the W x H grid: per-cell pattern,
// catalogue patterns at interior vertices, no interior ramified component.
GridCertificate grid_certificate(const PatchCatalogue& cat, int w, int h);

// Grid of developed vertices; at(x, y).
struct GridEmbedding {
    int width = 0, height = 0;
    std::vector<int> v;
    int at(int x, int y) const { return v[y * (width + 1) + x]; }
};
GridDecoration decorate(const Development& d, const GridEmbedding& g);
// All pairwise distances equal the l1 grid distance.
bool is_isometric(Development& d, const GridEmbedding& g);

struct SquareSearchResult {
    int width = 0, height = 0;
    std::array<long, 8> per_base{};
    long total = 0;
    std::vector<long> nodes_per_level;
    std::map<std::string, long> classes;  // decoration classes of the found grids
    long vertices_created = 0;
    int max_distance = 0;                 // farthest grid vertex from its anchor
    int explored_distance = 0;            // same over every partial grid explored
    bool transpose_cut = false;           // square grids counted once per transpose pair

    nlohmann::ordered_json to_json() const;
};
// Isometric W x H grids anchored at the root of a development, over every base
// vertex.  Each grid is built from two geodesic axes by filling squares.
SquareSearchResult square_search(const Atlas& a, int w, int h, const std::vector<int>& bases = {},
                                 const std::function<void(Development&, int, const GridEmbedding&)>& found = {},
                                 bool transpose_cut = false);

}  // namespace ramcube

#endif
