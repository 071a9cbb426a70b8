#ifndef RAMCUBE_COMPLEX_HPP
#define RAMCUBE_COMPLEX_HPP

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/errors.hpp"

namespace ramcube {

struct VertexRec {
    int base = 0;       // base vertex of theta^3
    bool ramified = false;
    int branch = -1;    // coordinate of the branching line, -1 if unramified
    int dist = -1;      // distance to the root of a developed ball, -1 if not a ball
    int height = 0;
};

struct EdgeRec {
    std::array<int, 2> ends{};        // lower, upper (edges point up)
    int coord = 0;
    int letter = 0;
    bool ramified = false;
    std::array<int, 2> sheet{-1, -1};  // sheet label of the end at ends[k], -1 if none
};

struct SquareRec {
    std::array<int, 4> edges{};  // cyclic
};

struct CubeRec {
    std::array<int, 6> faces{};
};

// Corner of a square or cube at a vertex: the cell and its edges at that vertex.
struct Corner {
    int cell = -1;
    std::array<int, 3> edges{-1, -1, -1};
};

// Cube complex with the decorations needed here.  Cells are appended, then the
// complex is frozen, which validates cells and builds incidences.
class DecoratedComplex {
public:
    int add_vertex(const VertexRec& v);
    int add_edge(const EdgeRec& e);
    int add_square(const SquareRec& s);
    int add_cube(const CubeRec& c);
    void freeze();
    bool frozen() const { return frozen_; }

    int num_vertices() const { return static_cast<int>(verts_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_squares() const { return static_cast<int>(squares_.size()); }
    int num_cubes() const { return static_cast<int>(cubes_.size()); }

    const VertexRec& vertex(int v) const;
    const EdgeRec& edge(int e) const { return edges_.at(e); }
    const SquareRec& square(int s) const { return squares_.at(s); }
    const CubeRec& cube(int c) const { return cubes_.at(c); }
    VertexRec& mutable_vertex(int v);

    // Incidences, available once frozen.
    const std::vector<int>& edges_at(int v) const;
    const std::vector<Corner>& square_corners(int v) const;
    const std::vector<Corner>& cube_corners(int v) const;
    const std::array<int, 4>& square_vertices(int s) const { return sq_verts_.at(s); }
    const std::array<int, 8>& cube_vertices(int c) const { return cube_verts_.at(c); }
    int other_end(int e, int v) const;

    nlohmann::ordered_json to_json() const;
    static DecoratedComplex from_json(const nlohmann::json& j);

private:
    void require_mutable() const;

    bool frozen_ = false;
    std::vector<VertexRec> verts_;
    std::vector<EdgeRec> edges_;
    std::vector<SquareRec> squares_;
    std::vector<CubeRec> cubes_;
    std::vector<std::vector<int>> edges_at_;
    std::vector<std::vector<Corner>> sq_at_, cube_at_;
    std::vector<std::array<int, 4>> sq_verts_;
    std::vector<std::array<int, 8>> cube_verts_;
};

struct LinkVertex {
    int coord = 0;
    int letter = 0;
    bool up = false;
    int sheet = -1;
    int edge = -1;  // ambient edge, -1 for abstract links

    bool same_label(const LinkVertex& o) const {
        return coord == o.coord && letter == o.letter && sheet == o.sheet && up == o.up;
    }
};

// Two-dimensional simplicial link with decorated vertices.
struct LinkComplex {
    std::vector<LinkVertex> verts;
    std::vector<std::array<int, 2>> edges;
    std::vector<int> edge_cell;
    std::vector<std::array<int, 3>> tris;
    std::vector<int> tri_cell;

    int size() const { return static_cast<int>(verts.size()); }
    void finalize();  // builds the adjacency matrix; call after edits
    bool adjacent(int a, int b) const { return adj_[a * size() + b] != 0; }
    bool has_triangle(int a, int b, int c) const;
    std::vector<std::vector<int>> neighbours() const;
    LinkComplex full_subcomplex(const std::vector<int>& keep) const;
    bool connected() const;
    int diameter() const;  // -1 if disconnected
    int euler_characteristic() const;

    nlohmann::ordered_json to_json() const;

private:
    std::vector<char> adj_;
};

LinkComplex link(const DecoratedComplex& x, int v);

// First triple of pairwise-adjacent link vertices spanning no triangle.
std::optional<std::array<int, 3>> check_flag(const LinkComplex& l);

LinkComplex ascending_link(const LinkComplex& l);
LinkComplex descending_link(const LinkComplex& l);

// Heights of all vertices, normalised so the given base vertex sits at 0.
std::vector<int> morse_heights(const DecoratedComplex& x, int base_vertex);

enum class CycleType { U1, U2, R1, R2 };
const char* cycle_type_name(CycleType t);
CycleType classify_4cycle(const LinkComplex& l, bool ramified, const std::array<int, 4>& cycle);
CycleType classify_4cycle(const DecoratedComplex& x, int v, const std::array<int, 4>& cycle);

struct CheckReport {
    bool ok = true;
    long squares_checked = 0;
    long cubes_checked = 0;
    long blocks_checked = 0;
    long four_cycles_checked = 0;
    std::vector<std::string> violations;

    void fail(std::string msg);
};

// Ramification invariants of squares and cubes, the 2x2x2 pattern around
// unramified vertices, and that 4-cycles through interior vertices bound squares.
CheckReport local_checks(const DecoratedComplex& x,
                         const std::function<bool(int)>& interior,
                         bool check_four_cycles = true);

}  // namespace ramcube

#endif
