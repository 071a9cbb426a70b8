#ifndef RAMCUBE_DEVELOPMENT_HPP
#define RAMCUBE_DEVELOPMENT_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/atlas.hpp"
#include "ramcube/complex.hpp"

namespace ramcube {

enum class BaseType { Unramified, R1, R2, R3 };
BaseType parse_base_type(const std::string& s);  // "u", "r1", "r2", "r3"
const char* base_type_name(BaseType t);
int base_vertex_for(BaseType t, const Placement& pl);

// Lexicographically first placement passing the theta^3 square/cube checks,
// plus the full list of passing placements.
struct PlacementSearch {
    Placement chosen;
    std::vector<Placement> solutions;
};
PlacementSearch place_branch_loci();

// One adjacency of a vertex: end index here, neighbour, end index at the neighbour.
struct EndRef {
    int end;
    int nbr;
    int rev;
};

// Read-only view of a developed ball used by verification.
class BallView {
public:
    virtual ~BallView() = default;
    virtual int size() const = 0;
    virtual int base(int v) const = 0;
    virtual int dist(int v) const = 0;
    virtual int height(int v) const = 0;
    virtual void ends(int v, std::vector<EndRef>& out) const = 0;  // sorted by end
    // Neighbour across end e and the end pointing back, or {-1, -1}.
    virtual std::pair<int, int> across(int v, int e) const;
};

// Universal cover developed from the root outward.  Vertices are created on
// demand (neighbour()) or layer by layer (grow_ball()); ids never change.
// Every edge of the cover between two created vertices is present.
class Development : public BallView {
public:
    Development(const Atlas& atlas, int root_base);

    const Atlas& atlas() const { return *atlas_; }
    int root() const { return 0; }
    int size() const override { return static_cast<int>(base_.size()); }
    int base(int v) const override { return base_[v]; }
    int dist(int v) const override { return dist_[v]; }
    int height(int v) const override { return height_[v]; }
    void ends(int v, std::vector<EndRef>& out) const override;
    std::pair<int, int> across(int v, int e) const override;
    int num_ends(int v) const { return atlas_->num_ends(base_[v]); }
    const EndLabel& label(int v, int e) const { return atlas_->label(base_[v], e); }
    bool ramified(int v) const { return atlas_->branch(base_[v]) >= 0; }

    int neighbour(int v, int e);           // creates the neighbour if needed
    int peek(int v, int e) const;          // -1 if not created
    int reverse_end(int v, int e) const;   // end at the neighbour pointing back; needs peek >= 0
    int end_toward(int v, int w) const;    // -1 if not adjacent
    bool adjacent(int u, int w) const { return end_toward(u, w) >= 0; }
    int num_down(int v) const { return ndown_[v]; }
    int down_end(int v, int k) const { return down_end_[3 * v + k]; }
    int down_nbr(int v, int k) const { return down_nbr_[3 * v + k]; }
    bool is_down(int v, int e) const;

    // Far corner of the square spanned at v by two adjacent ends.
    int square_corner(int v, int e1, int e2);

    // Materialise every vertex within distance r of the root.
    void grow_ball(int r);
    int ball_radius() const { return ball_radius_; }
    const std::vector<int>& layer_starts() const { return layer_start_; }

    // Hyperplanes: id is the upper vertex of the edge of the hyperplane closest to the root.
    int hyperplane(int upper, int lower) const;
    const int32_t* halfspaces(int v);  // sorted, length dist(v)
    int distance(int u, int v);
    bool separates(int h, int v);      // hyperplane h separates v from the root
    std::vector<int> geodesic(int u, int v);  // lexicographically least end at each step

    std::string digest() const;  // SHA-256 of the canonical serialisation
    nlohmann::ordered_json to_json(bool full) const;

private:
    int create(int y, int e);
    int alloc_slots(int v);
    int common_down(int a, int b) const;

    const Atlas* atlas_;
    std::vector<uint8_t> base_;
    std::vector<int16_t> dist_, height_;
    std::vector<uint8_t> ndown_;
    std::vector<uint8_t> down_end_, down_rev_;
    std::vector<int32_t> down_nbr_;
    std::vector<int32_t> slot_block_;
    std::vector<int32_t> slot_nbr_;
    std::vector<uint8_t> slot_rev_;
    std::vector<uint32_t> hs_off_;
    std::vector<int32_t> hs_pool_;
    std::vector<int> layer_start_;
    int ball_radius_ = -1;
};

// Ball loaded from a full JSON certificate.
class BallData : public BallView {
public:
    static BallData from_json(const nlohmann::json& j);
    int size() const override { return static_cast<int>(base_.size()); }
    int base(int v) const override { return base_[v]; }
    int dist(int v) const override { return dist_[v]; }
    int height(int v) const override { return height_[v]; }
    void ends(int v, std::vector<EndRef>& out) const override;
    std::pair<int, int> across(int v, int e) const override;
    std::string digest() const;

    int root_base = 0;
    int radius = 0;

private:
    std::vector<int> base_, dist_, height_;
    std::vector<std::vector<EndRef>> down_;
    std::vector<std::vector<EndRef>> all_;
};

struct BallReport {
    bool ok = true;
    int radius = 0;
    long vertices = 0;
    long interior_vertices = 0;    // dist <= radius - 1
    long full_link_vertices = 0;   // dist <= radius - 3: every cell at v lies in the ball
    long squares_checked = 0;
    long cubes_checked = 0;
    long violations_count = 0;
    int min_height = 0, max_height = 0;
    std::vector<std::string> violations;

    void fail(std::string msg);
    nlohmann::ordered_json to_json() const;
};

// Link isomorphism with the atlas (by labels) recomputed from the 1-skeleton,
// square/cube ramification invariants, height bipartiteness, 4-cycles bound squares.
BallReport verify_ball(const BallView& b, const Atlas& a, int radius, int threads = 1);

// Explicit cells of a grown ball: squares and cubes are found from their top corner.
DecoratedComplex ball_complex(const Development& d);

// Sliced cell structure of an explicit complex with heights.
struct SlicedComplex {
    std::vector<int> height;
    std::vector<std::array<int, 2>> diagonals;     // one per square, joins its mid-height corners
    std::vector<std::array<int, 3>> triangles;     // two per square
    std::vector<std::array<int, 3>> level_triangles;  // bottom and top of every cube
};
SlicedComplex slice(const DecoratedComplex& x);

struct LevelSet {
    std::vector<int> vertices;
    std::vector<std::array<int, 2>> diagonals;
    std::vector<std::array<int, 3>> triangles;
};
LevelSet level_set(const SlicedComplex& s, int k);

}  // namespace ramcube

#endif
