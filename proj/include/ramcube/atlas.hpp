#ifndef RAMCUBE_ATLAS_HPP
#define RAMCUBE_ATLAS_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "ramcube/complex.hpp"
#include "ramcube/gamma.hpp"
#include "ramcube/theta.hpp"

namespace ramcube {

// Label of an end of an edge at a vertex of the branched cover.
struct EndLabel {
    int8_t coord = 0;
    int8_t letter = 0;
    int8_t sheet = -1;  // only for ends transverse to the branching line
};

// Local structure of the branched cover at vertices over each base vertex:
// unramified links F*F*F, ramified links Gamma_i * F_i.  Ends at a vertex over
// base p are indexed in lexicographic (coord, letter, sheet) order.
class Atlas {
public:
    Atlas(const Gamma& gamma, const Placement& pl = {});

    const Placement& placement() const { return pl_; }
    const Gamma& gamma() const { return gamma_; }
    int branch(int p) const { return branch_[p]; }
    int num_ends(int p) const { return static_cast<int>(labels_[p].size()); }
    const EndLabel& label(int p, int e) const { return labels_[p][e]; }
    int end_index(int p, int coord, int letter, int sheet) const;
    bool up(int p, int e) const { return ups_[p][e] != 0; }
    bool adjacent(int p, int e1, int e2) const { return adj_[p][e1 * num_ends(p) + e2] != 0; }

    // End at a vertex over p parallel to `src` (an end at a neighbour), where
    // `arrival` is the end at p pointing to that neighbour.
    int transport(int p, int arrival, const EndLabel& src) const;

    // Gamma-neighbour over (coord, letter) of a transverse end at a ramified vertex.
    EndLabel gamma_neighbour(int p, const EndLabel& e, int coord, int letter) const;

    const LinkComplex& link(int p) const { return links_[p]; }
    LinkComplex ascending(int p) const { return ascending_link(links_[p]); }
    LinkComplex descending(int p) const { return descending_link(links_[p]); }

private:
    Gamma gamma_;
    Placement pl_;
    std::array<int, 8> branch_{};
    std::array<std::vector<EndLabel>, 8> labels_;
    std::array<std::vector<char>, 8> ups_;
    std::array<std::vector<char>, 8> adj_;
    std::array<LinkComplex, 8> links_;
    std::array<std::array<int, 72>, 8> index_{};  // ((coord*4+letter)*6 + sheet+1)
    std::array<Perm, 16> vol_{}, vol_inv_{};
};

// Atlas for the voltage assignment found by the lexicographic search.
const Atlas& default_atlas();

// Minimal-weight F2 2-chain bounding a closed walk in a finite 2-complex.
// Returns -1 if the walk is not a boundary.
struct ChainResult {
    int area = -1;
    std::vector<int> tris;  // triangle indices of one minimal chain
};
ChainResult min_bounding_chain(const LinkComplex& l, const std::vector<int>& walk);

// True iff the triangles form a disc whose boundary cycle is `loop` (a simple cycle).
bool is_disc_with_boundary(const LinkComplex& l, const std::vector<int>& tris,
                           const std::vector<int>& loop);

// Maximal F2 filling area over reduced closed walks of length <= 5 in the
// ascending and descending links of all base vertices.
struct LinkAreaStats {
    int T = 0;
    int loops = 0;
    int nonsimple_reduced = 0;
    bool discs_ok = true;
    int witness_link = -1;     // index into the link list (atlas: 2p descending, 2p+1 ascending)
    std::vector<int> witness;  // a shortest simple cycle of area T
};
LinkAreaStats link_area_bound(const Atlas& a);
LinkAreaStats link_area_bound(const std::vector<LinkComplex>& links);

// Minimal filling area of a closed walk (length <= 6) on a simplicial 2-sphere:
// backtracks are cancelled, then the lighter of the two F2 chains bounding the
// walk is taken and checked to be a disc when the reduced walk is simple.
int filling_area_oracle(const LinkComplex& sphere, const std::vector<int>& loop);

// Exhaustive van Kampen area of a closed walk in a simplicial 2-complex:
// least number of triangle relators turning the walk into a point, searched
// over cyclic words of length <= max_len.  -1 if none is found.
int relator_area(const LinkComplex& l, const std::vector<int>& loop, int max_len = 8);

// Cyclic backtrack cancellation of a closed walk.
std::vector<int> reduce_closed_walk(std::vector<int> w);

inline int expansion_bound(int T) { return 1 + 3 * T; }

}  // namespace ramcube

#endif
