#ifndef RAMCUBE_THETA_HPP
#define RAMCUBE_THETA_HPP

#include <array>
#include <string>

#include "ramcube/complex.hpp"

namespace ramcube {

constexpr int kCoords = 3;
constexpr int kLetters = 4;
constexpr int kSheets = 5;
constexpr int kBaseVertices = 8;

// Base vertex p of theta^3 packs its coordinates as x | y << 1 | z << 2.
inline int bit(int p, int coord) { return (p >> coord) & 1; }
inline int flip(int p, int coord) { return p ^ (1 << coord); }
inline int pack(int x, int y, int z) { return x | (y << 1) | (z << 2); }

// Letters 0,1 run from circle vertex 0 to 1; letters 2,3 run back.
inline bool end_goes_up(int p, int coord, int letter) {
    return bit(p, coord) == 0 ? letter < 2 : letter >= 2;
}

char letter_name(int letter);
int letter_from_name(char c);

// Positions (a, a', b, b', c, c') of the three branching lines
// L1 = {(x, a, a')}, L2 = {(b, y, b')}, L3 = {(c, c', z)}.
struct Placement {
    std::array<int, 6> v{0, 0, 0, 1, 1, 1};

    void validate() const;  // throws InvalidPlacement when lines meet
    bool on_line(int p, int i) const;
    int branch(int p) const;  // -1 if p is unramified, else the (first) line's coordinate
    bool ramified(int p) const { return branch(p) >= 0; }
    bool edge_ramified(int p, int coord) const;  // edge from p along coord
    std::string str() const;
};

// The cube complex theta^3 with its ramification decoration.  With
// require_disjoint = false any of the 64 placements is decorated as given.
DecoratedComplex build_theta3(const Placement& pl = {}, bool require_disjoint = true);

// Edge id of theta^3 for (coord, letter) starting at a vertex with bit(coord) == 0.
int theta_edge_id(int coord, int letter, int p_low_bit);

}  // namespace ramcube

#endif
