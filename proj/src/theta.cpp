#include "ramcube/theta.hpp"

#include <sstream>

namespace ramcube {

char letter_name(int letter) { return static_cast<char>('a' + letter); }

int letter_from_name(char c) {
    if (c < 'a' || c > 'd') throw FormatError(std::string("bad letter ") + c);
    return c - 'a';
}

void Placement::validate() const {
    for (int x : v)
        if (x != 0 && x != 1) throw InvalidPlacement("placement entries must be 0 or 1");
    // L1 meets L2 iff a' == b'; L1 meets L3 iff a == c'; L2 meets L3 iff b == c.
    if (v[1] == v[3]) throw InvalidPlacement("lines L1 and L2 intersect");
    if (v[0] == v[5]) throw InvalidPlacement("lines L1 and L3 intersect");
    if (v[2] == v[4]) throw InvalidPlacement("lines L2 and L3 intersect");
}

bool Placement::on_line(int p, int i) const {
    int x = bit(p, 0), y = bit(p, 1), z = bit(p, 2);
    switch (i) {
        case 0: return y == v[0] && z == v[1];
        case 1: return x == v[2] && z == v[3];
        default: return x == v[4] && y == v[5];
    }
}

int Placement::branch(int p) const {
    for (int i = 0; i < 3; ++i)
        if (on_line(p, i)) return i;
    return -1;
}

bool Placement::edge_ramified(int p, int coord) const { return on_line(p, coord); }

std::string Placement::str() const {
    std::ostringstream os;
    os << "(" << v[0];
    for (int k = 1; k < 6; ++k) os << "," << v[k];
    os << ")";
    return os.str();
}

int theta_edge_id(int coord, int letter, int p_low_bit) {
    // Index the four vertices with bit(coord) == 0 by their remaining two bits.
    int k = 0, m = 0;
    for (int c = 0; c < 3; ++c) {
        if (c == coord) continue;
        k |= bit(p_low_bit, c) << m++;
    }
    return (coord * 4 + letter) * 4 + k;
}

DecoratedComplex build_theta3(const Placement& pl, bool require_disjoint) {
    if (require_disjoint) pl.validate();
    DecoratedComplex x;
    for (int p = 0; p < 8; ++p) {
        VertexRec r;
        r.base = p;
        r.branch = pl.branch(p);
        r.ramified = r.branch >= 0;
        x.add_vertex(r);
    }
    for (int coord = 0; coord < 3; ++coord)
        for (int letter = 0; letter < 4; ++letter)
            for (int k = 0; k < 4; ++k) {
                // Recover the bit(coord) == 0 endpoint from k.
                int p = 0, m = 0;
                for (int c = 0; c < 3; ++c) {
                    if (c == coord) continue;
                    p |= ((k >> m++) & 1) << c;
                }
                int q = flip(p, coord);
                EdgeRec e;
                e.ends = letter < 2 ? std::array<int, 2>{p, q} : std::array<int, 2>{q, p};
                e.coord = coord;
                e.letter = letter;
                e.ramified = pl.edge_ramified(p, coord);
                int id = x.add_edge(e);
                if (id != theta_edge_id(coord, letter, p)) throw MalformedCell("theta edge numbering");
            }
    // Square spanned by coordinates c1 < c2 with letters l1, l2, at third-coordinate bit t.
    int sq_id[3][4][4][2];
    for (int c1 = 0; c1 < 3; ++c1)
        for (int c2 = c1 + 1; c2 < 3; ++c2) {
            int c3 = 3 - c1 - c2;
            for (int l1 = 0; l1 < 4; ++l1)
                for (int l2 = 0; l2 < 4; ++l2)
                    for (int t = 0; t < 2; ++t) {
                        int p = t << c3;
                        SquareRec s;
                        s.edges = {theta_edge_id(c1, l1, p), theta_edge_id(c2, l2, flip(p, c1)),
                                   theta_edge_id(c1, l1, flip(p, c2)), theta_edge_id(c2, l2, p)};
                        sq_id[c1 + c2 - 1][l1][l2][t] = x.add_square(s);
                    }
        }
    // sq_id index: pair (0,1) -> 0, (0,2) -> 1, (1,2) -> 2.
    for (int l0 = 0; l0 < 4; ++l0)
        for (int l1 = 0; l1 < 4; ++l1)
            for (int l2 = 0; l2 < 4; ++l2) {
                CubeRec c;
                c.faces = {sq_id[0][l0][l1][0], sq_id[0][l0][l1][1], sq_id[1][l0][l2][0],
                           sq_id[1][l0][l2][1], sq_id[2][l1][l2][0], sq_id[2][l1][l2][1]};
                x.add_cube(c);
            }
    x.freeze();
    return x;
}

}  // namespace ramcube
