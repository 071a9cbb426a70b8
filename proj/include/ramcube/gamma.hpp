#ifndef RAMCUBE_GAMMA_HPP
#define RAMCUBE_GAMMA_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/errors.hpp"

namespace ramcube {

using Perm = std::array<int, 5>;

Perm perm_identity();
Perm perm_compose(const Perm& p, const Perm& q);  // q first, then p
Perm perm_inverse(const Perm& p);
bool is_full_cycle(const Perm& p);
bool is_permutation(const Perm& p);
std::string perm_str(const Perm& p);

// Bipartite graph with parts A = {a_0..a_{na-1}} and B = {b_0..b_{nb-1}}.
struct BipartiteGraph {
    int na = 0, nb = 0;
    std::vector<std::array<int, 2>> edges;  // (p, q) joins a_p to b_q

    static BipartiteGraph complete(int na, int nb);
    int edge_index(int p, int q) const;  // -1 if absent
};

// 4-cycle a_p1 b_q1 a_p2 b_q2 with p1 < p2 and q1 < q2.
struct FourCycle {
    int p1, q1, p2, q2;
};
std::vector<FourCycle> enumerate_4cycles(const BipartiteGraph& g);

struct VoltageAssignment {
    BipartiteGraph graph;
    std::vector<Perm> vol;  // per edge: sheet over a_p -> sheet over b_q

    const Perm& at(int p, int q) const;
    Perm holonomy(const FourCycle& c) const;
    nlohmann::ordered_json to_json() const;
    static VoltageAssignment from_json(const nlohmann::json& j);
};

enum class SearchOrder { Lex, ReverseLex };

struct SearchStats {
    long nodes = 0;
};

// Depth-first search over permutation voltages on non-tree edges (identity on a
// BFS spanning tree from a_0) such that every 4-cycle has a 5-cycle holonomy.
std::optional<VoltageAssignment> search_monodromy(const BipartiteGraph& g, SearchOrder order,
                                                  SearchStats* stats = nullptr);

// Throws InvalidVoltage naming the first 4-cycle whose holonomy is not a 5-cycle.
void validate_voltages(const VoltageAssignment& va);

// The 5-fold cover Gamma of the base bipartite graph.
struct Gamma {
    VoltageAssignment va;
    int num_vertices() const { return 5 * (va.graph.na + va.graph.nb); }
    int a_vertex(int p, int s) const { return 5 * p + s; }
    int b_vertex(int q, int s) const { return 5 * (va.graph.na + q) + s; }
    std::vector<std::array<int, 2>> edges() const;
    std::vector<std::vector<int>> adjacency() const;
    int project(int v) const { return v / 5; }  // base vertex index (A first, then B)
};

Gamma build_gamma(const VoltageAssignment& va);

struct GammaReport {
    bool connected = false;
    bool bipartite = false;
    bool four_regular = false;
    int girth = 0;
    bool covering = false;            // 5 sheets, local bijection on every base edge
    bool cycles_lift_to_20 = false;   // each base 4-cycle lifts to one 20-cycle
    bool cyclic_deck = false;         // s -> s+1 commutes with all voltages
    bool ok() const {
        return connected && bipartite && four_regular && girth >= 6 && covering &&
               cycles_lift_to_20;
    }
};
GammaReport check_gamma(const Gamma& g);

}  // namespace ramcube

#endif
