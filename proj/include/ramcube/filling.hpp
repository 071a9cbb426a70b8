#ifndef RAMCUBE_FILLING_HPP
#define RAMCUBE_FILLING_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ramcube/development.hpp"

namespace ramcube {

// Van Kampen diagram over the sliced cell structure: a triangulated disc with
// a map of its vertices to developed vertices.  Faces are oriented so that the
// boundary of their sum is the boundary loop.  A face whose image is an edge
// or a point is degenerate and carries no area.
struct Diagram {
    std::vector<int> image;                 // diagram vertex -> developed vertex
    std::vector<std::array<int, 3>> faces;
    std::vector<int> boundary;              // boundary cycle

    int add_vertex(int img) {
        image.push_back(img);
        return static_cast<int>(image.size()) - 1;
    }
    std::vector<int> boundary_word() const;  // images of the boundary cycle
};

enum class FaceKind { Degenerate, HalfSquare, LevelTriangle, Invalid };
FaceKind classify_face(Development& d, int a, int b, int c);

// Sliced edge: cube edge, or diagonal of a square joining its mid-height corners.
bool is_sliced_edge(Development& d, int a, int b);
bool is_diagonal(Development& d, int a, int b);

struct DiagramStats {
    long area = 0;        // nondegenerate faces
    long degenerate = 0;
    long vertices = 0;
    int radius = 0;       // max edge distance of a vertex from the boundary
    int height = 0;       // max |h| over the image
    int min_height = 0, max_height = 0;

    nlohmann::ordered_json to_json() const;
};
DiagramStats diagram_stats(const Development& d, const Diagram& D);

struct DiagramCheck {
    bool ok = true;
    std::string error;
    int euler = 0;

    void fail(const std::string& msg) {
        if (ok) error = msg;
        ok = false;
    }
};
// Boundary word equals `loop`, faces map to sliced 2-cells, the face chain
// bounds the boundary cycle, and the complex is a disc.
DiagramCheck check_diagram(Development& d, const Diagram& D, const std::vector<int>& loop);

// Loops are closed: the edge from the last vertex back to the first is implied.
bool is_sliced_loop(Development& d, const std::vector<int>& loop);
bool is_level_loop(Development& d, const std::vector<int>& loop, int level = 0);
// Every diagonal replaced by the two sides through its lower corner.
std::vector<int> to_cubical_loop(Development& d, const std::vector<int>& loop, int* cost = nullptr);
// Corners x-y-z with x, z at one height spanning a square replaced by the diagonal x-z.
std::vector<int> to_sliced_loop(Development& d, const std::vector<int>& loop, int* cost = nullptr);

constexpr int kLeafPerimeter = 16;

struct FillStats {
    int leaves = 0;
    int triangles = 0;
    int depth = 0;
    int max_leaf_perimeter = 0;
    int max_triangle_perimeter = 0;
    long memo_hits = 0;
    long pairings_tried = 0;
    long flips = 0;
    int conversion_cost = 0;
    int cubical_length = 0;
};

// Fills cycles of diagram vertices (cube edges, possibly degenerate) with
// squares.  Dual curves pair the crossings of each hyperplane; every pairing
// that is non-crossing per hyperplane is tried in order of interleaving count
// and realised by square flips, so the first success has minimal area.
class CubicalFiller {
public:
    CubicalFiller(Development& d, Diagram& D, FillStats& st, long pairing_budget = 100000)
        : d_(d), D_(D), st_(st), budget_(pairing_budget) {}

    // `memo`: cache the move script under the label word of the cycle.
    void fill(std::vector<int> cycle, bool memo);

private:
    struct Op {
        char kind;  // 'F' flip, 'B' backtrack, 'C' collapse
        int at;
    };
    bool reduce(std::vector<int>& cyc, std::vector<int>* chord, std::vector<Op>* script);
    bool realise(std::vector<int> cyc, std::vector<int> chord, std::vector<Op>& script);
    bool replay(std::vector<int> cyc, const std::vector<Op>& script);
    void apply_flip(std::vector<int>& cyc, int i);
    void apply_backtrack(std::vector<int>& cyc, int i);
    void apply_collapse(std::vector<int>& cyc, int i);
    std::string key(const std::vector<int>& cyc) const;

    Development& d_;
    Diagram& D_;
    FillStats& st_;
    long budget_;
    std::map<std::string, std::vector<Op>> memo_;
};

// Loop in the sliced 1-skeleton -> diagram: diagonals are converted to two
// sides, then the cubical loop is cut by geodesic chords at dyadic positions.
// Regions whose arc has length <= L0/2 are leaves of perimeter <= L0.
Diagram dyadic_fill(Development& d, const std::vector<int>& loop, FillStats* stats = nullptr);

// Choices made by one push (counts and maxima; the paths themselves live in
// the diagram).
struct PushChoices {
    std::map<int, int> w;  // pushed diagram vertex -> chosen link vertex (end index)
    int max_mu = 0, max_nu = 0, max_eta = 0;
    long mu_paths = 0, nu_paths = 0, eta_paths = 0;
};

struct PushLedger {
    int level = 0;              // height of the pushed component(s)
    int components = 0;
    int height_before = 0, height_after = 0;
    long area_before = 0, area_after = 0;
    long cells_pushed = 0;      // 2-cells of the components (Step 2)
    long cells_extended = 0;    // other faces of N1(C) (Step 3)
    long step2_area = 0, step3_area = 0;
    int max_cell_expansion = 0; // max replacement area of one 2-cell
    int max_link_loop = 0;      // longest reduced link loop filled
    int max_link_area = 0;
    long link_loops = 0;
    PushChoices choices;

    void merge(const PushLedger& o);
    nlohmann::ordered_json to_json() const;
};

// Connected components of the diagram vertices at height h (through edges
// joining two of them).
std::vector<std::vector<int>> level_components(const Development& d, const Diagram& D, int h);

// Pushes one component at the extreme height one level toward 0 (Steps 1-3).
// Throws BoundExceeded if a link loop is longer than 5 or needs more than T
// cells, or a 2-cell needs more than 3T+1; InvalidDiagram on a precondition.
PushLedger push_step(Development& d, Diagram& D, const std::vector<int>& component, int T = 20);

// Pushes all components at +m and -m, m times, until the image lies in level 0.
std::vector<PushLedger> push_to_level(Development& d, Diagram& D, int T = 20, bool check_each = false);

// Random closed loop in the 0-level set through `start`: a level random walk
// followed by a best-first return path.  Length near `target`.
std::vector<int> random_level_loop(Development& d, int start, int target, uint64_t seed);

struct PipelineRun {
    int n = 0;
    int height = 0;
    long area_dyadic = 0, area_final = 0;
    int radius_dyadic = 0, radius_final = 0;
    FillStats fill;
    std::vector<PushLedger> pushes;
    bool boundary_ok = true, valid = true, level0 = true, heights_ok = true;
    std::string error;

    bool ok() const { return boundary_ok && valid && level0 && heights_ok && error.empty(); }
    nlohmann::ordered_json to_json() const;
};
// dyadic_fill + push_to_level with the invariant checks of each stage.
PipelineRun run_pipeline(Development& d, const std::vector<int>& loop, bool push = true,
                         bool check_each = false, Diagram* out = nullptr);

struct DehnRow {
    int target = 0;
    uint64_t seed = 0;
    PipelineRun run;
};
// Each loop is generated and filled in its own development rooted at
// `root_base`, so rows depend only on their seed.
std::vector<DehnRow> dehn_sample(const Atlas& a, int root_base, const std::vector<int>& lengths, int count,
                                 uint64_t seed, int threads = 1, bool check_each = false);
std::string dehn_csv(const std::vector<DehnRow>& rows);

// Maxima over a corpus and the fitted constants (measured, not bounds):
// C1 = max area/(n log2 n), C2 = max radius - 16 log2 n, C1' = max step3/area.
struct DehnSummary {
    long loops = 0, failed = 0;
    int min_n = 0, max_n = 0;
    int max_height = 0;
    int max_cell_expansion = 0, max_link_loop = 0, max_link_area = 0;
    double C1 = 0, C2 = 0, C1prime = 0;
    std::string first_error;

    nlohmann::ordered_json to_json() const;
};
DehnSummary summarize(const std::vector<DehnRow>& rows);

struct ExponentReport {
    int delta = 16;
    int C3 = 61;
    double exponent = 0;  // 1 + delta * log2(C3)

    nlohmann::ordered_json to_json() const;
};
ExponentReport exponent_report(int delta = 16, int C3 = 61);

nlohmann::ordered_json diagram_to_json(const Diagram& D);

// Loops as words from the root: each step is one end (cube edge) or two ends
// through the middle corner (diagonal), so they survive re-development.
nlohmann::ordered_json loop_to_json(Development& d, const std::vector<int>& loop);
std::vector<int> loop_from_json(Development& d, const nlohmann::json& j);

}  // namespace ramcube

#endif
