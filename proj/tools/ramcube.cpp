#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "ramcube/atlas.hpp"
#include "ramcube/digest.hpp"
#include "ramcube/filling.hpp"
#include "ramcube/grid.hpp"
#include "ramcube/metric.hpp"
#include "ramcube/report.hpp"

using namespace ramcube;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kCertificateSchema = "ramcube.certificate/1";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Input {
    std::string path;
    std::string sha256;
};

// State of one command: its name, global flags, and the files it read.
struct Context {
    std::string command;
    uint64_t seed = 0;
    int threads = 1;
    std::string out;
    bool timing = false;
    std::vector<Input> inputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << data;
}

// Reads a JSON artifact, records its digest, and unwraps certificates.
nlohmann::json load(Context& c, const std::string& path) {
    std::string text = read_file(path);
    c.inputs.push_back({path, sha256_hex(text)});
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) throw FormatError(path + " is not valid JSON");
    if (j.value("schema", "") == kCertificateSchema) return j.at("result");
    return j;
}

json certificate(const Context& c, json result) {
    json ins = json::array();
    for (const auto& i : c.inputs) ins.push_back({{"path", i.path}, {"sha256", i.sha256}});
    json j;
    j["schema"] = kCertificateSchema;
    j["command"] = c.command;
    j["seed"] = c.seed;
    j["inputs"] = ins;
    j["result"] = std::move(result);
    if (c.timing)
        j["wall_clock_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - c.start).count();
    return j;
}

void emit(const Context& c, json result, const std::string& path = "") {
    std::string text = certificate(c, std::move(result)).dump(2) + "\n";
    std::string p = path.empty() ? c.out : path;
    if (p.empty())
        std::fwrite(text.data(), 1, text.size(), stdout);
    else
        write_file(p, text);
}

// Atlas of a ball artifact (its Gamma and placement); kept alive with the development.
struct LoadedBall {
    std::unique_ptr<Atlas> atlas;
    int root_base = 0;
    int radius = 0;
    std::string digest;
    nlohmann::json raw;
};

LoadedBall load_ball(Context& c, const std::string& path) {
    LoadedBall b;
    b.raw = load(c, path);
    if (b.raw.value("schema", "") != "ramcube.ball/1") throw FormatError(path + ": expected schema ramcube.ball/1");
    try {
        Placement pl;
        pl.v = b.raw.at("placement").get<std::array<int, 6>>();
        b.atlas = std::make_unique<Atlas>(build_gamma(VoltageAssignment::from_json(b.raw.at("gamma"))), pl);
        b.root_base = b.raw.at("root_base");
        b.radius = b.raw.at("radius");
        b.digest = b.raw.at("digest");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
    return b;
}

VoltageAssignment default_voltages() {
    auto va = search_monodromy(BipartiteGraph::complete(4, 4), SearchOrder::Lex);
    if (!va) throw NoSolution("monodromy search found no assignment");
    return *va;
}

// ---------------------------------------------------------------------------

json gamma_build() {
    VoltageAssignment va = default_voltages();
    Gamma g = build_gamma(va);
    json j = va.to_json();
    j["cover"] = {{"vertices", g.num_vertices()}, {"edges", g.edges()}};
    return j;
}

bool gamma_verify(const VoltageAssignment& va, json& out) {
    bool valid = true;
    std::string error;
    try {
        validate_voltages(va);
    } catch (const InvalidVoltage& e) {
        valid = false;
        error = e.what();
    }
    int full = 0;
    auto cycles = enumerate_4cycles(va.graph);
    for (const auto& c : cycles) full += is_full_cycle(va.holonomy(c));
    Gamma g = build_gamma(va);
    GammaReport gr = check_gamma(g);
    out = {{"holonomies_checked", cycles.size()},
           {"all_5_cycles", full == static_cast<int>(cycles.size())},
           {"girth_no_4_cycles", gr.girth > 4},
           {"girth", gr.girth},
           {"vertices", g.num_vertices()},
           {"edges", g.edges().size()},
           {"lifts_close_at_20", gr.cycles_lift_to_20}};
    bool ok = valid && gr.ok() && full == static_cast<int>(cycles.size());
    if (ok) {
        Atlas a(g);
        LinkAreaStats st = link_area_bound(a);
        out["T"] = st.T;
        out["C3"] = expansion_bound(st.T);
    }
    if (!error.empty()) out["error"] = error;
    out["ok"] = ok;
    return ok;
}

json atlas_summary(const Atlas& a, bool full) {
    json bases = json::array();
    for (int p = 0; p < 8; ++p) {
        const LinkComplex& l = a.link(p);
        LinkComplex up = a.ascending(p), dn = a.descending(p);
        json b = {{"base", p},
                  {"branch", a.branch(p)},
                  {"ends", a.num_ends(p)},
                  {"link_cells", {l.size(), l.edges.size(), l.tris.size()}},
                  {"flag", !check_flag(l)},
                  {"ascending_diameter", up.diameter()},
                  {"descending_diameter", dn.diameter()}};
        if (full) b["link"] = l.to_json();
        bases.push_back(b);
    }
    LinkAreaStats st = link_area_bound(a);
    return {{"placement", a.placement().v},
            {"bases", bases},
            {"T", st.T},
            {"C3", expansion_bound(st.T)},
            {"link_loops", st.loops},
            {"witness_link", st.witness_link},
            {"witness", st.witness}};
}

json develop(const Atlas& a, int base, int radius, bool full) {
    Development d(a, base);
    d.grow_ball(radius);
    return d.to_json(full);
}

bool verify_ball_file(Context& c, const std::string& path, json& out) {
    LoadedBall b = load_ball(c, path);
    bool digest_ok;
    BallReport r;
    if (b.raw.value("full", false)) {
        BallData data = BallData::from_json(b.raw);
        digest_ok = data.digest() == b.digest;
        r = verify_ball(data, *b.atlas, b.radius, c.threads);
    } else {
        Development d(*b.atlas, b.root_base);
        d.grow_ball(b.radius);
        digest_ok = d.digest() == b.digest;
        r = verify_ball(d, *b.atlas, b.radius, c.threads);
    }
    out = {{"digest", b.digest}, {"digest_ok", digest_ok}, {"report", r.to_json()}};
    out["ok"] = digest_ok && r.ok;
    return digest_ok && r.ok;
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream f;
    if (path.empty()) return f;
    f.open(path);
    if (!f) throw UsageError("cannot write " + path);
    return f;
}

struct ScanArgs {
    std::string ball;
    long sample = 100000;
    int pool = 3000;
    int geodesics = 1;
    int size = 5;
    std::string csv;
};

bool scan(Context& c, const std::string& kind, const ScanArgs& s, json& out) {
    if (kind == "squares") {
        std::vector<int> bases;
        const Atlas* a = &default_atlas();
        LoadedBall b;
        if (!s.ball.empty()) {
            b = load_ball(c, s.ball);
            a = b.atlas.get();
            bases = {b.root_base};
        }
        SquareSearchResult r = square_search(*a, s.size, s.size, bases, {}, true);
        json classes = json::array();
        for (const auto& [k, n] : r.classes) classes.push_back({{"decoration", k}, {"count", n}});
        out = {{"max", r.total}, {"squares", classes}, {"cells_scanned", r.vertices_created}, {"search", r.to_json()}};
        std::ofstream f = open_csv(s.csv);
        if (f.is_open()) {
            f << "base,count\n";
            for (int p = 0; p < 8; ++p) f << p << ',' << r.per_base[p] << '\n';
        }
        return true;
    }
    if (s.ball.empty()) throw UsageError("scan " + kind + " needs --ball");
    LoadedBall b = load_ball(c, s.ball);
    Development d(*b.atlas, b.root_base);
    std::vector<int> pool = sample_ball(d, d.root(), b.radius, s.pool, c.seed);
    std::ofstream f = open_csv(s.csv);
    if (kind == "four-point") {
        if (f.is_open()) f << "a,b,c,d,S,M,L,delta\n";
        auto sink = [&](const FourPointRecord& r) {
            f << r.pts[0] << ',' << r.pts[1] << ',' << r.pts[2] << ',' << r.pts[3] << ',' << r.S << ',' << r.M << ','
              << r.L << ',' << r.delta() << '\n';
        };
        FourPointStats st = f.is_open() ? four_point_scan(d, pool, s.sample, c.seed, {}, sink)
                                        : four_point_scan(d, pool, s.sample, c.seed);
        out = st.to_json();
        out["cells_scanned"] = st.quadruples;
        out["pool"] = pool.size();
        return st.max_delta <= 4;
    }
    if (kind == "triangles") {
        if (f.is_open()) f << "x,y,z,dxy,dyz,dzx,thinness,insize\n";
        auto sink = [&](const TriangleRecord& r) {
            f << r.corners[0] << ',' << r.corners[1] << ',' << r.corners[2] << ',' << r.sides[0] << ',' << r.sides[1]
              << ',' << r.sides[2] << ',' << r.thinness2 / 2.0 << ',' << r.insize2 / 2.0 << '\n';
        };
        TriangleStats st = f.is_open() ? thin_triangle_scan(d, pool, s.sample, c.seed, s.geodesics, sink)
                                       : thin_triangle_scan(d, pool, s.sample, c.seed, s.geodesics);
        out = st.to_json();
        out["max"] = st.max_thinness2 / 2.0;
        out["cells_scanned"] = st.triangles;
        out["pool"] = pool.size();
        return st.max_thinness2 <= 32;
    }
    if (kind == "median") {
        if (f.is_open()) f << "u,v,w,median,unique,candidates\n";
        std::mt19937_64 rng(c.seed);
        long tested = 0, unique = 0, budget = 0, max_cand = 0;
        while (tested < s.sample && pool.size() >= 3) {
            int u = pool[rng() % pool.size()], v = pool[rng() % pool.size()], w = pool[rng() % pool.size()];
            if (u == v || v == w || u == w) continue;
            MedianResult m = median(d, u, v, w);
            ++tested;
            unique += m.unique && !m.budget_hit;
            budget += m.budget_hit;
            max_cand = std::max(max_cand, m.candidates);
            if (f.is_open())
                f << u << ',' << v << ',' << w << ',' << m.median << ',' << m.unique << ',' << m.candidates << '\n';
        }
        out = {{"max", max_cand}, {"cells_scanned", tested}, {"unique", unique}, {"budget_hits", budget}};
        return unique == tested;
    }
    throw UsageError("unknown scan " + kind);
}

struct FillArgs {
    std::string ball, base, loop, ledger, save_loop, diagram;
    int length = 0;
    bool push = false;
};

bool fill(Context& c, const FillArgs& f, json& out) {
    if (f.ball.empty() == f.base.empty()) throw UsageError("fill needs one of --ball and --base");
    LoadedBall b;
    const Atlas* a = &default_atlas();
    int root = 0, radius = -1;  // -1: lazily developed, no ball to stay in
    if (!f.ball.empty()) {
        b = load_ball(c, f.ball);
        a = b.atlas.get();
        root = b.root_base;
        radius = b.radius;
    } else {
        root = base_vertex_for(parse_base_type(f.base), a->placement());
    }
    Development d(*a, root);
    std::vector<int> loop;
    if (!f.loop.empty())
        loop = loop_from_json(d, load(c, f.loop));
    else if (f.length > 0)
        loop = random_level_loop(d, d.root(), f.length, c.seed);
    else
        throw UsageError("fill needs --loop or --length");
    if (!f.save_loop.empty()) write_file(f.save_loop, loop_to_json(d, loop).dump(2) + "\n");
    int reach = 0;
    for (int v : loop) reach = std::max(reach, d.dist(v));
    if (radius >= 0 && reach > radius)
        throw BoundExceeded("loop exits trusted region: distance " + std::to_string(reach) + " > ball radius " +
                            std::to_string(radius));
    Diagram D;
    PipelineRun r = run_pipeline(d, loop, f.push, false, &D);
    out = r.to_json();
    out["stats"] = diagram_stats(d, D).to_json();
    if (!f.ledger.empty()) {
        json led = json::array();
        for (const auto& p : r.pushes) led.push_back(p.to_json());
        emit(c, {{"schema", "ramcube.push-ledger/1"}, {"pushes", led}}, f.ledger);
    }
    if (!f.diagram.empty()) write_file(f.diagram, diagram_to_json(D).dump() + "\n");
    return r.ok();
}

std::vector<int> parse_lengths(const std::string& s) {
    std::vector<int> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            size_t used = 0;
            int n = std::stoi(tok, &used);
            if (used != tok.size() || n < 3) throw std::invalid_argument(tok);
            out.push_back(n);
        } catch (const std::exception&) {
            throw UsageError("--lengths expects comma separated integers >= 3");
        }
    }
    if (out.empty()) throw UsageError("--lengths is empty");
    return out;
}

// Every recorded input digest must match the file it names.
bool chain_intact(const std::vector<std::string>& artifacts, json& broken) {
    broken = json::array();
    for (const auto& path : artifacts) {
        nlohmann::json j = nlohmann::json::parse(read_file(path));
        for (const auto& in : j.value("inputs", nlohmann::json::array())) {
            std::string p = in.at("path"), want = in.at("sha256");
            std::string got;
            try {
                got = sha256_hex(read_file(p));
            } catch (const UsageError&) {
            }
            if (got != want) broken.push_back({{"artifact", path}, {"input", p}});
        }
    }
    return broken.empty();
}

struct ReproduceArgs {
    std::string dir = "reproduce";
    int radius = 5;
    std::vector<int> only;
    bool skip_five = false;
};

bool reproduce_all(const Context& top, const ReproduceArgs& r, json& out) {
    namespace fs = std::filesystem;
    fs::create_directories(r.dir);
    auto path = [&](const std::string& f) { return (fs::path(r.dir) / f).string(); };
    auto sub = [&](const std::string& cmd) {
        Context c;
        c.command = cmd;
        c.seed = top.seed;
        c.threads = top.threads;
        c.timing = top.timing;
        return c;
    };
    std::vector<std::string> artifacts;
    bool ok = true;

    Context cg = sub("gamma build");
    emit(cg, gamma_build(), path("gamma.json"));
    artifacts.push_back(path("gamma.json"));

    Context cv = sub("gamma verify");
    VoltageAssignment va = VoltageAssignment::from_json(load(cv, path("gamma.json")));
    json gv;
    ok = gamma_verify(va, gv) && ok;
    emit(cv, gv, path("gamma-verify.json"));
    artifacts.push_back(path("gamma-verify.json"));

    Atlas atlas(build_gamma(va));
    for (const char* t : {"u", "r1"}) {
        std::string ball = path(std::string("ball-") + t + ".json");
        Context cd = sub(std::string("develop --base ") + t + " --radius " + std::to_string(r.radius));
        load(cd, path("gamma.json"));
        emit(cd, develop(atlas, base_vertex_for(parse_base_type(t), atlas.placement()), r.radius, false), ball);
        artifacts.push_back(ball);

        Context cb = sub(std::string("verify ") + ball);
        json vb;
        ok = verify_ball_file(cb, ball, vb) && ok;
        std::string vpath = path(std::string("verify-ball-") + t + ".json");
        emit(cb, vb, vpath);
        artifacts.push_back(vpath);
    }

    Context ce = sub("report exponent");
    emit(ce, exponent_report().to_json(), path("exponent.json"));
    artifacts.push_back(path("exponent.json"));

    AcceptanceOptions o;
    o.seed = top.seed;
    o.threads = top.threads;
    o.ball_radius = r.radius;
    o.five_square_search = !r.skip_five;
    json crit = json::array();
    bool all = true;
    run_acceptance(o, r.only, [&](const CriterionResult& cr) {
        std::fprintf(stderr, "%s\n", cr.line().c_str());
        all = all && cr.pass;
        crit.push_back({{"id", cr.id}, {"title", cr.title}, {"pass", cr.pass}, {"summary", cr.summary},
                        {"data", cr.data}});
    });
    Context ca = sub("acceptance");
    emit(ca, {{"criteria", crit}, {"all_pass", all}}, path("acceptance.json"));
    artifacts.push_back(path("acceptance.json"));

    json broken;
    bool chain = chain_intact(artifacts, broken);
    json list = json::array();
    for (const auto& a : artifacts) list.push_back({{"path", a}, {"sha256", sha256_hex(read_file(a))}});
    json lines = json::array();
    for (const auto& cr : crit) lines.push_back(std::string("criterion ") + std::to_string(cr["id"].get<int>()) +
                                                (cr["pass"].get<bool>() ? " PASS " : " FAIL ") +
                                                cr["title"].get<std::string>());
    out = {{"artifacts", list},
           {"digest_chain_ok", chain},
           {"broken_links", broken},
           {"verifications_ok", ok},
           {"criteria", lines},
           {"all_pass", all}};
    return ok && chain && all;
}

int fail_json(const std::string& kind, const std::string& msg, int code) {
    std::cerr << json{{"error", kind}, {"message", msg}}.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ramified cube complex toolkit"};
    app.require_subcommand(1);
    Context ctx;
    app.add_option("--seed", ctx.seed, "seed for all randomness (default 0)");
    app.add_option("--threads", ctx.threads, "worker cap")->check(CLI::PositiveNumber);
    app.add_option("--out", ctx.out, "output file (default stdout)");
    app.add_flag("--timing", ctx.timing, "add wall-clock seconds to certificates");

    auto* gamma = app.add_subcommand("gamma", "monodromy cover of K4,4")->require_subcommand(1)->fallthrough();
    auto* gbuild = gamma->add_subcommand("build", "search voltages and write Gamma")->fallthrough();
    std::string gamma_file;
    auto* gverify = gamma->add_subcommand("verify", "re-check Gamma and the link constants")->fallthrough();
    gverify->add_option("--gamma", gamma_file, "Gamma from `gamma build` (default: search again)");

    bool atlas_full = false;
    auto* atlas = app.add_subcommand("atlas", "link atlas and link area bound")->fallthrough();
    atlas->add_flag("--full", atlas_full, "include the link complexes");

    std::string base = "u";
    int radius = 5;
    bool ball_full = false;
    auto* dev = app.add_subcommand("develop", "develop a ball of the universal cover")->fallthrough();
    dev->add_option("--base", base, "root base type")->check(CLI::IsMember({"u", "r1", "r2", "r3"}));
    dev->add_option("--radius", radius)->check(CLI::NonNegativeNumber);
    dev->add_flag("--full", ball_full, "store every vertex (otherwise a digest summary)");

    std::string verify_path;
    auto* verify = app.add_subcommand("verify", "verify a ball file")->fallthrough();
    verify->add_option("ball", verify_path)->required();

    ScanArgs sa;
    std::string scan_kind;
    auto* scan_cmd = app.add_subcommand("scan", "metric scans")->fallthrough();
    scan_cmd->add_option("kind", scan_kind)->required()->check(
        CLI::IsMember({"four-point", "triangles", "median", "squares"}));
    scan_cmd->add_option("--ball", sa.ball);
    scan_cmd->add_option("--sample", sa.sample)->check(CLI::PositiveNumber);
    scan_cmd->add_option("--pool", sa.pool)->check(CLI::PositiveNumber);
    scan_cmd->add_option("--geodesics", sa.geodesics, "geodesics per side for triangles")->check(CLI::PositiveNumber);
    scan_cmd->add_option("--size", sa.size)->check(CLI::Range(1, 8));
    scan_cmd->add_option("--csv", sa.csv);

    std::string cert_kind;
    int rows = 5, cols = 5;
    auto* cert = app.add_subcommand("cert", "decoration certificates")->fallthrough();
    cert->add_option("kind", cert_kind)->required()->check(CLI::IsMember({"grid"}));
    cert->add_option("--rows", rows)->check(CLI::Range(1, 8));
    cert->add_option("--cols", cols)->check(CLI::Range(1, 8));

    FillArgs fa;
    auto* fill_cmd = app.add_subcommand("fill", "fill a level loop and push to height 0")->fallthrough();
    fill_cmd->add_option("--ball", fa.ball, "loop must stay inside this ball");
    fill_cmd->add_option("--base", fa.base, "develop lazily from this root type instead of a ball")
        ->check(CLI::IsMember({"u", "r1", "r2", "r3"}));
    fill_cmd->add_option("--loop", fa.loop);
    fill_cmd->add_option("--length", fa.length, "generate a random level loop of about this length");
    fill_cmd->add_option("--save-loop", fa.save_loop);
    fill_cmd->add_option("--diagram", fa.diagram, "write the final diagram");
    fill_cmd->add_flag("--push", fa.push);
    fill_cmd->add_option("--ledger", fa.ledger, "write the push ledger");

    std::string lengths = "8,16,32", dehn_csv_path, dehn_base = "u";
    int count = 10;
    auto* dehn = app.add_subcommand("dehn-sample", "fill a corpus of random loops")->fallthrough();
    dehn->add_option("--lengths", lengths);
    dehn->add_option("--count", count)->check(CLI::PositiveNumber);
    dehn->add_option("--base", dehn_base)->check(CLI::IsMember({"u", "r1", "r2", "r3"}));
    dehn->add_option("--csv", dehn_csv_path);

    std::string report_kind;
    auto* report = app.add_subcommand("report", "derived quantities")->fallthrough();
    report->add_option("kind", report_kind)->required()->check(CLI::IsMember({"exponent"}));

    ReproduceArgs ra;
    auto* repro = app.add_subcommand("reproduce-all", "all artifacts and the acceptance suite")->fallthrough();
    repro->add_option("--dir", ra.dir, "artifact directory");
    repro->add_option("--radius", ra.radius)->check(CLI::NonNegativeNumber);
    repro->add_option("--only", ra.only, "criterion ids")->check(CLI::Range(1, kCriteria));
    repro->add_flag("--skip-five-squares", ra.skip_five);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail_json("usage", e.what(), 2);
    }

    try {
        json out;
        bool ok = true;
        if (gamma->parsed()) {
            if (gbuild->parsed()) {
                ctx.command = "gamma build";
                out = gamma_build();
            } else {
                ctx.command = "gamma verify";
                VoltageAssignment va =
                    gamma_file.empty() ? default_voltages() : VoltageAssignment::from_json(load(ctx, gamma_file));
                ok = gamma_verify(va, out);
            }
        } else if (atlas->parsed()) {
            ctx.command = "atlas";
            out = atlas_summary(default_atlas(), atlas_full);
        } else if (dev->parsed()) {
            ctx.command = "develop --base " + base + " --radius " + std::to_string(radius);
            const Atlas& a = default_atlas();
            out = develop(a, base_vertex_for(parse_base_type(base), a.placement()), radius, ball_full);
        } else if (verify->parsed()) {
            ctx.command = "verify";
            ok = verify_ball_file(ctx, verify_path, out);
        } else if (scan_cmd->parsed()) {
            ctx.command = "scan " + scan_kind;
            ok = scan(ctx, scan_kind, sa, out);
        } else if (cert->parsed()) {
            ctx.command = "cert grid --rows " + std::to_string(rows) + " --cols " + std::to_string(cols);
            out = grid_certificate(build_catalogue(default_atlas()), cols, rows).to_json();
        } else if (fill_cmd->parsed()) {
            ctx.command = std::string("fill") + (fa.push ? " --push" : "");
            ok = fill(ctx, fa, out);
        } else if (dehn->parsed()) {
            ctx.command = "dehn-sample --lengths " + lengths + " --count " + std::to_string(count) + " --base " +
                          dehn_base;
            const Atlas& a = default_atlas();
            auto sample = dehn_sample(a, base_vertex_for(parse_base_type(dehn_base), a.placement()),
                                      parse_lengths(lengths), count, ctx.seed, ctx.threads);
            if (!dehn_csv_path.empty()) write_file(dehn_csv_path, dehn_csv(sample));
            DehnSummary s = summarize(sample);
            out = s.to_json();
            ok = s.failed == 0;
        } else if (report->parsed()) {
            ctx.command = "report exponent";
            out = exponent_report().to_json();
        } else if (repro->parsed()) {
            ctx.command = "reproduce-all";
            ok = reproduce_all(ctx, ra, out);
        }
        emit(ctx, out);
        return ok ? 0 : 1;
    } catch (const UsageError& e) {
        return fail_json("usage", e.what(), 2);
    } catch (const FormatError& e) {
        return fail_json(e.kind(), e.what(), 2);
    } catch (const Error& e) {
        return fail_json(e.kind(), e.what(), 1);
    } catch (const std::exception& e) {
        return fail_json("internal", e.what(), 1);
    }
}
