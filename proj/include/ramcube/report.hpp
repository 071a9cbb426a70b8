#ifndef RAMCUBE_REPORT_HPP
#define RAMCUBE_REPORT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace ramcube {

// Workload of the acceptance suite.  Defaults are the full sizes.
struct AcceptanceOptions {
    uint64_t seed = 0;
    int threads = 1;
    int ball_radius = 5;
    long four_point_samples = 10'000'000;
    int pool_size = 3000;
    long triangle_samples = 100'000;
    long median_triples = 10'000;
    std::vector<int> corpus_lengths{8, 16, 24, 32, 40, 48, 56, 64};
    int corpus_per_length = 17;  // per length and root base (u, r1, r2, r3)
    bool five_square_search = true;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string summary;
    nlohmann::ordered_json data;
    double seconds = 0;

    std::string line() const;  // "criterion <id> PASS|FAIL <title>: <summary>"
};

constexpr int kCriteria = 12;

// Tolerances fixed by the acceptance contract.
constexpr double kExponentTarget = 95.90;
constexpr double kExponentTolerance = 0.01;
constexpr double kExponentCeiling = 96.0;
constexpr double kGammaSeconds = 60.0;

CriterionResult check_criterion(int id, const AcceptanceOptions& o);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o, const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& each = {});

}  // namespace ramcube

#endif
