#pragma once

#include <map>
#include <string>
#include <vector>

namespace lgeo {

struct SubCheck {
    std::string name;
    double measured = 0.0;
    std::string cmp;     // "<=", ">=", "<", ">"
    double bound = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = true;
    double seconds = 0.0;
    std::vector<SubCheck> checks;

    void check(const std::string& name, double measured, const std::string& cmp, double bound);
};

/// Run one acceptance criterion (1..12). Tolerances and thresholds are pinned
/// in code; the seed controls sampled pairs and directions.
CriterionResult run_criterion(int id, unsigned seed = 20250810);

int criterion_count();
std::string criterion_name(int id);

/// Named verification suites exposed by the CLI; each maps to criterion ids.
const std::map<std::string, std::vector<int>>& verify_suites();

} // namespace lgeo
