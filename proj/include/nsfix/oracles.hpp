#pragma once

#include <functional>
#include <string>
#include <vector>

namespace nsfix {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Acceptance battery; each entry is self-contained and timed.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// "PASS|FAIL  [id] name (seconds) detail"
std::string format_result(const CriterionResult& r);

} // namespace nsfix
