#pragma once

#include <string>
#include <vector>

namespace okdv {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail; // first failing monomial, or empty
};

struct Report {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

} // namespace okdv
