#pragma once

#include <string>
#include <vector>

#include "coalflow/oracle.hpp"

namespace coalflow {

/// Largest n for the exact walk-zero and enumeration checks.
inline constexpr int kVerifyWalkLimit = 8;

struct VerifyOptions {
    int n = 1;
    /// Run the brute-force oracle checks (transform, conditional expectations).
    bool oracle = true;
    int oracle_limit = kOracleLimit;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Exact certification suite at horizon n. Every check is an exact equality
/// of rationals. Throws std::invalid_argument when n exceeds a bound
/// (oracle checks: oracle_limit; everything else: kVerifyWalkLimit).
std::vector<CheckResult> run_certification(VerifyOptions const& options);

// Individual checks, also used by the test suites.
CheckResult check_oracle_matches_formula(FullTransform const& transform);
CheckResult check_parseval_oracle(FullTransform const& transform);
CheckResult check_parseval_formula(int n);
CheckResult check_projection(int n);
CheckResult check_oracle_projection(FullTransform const& transform);
CheckResult check_cumulative(int n);
CheckResult check_conditional_closed_form(int n);
CheckResult check_walk_zero_law(int n);
CheckResult check_size_dp(int n);
CheckResult check_noise_dp(int n);
CheckResult check_gap_normalization(int max_gap);

}  // namespace coalflow
