#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsdyn/config.hpp"

namespace tsdyn::io {

inline constexpr const char* kVersion = "0.1.0";

enum class OutputFormat { Csv, Json };

// ---------------------------------------------------------------------------
// solve

struct ResultRow {
    double t = 0.0;
    double y = 0.0;
    std::optional<double> ydelta;
    std::optional<double> yd;
    std::optional<double> residual;
    /// norm/envelope/verdict describe the complementary part c1 y1 + c2 y2.
    std::optional<double> norm;
    std::optional<double> envelope;
    std::optional<bool> verdict;
};

struct ResultMetadata {
    std::string version = kVersion;
    std::string config_hash;
    std::string form;
    std::string grid_mode;
    std::string method;  // reduction_of_order | variation_of_parameters
    int basis = 0;       // basis solution fed to reduction of order, 0 for variation
    double c1 = 0.0;
    double c2 = 0.0;
    double reg_tol = 0.0;
    double tol = 0.0;
    double k = 1.0;
    std::optional<double> oracle_max_deviation;
};

struct ResultTable {
    ResultMetadata metadata;
    std::vector<ResultRow> rows;
};

ResultTable cmd_solve(const ProblemConfig& config);

/// CSV: header t,y,ydelta,yd,residual,norm,envelope,verdict; 17 significant
/// digits; absent cells empty. JSON: {"metadata": ..., "rows": [...]}.
std::string emit(const ResultTable& table, OutputFormat format);

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;
    double limit = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_passed() const;
};

/// Library errors become failed checks; parse/validation errors propagate.
VerifyReport cmd_verify(const ProblemConfig& config);
std::string format_verify(const VerifyReport& report);

// ---------------------------------------------------------------------------
// compare

struct CompareMethod {
    std::string name;
    std::string status;  // "ok" or the failure reason
    std::optional<std::vector<double>> raw;
    /// raw minus the homogeneous part matching its value and delta at t0.
    std::optional<std::vector<double>> matched;
};

struct ComparePair {
    std::string first;
    std::string second;
    double max_diff = 0.0;
    double diff_limit = 0.0;
    double homogeneous_residual = 0.0;
    double residual_limit = 0.0;
    bool passed = false;
};

struct CompareReport {
    std::vector<double> t;
    std::vector<CompareMethod> methods;
    std::vector<ComparePair> pairs;
    bool all_passed() const;
};

CompareReport cmd_compare(const ProblemConfig& config);
std::string emit(const CompareReport& report, OutputFormat format);

// ---------------------------------------------------------------------------
// bound

struct BoundResult {
    std::vector<double> t;  // t0 .. second-to-last point
    BoundReport report;
};

/// Growth bound for the homogeneous solution with the configured (A, B) at t0.
BoundResult cmd_bound(const ProblemConfig& config, BoundModeChoice mode);
std::string emit(const BoundResult& result, OutputFormat format);

}  // namespace tsdyn::io
