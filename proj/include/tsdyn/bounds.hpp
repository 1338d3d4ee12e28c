#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tsdyn/particular.hpp"

namespace tsdyn {

/// Relative slack used by every inequality check in this module.
inline constexpr double kBoundSlack = 1e-10;

/// sqrt(y^2 + (y^D)^2) on the kappa part.
GridFn sol_norm2(const GridFn& y, const GridFn& ydelta);

struct GronwallReport {
    bool hypothesis_holds = true;
    bool conclusion_holds = true;
    std::optional<std::size_t> first_hypothesis_violation;
    std::optional<std::size_t> first_conclusion_violation;
    GridFn envelope;  // v(t0) e_ell(t, t0)
};

/// Checks v^D <= ell v and v <= v(t0) e_ell(., t0) for t >= t0.
/// ell must be positively regressive.
GronwallReport gronwall_check(const GridFn& v, const RegressiveFn& ell, std::size_t t0_idx);

enum class BoundMode { ConstCoeff, VarCoeff };

struct BoundOptions {
    BoundMode mode = BoundMode::VarCoeff;
    /// VarCoeff bounds on |p| and |q|; default is the max over the checked window.
    std::optional<double> p1;
    std::optional<double> q1;
    ConstructionOptions construction{};
};

/**
 * Growth bound ||y(t)||_2 <= ||y(t0)||_2 e_k(t, t0) for t >= t0, k = 1 + |p| + |q|
 * (or 1 + p1 + q1 for variable coefficients). Entries are indexed from t0 to
 * the last point of the kappa part.
 */
struct BoundReport {
    std::size_t t0_idx = 0;
    double k = 1.0;
    std::vector<double> norm;
    std::vector<double> envelope;
    std::vector<double> margin;
    std::vector<bool> verdict;
    /// u^D <= (k (+) k) u with u = ||y||^2, one entry fewer than norm.
    std::vector<double> energy_slope;
    std::vector<double> energy_bound;
    std::vector<bool> energy_verdict;

    bool all_hold() const;
    double min_margin() const;
};

BoundReport growth_bound_check(const ProblemSpec& spec, const GridFn& y, const BoundOptions& opts = {});

struct NonmultiplicityReport {
    double dev_reduction = 0.0;  // stepping vs reduction-of-order assembly
    double dev_variation = 0.0;  // stepping vs variation-of-parameters assembly
    double scale = 1.0;          // max |y| over t >= t0 (1 if identically zero)
    int basis_used = 1;

    double max_relative() const;
};

/// Builds the IVP solution three ways and measures their disagreement for t >= t0.
NonmultiplicityReport nonmultiplicity_check(const ProblemSpec& spec, const ConstructionOptions& opts = {});

}  // namespace tsdyn
