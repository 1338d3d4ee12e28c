#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsdyn/bounds.hpp"
#include "tsdyn/zspec.hpp"

namespace tsdyn::io {

enum class FamilyKind { Integers, HZ, Quantum, Reals, Explicit };

struct TimescaleConfig {
    FamilyKind family = FamilyKind::Integers;
    double a = 0.0;
    double b = 0.0;
    double h = 0.0;
    int k_max = 0;
    std::vector<double> points;

    bool operator==(const TimescaleConfig&) const = default;
};

enum class CoefficientKind { Constant, Poly, Table };

/// One coefficient symbol: a constant, a polynomial in t (c0 + c1 t + ...),
/// or a table of (t, value) pairs on grid points.
struct Coefficient {
    CoefficientKind kind = CoefficientKind::Constant;
    double constant = 0.0;
    std::vector<double> poly;
    std::vector<std::pair<double, double>> table;

    bool operator==(const Coefficient&) const = default;
};

enum class EquationForm { Delta, Shift, Sigma };
enum class BasisChoice { Auto, First, Second };
enum class BoundModeChoice { Auto, Const, Var };

struct SolverConfig {
    BasisChoice basis = BasisChoice::Auto;
    bool oracle = true;
    double reg_tol = kDefaultRegTol;
    double tol = 1e-9;
    double homogeneous_tol = 1e-8;
    BoundModeChoice bound_mode = BoundModeChoice::Auto;

    bool operator==(const SolverConfig&) const = default;
};

struct ProblemConfig {
    TimescaleConfig timescale;
    EquationForm form = EquationForm::Delta;
    std::map<std::string, Coefficient> coefficients;
    std::optional<double> t0;
    std::optional<double> anchor;
    double A = 0.0;
    double B = 0.0;
    SolverConfig solver;

    bool operator==(const ProblemConfig&) const = default;
};

/**
 * Parses the sectioned key=value format:
 *
 *     [timescale]   family = integers|hz|quantum|reals|explicit, a, b, h, k_max, points
 *     [coefficients] form = delta|shift|sigma, <sym>.constant|.poly|.table
 *     [initial]     t0, a, A, B
 *     [solver]      basis, oracle, reg_tol, tol, homogeneous_tol, bound_mode
 *
 * '#' starts a comment. Throws Error(ParseError) for malformed lines and
 * Error(ValidationError) for semantic problems; messages carry line numbers.
 */
ProblemConfig parse_problem(std::string_view text);

/// Canonical text form; parse_problem(echo_config(c)) == c.
std::string echo_config(const ProblemConfig& config);

/// FNV-1a 64-bit hash of the canonical text, as 16 hex digits.
std::string config_hash(const ProblemConfig& config);

TimeScale build_timescale(const TimescaleConfig& config);

/// Samples a coefficient on the grid. Tables yield values on the points they
/// list, which must include every point but the last.
GridFn evaluate_coefficient(const Coefficient& c, const TimeScale& ts, const std::string& name);

struct BuiltProblem {
    ProblemSpec spec;
    EquationForm form = EquationForm::Delta;
    /// Present for shift and sigma forms.
    std::optional<GridFn> alpha;
    std::optional<GridFn> beta;
    std::optional<GridFn> raw_r;
    std::optional<z::ShiftFormSpec> shift;
};

/// Builds the delta-form problem; shift and sigma forms are converted.
BuiltProblem build_problem(const ProblemConfig& config);

/// Same problem on the same family with mesh width h (continuum configs only).
ProblemConfig with_mesh(const ProblemConfig& config, double h);

}  // namespace tsdyn::io
