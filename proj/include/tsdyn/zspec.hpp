#pragma once

#include <span>
#include <utility>
#include <vector>

#include "tsdyn/solver.hpp"

namespace tsdyn::z {

/// y(t+2) + alpha(t) y(t+1) + beta(t) y(t) = r(t) on the integer window [a, b].
/// Sequences are indexed by t - a.
struct ShiftFormSpec {
    long a = 0;
    long b = 0;
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> r;

    /// Shapes, and beta(t) != 0 for a <= t < b (throws ZeroBeta).
    void validate() const;
    /// Delta-form problem on TimeScale::integers(a, b).
    ProblemSpec to_delta_problem(long t0, double A, double B, long anchor) const;
};

struct DeltaCoefficients {
    std::vector<double> p;
    std::vector<double> q;
};

/// p = alpha + 2, q = alpha + beta + 1, so that 1 - p + q = beta.
DeltaCoefficients shift_to_delta(std::span<const double> alpha, std::span<const double> beta);

/**
 * Particular solution of D^2 y + p Dy + q y = r as the nested product-sum
 *
 *   yi(t) sum_{x=a}^{t-1} P(x) [ sum_{s=a}^{x-1} r(s) yi(s+1) / P(s+1) ] / (yi(x) yi(x+1)),
 *   P(x) = prod_{j=a}^{x-1} (1 - p(j) + q(j)),
 *
 * with the usual signed conventions left of the anchor. All sequences start
 * at `first`; the result has yi's length.
 */
std::vector<double> product_sum_particular(std::span<const double> p, std::span<const double> q,
                                           std::span<const double> r, long first, long anchor,
                                           std::span<const double> yi);

/// Same construction written with the shift-form products prod beta(j).
std::vector<double> shift_product_sum_particular(std::span<const double> alpha,
                                                 std::span<const double> beta,
                                                 std::span<const double> r, long first, long anchor,
                                                 std::span<const double> yi);

/// Roots of lambda^2 + 2 alpha lambda + beta: (-alpha - sqrt(alpha^2 - beta),
/// -alpha + sqrt(alpha^2 - beta)). Real distinct roots only.
std::pair<double, double> const_coeff_roots(double alpha, double beta);

enum class RootChoice { First, Second };

/// sum_{x=a}^{t-1} sum_{s=a}^{x-1} r(s) lambda^{t+s-2x} beta^{x-1-s} for t = a..b,
/// where the equation is y(t+2) + 2 alpha y(t+1) + beta y(t) = r(t).
/// r is indexed by s - a and must cover [a, b-2].
std::vector<double> const_coeff_particular(double alpha, double beta, std::span<const double> r,
                                           long a, long b, RootChoice which);

}  // namespace tsdyn::z
