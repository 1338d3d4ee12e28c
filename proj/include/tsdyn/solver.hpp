#pragma once

#include <cstddef>

#include "tsdyn/timescale.hpp"

namespace tsdyn {

/**
 * Initial value problem
 *
 *     y^DD + p y^D + q y = r   on the grid minus its last two points,
 *     y(t0) = A,  y^D(t0) = B.
 *
 * p, q and r must be defined at least on every point but the last.
 * a_idx is the anchor of the delta exponentials and antiderivatives.
 */
struct ProblemSpec {
    TimeScale ts;
    GridFn p;
    GridFn q;
    GridFn r;
    std::size_t t0_idx = 0;
    double A = 0.0;
    double B = 0.0;
    std::size_t a_idx = 0;
    double reg_tol = kDefaultRegTol;

    /// Throws on shape, index or regressivity violations.
    void validate() const;

    /// -p + mu q on the kappa part.
    GridFn composite() const;
    RegressiveFn regressive_composite() const;

    ProblemSpec homogeneous() const;
    ProblemSpec with_initial(double a, double b) const;
    ProblemSpec with_forcing(GridFn forcing) const;
};

struct IvpSolution {
    GridFn y;       // whole grid
    GridFn ydelta;  // kappa part; equals delta_derivative(y)
};

/// Exact recurrence solve. Left of t0 the one-step update is inverted; its
/// determinant is 1 + mu(-p + mu q).
IvpSolution step_ivp(const ProblemSpec& spec);

/// Homogeneous solutions with (y, y^D)(t0) = (1, 0) and (0, 1).
struct FundamentalPair {
    IvpSolution first;
    IvpSolution second;
};

FundamentalPair fundamental_pair(const ProblemSpec& spec);

/// y1 y2^D - y2 y1^D on the kappa part.
GridFn wronskian(const GridFn& y1, const GridFn& y2);

/// Defect y^DD + p y^D + q y - r on the grid minus its last two points.
GridFn residual(const ProblemSpec& spec, const GridFn& y);

/// Per-point magnitude |y^DD| + |p y^D| + |q y| + |r|, aligned with residual().
GridFn residual_scale(const ProblemSpec& spec, const GridFn& y);

}  // namespace tsdyn
