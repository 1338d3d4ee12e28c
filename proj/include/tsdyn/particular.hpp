#pragma once

#include <cstddef>

#include "tsdyn/solver.hpp"

namespace tsdyn {

struct ConstructionOptions {
    /// Max relative homogeneous defect accepted for a supplied basis solution.
    double homogeneous_tol = 1e-8;
    /// Relative floor for |y y^sigma| (against the local max |y|^2) and for |W(a)|.
    double denominator_tol = 1e-12;
};

/// max |residual| / max residual_scale of y against the homogeneous equation.
double homogeneous_defect(const ProblemSpec& spec, const GridFn& y);

/// Throws NotHomogeneousSolution when homogeneous_defect exceeds the tolerance.
void require_homogeneous_solution(const ProblemSpec& spec, const GridFn& y,
                                  const ConstructionOptions& opts = {});

/**
 * Particular solution by reduction of order from one homogeneous solution yi:
 *
 *   yd(t) = yi(t) * int_a^t  e_g(x,a) I(x) / (yi(x) yi(sigma x))  Dx,
 *   I(x)  = int_a^x  r(s) yi(sigma s) / e_g(sigma s, a)  Ds,
 *
 * with g = -p + mu q. Both antiderivatives vanish at a, so yd(a) = 0.
 * Throws ZeroDenominator where yi yi^sigma vanishes.
 */
GridFn reduction_order_particular(const ProblemSpec& spec, const GridFn& yi, std::size_t a_idx,
                                  const ConstructionOptions& opts = {});

/// Second homogeneous solution y1 * int_a^t e_g / (y1 y1^sigma); its Wronskian
/// with y1 is e_g(., a).
GridFn roo_second_solution(const ProblemSpec& spec, const GridFn& y1, std::size_t a_idx,
                           const ConstructionOptions& opts = {});

/**
 * Variation of parameters:
 *   yd = y2 int_a^t y1^sigma r / W^sigma - y1 int_a^t y2^sigma r / W^sigma.
 * W^sigma is taken as W(a) e_g(sigma t, a), Abel's identity; only W(a) is
 * guarded against singularity.
 */
GridFn variation_particular(const ProblemSpec& spec, const GridFn& y1, const GridFn& y2,
                            std::size_t a_idx, const ConstructionOptions& opts = {});

struct SolutionBundle {
    GridFn y1, y2;
    GridFn y1d, y2d;
    GridFn W;
    GridFn yd;
    double c1 = 0.0;
    double c2 = 0.0;
    GridFn y;
    GridFn ydelta;
    GridFn residual;
};

/// c1 y1 + c2 y2 + yd matched to (A, B) at t0.
SolutionBundle assemble_general(const ProblemSpec& spec, const GridFn& y1, const GridFn& y2,
                                const GridFn& yd, const ConstructionOptions& opts = {});

/// Standard-form coefficients of y^DD + alpha y^{D sigma} + beta y^sigma = r.
struct SigmaConversion {
    GridFn p;
    GridFn q;
};

SigmaConversion convert_sigma_form(const GridFn& alpha, const GridFn& beta,
                                   double reg_tol = kDefaultRegTol);

/// The forcing divides by 1 + mu alpha as well.
GridFn convert_sigma_forcing(const GridFn& alpha, const GridFn& r, double reg_tol = kDefaultRegTol);

/// y^DD + alpha y^{D sigma} + beta y^sigma - r on the grid minus its last two points.
GridFn sigma_form_residual(const GridFn& alpha, const GridFn& beta, const GridFn& r, const GridFn& y);

}  // namespace tsdyn
