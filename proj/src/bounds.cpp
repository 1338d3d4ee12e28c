#include "tsdyn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsdyn {

GridFn sol_norm2(const GridFn& y, const GridFn& ydelta) {
    require_same_grid(y, ydelta, "sol_norm2");
    if (y.size() < ydelta.size()) {
        throw Error(ErrorKind::GridMismatch, "sol_norm2: y is shorter than its derivative");
    }
    std::vector<double> n(ydelta.size());
    for (std::size_t i = 0; i < n.size(); ++i) n[i] = std::hypot(y[i], ydelta[i]);
    return GridFn(y.timescale(), std::move(n));
}

GronwallReport gronwall_check(const GridFn& v, const RegressiveFn& ell, std::size_t t0_idx) {
    require_same_grid(v, ell.fn(), "gronwall_check");
    if (!ell.positively_regressive()) {
        throw Error(ErrorKind::NotRegressive, "Gronwall rate must satisfy 1 + mu*ell > 0");
    }
    const auto& ts = v.timescale();
    if (t0_idx >= v.size()) {
        throw Error(ErrorKind::OutOfKappa, "t0 outside the function's domain", t0_idx);
    }
    const GridFn e = exp_delta(ell, t0_idx);
    std::vector<double> env(v.size());
    for (std::size_t i = 0; i < env.size(); ++i) env[i] = v[t0_idx] * e[i];

    GronwallReport rep{true, true, std::nullopt, std::nullopt, GridFn(ts, env)};
    for (std::size_t i = t0_idx; i + 1 < v.size(); ++i) {
        const double vd = (v[i + 1] - v[i]) / ts.mu(i);
        const double rhs = ell[i] * v[i];
        if (vd > rhs + kBoundSlack * (std::abs(rhs) + std::abs(vd))) {
            rep.hypothesis_holds = false;
            rep.first_hypothesis_violation = i;
            break;
        }
    }
    for (std::size_t i = t0_idx; i < v.size(); ++i) {
        if (v[i] > env[i] + kBoundSlack * std::abs(env[i])) {
            rep.conclusion_holds = false;
            rep.first_conclusion_violation = i;
            break;
        }
    }
    return rep;
}

bool BoundReport::all_hold() const {
    return std::all_of(verdict.begin(), verdict.end(), [](bool b) { return b; }) &&
           std::all_of(energy_verdict.begin(), energy_verdict.end(), [](bool b) { return b; });
}

double BoundReport::min_margin() const {
    double m = std::numeric_limits<double>::infinity();
    for (double x : margin) m = std::min(m, x);
    return m;
}

namespace {

double window_max_abs(const GridFn& f, std::size_t from, std::size_t to_exclusive) {
    double m = 0.0;
    for (std::size_t i = from; i < to_exclusive; ++i) m = std::max(m, std::abs(f[i]));
    return m;
}

bool is_constant(const GridFn& f, std::size_t n) {
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(f[i] - f[0]) > 1e-12 * std::max(1.0, std::abs(f[0]))) return false;
    }
    return true;
}

}  // namespace

BoundReport growth_bound_check(const ProblemSpec& spec, const GridFn& y, const BoundOptions& opts) {
    const ProblemSpec h = spec.homogeneous();
    h.validate();
    require_homogeneous_solution(h, y, opts.construction);
    const auto& ts = h.ts;
    const std::size_t n = ts.size();
    const std::size_t t0 = h.t0_idx;
    // Coefficients enter the equation on the grid minus its last two points.
    const std::size_t eq_end = n - 2;

    double k = 1.0;
    if (opts.mode == BoundMode::ConstCoeff) {
        if (!is_constant(h.p, eq_end) || !is_constant(h.q, eq_end)) {
            throw Error(ErrorKind::ValidationError, "constant-coefficient bound needs constant p and q");
        }
        k = 1.0 + std::abs(h.p[0]) + std::abs(h.q[0]);
    } else {
        const double pmax = window_max_abs(h.p, t0, eq_end);
        const double qmax = window_max_abs(h.q, t0, eq_end);
        const double p1 = opts.p1.value_or(pmax);
        const double q1 = opts.q1.value_or(qmax);
        if (p1 < pmax || q1 < qmax) {
            throw Error(ErrorKind::ValidationError, "supplied p1/q1 do not bound |p|/|q| on the window");
        }
        k = 1.0 + p1 + q1;
    }

    const GridFn yd = delta_derivative(y);
    const GridFn norm = sol_norm2(y, yd);

    BoundReport rep;
    rep.t0_idx = t0;
    rep.k = k;
    double ek = 1.0;
    for (std::size_t i = t0; i < norm.size(); ++i) {
        const double env = norm[t0] * ek;
        rep.norm.push_back(norm[i]);
        rep.envelope.push_back(env);
        rep.margin.push_back(env - norm[i]);
        rep.verdict.push_back(norm[i] <= env * (1.0 + kBoundSlack));
        if (i + 1 < n) ek *= 1.0 + ts.mu(i) * k;
    }
    for (std::size_t i = t0; i + 1 < norm.size(); ++i) {
        const double mu = ts.mu(i);
        const double u = norm[i] * norm[i];
        const double u_next = norm[i + 1] * norm[i + 1];
        const double slope = (u_next - u) / mu;
        const double bound = circle_plus(k, k, mu) * u;
        rep.energy_slope.push_back(slope);
        rep.energy_bound.push_back(bound);
        rep.energy_verdict.push_back(slope <= bound + kBoundSlack * (bound + std::abs(slope)));
    }
    return rep;
}

double NonmultiplicityReport::max_relative() const {
    return std::max(dev_reduction, dev_variation) / scale;
}

NonmultiplicityReport nonmultiplicity_check(const ProblemSpec& spec, const ConstructionOptions& opts) {
    const IvpSolution direct = step_ivp(spec);
    const FundamentalPair fp = fundamental_pair(spec);
    const GridFn& y1 = fp.first.y;
    const GridFn& y2 = fp.second.y;

    NonmultiplicityReport rep;
    std::optional<GridFn> yd_ro;
    try {
        yd_ro = reduction_order_particular(spec, y1, spec.a_idx, opts);
        rep.basis_used = 1;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ZeroDenominator) throw;
        yd_ro = reduction_order_particular(spec, y2, spec.a_idx, opts);
        rep.basis_used = 2;
    }
    const GridFn yd_vop = variation_particular(spec, y1, y2, spec.a_idx, opts);
    const SolutionBundle via_ro = assemble_general(spec, y1, y2, *yd_ro, opts);
    const SolutionBundle via_vop = assemble_general(spec, y1, y2, yd_vop, opts);

    double scale = 0.0;
    for (std::size_t i = spec.t0_idx; i < direct.y.size(); ++i) {
        scale = std::max(scale, std::abs(direct.y[i]));
        rep.dev_reduction = std::max(rep.dev_reduction, std::abs(direct.y[i] - via_ro.y[i]));
        rep.dev_variation = std::max(rep.dev_variation, std::abs(direct.y[i] - via_vop.y[i]));
    }
    rep.scale = scale > 0.0 ? scale : 1.0;
    return rep;
}

}  // namespace tsdyn
