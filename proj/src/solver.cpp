#include "tsdyn/solver.hpp"

#include <cmath>
#include <sstream>

namespace tsdyn {

void ProblemSpec::validate() const {
    const std::size_t n = ts.size();
    const auto check_coeff = [&](const GridFn& f, const char* name) {
        if (!f.timescale().same_as(ts)) {
            throw Error(ErrorKind::GridMismatch, std::string(name) + " is sampled on a different time scale");
        }
        if (f.size() + 1 < n) {
            throw Error(ErrorKind::GridMismatch, std::string(name) + " must cover every point but the last");
        }
    };
    check_coeff(p, "p");
    check_coeff(q, "q");
    check_coeff(r, "r");
    if (t0_idx + 1 >= n) {
        throw Error(ErrorKind::OutOfKappa, "t0 must have a successor so that y^D(t0) exists", t0_idx);
    }
    if (a_idx >= n) {
        throw Error(ErrorKind::OutOfKappa, "anchor index outside the grid", a_idx);
    }
    if (!std::isfinite(A) || !std::isfinite(B)) {
        throw Error(ErrorKind::NonFiniteValue, "initial data must be finite");
    }
    (void)regressive_composite();
}

GridFn ProblemSpec::composite() const {
    std::vector<double> g(ts.size() - 1);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -p[i] + ts.mu(i) * q[i];
    return GridFn(ts, std::move(g));
}

RegressiveFn ProblemSpec::regressive_composite() const {
    return check_regressive(composite(), reg_tol);
}

ProblemSpec ProblemSpec::homogeneous() const {
    return with_forcing(GridFn::constant(ts, 0.0));
}

ProblemSpec ProblemSpec::with_initial(double a, double b) const {
    ProblemSpec s = *this;
    s.A = a;
    s.B = b;
    return s;
}

ProblemSpec ProblemSpec::with_forcing(GridFn forcing) const {
    ProblemSpec s = *this;
    s.r = std::move(forcing);
    return s;
}

IvpSolution step_ivp(const ProblemSpec& spec) {
    spec.validate();
    const auto& ts = spec.ts;
    const std::size_t n = ts.size();
    const std::size_t t0 = spec.t0_idx;
    std::vector<double> y(n), yd(n);
    y[t0] = spec.A;
    yd[t0] = spec.B;
    for (std::size_t i = t0; i + 1 < n; ++i) {
        const double mu = ts.mu(i);
        y[i + 1] = y[i] + mu * yd[i];
        yd[i + 1] = yd[i] + mu * (spec.r[i] - spec.p[i] * yd[i] - spec.q[i] * y[i]);
    }
    // Backward: solve [1, mu; -mu q, 1 - mu p] (y, yd)_i = (y, yd - mu r)_{i+1}.
    for (std::size_t i = t0; i-- > 0;) {
        const double mu = ts.mu(i);
        const double det = 1.0 - mu * spec.p[i] + mu * mu * spec.q[i];
        if (!(std::abs(det) >= spec.reg_tol)) {
            throw Error(ErrorKind::NotRegressive, "backward step is singular", i);
        }
        const double u = y[i + 1];
        const double v = yd[i + 1] - mu * spec.r[i];
        y[i] = ((1.0 - mu * spec.p[i]) * u - mu * v) / det;
        yd[i] = (mu * spec.q[i] * u + v) / det;
    }
    GridFn yfn(ts, std::move(y));
    GridFn ydelta = delta_derivative(yfn);
    return {std::move(yfn), std::move(ydelta)};
}

FundamentalPair fundamental_pair(const ProblemSpec& spec) {
    const ProblemSpec h = spec.homogeneous();
    return {step_ivp(h.with_initial(1.0, 0.0)), step_ivp(h.with_initial(0.0, 1.0))};
}

GridFn wronskian(const GridFn& y1, const GridFn& y2) {
    require_same_grid(y1, y2, "wronskian");
    const GridFn d1 = delta_derivative(y1);
    const GridFn d2 = delta_derivative(y2);
    const std::size_t n = std::min(d1.size(), d2.size());
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = y1[i] * d2[i] - y2[i] * d1[i];
    return GridFn(y1.timescale(), std::move(w));
}

namespace {

struct Differences {
    GridFn d1;
    GridFn d2;
};

Differences differences(const ProblemSpec& spec, const GridFn& y) {
    if (!y.timescale().same_as(spec.ts)) {
        throw Error(ErrorKind::GridMismatch, "solution lives on a different time scale");
    }
    if (y.size() != spec.ts.size()) {
        throw Error(ErrorKind::GridMismatch, "solution must cover the whole grid");
    }
    GridFn d1 = delta_derivative(y);
    GridFn d2 = delta_derivative(d1);
    return {std::move(d1), std::move(d2)};
}

}  // namespace

GridFn residual(const ProblemSpec& spec, const GridFn& y) {
    const auto [d1, d2] = differences(spec, y);
    std::vector<double> res(d2.size());
    for (std::size_t i = 0; i < res.size(); ++i) {
        res[i] = d2[i] + spec.p[i] * d1[i] + spec.q[i] * y[i] - spec.r[i];
    }
    return GridFn(spec.ts, std::move(res));
}

GridFn residual_scale(const ProblemSpec& spec, const GridFn& y) {
    const auto [d1, d2] = differences(spec, y);
    std::vector<double> s(d2.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = std::abs(d2[i]) + std::abs(spec.p[i] * d1[i]) + std::abs(spec.q[i] * y[i]) +
               std::abs(spec.r[i]);
    }
    return GridFn(spec.ts, std::move(s));
}

}  // namespace tsdyn
