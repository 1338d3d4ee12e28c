#include "tsdyn/particular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsdyn {

namespace {

void require_full(const ProblemSpec& spec, const GridFn& y, const char* name) {
    if (!y.timescale().same_as(spec.ts)) {
        throw Error(ErrorKind::GridMismatch, std::string(name) + " lives on a different time scale");
    }
    if (y.size() != spec.ts.size()) {
        throw Error(ErrorKind::GridMismatch, std::string(name) + " must cover the whole grid");
    }
}

/// yi(t) yi(sigma t) on the kappa part, guarded against vanishing relative to
/// the local magnitude of yi over indices i-1 .. i+2.
std::vector<double> guarded_products(const GridFn& yi, double tol) {
    const auto& ts = yi.timescale();
    std::vector<double> d(ts.size() - 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double local = 0.0;
        for (std::size_t j = i == 0 ? 0 : i - 1; j <= std::min(i + 2, yi.size() - 1); ++j) {
            local = std::max(local, std::abs(yi[j]));
        }
        const double floor = tol * local * local;
        d[i] = yi[i] * yi[i + 1];
        if (!(std::abs(d[i]) >= floor) || d[i] == 0.0) {
            std::ostringstream os;
            os.precision(17);
            os << "y(t) y(sigma t) = " << d[i] << " at t=" << ts[i]
               << "; use the other basis solution or variation of parameters";
            throw Error(ErrorKind::ZeroDenominator, os.str(), i);
        }
    }
    return d;
}

GridFn times(const GridFn& a, const GridFn& b) {
    std::vector<double> v(std::min(a.size(), b.size()));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] * b[i];
    return GridFn(a.timescale(), std::move(v));
}

}  // namespace

double homogeneous_defect(const ProblemSpec& spec, const GridFn& y) {
    const ProblemSpec h = spec.homogeneous();
    const GridFn res = residual(h, y);
    const GridFn scale = residual_scale(h, y);
    const double s = scale.max_abs();
    const double m = res.max_abs();
    if (s == 0.0) return m;
    return m / s;
}

void require_homogeneous_solution(const ProblemSpec& spec, const GridFn& y,
                                  const ConstructionOptions& opts) {
    require_full(spec, y, "basis solution");
    const double defect = homogeneous_defect(spec, y);
    if (!(defect <= opts.homogeneous_tol)) {
        std::ostringstream os;
        os << "relative homogeneous defect " << defect << " exceeds " << opts.homogeneous_tol;
        throw Error(ErrorKind::NotHomogeneousSolution, os.str());
    }
}

GridFn reduction_order_particular(const ProblemSpec& spec, const GridFn& yi, std::size_t a_idx,
                                  const ConstructionOptions& opts) {
    spec.validate();
    require_homogeneous_solution(spec, yi, opts);
    const auto& ts = spec.ts;
    const std::size_t n = ts.size();
    const std::vector<double> denom = guarded_products(yi, opts.denominator_tol);
    const GridFn e = exp_delta(spec.regressive_composite(), a_idx);

    std::vector<double> inner(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) inner[s] = spec.r[s] * yi[s + 1] / e[s + 1];
    const GridFn I = cumulative_integral(GridFn(ts, std::move(inner)), a_idx);

    std::vector<double> outer(n - 1);
    for (std::size_t x = 0; x + 1 < n; ++x) outer[x] = e[x] * I[x] / denom[x];
    const GridFn v = cumulative_integral(GridFn(ts, std::move(outer)), a_idx);
    return times(yi, v);
}

GridFn roo_second_solution(const ProblemSpec& spec, const GridFn& y1, std::size_t a_idx,
                           const ConstructionOptions& opts) {
    const ProblemSpec h = spec.homogeneous();
    h.validate();
    require_homogeneous_solution(h, y1, opts);
    const auto& ts = h.ts;
    const std::vector<double> denom = guarded_products(y1, opts.denominator_tol);
    const GridFn e = exp_delta(h.regressive_composite(), a_idx);
    // The inner antiderivative of the general formula is fixed to the constant 1.
    std::vector<double> integrand(ts.size() - 1);
    for (std::size_t x = 0; x < integrand.size(); ++x) integrand[x] = e[x] / denom[x];
    const GridFn v = cumulative_integral(GridFn(ts, std::move(integrand)), a_idx);
    return times(y1, v);
}

GridFn variation_particular(const ProblemSpec& spec, const GridFn& y1, const GridFn& y2,
                            std::size_t a_idx, const ConstructionOptions& opts) {
    spec.validate();
    require_homogeneous_solution(spec, y1, opts);
    require_homogeneous_solution(spec, y2, opts);
    const auto& ts = spec.ts;
    const std::size_t n = ts.size();
    const GridFn W = wronskian(y1, y2);
    const GridFn d1 = delta_derivative(y1);
    const GridFn d2 = delta_derivative(y2);
    // W lives on the kappa part; an anchor at the last point borrows its neighbour.
    const std::size_t w_idx = std::min(a_idx, n - 2);
    const double bound = (std::abs(y1[w_idx]) + std::abs(d1[w_idx])) * (std::abs(y2[w_idx]) + std::abs(d2[w_idx]));
    if (W[w_idx] == 0.0 || !(std::abs(W[w_idx]) >= opts.denominator_tol * bound)) {
        std::ostringstream os;
        os.precision(17);
        os << "Wronskian " << W[w_idx] << " at t=" << ts[w_idx];
        throw Error(ErrorKind::SingularWronskian, os.str(), w_idx);
    }
    // W^sigma from Abel's identity: same values as the pointwise Wronskian,
    // without its cancellation when y1 and y2 grow apart.
    const GridFn e = exp_delta(spec.regressive_composite(), w_idx);
    std::vector<double> w_sigma(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) w_sigma[s] = W[w_idx] * e[s + 1];

    std::vector<double> f1(n - 1), f2(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) {
        f1[s] = y1[s + 1] * spec.r[s] / w_sigma[s];
        f2[s] = y2[s + 1] * spec.r[s] / w_sigma[s];
    }
    const GridFn J1 = cumulative_integral(GridFn(ts, std::move(f1)), a_idx);
    const GridFn J2 = cumulative_integral(GridFn(ts, std::move(f2)), a_idx);
    std::vector<double> yd(n);
    for (std::size_t i = 0; i < n; ++i) yd[i] = y2[i] * J1[i] - y1[i] * J2[i];
    return GridFn(ts, std::move(yd));
}

SolutionBundle assemble_general(const ProblemSpec& spec, const GridFn& y1, const GridFn& y2,
                                const GridFn& yd, const ConstructionOptions& opts) {
    spec.validate();
    require_full(spec, y1, "y1");
    require_full(spec, y2, "y2");
    require_full(spec, yd, "yd");
    const std::size_t t0 = spec.t0_idx;
    GridFn y1d = delta_derivative(y1);
    GridFn y2d = delta_derivative(y2);
    const GridFn ydd = delta_derivative(yd);
    GridFn W = wronskian(y1, y2);

    const double w0 = W[t0];
    const double bound = (std::abs(y1[t0]) + std::abs(y1d[t0])) * (std::abs(y2[t0]) + std::abs(y2d[t0]));
    if (w0 == 0.0 || !(std::abs(w0) >= opts.denominator_tol * bound)) {
        throw Error(ErrorKind::SingularWronskian, "basis is dependent at t0", t0);
    }
    const double rhs1 = spec.A - yd[t0];
    const double rhs2 = spec.B - ydd[t0];
    const double c1 = (rhs1 * y2d[t0] - y2[t0] * rhs2) / w0;
    const double c2 = (y1[t0] * rhs2 - y1d[t0] * rhs1) / w0;

    GridFn y = c1 * y1 + c2 * y2 + yd;
    GridFn ydelta = delta_derivative(y);
    GridFn res = residual(spec, y);
    return SolutionBundle{y1,     y2, std::move(y1d),    std::move(y2d),   std::move(W),   yd, c1, c2,
                          std::move(y), std::move(ydelta), std::move(res)};
}

SigmaConversion convert_sigma_form(const GridFn& alpha, const GridFn& beta, double reg_tol) {
    require_same_grid(alpha, beta, "sigma-form conversion");
    const auto& ts = alpha.timescale();
    if (alpha.size() + 1 < ts.size() || beta.size() + 1 < ts.size()) {
        throw Error(ErrorKind::GridMismatch, "alpha and beta must cover every point but the last");
    }
    (void)check_regressive(alpha, reg_tol);
    std::vector<double> p(ts.size() - 1), q(ts.size() - 1);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double mu = ts.mu(i);
        const double denom = 1.0 + mu * alpha[i];
        p[i] = (alpha[i] + mu * beta[i]) / denom;
        q[i] = beta[i] / denom;
    }
    return {GridFn(ts, std::move(p)), GridFn(ts, std::move(q))};
}

GridFn convert_sigma_forcing(const GridFn& alpha, const GridFn& r, double reg_tol) {
    require_same_grid(alpha, r, "sigma-form forcing");
    const auto& ts = alpha.timescale();
    if (alpha.size() + 1 < ts.size() || r.size() + 1 < ts.size()) {
        throw Error(ErrorKind::GridMismatch, "alpha and r must cover every point but the last");
    }
    (void)check_regressive(alpha, reg_tol);
    std::vector<double> out(ts.size() - 1);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r[i] / (1.0 + ts.mu(i) * alpha[i]);
    return GridFn(ts, std::move(out));
}

GridFn sigma_form_residual(const GridFn& alpha, const GridFn& beta, const GridFn& r, const GridFn& y) {
    require_same_grid(alpha, y, "sigma-form residual");
    require_same_grid(beta, y, "sigma-form residual");
    require_same_grid(r, y, "sigma-form residual");
    const GridFn d1 = delta_derivative(y);
    const GridFn d2 = delta_derivative(d1);
    std::vector<double> res(d2.size());
    for (std::size_t i = 0; i < res.size(); ++i) {
        res[i] = d2[i] + alpha[i] * d1[i + 1] + beta[i] * y[i + 1] - r[i];
    }
    return GridFn(y.timescale(), std::move(res));
}

}  // namespace tsdyn
