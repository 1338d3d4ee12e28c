#include "tsdyn/zspec.hpp"

#include <cmath>
#include <sstream>

namespace tsdyn::z {

void ShiftFormSpec::validate() const {
    if (b - a < 2) {
        throw Error(ErrorKind::TooFewPoints, "shift-form window needs b - a >= 2");
    }
    const auto need = static_cast<std::size_t>(b - a);
    if (alpha.size() < need || beta.size() < need || r.size() < need) {
        throw Error(ErrorKind::GridMismatch, "alpha, beta and r must cover [a, b-1]");
    }
    for (std::size_t i = 0; i < need; ++i) {
        if (beta[i] == 0.0) {
            throw Error(ErrorKind::ZeroBeta,
                        "beta(t) = 0 at t=" + std::to_string(a + static_cast<long>(i)) +
                            "; the shift form requires beta != 0",
                        i);
        }
    }
}

ProblemSpec ShiftFormSpec::to_delta_problem(long t0, double A, double B, long anchor) const {
    validate();
    const TimeScale ts = TimeScale::integers(a, b);
    const auto need = static_cast<std::size_t>(b - a);
    const DeltaCoefficients c = shift_to_delta(std::span(alpha).first(need), std::span(beta).first(need));
    if (t0 < a || t0 > b || anchor < a || anchor > b) {
        throw Error(ErrorKind::OutOfKappa, "t0 and anchor must lie in the window");
    }
    ProblemSpec spec{ts,
                     GridFn(ts, c.p),
                     GridFn(ts, c.q),
                     GridFn(ts, std::vector<double>(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(need))),
                     static_cast<std::size_t>(t0 - a),
                     A,
                     B,
                     static_cast<std::size_t>(anchor - a)};
    spec.validate();
    return spec;
}

DeltaCoefficients shift_to_delta(std::span<const double> alpha, std::span<const double> beta) {
    if (alpha.size() != beta.size()) {
        throw Error(ErrorKind::GridMismatch, "alpha and beta lengths differ");
    }
    DeltaCoefficients out;
    out.p.resize(alpha.size());
    out.q.resize(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out.p[i] = alpha[i] + 2.0;
        out.q[i] = alpha[i] + beta[i] + 1.0;
    }
    return out;
}

namespace {

/// prod_{j=anchor}^{x-1} c(j) for every x in the window (reciprocal left of anchor).
std::vector<double> signed_products(std::span<const double> c, std::size_t anchor, std::size_t n) {
    std::vector<double> P(n, 1.0);
    for (std::size_t x = anchor + 1; x < n; ++x) P[x] = P[x - 1] * c[x - 1];
    for (std::size_t x = anchor; x-- > 0;) P[x] = P[x + 1] / c[x];
    return P;
}

/// sum_{x=anchor}^{t-1} f(x), negated sum over [t, anchor) when t < anchor.
double signed_sum(const std::vector<double>& f, std::size_t anchor, std::size_t t) {
    double s = 0.0;
    if (t >= anchor) {
        for (std::size_t x = anchor; x < t; ++x) s += f[x];
    } else {
        for (std::size_t x = t; x < anchor; ++x) s -= f[x];
    }
    return s;
}

std::vector<double> product_sum(std::span<const double> c, std::span<const double> r, long first,
                                long anchor, std::span<const double> yi) {
    const std::size_t n = yi.size();
    if (n < 3) throw Error(ErrorKind::TooFewPoints, "window needs at least 3 points");
    if (c.size() + 1 < n || r.size() + 1 < n) {
        throw Error(ErrorKind::GridMismatch, "coefficients must cover every point but the last");
    }
    if (anchor < first || anchor >= first + static_cast<long>(n)) {
        throw Error(ErrorKind::OutOfKappa, "anchor outside the window");
    }
    const auto a = static_cast<std::size_t>(anchor - first);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (c[j] == 0.0) {
            throw Error(ErrorKind::NotRegressive,
                        "regressivity factor vanishes at t=" + std::to_string(first + static_cast<long>(j)), j);
        }
        if (yi[j] * yi[j + 1] == 0.0) {
            throw Error(ErrorKind::ZeroDenominator,
                        "y(t) y(t+1) = 0 at t=" + std::to_string(first + static_cast<long>(j)), j);
        }
    }
    const std::vector<double> P = signed_products(c, a, n);

    std::vector<double> inner_terms(n - 1);
    for (std::size_t s = 0; s + 1 < n; ++s) inner_terms[s] = r[s] * yi[s + 1] / P[s + 1];

    std::vector<double> outer_terms(n - 1);
    for (std::size_t x = 0; x + 1 < n; ++x) {
        outer_terms[x] = P[x] * signed_sum(inner_terms, a, x) / (yi[x] * yi[x + 1]);
    }
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) out[t] = yi[t] * signed_sum(outer_terms, a, t);
    return out;
}

}  // namespace

std::vector<double> product_sum_particular(std::span<const double> p, std::span<const double> q,
                                           std::span<const double> r, long first, long anchor,
                                           std::span<const double> yi) {
    if (p.size() != q.size()) throw Error(ErrorKind::GridMismatch, "p and q lengths differ");
    std::vector<double> c(p.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = 1.0 - p[j] + q[j];
    return product_sum(c, r, first, anchor, yi);
}

std::vector<double> shift_product_sum_particular(std::span<const double> alpha,
                                                 std::span<const double> beta,
                                                 std::span<const double> r, long first, long anchor,
                                                 std::span<const double> yi) {
    if (alpha.size() + 1 < yi.size()) {
        throw Error(ErrorKind::GridMismatch, "alpha must cover every point but the last");
    }
    for (std::size_t j = 0; j + 1 < yi.size() && j < beta.size(); ++j) {
        if (beta[j] == 0.0) {
            throw Error(ErrorKind::ZeroBeta, "beta(t) = 0 at t=" + std::to_string(first + static_cast<long>(j)), j);
        }
    }
    return product_sum(beta, r, first, anchor, yi);
}

std::pair<double, double> const_coeff_roots(double alpha, double beta) {
    if (beta == 0.0) throw Error(ErrorKind::ZeroBeta, "constant-coefficient form needs beta != 0");
    const double disc = alpha * alpha - beta;
    if (std::abs(disc) <= 1e-12 * std::max(alpha * alpha, std::abs(beta))) {
        throw Error(ErrorKind::DegenerateRoots, "alpha^2 == beta gives a double root");
    }
    if (disc < 0.0) throw Error(ErrorKind::ComplexRoots, "alpha^2 < beta gives complex roots");
    const double root = std::sqrt(disc);
    // Compute the larger-magnitude root without cancellation, the other from beta.
    if (alpha >= 0.0) {
        const double l1 = -alpha - root;
        return {l1, beta / l1};
    }
    const double l2 = -alpha + root;
    return {beta / l2, l2};
}

std::vector<double> const_coeff_particular(double alpha, double beta, std::span<const double> r,
                                           long a, long b, RootChoice which) {
    const auto [l1, l2] = const_coeff_roots(alpha, beta);
    const double lambda = which == RootChoice::First ? l1 : l2;
    if (b - a < 2) throw Error(ErrorKind::TooFewPoints, "window needs b - a >= 2");
    const auto n = static_cast<std::size_t>(b - a + 1);
    if (r.size() + 2 < n) throw Error(ErrorKind::GridMismatch, "r must cover [a, b-2]");

    // G(x) = sum_{s<x} r(s) lambda^{s-x} beta^{x-1-s}; yd(t) = sum_{x<t} lambda^{t-x} G(x).
    std::vector<double> G(n, 0.0);
    for (std::size_t x = 1; x < n; ++x) {
        double acc = 0.0;
        for (std::size_t s = 0; s < x; ++s) {
            const int lam_exp = static_cast<int>(s) - static_cast<int>(x);
            const int beta_exp = static_cast<int>(x) - 1 - static_cast<int>(s);
            acc += r[s] * std::pow(lambda, lam_exp) * std::pow(beta, beta_exp);
        }
        G[x] = acc;
    }
    std::vector<double> out(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t x = 0; x < t; ++x) acc += std::pow(lambda, static_cast<int>(t - x)) * G[x];
        out[t] = acc;
    }
    return out;
}

}  // namespace tsdyn::z
