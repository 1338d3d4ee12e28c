#pragma once

// Independent oracles and seeded generators shared by the test binaries.
// Nothing here calls into the library's solvers: recurrences and products
// are written out from the equation itself.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tsdyn/bounds.hpp"

namespace tsdyn::testing {

// ---------------------------------------------------------------------------
// Oracles

/// Solves y^DD + p y^D + q y = r with y(t0) = A, y^D(t0) = B directly from
/// the three-point form of the equation. Left of t0 the scalar three-point
/// relation is solved for the earliest value.
inline std::vector<double> three_point_solve(const std::vector<double>& t, const std::vector<double>& p,
                                             const std::vector<double>& q, const std::vector<double>& r,
                                             std::size_t t0, double A, double B) {
    const std::size_t n = t.size();
    std::vector<double> y(n, 0.0);
    const auto mu = [&](std::size_t i) { return t[i + 1] - t[i]; };
    y[t0] = A;
    y[t0 + 1] = A + mu(t0) * B;
    for (std::size_t i = t0; i + 2 < n; ++i) {
        const double m0 = mu(i);
        const double m1 = mu(i + 1);
        const double d0 = (y[i + 1] - y[i]) / m0;
        const double d1 = d0 + m0 * (r[i] - p[i] * d0 - q[i] * y[i]);
        y[i + 2] = y[i + 1] + m1 * d1;
    }
    for (std::size_t i = t0; i-- > 0;) {
        const double m0 = mu(i);
        const double m1 = mu(i + 1);
        const double d1 = (y[i + 2] - y[i + 1]) / m1;
        const double coeff = (1.0 - m0 * p[i] + m0 * m0 * q[i]) / (m0 * m0);
        const double rhs = r[i] - d1 / m0 + y[i + 1] / (m0 * m0) - p[i] * y[i + 1] / m0;
        y[i] = rhs / coeff;
    }
    return y;
}

/// prod (1 + mu g) from the anchor, divided out to the left of it.
inline std::vector<double> exp_product(const std::vector<double>& t, const std::vector<double>& g,
                                       std::size_t anchor) {
    std::vector<double> e(t.size(), 1.0);
    for (std::size_t i = anchor; i + 1 < t.size(); ++i) e[i + 1] = e[i] * (1.0 + (t[i + 1] - t[i]) * g[i]);
    for (std::size_t i = anchor; i-- > 0;) e[i] = e[i + 1] / (1.0 + (t[i + 1] - t[i]) * g[i]);
    return e;
}

/// Raw shift recurrence y(t+2) = r(t) - alpha(t) y(t+1) - beta(t) y(t).
inline std::vector<double> shift_recurrence(const std::vector<double>& alpha, const std::vector<double>& beta,
                                            const std::vector<double>& r, double y0, double y1, std::size_t n) {
    std::vector<double> y(n);
    y[0] = y0;
    y[1] = y1;
    for (std::size_t i = 0; i + 2 < n; ++i) y[i + 2] = r[i] - alpha[i] * y[i + 1] - beta[i] * y[i];
    return y;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline std::vector<double> to_vec(const GridFn& f) { return {f.values().begin(), f.values().end()}; }
inline std::vector<double> to_vec(const TimeScale& ts) { return {ts.points().begin(), ts.points().end()}; }

// ---------------------------------------------------------------------------
// Seeded generators

enum class GridKind { Integers, HZ, Quantum, Explicit };

inline const char* grid_name(GridKind k) {
    switch (k) {
        case GridKind::Integers: return "integers";
        case GridKind::HZ: return "hz";
        case GridKind::Quantum: return "quantum";
        case GridKind::Explicit: return "explicit";
    }
    return "?";
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Discrete grid of 5..200 points (quantum grids stay short so t spans a few decades).
inline TimeScale random_grid(std::mt19937_64& rng, GridKind kind) {
    switch (kind) {
        case GridKind::Integers: {
            const long a = static_cast<long>(uniform_index(rng, 0, 20)) - 10;
            const long n = static_cast<long>(uniform_index(rng, 5, 200));
            return TimeScale::integers(a, a + n - 1);
        }
        case GridKind::HZ: {
            const double h = uniform(rng, 0.25, 2.0);
            const double a = h * std::round(uniform(rng, -5.0, 5.0));
            const auto n = static_cast<double>(uniform_index(rng, 5, 200));
            return TimeScale::hz(h, a, a + (n - 1) * h);
        }
        case GridKind::Quantum: {
            const double h = uniform(rng, 1.1, 2.0);
            const double a = uniform(rng, 0.5, 2.0);
            const int k_max = static_cast<int>(uniform_index(rng, 4, 24));
            return TimeScale::quantum(h, a, k_max);
        }
        case GridKind::Explicit: {
            const std::size_t n = uniform_index(rng, 5, 200);
            std::vector<double> pts{uniform(rng, -3.0, 3.0)};
            for (std::size_t i = 1; i < n; ++i) pts.push_back(pts.back() + uniform(rng, 0.2, 1.5));
            return TimeScale::from_points(std::move(pts));
        }
    }
    return TimeScale::integers(0, 4);
}

struct SpecShape {
    bool forced = true;
    bool oscillatory = false;
    bool constant_coefficients = false;
};

/**
 * Random regressive spec. Per step, p mu and q mu^2 are O(1/n) and O(1/n^2),
 * so the whole window behaves like a bounded interval of a smooth equation:
 * e_g stays within a few e-folds and basis solutions stay moderate. Without
 * oscillation q <= 0 and y1 stays >= 1 to the right of t0. Constant
 * coefficients need a uniform grid.
 */
inline ProblemSpec random_spec(std::mt19937_64& rng, const TimeScale& ts, SpecShape shape = {}) {
    const std::size_t n = ts.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double rho_c = uniform(rng, -1.5, 1.5) * inv_n;
    const double kappa_c = shape.oscillatory ? uniform(rng, 0.0, 9.0) * inv_n * inv_n
                                             : -uniform(rng, 0.0, 4.0) * inv_n * inv_n;
    const double span = ts[n - 1] - ts[0];
    const double r_scale = shape.forced ? uniform(rng, 0.1, 3.0) : 0.0;
    std::vector<double> p(n), q(n), r(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double mu = ts.mu(i);
        const double rho = shape.constant_coefficients ? rho_c : rho_c * uniform(rng, 0.0, 2.0);
        const double kappa = shape.constant_coefficients ? kappa_c : kappa_c * uniform(rng, 0.0, 2.0);
        p[i] = rho / mu;
        q[i] = kappa / (mu * mu);
        r[i] = r_scale * uniform(rng, -1.0, 1.0) / (span * span);
    }
    p[n - 1] = p[n - 2];
    q[n - 1] = q[n - 2];
    r[n - 1] = r[n - 2];
    ProblemSpec spec{ts, GridFn(ts, p), GridFn(ts, q), GridFn(ts, r)};
    spec.t0_idx = uniform_index(rng, 0, std::min<std::size_t>(n - 2, n / 3));
    spec.a_idx = uniform_index(rng, 0, n - 1);
    spec.A = uniform(rng, -2.0, 2.0);
    spec.B = uniform(rng, -2.0, 2.0) / span;
    return spec;
}

/// The 4 x 25 seeded suite shared by the property and acceptance tests.
struct SuiteCase {
    std::uint64_t seed;
    GridKind kind;
    ProblemSpec spec;
    std::string label() const { return std::string(grid_name(kind)) + "#" + std::to_string(seed); }
};

inline std::vector<SuiteCase> seeded_suite(std::size_t per_kind = 25, bool forced = true) {
    std::vector<SuiteCase> out;
    for (GridKind kind : {GridKind::Integers, GridKind::HZ, GridKind::Quantum, GridKind::Explicit}) {
        for (std::size_t k = 0; k < per_kind; ++k) {
            const std::uint64_t seed = 1000 * (static_cast<std::uint64_t>(kind) + 1) + k;
            std::mt19937_64 rng(seed);
            const TimeScale ts = random_grid(rng, kind);
            SpecShape shape;
            shape.forced = forced;
            shape.oscillatory = k % 4 == 3;
            out.push_back({seed, kind, random_spec(rng, ts, shape)});
        }
    }
    return out;
}

}  // namespace tsdyn::testing
