#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "tsdyn/particular.hpp"
#include "tsdyn/zspec.hpp"

using namespace tsdyn;
using namespace tsdyn::testing;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::ValidationError;
}

// Largest |lhs - r| of y(t+2) + 2 alpha y(t+1) + beta y(t) = r(t).
double const_defect(double alpha, double beta, const std::vector<double>& r, const std::vector<double>& y) {
    double worst = 0.0;
    for (std::size_t t = 0; t + 2 < y.size(); ++t) {
        worst = std::max(worst, std::abs(y[t + 2] + 2.0 * alpha * y[t + 1] + beta * y[t] - r[t]));
    }
    return worst;
}

}  // namespace

TEST_CASE("shift to delta coefficients") {
    const std::vector<double> m1{-1.0, -1.0};
    const z::DeltaCoefficients fib = z::shift_to_delta(m1, m1);
    CHECK(fib.p == std::vector<double>{1.0, 1.0});
    CHECK(fib.q == std::vector<double>{-1.0, -1.0});

    const z::DeltaCoefficients flip = z::shift_to_delta(std::vector<double>{0.0}, std::vector<double>{-1.0});
    CHECK(flip.p[0] == 2.0);
    CHECK(flip.q[0] == 0.0);

    const z::DeltaCoefficients free = z::shift_to_delta(std::vector<double>{-2.0}, std::vector<double>{1.0});
    CHECK(free.p[0] == 0.0);
    CHECK(free.q[0] == 0.0);

    CHECK(kind_of([] { (void)z::shift_to_delta(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0}); }) ==
          ErrorKind::GridMismatch);
}

TEST_CASE("product-sum particular on the free equation") {
    const std::size_t n = 16;
    const std::vector<double> zero(n, 0.0), one(n, 1.0);
    const std::vector<double> y = z::product_sum_particular(zero, zero, one, 0, 0, one);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        CHECK(y[i] == t * (t - 1.0) / 2.0);
    }

    const std::vector<double> quiet = z::product_sum_particular(zero, zero, zero, 0, 0, one);
    CHECK(max_abs(quiet) == 0.0);

    // Left of the anchor the signed sums keep y(a) = 0 and the equation intact.
    const std::vector<double> mid = z::product_sum_particular(zero, zero, one, 5, 9, one);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 5.0 + static_cast<double>(i);
        CHECK(mid[i] == (t - 9.0) * (t - 10.0) / 2.0);
    }
}

TEST_CASE("product-sum guards") {
    const std::vector<double> zero(8, 0.0), one(8, 1.0);
    std::vector<double> holed = one;
    holed[3] = 0.0;
    CHECK(kind_of([&] { (void)z::product_sum_particular(zero, zero, one, 0, 0, holed); }) ==
          ErrorKind::ZeroDenominator);
    const std::vector<double> p(8, 1.0);
    CHECK(kind_of([&] { (void)z::product_sum_particular(p, zero, one, 0, 0, one); }) == ErrorKind::NotRegressive);
    CHECK(kind_of([&] { (void)z::product_sum_particular(zero, zero, one, 0, 8, one); }) == ErrorKind::OutOfKappa);
    CHECK(kind_of([&] { (void)z::product_sum_particular(zero, zero, one, 0, 0, std::vector<double>{1.0, 1.0}); }) ==
          ErrorKind::TooFewPoints);

    std::vector<double> beta(8, -1.0);
    beta[2] = 0.0;
    CHECK(kind_of([&] { (void)z::shift_product_sum_particular(zero, beta, one, 0, 0, one); }) == ErrorKind::ZeroBeta);
}

TEST_CASE("constant-coefficient roots") {
    const auto [f1, f2] = z::const_coeff_roots(-0.5, -1.0);
    CHECK(f1 == doctest::Approx((1.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    CHECK(f2 == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));

    const auto [m, p] = z::const_coeff_roots(0.0, -1.0);
    CHECK(m == -1.0);
    CHECK(p == 1.0);

    CHECK(kind_of([] { (void)z::const_coeff_roots(-1.0, 1.0); }) == ErrorKind::DegenerateRoots);
    CHECK(kind_of([] { (void)z::const_coeff_roots(0.0, 1.0); }) == ErrorKind::ComplexRoots);
    CHECK(kind_of([] { (void)z::const_coeff_roots(0.5, 0.0); }) == ErrorKind::ZeroBeta);
}

TEST_CASE("constant-coefficient double sum") {
    const std::vector<double> r(20, 1.0);
    for (const auto which : {z::RootChoice::First, z::RootChoice::Second}) {
        const std::vector<double> y = z::const_coeff_particular(-0.5, -1.0, r, 0, 20, which);
        REQUIRE(y.size() == 21);
        CHECK(y[0] == 0.0);
        CHECK(y[1] == 0.0);
        CHECK(const_defect(-0.5, -1.0, r, y) <= 1e-9 * (1.0 + max_abs(y)));
        const std::vector<double> ref = shift_recurrence(std::vector<double>(20, -1.0), std::vector<double>(20, -1.0),
                                                         r, 0.0, 0.0, 21);
        CHECK(max_abs_diff(y, ref) <= 1e-10 * max_abs(ref));
    }
    const std::vector<double> quiet = z::const_coeff_particular(0.3, -0.4, std::vector<double>(9, 0.0), 2, 10,
                                                                z::RootChoice::First);
    CHECK(max_abs(quiet) == 0.0);
    CHECK(kind_of([] { (void)z::const_coeff_particular(0.3, -0.4, std::vector<double>(3, 1.0), 0, 10,
                                                       z::RootChoice::First); }) == ErrorKind::GridMismatch);
    CHECK(kind_of([] { (void)z::const_coeff_particular(0.3, -0.4, std::vector<double>(3, 1.0), 0, 1,
                                                       z::RootChoice::First); }) == ErrorKind::TooFewPoints);
}

TEST_CASE("shift-form spec") {
    z::ShiftFormSpec bad{0, 6, std::vector<double>(6, 0.5), std::vector<double>(6, -0.5), std::vector<double>(6, 1.0)};
    bad.beta[4] = 0.0;
    CHECK(kind_of([&] { bad.validate(); }) == ErrorKind::ZeroBeta);

    const z::ShiftFormSpec shortened{0, 6, std::vector<double>(3, 0.5), std::vector<double>(6, -0.5),
                                     std::vector<double>(6, 1.0)};
    CHECK(kind_of([&] { shortened.validate(); }) == ErrorKind::GridMismatch);

    const z::ShiftFormSpec fib{0, 12, std::vector<double>(12, -1.0), std::vector<double>(12, -1.0),
                               std::vector<double>(12, 0.0)};
    const ProblemSpec spec = fib.to_delta_problem(0, 0.0, 1.0, 0);
    const GridFn y = step_ivp(spec).y;
    CHECK(y[12] == 144.0);
    CHECK(kind_of([&] { (void)fib.to_delta_problem(13, 0.0, 1.0, 0); }) == ErrorKind::OutOfKappa);
}

// ---------------------------------------------------------------------------

TEST_CASE("property: 1 - p + q equals beta") {
    std::mt19937_64 rng(11);
    std::vector<double> alpha(200), beta(200);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        alpha[i] = uniform(rng, -5.0, 5.0);
        beta[i] = uniform(rng, -5.0, 5.0);
    }
    const z::DeltaCoefficients dc = z::shift_to_delta(alpha, beta);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        CHECK(1.0 - dc.p[i] + dc.q[i] == doctest::Approx(beta[i]).epsilon(1e-14).scale(1.0));
        CHECK(dc.p[i] - 2.0 == doctest::Approx(alpha[i]).epsilon(1e-14).scale(1.0));
    }
}

TEST_CASE("property: product sums equal reduction of order on the integers") {
    std::size_t compared = 0;
    for (const auto& c : seeded_suite(40)) {
        if (c.kind != GridKind::Integers) continue;
        CAPTURE(c.label());
        const ProblemSpec& spec = c.spec;
        const auto first = static_cast<long>(spec.ts[0]);
        const long anchor = first + static_cast<long>(spec.a_idx);
        const FundamentalPair fp = fundamental_pair(spec);
        for (const GridFn* yi : {&fp.first.y, &fp.second.y}) {
            GridFn ro = GridFn::constant(spec.ts, 0.0);
            try {
                ro = reduction_order_particular(spec, *yi, spec.a_idx);
            } catch (const Error& e) {
                CHECK(e.kind() == ErrorKind::ZeroDenominator);
                continue;
            }
            const std::vector<double> ps =
                z::product_sum_particular(spec.p.values(), spec.q.values(), spec.r.values(), first, anchor, yi->values());
            const double scale = std::max(1.0, max_abs(ps));
            CHECK(max_abs_diff(ro.values(), ps) <= 1e-10 * scale);

            std::vector<double> alpha(spec.ts.size()), beta(spec.ts.size());
            for (std::size_t j = 0; j < alpha.size(); ++j) {
                alpha[j] = spec.p[j] - 2.0;
                beta[j] = 1.0 - spec.p[j] + spec.q[j];
            }
            const std::vector<double> sp =
                z::shift_product_sum_particular(alpha, beta, spec.r.values(), first, anchor, yi->values());
            CHECK(max_abs_diff(sp, ps) <= 1e-12 * scale);
            ++compared;
        }
    }
    // y2 vanishes at t0, so only y1 reaches the comparison.
    CHECK(compared >= 35);
}

TEST_CASE("property: Vieta relations and the double sum") {
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        // Roots chosen away from zero and from each other.
        const double l1 = (k % 2 ? 1.0 : -1.0) * uniform(rng, 0.5, 1.5);
        double l2 = (k % 3 ? 1.0 : -1.0) * uniform(rng, 0.5, 1.5);
        if (std::abs(l1 - l2) < 0.1) l2 += 0.2;
        const double alpha = -(l1 + l2) / 2.0;
        const double beta = l1 * l2;
        CAPTURE(alpha);
        CAPTURE(beta);
        const auto [r1, r2] = z::const_coeff_roots(alpha, beta);
        CHECK(r1 < r2);
        CHECK(r1 + r2 == doctest::Approx(-2.0 * alpha).epsilon(1e-12).scale(1.0));
        CHECK(r1 * r2 == doctest::Approx(beta).epsilon(1e-12));
        CHECK(std::min(std::abs(r1 - l1), std::abs(r2 - l1)) <= 1e-12);

        const std::size_t n = 5 + static_cast<std::size_t>(k % 20);
        std::vector<double> r(n);
        for (double& v : r) v = uniform(rng, -1.0, 1.0);
        const std::vector<double> ref =
            shift_recurrence(std::vector<double>(n, 2.0 * alpha), std::vector<double>(n, beta), r, 0.0, 0.0, n);
        const double scale = 1.0 + max_abs(ref);
        const std::vector<double> y1 = z::const_coeff_particular(alpha, beta, r, 0, static_cast<long>(n - 1),
                                                                 z::RootChoice::First);
        const std::vector<double> y2 = z::const_coeff_particular(alpha, beta, r, 0, static_cast<long>(n - 1),
                                                                 z::RootChoice::Second);
        CHECK(const_defect(alpha, beta, r, y1) <= 1e-9 * (1.0 + max_abs(r)) * scale);
        CHECK(const_defect(alpha, beta, r, y2) <= 1e-9 * (1.0 + max_abs(r)) * scale);
        CHECK(max_abs_diff(y1, ref) <= 1e-9 * scale);
        // Both roots give the same zero-start solution, so the difference is homogeneous.
        std::vector<double> diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = y1[i] - y2[i];
        CHECK(const_defect(alpha, beta, std::vector<double>(n, 0.0), diff) <= 1e-9 * scale);
    }
}

TEST_CASE("property: delta form of a shift spec steps like the raw recurrence") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 50; ++k) {
        const long a = static_cast<long>(uniform_index(rng, 0, 20)) - 10;
        const long b = a + static_cast<long>(uniform_index(rng, 3, 40));
        const auto n = static_cast<std::size_t>(b - a + 1);
        z::ShiftFormSpec s{a, b, std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            s.alpha[i] = uniform(rng, -1.5, 0.5);
            s.beta[i] = (i % 2 ? 1.0 : -1.0) * uniform(rng, 0.2, 1.0);
            s.r[i] = uniform(rng, -1.0, 1.0);
        }
        CAPTURE(k);
        const double A = uniform(rng, -1.0, 1.0);
        const double B = uniform(rng, -1.0, 1.0);
        const ProblemSpec spec = s.to_delta_problem(a, A, B, a);
        const GridFn y = step_ivp(spec).y;
        const std::vector<double> ref = shift_recurrence(s.alpha, s.beta, s.r, A, A + B, n);
        CHECK(max_abs_diff(y.values(), ref) <= 1e-12 * std::max(1.0, max_abs(ref)));
    }
}
