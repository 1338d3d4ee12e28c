#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "support.hpp"
#include "tsdyn/zspec.hpp"

using namespace tsdyn;
using namespace tsdyn::testing;

namespace {

ProblemSpec constant_spec(const TimeScale& ts, double p, double q, double r) {
    return ProblemSpec{ts, GridFn::constant(ts, p), GridFn::constant(ts, q), GridFn::constant(ts, r)};
}

}  // namespace

TEST_CASE("constant solution") {
    ProblemSpec spec = constant_spec(TimeScale::integers(0, 10), 0.0, 0.0, 0.0);
    spec.A = 1.0;
    const IvpSolution sol = step_ivp(spec);
    for (std::size_t i = 0; i < sol.y.size(); ++i) CHECK(sol.y[i] == 1.0);
    CHECK(sol.ydelta.max_abs() == 0.0);
}

TEST_CASE("unit forcing gives t(t-1)/2") {
    const ProblemSpec spec = constant_spec(TimeScale::integers(0, 12), 0.0, 0.0, 1.0);
    const GridFn y = step_ivp(spec).y;
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == spec.ts[i] * (spec.ts[i] - 1.0) / 2.0);
}

TEST_CASE("Fibonacci through the delta form") {
    const std::vector<double> alpha(20, -1.0), beta(20, -1.0);
    const z::DeltaCoefficients dc = z::shift_to_delta(alpha, beta);
    const TimeScale ts = TimeScale::integers(0, 19);
    ProblemSpec spec{ts, GridFn(ts, dc.p), GridFn(ts, dc.q), GridFn::constant(ts, 0.0)};
    spec.B = 1.0;
    const GridFn y = step_ivp(spec).y;
    const std::vector<double> fib = shift_recurrence(alpha, beta, std::vector<double>(20, 0.0), 0.0, 1.0, 20);
    for (std::size_t i = 0; i < 20; ++i) CHECK(y[i] == fib[i]);
    CHECK(y[6] == 8.0);
}

TEST_CASE("fundamental pair of the free equation") {
    ProblemSpec spec = constant_spec(TimeScale::integers(-3, 8), 0.0, 0.0, 5.0);
    spec.t0_idx = 4;
    const FundamentalPair fp = fundamental_pair(spec);
    for (std::size_t i = 0; i < spec.ts.size(); ++i) {
        CHECK(fp.first.y[i] == 1.0);
        CHECK(fp.second.y[i] == spec.ts[i] - spec.ts[4]);
    }
    const GridFn W = wronskian(fp.first.y, fp.second.y);
    for (std::size_t i = 0; i < W.size(); ++i) CHECK(W[i] == 1.0);
}

TEST_CASE("Wronskian follows the exponential of -p + mu q") {
    ProblemSpec spec = constant_spec(TimeScale::integers(0, 20), 0.5, 0.0, 0.0);
    spec.t0_idx = 3;
    const FundamentalPair fp = fundamental_pair(spec);
    const GridFn W = wronskian(fp.first.y, fp.second.y);
    CHECK(W[3] == 1.0);
    for (std::size_t i = 0; i < W.size(); ++i) {
        CHECK(W[i] == doctest::Approx(std::pow(0.5, static_cast<double>(i) - 3.0)).epsilon(1e-12));
    }
}

TEST_CASE("p = 1 on the integers is not regressive") {
    const ProblemSpec spec = constant_spec(TimeScale::integers(0, 10), 1.0, 0.0, 0.0);
    try {
        spec.validate();
        FAIL("expected NotRegressive");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotRegressive);
    }
}

TEST_CASE("backward stepping stops where the update is singular") {
    // 1 + mu(-p + mu q) = 0 at t = 2 only.
    const TimeScale ts = TimeScale::integers(0, 8);
    std::vector<double> p(9, 0.0);
    p[2] = 1.0;
    ProblemSpec spec{ts, GridFn(ts, p), GridFn::constant(ts, 0.0), GridFn::constant(ts, 0.0)};
    spec.t0_idx = 5;
    spec.reg_tol = 1e-12;
    try {
        (void)step_ivp(spec);
        FAIL("expected NotRegressive");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotRegressive);
        CHECK(e.index() == std::optional<std::size_t>(2));
    }
}

TEST_CASE("spec validation") {
    const TimeScale ts = TimeScale::integers(0, 6);
    ProblemSpec spec = constant_spec(ts, 0.0, 0.0, 0.0);
    spec.t0_idx = 6;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.t0_idx = 0;
    spec.a_idx = 7;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.a_idx = 0;
    spec.p = GridFn(ts, {0.0, 0.0, 0.0});
    CHECK_THROWS_AS(spec.validate(), Error);
    spec.p = GridFn::constant(TimeScale::integers(1, 7), 0.0);
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("wronskian rejects mismatched grids") {
    const GridFn a = GridFn::constant(TimeScale::integers(0, 5), 1.0);
    const GridFn b = GridFn::constant(TimeScale::integers(1, 6), 1.0);
    try {
        (void)wronskian(a, b);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridMismatch);
    }
}

TEST_CASE("residual examples") {
    const TimeScale ts = TimeScale::hz(0.5, 0.0, 5.0);
    const ProblemSpec spec = constant_spec(ts, 0.3, -0.2, 1.0);
    const GridFn y = step_ivp(spec).y;
    const GridFn res = residual(spec, y);
    CHECK(res.size() == ts.size() - 2);
    CHECK(res.max_abs() <= 1e-10 * 2.0);

    std::vector<double> bumped = to_vec(y);
    bumped[5] += 1.0;
    const GridFn spike = residual(spec, GridFn(ts, bumped));
    CHECK(std::abs(spike[4]) == doctest::Approx(2.0 / 0.25 - 0.3 / 0.5).epsilon(1e-9));
    CHECK(std::abs(spike[3]) == doctest::Approx(1.0 / 0.25).epsilon(1e-9));
    CHECK(std::abs(spike[7]) <= 1e-10);

    const ProblemSpec h = spec.homogeneous();
    CHECK(residual(h, fundamental_pair(h).second.y).max_abs() <= 1e-12);
}

// ---------------------------------------------------------------------------

TEST_CASE("property: stepping matches the three-point oracle and has exact residual") {
    for (const auto& c : seeded_suite()) {
        CAPTURE(c.label());
        const ProblemSpec& spec = c.spec;
        const IvpSolution sol = step_ivp(spec);
        const std::vector<double> ref = three_point_solve(to_vec(spec.ts), to_vec(spec.p), to_vec(spec.q),
                                                          to_vec(spec.r), spec.t0_idx, spec.A, spec.B);
        const double scale = std::max(1.0, max_abs(ref));
        CHECK(max_abs_diff(sol.y.values(), ref) <= 1e-9 * scale);
        CHECK(sol.y[spec.t0_idx] == spec.A);
        CHECK(sol.ydelta[spec.t0_idx] == doctest::Approx(spec.B).epsilon(1e-12));
        CHECK(max_abs_diff(sol.ydelta.values(), delta_derivative(sol.y).values()) == 0.0);
        CHECK(residual(spec, sol.y).max_abs() <= 1e-10 * (1.0 + spec.r.max_abs()));
    }
}

TEST_CASE("property: Abel identity for the fundamental pair") {
    for (const auto& c : seeded_suite()) {
        CAPTURE(c.label());
        const FundamentalPair fp = fundamental_pair(c.spec);
        const GridFn W = wronskian(fp.first.y, fp.second.y);
        const GridFn e = exp_delta(c.spec.regressive_composite(), c.spec.t0_idx);
        CHECK(W[c.spec.t0_idx] == doctest::Approx(1.0).epsilon(1e-14));
        for (std::size_t i = 0; i < W.size(); ++i) CHECK(std::abs(W[i] - e[i]) <= 1e-9 * std::abs(e[i]));
    }
}

TEST_CASE("property: linearity and superposition") {
    const auto suite = seeded_suite(10);
    for (std::size_t k = 0; k + 1 < suite.size(); k += 2) {
        const ProblemSpec& s1 = suite[k].spec;
        CAPTURE(suite[k].label());
        std::mt19937_64 rng(k);
        std::vector<double> r2(s1.ts.size());
        for (double& v : r2) v = uniform(rng, -1.0, 1.0) * s1.r.max_abs();
        ProblemSpec s2 = s1.with_forcing(GridFn(s1.ts, r2)).with_initial(uniform(rng, -1, 1), uniform(rng, -1, 1));
        ProblemSpec sum = s1.with_forcing(s1.r + s2.r).with_initial(s1.A + s2.A, s1.B + s2.B);
        const GridFn y1 = step_ivp(s1).y;
        const GridFn y2 = step_ivp(s2).y;
        const GridFn ys = step_ivp(sum).y;
        const double scale = std::max({1.0, y1.max_abs(), y2.max_abs()});
        CHECK(max_abs_diff(ys.values(), (y1 + y2).values()) <= 1e-10 * scale);

        const FundamentalPair fp = fundamental_pair(s1);
        const GridFn yd = step_ivp(s1.with_initial(0.0, 0.0)).y;
        const GridFn composed = s1.A * fp.first.y + s1.B * fp.second.y + yd;
        CHECK(max_abs_diff(composed.values(), y1.values()) <= 1e-10 * scale);
    }
}
