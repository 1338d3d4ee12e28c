#include "tsdyn/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace tsdyn {

namespace {

std::string describe_index(const char* what, std::size_t i, double t) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at index " << i << " (t=" << t << ")";
    return os.str();
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw Error(ErrorKind::BadFamilyParam, std::string(name) + " must be finite");
    }
}

}  // namespace

TimeScale::TimeScale(std::vector<double> points, GridMode mode, double mesh) {
    if (points.size() < 3) {
        throw Error(ErrorKind::TooFewPoints,
                    "a time scale needs at least 3 points, got " + std::to_string(points.size()));
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) {
            throw Error(ErrorKind::NonFiniteValue, describe_index("non-finite grid point", i, points[i]), i);
        }
    }
    double min_mu = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        const double gap = points[i + 1] - points[i];
        if (!(gap > 0.0)) {
            throw Error(ErrorKind::NonIncreasingPoints,
                        describe_index("grid not strictly increasing", i + 1, points[i + 1]), i + 1);
        }
        min_mu = std::min(min_mu, gap);
    }
    if (mode == GridMode::ContinuumApprox) {
        const double span = std::max(std::abs(points.front()), std::abs(points.back()));
        const double allowed = 1e-12 * mesh + 4.0 * std::numeric_limits<double>::epsilon() * span;
        for (std::size_t i = 0; i + 1 < points.size(); ++i) {
            if (std::abs((points[i + 1] - points[i]) - mesh) > allowed) {
                throw Error(ErrorKind::BadFamilyParam, "continuum mesh is not uniform", i);
            }
        }
    }
    auto data = std::make_shared<Data>();
    data->points = std::move(points);
    data->mode = mode;
    data->mesh = mesh;
    data->min_mu = min_mu;
    data_ = std::move(data);
}

TimeScale TimeScale::integers(long a, long b) {
    if (!(a < b)) throw Error(ErrorKind::BadFamilyParam, "integer window needs a < b");
    if (b - a < 2) {
        throw Error(ErrorKind::TooFewPoints, "integer window needs b - a >= 2");
    }
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(b - a + 1));
    for (long t = a; t <= b; ++t) pts.push_back(static_cast<double>(t));
    return TimeScale(std::move(pts), GridMode::ExactDiscrete, 0.0);
}

TimeScale TimeScale::hz(double h, double a, double b) {
    require_finite(h, "h");
    require_finite(a, "a");
    require_finite(b, "b");
    if (!(h > 0.0)) throw Error(ErrorKind::BadFamilyParam, "hZ needs h > 0");
    if (!(a < b)) throw Error(ErrorKind::BadFamilyParam, "hZ needs a < b");
    const auto n = static_cast<std::size_t>(std::floor((b - a) / h + 1e-9));
    std::vector<double> pts;
    pts.reserve(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts.push_back(a + static_cast<double>(i) * h);
    return TimeScale(std::move(pts), GridMode::ExactDiscrete, 0.0);
}

TimeScale TimeScale::quantum(double h, double a, int k_max) {
    require_finite(h, "h");
    require_finite(a, "a");
    if (!(h > 1.0)) throw Error(ErrorKind::BadFamilyParam, "quantum scale needs h > 1");
    if (!(a > 0.0)) throw Error(ErrorKind::BadFamilyParam, "quantum scale needs a > 0");
    if (k_max < 0) throw Error(ErrorKind::BadFamilyParam, "quantum scale needs k_max >= 0");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(k_max) + 1);
    for (int k = 0; k <= k_max; ++k) pts.push_back(a * std::pow(h, k));
    return TimeScale(std::move(pts), GridMode::ExactDiscrete, 0.0);
}

TimeScale TimeScale::reals(double a, double b, double h) {
    require_finite(h, "h");
    require_finite(a, "a");
    require_finite(b, "b");
    if (!(h > 0.0)) throw Error(ErrorKind::BadFamilyParam, "continuum mesh needs h > 0");
    if (!(a < b)) throw Error(ErrorKind::BadFamilyParam, "continuum mesh needs a < b");
    const double steps = (b - a) / h;
    const double n = std::round(steps);
    if (std::abs(steps - n) > 1e-6) {
        throw Error(ErrorKind::BadFamilyParam, "(b - a) / h must be an integer");
    }
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n) + 1);
    for (std::size_t i = 0; i <= static_cast<std::size_t>(n); ++i) {
        pts.push_back(a + static_cast<double>(i) * h);
    }
    return TimeScale(std::move(pts), GridMode::ContinuumApprox, h);
}

TimeScale TimeScale::from_points(std::vector<double> points) {
    return TimeScale(std::move(points), GridMode::ExactDiscrete, 0.0);
}

std::size_t TimeScale::sigma(std::size_t i) const {
    if (i + 1 >= size()) {
        throw Error(ErrorKind::OutOfKappa, "sigma is undefined at the last grid point", i);
    }
    return i + 1;
}

double TimeScale::mu(std::size_t i) const {
    if (i + 1 >= size()) {
        throw Error(ErrorKind::OutOfKappa, "graininess is undefined at the last grid point", i);
    }
    return data_->points[i + 1] - data_->points[i];
}

std::optional<std::size_t> TimeScale::index_of(double t, double rel_tol) const {
    const auto& pts = data_->points;
    const auto it = std::lower_bound(pts.begin(), pts.end(), t);
    const double tol = rel_tol * std::max(1.0, std::abs(t));
    std::optional<std::size_t> best;
    double best_dist = tol;
    for (auto cand : {it, it == pts.begin() ? it : std::prev(it)}) {
        if (cand == pts.end()) continue;
        const double d = std::abs(*cand - t);
        if (d <= best_dist) {
            best_dist = d;
            best = static_cast<std::size_t>(cand - pts.begin());
        }
    }
    return best;
}

bool TimeScale::same_as(const TimeScale& other) const noexcept {
    if (data_ == other.data_) return true;
    return data_->mode == other.data_->mode && data_->points == other.data_->points;
}

TimeScale make_timescale(const Family& fam) {
    return std::visit(
        [](const auto& f) -> TimeScale {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, family::Integers>) {
                return TimeScale::integers(f.a, f.b);
            } else if constexpr (std::is_same_v<F, family::HZ>) {
                return TimeScale::hz(f.h, f.a, f.b);
            } else if constexpr (std::is_same_v<F, family::Quantum>) {
                return TimeScale::quantum(f.h, f.a, f.k_max);
            } else if constexpr (std::is_same_v<F, family::Reals>) {
                return TimeScale::reals(f.a, f.b, f.h);
            } else {
                return TimeScale::from_points(f.points);
            }
        },
        fam);
}

// ---------------------------------------------------------------------------

GridFn::GridFn(TimeScale ts, std::vector<double> values)
    : ts_(std::move(ts)), values_(std::move(values)) {
    if (values_.empty() || values_.size() > ts_.size()) {
        throw Error(ErrorKind::GridMismatch,
                    "grid function has " + std::to_string(values_.size()) +
                        " values for a grid of " + std::to_string(ts_.size()) + " points");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorKind::NonFiniteValue,
                        describe_index("non-finite value", i, ts_[i]), i);
        }
    }
}

GridFn GridFn::constant(const TimeScale& ts, double c) {
    return GridFn(ts, std::vector<double>(ts.size(), c));
}

GridFn GridFn::sample(const TimeScale& ts, const std::function<double(double)>& f) {
    std::vector<double> v(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) v[i] = f(ts[i]);
    return GridFn(ts, std::move(v));
}

GridFn GridFn::prefix(std::size_t n) const {
    if (n > values_.size()) {
        throw Error(ErrorKind::GridMismatch, "prefix longer than grid function");
    }
    return GridFn(ts_, std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)));
}

double GridFn::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const GridFn& a, const GridFn& b, const char* what) {
    if (!a.timescale().same_as(b.timescale())) {
        throw Error(ErrorKind::GridMismatch, std::string(what) + ": operands live on different time scales");
    }
}

namespace {

template <typename Op>
GridFn zip(const GridFn& a, const GridFn& b, Op op) {
    require_same_grid(a, b, "pointwise arithmetic");
    const std::size_t n = std::min(a.size(), b.size());
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = op(a[i], b[i]);
    return GridFn(a.timescale(), std::move(v));
}

}  // namespace

GridFn operator+(const GridFn& a, const GridFn& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
}

GridFn operator-(const GridFn& a, const GridFn& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
}

GridFn operator*(double s, const GridFn& a) {
    std::vector<double> v(a.values().begin(), a.values().end());
    for (double& x : v) x *= s;
    return GridFn(a.timescale(), std::move(v));
}

// ---------------------------------------------------------------------------

bool RegressiveFn::positively_regressive() const noexcept {
    const auto& ts = g_.timescale();
    const std::size_t n = std::min(g_.size(), ts.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(1.0 + ts.mu(i) * g_[i] > 0.0)) return false;
    }
    return true;
}

RegressiveFn check_regressive(const GridFn& g, double reg_tol) {
    const auto& ts = g.timescale();
    if (g.size() + 1 < ts.size()) {
        throw Error(ErrorKind::GridMismatch, "regressivity needs values on every point but the last");
    }
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double factor = 1.0 + ts.mu(i) * g[i];
        if (!(std::abs(factor) >= reg_tol)) {
            std::ostringstream os;
            os.precision(17);
            os << "1 + mu*g = " << factor << " at t=" << ts[i] << " (index " << i << ")";
            throw Error(ErrorKind::NotRegressive, os.str(), i);
        }
    }
    return RegressiveFn(g.prefix(ts.size() - 1));
}

GridFn delta_derivative(const GridFn& f) {
    if (f.size() < 2) {
        throw Error(ErrorKind::OutOfKappa, "delta derivative needs at least two values");
    }
    const auto& ts = f.timescale();
    std::vector<double> d(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) d[i] = (f[i + 1] - f[i]) / ts.mu(i);
    return GridFn(ts, std::move(d));
}

double delta_integral(const GridFn& f, std::size_t from, std::size_t to) {
    const auto& ts = f.timescale();
    const std::size_t lo = std::min(from, to);
    const std::size_t hi = std::max(from, to);
    if (hi >= ts.size() || (hi > lo && hi - 1 >= f.size())) {
        throw Error(ErrorKind::OutOfKappa, "integration bounds outside the grid function");
    }
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f[i] * ts.mu(i);
    return from <= to ? s : -s;
}

GridFn cumulative_integral(const GridFn& f, std::size_t anchor) {
    const auto& ts = f.timescale();
    const std::size_t n = std::min(f.size() + 1, ts.size());
    if (anchor >= n) {
        throw Error(ErrorKind::OutOfKappa, "anchor outside the antiderivative's domain", anchor);
    }
    std::vector<double> F(n, 0.0);
    for (std::size_t i = anchor; i + 1 < n; ++i) F[i + 1] = F[i] + f[i] * ts.mu(i);
    for (std::size_t i = anchor; i-- > 0;) F[i] = F[i + 1] - f[i] * ts.mu(i);
    return GridFn(ts, std::move(F));
}

double ominus(double p, double mu, double reg_tol) {
    const double factor = 1.0 + mu * p;
    if (!(std::abs(factor) >= reg_tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "ominus undefined: 1 + mu*p = " << factor;
        throw Error(ErrorKind::NotRegressive, os.str());
    }
    return -p / factor;
}

GridFn ominus(const RegressiveFn& p) {
    const auto& ts = p.timescale();
    std::vector<double> v(ts.size() - 1);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = -p[i] / (1.0 + ts.mu(i) * p[i]);
    return GridFn(ts, std::move(v));
}

GridFn exp_delta(const RegressiveFn& p, std::size_t anchor) {
    const auto& ts = p.timescale();
    if (anchor >= ts.size()) {
        throw Error(ErrorKind::OutOfKappa, "exponential anchor outside the grid", anchor);
    }
    std::vector<double> e(ts.size(), 1.0);
    for (std::size_t i = anchor; i + 1 < ts.size(); ++i) e[i + 1] = e[i] * (1.0 + ts.mu(i) * p[i]);
    for (std::size_t i = anchor; i-- > 0;) e[i] = e[i + 1] / (1.0 + ts.mu(i) * p[i]);
    return GridFn(ts, std::move(e));
}

}  // namespace tsdyn
