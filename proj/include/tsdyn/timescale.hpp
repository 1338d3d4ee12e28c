#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tsdyn/error.hpp"

namespace tsdyn {

/// Absolute threshold on |1 + mu*g| below which a coefficient is treated as
/// non-regressive.
inline constexpr double kDefaultRegTol = 1e-12;

enum class GridMode { ExactDiscrete, ContinuumApprox };

namespace family {
struct Integers { long a; long b; };
struct HZ { double h; double a; double b; };
/// {a, a*h, a*h^2, ..., a*h^k_max}
struct Quantum { double h; double a; int k_max; };
/// Uniform mesh of width h on [a, b], standing in for the real line.
struct Reals { double a; double b; double h; };
struct Explicit { std::vector<double> points; };
}  // namespace family

using Family = std::variant<family::Integers, family::HZ, family::Quantum,
                            family::Reals, family::Explicit>;

/**
 * A finite time scale: strictly increasing grid points t_0 < ... < t_{n-1}.
 *
 * sigma(i) = i+1 and mu(i) = t_{i+1} - t_i exist for i < n-1 (the kappa
 * part of the grid). Immutable; copies share storage.
 */
class TimeScale {
public:
    static TimeScale integers(long a, long b);
    static TimeScale hz(double h, double a, double b);
    static TimeScale quantum(double h, double a, int k_max);
    static TimeScale reals(double a, double b, double h);
    static TimeScale from_points(std::vector<double> points);

    std::size_t size() const noexcept { return data_->points.size(); }
    double operator[](std::size_t i) const { return data_->points[i]; }
    std::span<const double> points() const noexcept { return data_->points; }
    GridMode mode() const noexcept { return data_->mode; }
    /// Mesh width in ContinuumApprox mode, 0 otherwise.
    double mesh_width() const noexcept { return data_->mesh; }

    std::size_t sigma(std::size_t i) const;
    double mu(std::size_t i) const;
    double min_mu() const noexcept { return data_->min_mu; }

    /// Index of the grid point equal to t (relative tolerance), if any.
    std::optional<std::size_t> index_of(double t, double rel_tol = 1e-9) const;

    bool same_as(const TimeScale& other) const noexcept;

private:
    struct Data {
        std::vector<double> points;
        GridMode mode = GridMode::ExactDiscrete;
        double mesh = 0.0;
        double min_mu = 0.0;
    };
    TimeScale(std::vector<double> points, GridMode mode, double mesh);

    std::shared_ptr<const Data> data_;
};

TimeScale make_timescale(const Family& family);

/**
 * Real values sampled on a prefix of a time scale's points.
 *
 * values[i] belongs to point i. A function defined on the whole grid has
 * size() == ts.size(); delta derivatives live on the kappa part and have
 * one value fewer.
 */
class GridFn {
public:
    GridFn(TimeScale ts, std::vector<double> values);

    static GridFn constant(const TimeScale& ts, double c);
    static GridFn sample(const TimeScale& ts, const std::function<double(double)>& f);

    const TimeScale& timescale() const noexcept { return ts_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// First n values, n <= size().
    GridFn prefix(std::size_t n) const;
    double max_abs() const noexcept;

    friend GridFn operator+(const GridFn& a, const GridFn& b);
    friend GridFn operator-(const GridFn& a, const GridFn& b);
    friend GridFn operator*(double s, const GridFn& a);

private:
    TimeScale ts_;
    std::vector<double> values_;
};

/// Throws GridMismatch unless both functions live on the same time scale.
void require_same_grid(const GridFn& a, const GridFn& b, const char* what);

/// A GridFn g certified to satisfy |1 + mu(t) g(t)| >= reg_tol on the kappa part.
class RegressiveFn {
public:
    const GridFn& fn() const noexcept { return g_; }
    double operator[](std::size_t i) const { return g_[i]; }
    const TimeScale& timescale() const noexcept { return g_.timescale(); }
    /// True when 1 + mu*g > 0 everywhere (the R+ class).
    bool positively_regressive() const noexcept;

private:
    explicit RegressiveFn(GridFn g) : g_(std::move(g)) {}
    friend RegressiveFn check_regressive(const GridFn& g, double reg_tol);

    GridFn g_;
};

RegressiveFn check_regressive(const GridFn& g, double reg_tol = kDefaultRegTol);

/// (f[i+1] - f[i]) / mu(i), one value shorter than f.
GridFn delta_derivative(const GridFn& f);

/// Signed Riemann sum: sum_{i=from}^{to-1} f[i] mu(i); negated when from > to.
double delta_integral(const GridFn& f, std::size_t from, std::size_t to);

/// Antiderivative F with F[anchor] = 0 and F[i+1] = F[i] + f[i] mu(i).
/// Result is defined on min(f.size()+1, ts.size()) points.
GridFn cumulative_integral(const GridFn& f, std::size_t anchor);

inline double circle_plus(double z, double w, double mu) { return z + w + mu * z * w; }

/// -p / (1 + mu p). Throws NotRegressive when |1 + mu p| < reg_tol.
double ominus(double p, double mu, double reg_tol = kDefaultRegTol);

/// Pointwise ominus over the kappa part.
GridFn ominus(const RegressiveFn& p);

/// Delta exponential e_p(., anchor) on the whole grid via the product recurrence.
GridFn exp_delta(const RegressiveFn& p, std::size_t anchor);

}  // namespace tsdyn
