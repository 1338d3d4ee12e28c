#include "tsdyn/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace tsdyn::io {

namespace {

using json = nlohmann::ordered_json;

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string num(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

ConstructionOptions construction(const ProblemConfig& cfg) {
    ConstructionOptions o;
    o.homogeneous_tol = cfg.solver.homogeneous_tol;
    return o;
}

struct Particular {
    GridFn yd;
    std::string method;
    int basis = 0;
};

Particular choose_particular(const ProblemSpec& spec, const FundamentalPair& fp, BasisChoice choice,
                             const ConstructionOptions& opts) {
    const GridFn& y1 = fp.first.y;
    const GridFn& y2 = fp.second.y;
    if (choice == BasisChoice::First) {
        return {reduction_order_particular(spec, y1, spec.a_idx, opts), "reduction_of_order", 1};
    }
    if (choice == BasisChoice::Second) {
        return {reduction_order_particular(spec, y2, spec.a_idx, opts), "reduction_of_order", 2};
    }
    for (int basis : {1, 2}) {
        try {
            return {reduction_order_particular(spec, basis == 1 ? y1 : y2, spec.a_idx, opts),
                    "reduction_of_order", basis};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ZeroDenominator) throw;
        }
    }
    return {variation_particular(spec, y1, y2, spec.a_idx, opts), "variation_of_parameters", 0};
}

bool constant_on_equation_window(const GridFn& f) {
    const std::size_t n = f.timescale().size() - 2;
    for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(f[i] - f[0]) > 1e-12 * std::max(1.0, std::abs(f[0]))) return false;
    }
    return true;
}

BoundOptions bound_options(const ProblemSpec& spec, BoundModeChoice choice, const ConstructionOptions& opts) {
    BoundOptions b;
    b.construction = opts;
    switch (choice) {
        case BoundModeChoice::Const: b.mode = BoundMode::ConstCoeff; break;
        case BoundModeChoice::Var: b.mode = BoundMode::VarCoeff; break;
        case BoundModeChoice::Auto:
            b.mode = constant_on_equation_window(spec.p) && constant_on_equation_window(spec.q)
                         ? BoundMode::ConstCoeff
                         : BoundMode::VarCoeff;
            break;
    }
    return b;
}

std::string form_label(EquationForm f) {
    switch (f) {
        case EquationForm::Delta: return "delta";
        case EquationForm::Shift: return "shift";
        case EquationForm::Sigma: return "sigma";
    }
    return "delta";
}

/// Allowed residual: tol (1 + max|r|) plus a roundoff floor for second differences.
double residual_limit(const ProblemSpec& spec, double tol, double solution_scale) {
    const double mu = spec.ts.min_mu();
    return tol * (1.0 + spec.r.max_abs()) + 32.0 * kEps * solution_scale / (mu * mu);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------

ResultTable cmd_solve(const ProblemConfig& cfg) {
    const BuiltProblem built = build_problem(cfg);
    const ProblemSpec& spec = built.spec;
    spec.validate();
    const ConstructionOptions opts = construction(cfg);
    const FundamentalPair fp = fundamental_pair(spec);
    const Particular part = choose_particular(spec, fp, cfg.solver.basis, opts);
    const SolutionBundle bundle = assemble_general(spec, fp.first.y, fp.second.y, part.yd, opts);

    const GridFn complementary = bundle.c1 * bundle.y1 + bundle.c2 * bundle.y2;
    const BoundOptions bopts = bound_options(spec, cfg.solver.bound_mode, opts);
    const BoundReport bound = growth_bound_check(spec, complementary, bopts);

    ResultTable table;
    auto& md = table.metadata;
    md.config_hash = config_hash(cfg);
    md.form = form_label(built.form);
    md.grid_mode = spec.ts.mode() == GridMode::ExactDiscrete ? "exact_discrete" : "continuum_approx";
    md.method = part.method;
    md.basis = part.basis;
    md.c1 = bundle.c1;
    md.c2 = bundle.c2;
    md.reg_tol = cfg.solver.reg_tol;
    md.tol = cfg.solver.tol;
    md.k = bound.k;
    if (cfg.solver.oracle) {
        const GridFn yd_vop = variation_particular(spec, fp.first.y, fp.second.y, spec.a_idx, opts);
        const SolutionBundle check = assemble_general(spec, fp.first.y, fp.second.y, yd_vop, opts);
        md.oracle_max_deviation = (bundle.y - check.y).max_abs();
    }

    const std::size_t n = spec.ts.size();
    const std::size_t t0 = spec.t0_idx;
    for (std::size_t i = 0; i < n; ++i) {
        ResultRow row;
        row.t = spec.ts[i];
        row.y = bundle.y[i];
        row.yd = bundle.yd[i];
        if (i < bundle.ydelta.size()) row.ydelta = bundle.ydelta[i];
        if (i < bundle.residual.size()) row.residual = bundle.residual[i];
        if (i >= t0 && i - t0 < bound.norm.size()) {
            row.norm = bound.norm[i - t0];
            row.envelope = bound.envelope[i - t0];
            row.verdict = bound.verdict[i - t0];
        }
        table.rows.push_back(row);
    }
    return table;
}

std::string emit(const ResultTable& table, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        std::ostringstream os;
        const auto cell = [&](const std::optional<double>& v) {
            if (v) os << num(*v);
        };
        os << "t,y,ydelta,yd,residual,norm,envelope,verdict\n";
        for (const auto& r : table.rows) {
            os << num(r.t) << ',' << num(r.y) << ',';
            cell(r.ydelta);
            os << ',';
            cell(r.yd);
            os << ',';
            cell(r.residual);
            os << ',';
            cell(r.norm);
            os << ',';
            cell(r.envelope);
            os << ',';
            if (r.verdict) os << (*r.verdict ? "true" : "false");
            os << '\n';
        }
        return os.str();
    }
    const auto& md = table.metadata;
    json meta;
    meta["version"] = md.version;
    meta["config_hash"] = md.config_hash;
    meta["form"] = md.form;
    meta["grid_mode"] = md.grid_mode;
    meta["method"] = md.method;
    meta["basis"] = md.basis;
    meta["c1"] = md.c1;
    meta["c2"] = md.c2;
    meta["reg_tol"] = md.reg_tol;
    meta["tol"] = md.tol;
    meta["k"] = md.k;
    meta["oracle_max_deviation"] = opt(md.oracle_max_deviation);
    json rows = json::array();
    for (const auto& r : table.rows) {
        json row;
        row["t"] = r.t;
        row["y"] = r.y;
        row["ydelta"] = opt(r.ydelta);
        row["yd"] = opt(r.yd);
        row["residual"] = opt(r.residual);
        row["norm"] = opt(r.norm);
        row["envelope"] = opt(r.envelope);
        row["verdict"] = r.verdict ? json(*r.verdict) : json(nullptr);
        rows.push_back(std::move(row));
    }
    json doc;
    doc["metadata"] = std::move(meta);
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

bool VerifyReport::all_passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

namespace {

void append_note(std::string& detail, const std::string& note) {
    if (!detail.empty()) detail += "; ";
    detail += note;
}

/// Runs one check, turning library errors into a failed entry.
template <typename Fn>
void run_check(VerifyReport& rep, const std::string& name, Fn&& fn) {
    try {
        rep.checks.push_back(fn());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError) throw;
        rep.checks.push_back({name, false, std::numeric_limits<double>::quiet_NaN(), 0.0, e.what()});
    }
}

double max_successive_difference(const ProblemConfig& coarse, const ProblemConfig& fine) {
    const ResultTable a = cmd_solve(coarse);
    const ResultTable b = cmd_solve(fine);
    const std::size_t stride = (b.rows.size() - 1) / (a.rows.size() - 1);
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) m = std::max(m, std::abs(a.rows[i].y - b.rows[i * stride].y));
    return m;
}

}  // namespace

VerifyReport cmd_verify(const ProblemConfig& cfg) {
    VerifyReport rep;
    std::optional<BuiltProblem> built;
    run_check(rep, "regressivity", [&] {
        built = build_problem(cfg);
        built->spec.validate();
        return CheckResult{"regressivity", true, 0.0, cfg.solver.reg_tol, "1 + mu(-p + mu q) bounded away from 0"};
    });
    if (!built || !rep.checks.back().passed) return rep;

    const ProblemSpec& spec = built->spec;
    const ConstructionOptions opts = construction(cfg);
    const double tol = cfg.solver.tol;
    std::optional<FundamentalPair> fp;
    try {
        fp = fundamental_pair(spec);
    } catch (const Error& e) {
        rep.checks.push_back({"fundamental_pair", false, 0.0, 0.0, e.what()});
        return rep;
    }
    const GridFn& y1 = fp->first.y;
    const GridFn& y2 = fp->second.y;

    run_check(rep, "residual", [&] {
        const Particular part = choose_particular(spec, *fp, cfg.solver.basis, opts);
        const SolutionBundle b = assemble_general(spec, y1, y2, part.yd, opts);
        const double worst = b.residual.max_abs();
        const double limit = residual_limit(spec, tol, b.y.max_abs());
        return CheckResult{"residual", worst <= limit, worst, limit, "assembled solution via " + part.method};
    });

    run_check(rep, "wronskian_abel", [&] {
        const GridFn W = wronskian(y1, y2);
        const GridFn e = exp_delta(spec.regressive_composite(), spec.t0_idx);
        double worst = 0.0;
        for (std::size_t i = 0; i < W.size(); ++i) {
            const double expected = W[spec.t0_idx] * e[i];
            worst = std::max(worst, std::abs(W[i] - expected) / std::abs(expected));
        }
        return CheckResult{"wronskian_abel", worst <= tol, worst, tol, "relative |W - W(t0) e_g(., t0)|"};
    });

    run_check(rep, "ro_vop_equivalence", [&] {
        const GridFn yd_vop = variation_particular(spec, y1, y2, spec.a_idx, opts);
        const ProblemSpec h = spec.homogeneous();
        double worst = 0.0;
        double limit = std::numeric_limits<double>::infinity();
        std::string detail;
        for (int basis : {1, 2}) {
            try {
                const GridFn yd_ro = reduction_order_particular(spec, basis == 1 ? y1 : y2, spec.a_idx, opts);
                const GridFn diff = yd_ro - yd_vop;
                const double scale = std::max(yd_ro.max_abs(), yd_vop.max_abs());
                worst = std::max(worst, residual(h, diff).max_abs());
                limit = std::min(limit, residual_limit(spec, tol, scale));
                append_note(detail, "basis " + std::to_string(basis) + " ok");
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::ZeroDenominator) throw;
                append_note(detail, "basis " + std::to_string(basis) + " not applicable (zero denominator)");
            }
        }
        if (!std::isfinite(limit)) return CheckResult{"ro_vop_equivalence", true, 0.0, 0.0, detail};
        return CheckResult{"ro_vop_equivalence", worst <= limit, worst, limit, detail};
    });

    const BoundOptions bopts = bound_options(spec, cfg.solver.bound_mode, opts);
    run_check(rep, "growth_bound", [&] {
        double worst = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (const GridFn* y : {&y1, &y2}) {
            const BoundReport b = growth_bound_check(spec, *y, bopts);
            ok = ok && b.all_hold();
            worst = std::min(worst, b.min_margin());
        }
        return CheckResult{"growth_bound", ok, worst, 0.0, "min envelope margin over both basis solutions"};
    });

    run_check(rep, "gronwall", [&] {
        bool ok = true;
        std::string detail;
        for (const GridFn* y : {&y1, &y2}) {
            const BoundReport b = growth_bound_check(spec, *y, bopts);
            const GridFn norm = sol_norm2(*y, delta_derivative(*y));
            std::vector<double> u(norm.size()), ell(norm.size());
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = norm[i] * norm[i];
                ell[i] = circle_plus(b.k, b.k, spec.ts.mu(i));
            }
            const GronwallReport g = gronwall_check(GridFn(spec.ts, u), check_regressive(GridFn(spec.ts, ell)),
                                                    spec.t0_idx);
            ok = ok && g.hypothesis_holds && g.conclusion_holds;
            if (g.first_hypothesis_violation) append_note(detail, "hypothesis fails at index " + std::to_string(*g.first_hypothesis_violation));
            if (g.first_conclusion_violation) append_note(detail, "conclusion fails at index " + std::to_string(*g.first_conclusion_violation));
        }
        if (detail.empty()) detail = "u^D <= (k+k) u and u <= u(t0) e_{k+k}";
        return CheckResult{"gronwall", ok, 0.0, 0.0, detail};
    });

    run_check(rep, "nonmultiplicity", [&] {
        const NonmultiplicityReport nm = nonmultiplicity_check(spec, opts);
        const double worst = nm.max_relative();
        const double limit = tol + 32.0 * kEps * static_cast<double>(spec.ts.size());
        return CheckResult{"nonmultiplicity", worst <= limit, worst, limit,
                           "stepping vs reduction (basis " + std::to_string(nm.basis_used) + ") vs variation"};
    });

    if (spec.ts.mode() == GridMode::ContinuumApprox) {
        run_check(rep, "refinement", [&] {
            const bool tabulated = std::any_of(cfg.coefficients.begin(), cfg.coefficients.end(), [](const auto& kv) {
                return kv.second.kind == CoefficientKind::Table;
            });
            if (tabulated) {
                return CheckResult{"refinement", true, 0.0, 0.0, "skipped: tabulated coefficients cannot be refined"};
            }
            const double h = cfg.timescale.h;
            const double d1 = max_successive_difference(cfg, with_mesh(cfg, h / 2));
            const double d2 = max_successive_difference(with_mesh(cfg, h / 2), with_mesh(cfg, h / 4));
            if (d1 == 0.0 && d2 == 0.0) {
                return CheckResult{"refinement", true, 0.0, 0.0, "solution identical at every mesh"};
            }
            const double ratio = d1 / d2;
            return CheckResult{"refinement", ratio >= 1.8 && ratio <= 2.2, ratio, 2.0,
                               "successive-difference ratio for h, h/2, h/4 (first order expects 2)"};
        });
    }
    return rep;
}

std::string format_verify(const VerifyReport& report) {
    std::ostringstream os;
    for (const auto& c : report.checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name << " worst=" << num(c.worst) << " limit=" << num(c.limit)
           << " (" << c.detail << ")\n";
    }
    os << (report.all_passed() ? "all checks passed\n" : "some checks failed\n");
    return os.str();
}

// ---------------------------------------------------------------------------

bool CompareReport::all_passed() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.passed; });
}

CompareReport cmd_compare(const ProblemConfig& cfg) {
    const BuiltProblem built = build_problem(cfg);
    const ProblemSpec& spec = built.spec;
    spec.validate();
    const ConstructionOptions opts = construction(cfg);
    const FundamentalPair fp = fundamental_pair(spec);
    const GridFn& y1 = fp.first.y;
    const GridFn& y2 = fp.second.y;
    const std::size_t n = spec.ts.size();

    CompareReport rep;
    rep.t.assign(spec.ts.points().begin(), spec.ts.points().end());

    const auto attempt = [&](const std::string& name, auto&& fn) {
        CompareMethod m{name, "ok", std::nullopt, std::nullopt};
        try {
            m.raw = fn();
        } catch (const Error& e) {
            m.status = e.what();
        }
        rep.methods.push_back(std::move(m));
    };
    const auto values = [](const GridFn& f) { return std::vector<double>(f.values().begin(), f.values().end()); };

    attempt("ro_y1", [&] { return values(reduction_order_particular(spec, y1, spec.a_idx, opts)); });
    attempt("ro_y2", [&] { return values(reduction_order_particular(spec, y2, spec.a_idx, opts)); });
    attempt("vop", [&] { return values(variation_particular(spec, y1, y2, spec.a_idx, opts)); });

    if (cfg.timescale.family == FamilyKind::Integers) {
        const auto first = static_cast<long>(cfg.timescale.a);
        const auto anchor = first + static_cast<long>(spec.a_idx);
        attempt("z_product_sum", [&] {
            const std::span<const double> p = spec.p.values().first(n - 1);
            const std::span<const double> q = spec.q.values().first(n - 1);
            const std::span<const double> r = spec.r.values().first(n - 1);
            return z::product_sum_particular(p, q, r, first, anchor, y1.values());
        });
        const auto is_const = [&](const char* sym) {
            const auto it = cfg.coefficients.find(sym);
            return it != cfg.coefficients.end() && it->second.kind == CoefficientKind::Constant;
        };
        if (built.form == EquationForm::Shift && is_const("alpha") && is_const("beta")) {
            const double half_alpha = cfg.coefficients.at("alpha").constant / 2.0;
            const double beta = cfg.coefficients.at("beta").constant;
            for (const auto& [name, which] : {std::pair{"z_const_l1", z::RootChoice::First},
                                              std::pair{"z_const_l2", z::RootChoice::Second}}) {
                attempt(name, [&, which = which] {
                    if (spec.a_idx != 0) {
                        throw Error(ErrorKind::ValidationError, "closed form needs the anchor at the window start");
                    }
                    return z::const_coeff_particular(half_alpha, beta, built.raw_r->values(), first,
                                                     static_cast<long>(cfg.timescale.b), which);
                });
            }
        }
    }

    const std::size_t t0 = spec.t0_idx;
    const double mu0 = spec.ts.mu(t0);
    double scale = 1.0;
    for (auto& m : rep.methods) {
        if (!m.raw) continue;
        const auto& v = *m.raw;
        const double c1 = v[t0];
        const double c2 = (v[t0 + 1] - v[t0]) / mu0;
        std::vector<double> matched(n);
        for (std::size_t i = 0; i < n; ++i) {
            matched[i] = v[i] - c1 * y1[i] - c2 * y2[i];
            scale = std::max(scale, std::abs(matched[i]));
        }
        m.matched = std::move(matched);
    }

    const ProblemSpec h = spec.homogeneous();
    for (std::size_t a = 0; a < rep.methods.size(); ++a) {
        for (std::size_t b = a + 1; b < rep.methods.size(); ++b) {
            const auto& ma = rep.methods[a];
            const auto& mb = rep.methods[b];
            if (!ma.raw || !mb.raw) continue;
            ComparePair pair;
            pair.first = ma.name;
            pair.second = mb.name;
            for (std::size_t i = 0; i < n; ++i) {
                pair.max_diff = std::max(pair.max_diff, std::abs((*ma.matched)[i] - (*mb.matched)[i]));
            }
            std::vector<double> diff(n);
            double raw_scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                diff[i] = (*ma.raw)[i] - (*mb.raw)[i];
                raw_scale = std::max({raw_scale, std::abs((*ma.raw)[i]), std::abs((*mb.raw)[i])});
            }
            pair.homogeneous_residual = residual(h, GridFn(spec.ts, diff)).max_abs();
            pair.diff_limit = cfg.solver.tol * scale;
            pair.residual_limit = residual_limit(spec, cfg.solver.tol, raw_scale);
            pair.passed = pair.max_diff <= pair.diff_limit && pair.homogeneous_residual <= pair.residual_limit;
            rep.pairs.push_back(pair);
        }
    }
    return rep;
}

std::string emit(const CompareReport& rep, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        std::ostringstream os;
        for (const auto& m : rep.methods) os << "# method " << m.name << ": " << m.status << "\n";
        for (const auto& p : rep.pairs) {
            os << "# pair " << p.first << " " << p.second << " max_diff=" << num(p.max_diff)
               << " diff_limit=" << num(p.diff_limit) << " homogeneous_residual=" << num(p.homogeneous_residual)
               << " residual_limit=" << num(p.residual_limit) << " " << (p.passed ? "PASS" : "FAIL") << "\n";
        }
        os << "t";
        for (const auto& m : rep.methods) os << ',' << m.name;
        os << "\n";
        for (std::size_t i = 0; i < rep.t.size(); ++i) {
            os << num(rep.t[i]);
            for (const auto& m : rep.methods) {
                os << ',';
                if (m.matched) os << num((*m.matched)[i]);
            }
            os << "\n";
        }
        return os.str();
    }
    json doc;
    json methods = json::array();
    for (const auto& m : rep.methods) {
        json jm;
        jm["name"] = m.name;
        jm["status"] = m.status;
        jm["raw"] = m.raw ? json(*m.raw) : json(nullptr);
        jm["matched"] = m.matched ? json(*m.matched) : json(nullptr);
        methods.push_back(std::move(jm));
    }
    json pairs = json::array();
    for (const auto& p : rep.pairs) {
        json jp;
        jp["first"] = p.first;
        jp["second"] = p.second;
        jp["max_diff"] = p.max_diff;
        jp["diff_limit"] = p.diff_limit;
        jp["homogeneous_residual"] = p.homogeneous_residual;
        jp["residual_limit"] = p.residual_limit;
        jp["passed"] = p.passed;
        pairs.push_back(std::move(jp));
    }
    doc["t"] = rep.t;
    doc["methods"] = std::move(methods);
    doc["pairs"] = std::move(pairs);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

BoundResult cmd_bound(const ProblemConfig& cfg, BoundModeChoice mode) {
    const BuiltProblem built = build_problem(cfg);
    const ProblemSpec h = built.spec.homogeneous();
    h.validate();
    const ConstructionOptions opts = construction(cfg);
    const IvpSolution sol = step_ivp(h);
    BoundResult out;
    out.report = growth_bound_check(h, sol.y, bound_options(h, mode, opts));
    for (std::size_t i = 0; i < out.report.norm.size(); ++i) out.t.push_back(h.ts[h.t0_idx + i]);
    return out;
}

std::string emit(const BoundResult& res, OutputFormat format) {
    const BoundReport& b = res.report;
    if (format == OutputFormat::Csv) {
        std::ostringstream os;
        os << "# k=" << num(b.k) << "\n";
        os << "t,norm,envelope,margin,verdict\n";
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            os << num(res.t[i]) << ',' << num(b.norm[i]) << ',' << num(b.envelope[i]) << ',' << num(b.margin[i])
               << ',' << (b.verdict[i] ? "true" : "false") << "\n";
        }
        return os.str();
    }
    json doc;
    doc["k"] = b.k;
    doc["all_hold"] = b.all_hold();
    doc["t"] = res.t;
    doc["norm"] = b.norm;
    doc["envelope"] = b.envelope;
    doc["margin"] = b.margin;
    doc["verdict"] = b.verdict;
    doc["energy_slope"] = b.energy_slope;
    doc["energy_bound"] = b.energy_bound;
    doc["energy_verdict"] = b.energy_verdict;
    return doc.dump(2) + "\n";
}

}  // namespace tsdyn::io
