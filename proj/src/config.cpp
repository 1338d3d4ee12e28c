#include "tsdyn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>

namespace tsdyn::io {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string at_line(int line, const std::string& msg) {
    return "line " + std::to_string(line) + ": " + msg;
}

double parse_number(const std::string& s, int line) {
    const std::string t = trim(s);
    double v = 0.0;
    const char* begin = t.data();
    const char* end = t.data() + t.size();
    if (!t.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorKind::ParseError, at_line(line, "expected a finite number, got '" + t + "'"));
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

std::vector<double> parse_list(const std::string& s, int line) {
    std::vector<double> out;
    for (const auto& part : split(s, ',')) out.push_back(parse_number(part, line));
    return out;
}

std::vector<std::pair<double, double>> parse_table(const std::string& s, int line) {
    std::vector<std::pair<double, double>> out;
    for (const auto& entry : split(s, ',')) {
        const auto kv = split(entry, ':');
        if (kv.size() != 2) {
            throw Error(ErrorKind::ParseError, at_line(line, "table entries are t:value, got '" + entry + "'"));
        }
        out.emplace_back(parse_number(kv[0], line), parse_number(kv[1], line));
    }
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s;
}

const Entry* find(const Section& sec, const std::string& key) {
    const auto it = sec.find(key);
    return it == sec.end() ? nullptr : &it->second;
}

const Entry& require(const Section& sec, const std::string& section, const std::string& key) {
    const Entry* e = find(sec, key);
    if (!e) throw Error(ErrorKind::ValidationError, "[" + section + "] is missing '" + key + "'");
    return *e;
}

void reject_unknown(const Section& sec, const std::string& section, const std::set<std::string>& allowed) {
    for (const auto& [key, entry] : sec) {
        if (!allowed.count(key)) {
            throw Error(ErrorKind::ValidationError,
                        at_line(entry.line, "unknown key '" + key + "' in [" + section + "]"));
        }
    }
}

TimescaleConfig parse_timescale(const Section& sec) {
    TimescaleConfig ts;
    const Entry& fam = require(sec, "timescale", "family");
    const auto num = [&](const char* key) {
        const Entry& e = require(sec, "timescale", key);
        return parse_number(e.value, e.line);
    };
    if (fam.value == "integers") {
        ts.family = FamilyKind::Integers;
        reject_unknown(sec, "timescale", {"family", "a", "b"});
        ts.a = num("a");
        ts.b = num("b");
        if (ts.a != std::floor(ts.a) || ts.b != std::floor(ts.b)) {
            throw Error(ErrorKind::ValidationError, "integer time scale needs integral a and b");
        }
    } else if (fam.value == "hz") {
        ts.family = FamilyKind::HZ;
        reject_unknown(sec, "timescale", {"family", "a", "b", "h"});
        ts.h = num("h");
        ts.a = num("a");
        ts.b = num("b");
    } else if (fam.value == "quantum") {
        ts.family = FamilyKind::Quantum;
        reject_unknown(sec, "timescale", {"family", "a", "h", "k_max"});
        ts.h = num("h");
        ts.a = num("a");
        const double k = num("k_max");
        if (k != std::floor(k) || k < 0 || k > 10000) {
            throw Error(ErrorKind::ValidationError, "k_max must be a nonnegative integer");
        }
        ts.k_max = static_cast<int>(k);
    } else if (fam.value == "reals") {
        ts.family = FamilyKind::Reals;
        reject_unknown(sec, "timescale", {"family", "a", "b", "h"});
        ts.a = num("a");
        ts.b = num("b");
        ts.h = num("h");
    } else if (fam.value == "explicit") {
        ts.family = FamilyKind::Explicit;
        reject_unknown(sec, "timescale", {"family", "points"});
        const Entry& e = require(sec, "timescale", "points");
        ts.points = parse_list(e.value, e.line);
    } else {
        throw Error(ErrorKind::ValidationError, at_line(fam.line, "unknown family '" + fam.value + "'"));
    }
    return ts;
}

std::string form_name(EquationForm f) {
    switch (f) {
        case EquationForm::Delta: return "delta";
        case EquationForm::Shift: return "shift";
        case EquationForm::Sigma: return "sigma";
    }
    return "delta";
}

std::string family_name(FamilyKind f) {
    switch (f) {
        case FamilyKind::Integers: return "integers";
        case FamilyKind::HZ: return "hz";
        case FamilyKind::Quantum: return "quantum";
        case FamilyKind::Reals: return "reals";
        case FamilyKind::Explicit: return "explicit";
    }
    return "integers";
}

std::vector<std::string> symbols_for(EquationForm f) {
    if (f == EquationForm::Delta) return {"p", "q", "r"};
    return {"alpha", "beta", "r"};
}

}  // namespace

TimeScale build_timescale(const TimescaleConfig& c) {
    switch (c.family) {
        case FamilyKind::Integers: return TimeScale::integers(static_cast<long>(c.a), static_cast<long>(c.b));
        case FamilyKind::HZ: return TimeScale::hz(c.h, c.a, c.b);
        case FamilyKind::Quantum: return TimeScale::quantum(c.h, c.a, c.k_max);
        case FamilyKind::Reals: return TimeScale::reals(c.a, c.b, c.h);
        case FamilyKind::Explicit: return TimeScale::from_points(c.points);
    }
    throw Error(ErrorKind::ValidationError, "unknown family");
}

GridFn evaluate_coefficient(const Coefficient& c, const TimeScale& ts, const std::string& name) {
    switch (c.kind) {
        case CoefficientKind::Constant: return GridFn::constant(ts, c.constant);
        case CoefficientKind::Poly:
            return GridFn::sample(ts, [&](double t) {
                double acc = 0.0;
                for (auto it = c.poly.rbegin(); it != c.poly.rend(); ++it) acc = acc * t + *it;
                return acc;
            });
        case CoefficientKind::Table: {
            std::vector<std::optional<double>> slots(ts.size());
            for (const auto& [t, v] : c.table) {
                const auto idx = ts.index_of(t);
                if (!idx) {
                    throw Error(ErrorKind::ValidationError,
                                name + ".table: t=" + fmt(t) + " is not a grid point");
                }
                if (slots[*idx]) {
                    throw Error(ErrorKind::ValidationError, name + ".table: t=" + fmt(t) + " listed twice");
                }
                slots[*idx] = v;
            }
            std::vector<double> values;
            for (std::size_t i = 0; i < ts.size(); ++i) {
                if (!slots[i]) {
                    if (i + 1 == ts.size()) break;
                    throw Error(ErrorKind::ValidationError,
                                name + ".table: no value for grid point t=" + fmt(ts[i]));
                }
                values.push_back(*slots[i]);
            }
            return GridFn(ts, std::move(values));
        }
    }
    throw Error(ErrorKind::ValidationError, "unknown coefficient kind");
}

namespace {

void validate_config(const ProblemConfig& cfg, const std::map<std::string, int>& lines) {
    const auto line_of = [&](const std::string& key) {
        const auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    const auto wrap = [&](const std::string& key, auto&& fn) {
        try {
            return fn();
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::ValidationError || e.kind() == ErrorKind::ParseError) throw;
            const int line = line_of(key);
            const std::string msg = line ? at_line(line, e.what()) : std::string(e.what());
            throw Error(ErrorKind::ValidationError, msg, e.index());
        }
    };
    const TimeScale ts = wrap("timescale.family", [&] { return build_timescale(cfg.timescale); });
    if (cfg.form == EquationForm::Shift && cfg.timescale.family != FamilyKind::Integers) {
        throw Error(ErrorKind::ValidationError, "shift form needs family = integers");
    }
    std::map<std::string, GridFn> values;
    for (const auto& sym : symbols_for(cfg.form)) {
        const auto it = cfg.coefficients.find(sym);
        if (it == cfg.coefficients.end()) {
            throw Error(ErrorKind::ValidationError, "[coefficients] is missing a representation for '" + sym + "'");
        }
        const std::string key = "coefficients." + sym;
        values.emplace(sym, wrap(key, [&] { return evaluate_coefficient(it->second, ts, sym); }));
    }
    for (const auto& [sym, c] : cfg.coefficients) {
        const auto allowed = symbols_for(cfg.form);
        if (std::find(allowed.begin(), allowed.end(), sym) == allowed.end()) {
            throw Error(ErrorKind::ValidationError,
                        at_line(line_of("coefficients." + sym),
                                "symbol '" + sym + "' does not belong to form " + form_name(cfg.form)));
        }
    }
    if (cfg.form == EquationForm::Shift) {
        const GridFn& beta = values.at("beta");
        for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
            if (beta[i] == 0.0) {
                throw Error(ErrorKind::ValidationError,
                            at_line(line_of("coefficients.beta"),
                                    "beta(t) = 0 at t=" + fmt(ts[i]) +
                                        "; the shift form requires beta(t) != 0 (regressivity)"),
                            i);
            }
        }
    }
    for (const auto& [key, value] : {std::pair{"t0", cfg.t0}, std::pair{"a", cfg.anchor}}) {
        if (!value) continue;
        const auto idx = ts.index_of(*value);
        if (!idx) {
            throw Error(ErrorKind::ValidationError,
                        at_line(line_of(std::string("initial.") + key),
                                std::string(key) + "=" + fmt(*value) + " is not a grid point"));
        }
        if (std::string(key) == "t0" && *idx + 1 >= ts.size()) {
            throw Error(ErrorKind::ValidationError,
                        at_line(line_of("initial.t0"), "t0 cannot be the last grid point"));
        }
    }
    if (!(cfg.solver.reg_tol > 0) || !(cfg.solver.tol > 0) || !(cfg.solver.homogeneous_tol > 0)) {
        throw Error(ErrorKind::ValidationError, "solver tolerances must be positive");
    }
}

}  // namespace

ProblemConfig parse_problem(std::string_view text) {
    std::map<std::string, Section> sections;
    std::string current;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(ErrorKind::ParseError, at_line(line_no, "unterminated section header"));
            current = trim(line.substr(1, line.size() - 2));
            static const std::set<std::string> known{"timescale", "coefficients", "initial", "solver"};
            if (!known.count(current)) {
                throw Error(ErrorKind::ValidationError, at_line(line_no, "unknown section [" + current + "]"));
            }
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::ParseError, at_line(line_no, "expected key = value"));
        if (current.empty()) throw Error(ErrorKind::ParseError, at_line(line_no, "key outside of any section"));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorKind::ParseError, at_line(line_no, "empty key"));
        auto& sec = sections[current];
        if (sec.count(key)) {
            throw Error(ErrorKind::ValidationError, at_line(line_no, "duplicate key '" + key + "'"));
        }
        sec[key] = Entry{value, line_no};
    }

    ProblemConfig cfg;
    std::map<std::string, int> lines;
    for (const auto& [name, sec] : sections) {
        for (const auto& [key, e] : sec) lines[name + "." + key] = e.line;
    }

    const auto ts_it = sections.find("timescale");
    if (ts_it == sections.end()) throw Error(ErrorKind::ValidationError, "missing [timescale] section");
    cfg.timescale = parse_timescale(ts_it->second);

    const auto co_it = sections.find("coefficients");
    if (co_it == sections.end()) throw Error(ErrorKind::ValidationError, "missing [coefficients] section");
    const Section& co = co_it->second;
    if (const Entry* f = find(co, "form")) {
        if (f->value == "delta") cfg.form = EquationForm::Delta;
        else if (f->value == "shift") cfg.form = EquationForm::Shift;
        else if (f->value == "sigma") cfg.form = EquationForm::Sigma;
        else throw Error(ErrorKind::ValidationError, at_line(f->line, "unknown form '" + f->value + "'"));
    }
    for (const auto& [key, e] : co) {
        if (key == "form") continue;
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            throw Error(ErrorKind::ValidationError,
                        at_line(e.line, "coefficient keys look like <symbol>.constant|poly|table, got '" + key + "'"));
        }
        const std::string sym = key.substr(0, dot);
        const std::string kind = key.substr(dot + 1);
        if (cfg.coefficients.count(sym)) {
            throw Error(ErrorKind::ValidationError,
                        at_line(e.line, "symbol '" + sym + "' has more than one representation"));
        }
        Coefficient c;
        if (kind == "constant") {
            c.kind = CoefficientKind::Constant;
            c.constant = parse_number(e.value, e.line);
        } else if (kind == "poly") {
            c.kind = CoefficientKind::Poly;
            c.poly = parse_list(e.value, e.line);
        } else if (kind == "table") {
            c.kind = CoefficientKind::Table;
            c.table = parse_table(e.value, e.line);
        } else {
            throw Error(ErrorKind::ValidationError, at_line(e.line, "unknown representation '" + kind + "'"));
        }
        cfg.coefficients.emplace(sym, std::move(c));
        lines["coefficients." + sym] = e.line;
    }

    if (const auto it = sections.find("initial"); it != sections.end()) {
        const Section& s = it->second;
        reject_unknown(s, "initial", {"t0", "a", "A", "B"});
        if (const Entry* e = find(s, "t0")) cfg.t0 = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "a")) cfg.anchor = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "A")) cfg.A = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "B")) cfg.B = parse_number(e->value, e->line);
    }

    if (const auto it = sections.find("solver"); it != sections.end()) {
        const Section& s = it->second;
        reject_unknown(s, "solver", {"basis", "oracle", "reg_tol", "tol", "homogeneous_tol", "bound_mode"});
        if (const Entry* e = find(s, "basis")) {
            if (e->value == "auto") cfg.solver.basis = BasisChoice::Auto;
            else if (e->value == "1") cfg.solver.basis = BasisChoice::First;
            else if (e->value == "2") cfg.solver.basis = BasisChoice::Second;
            else throw Error(ErrorKind::ValidationError, at_line(e->line, "basis must be auto, 1 or 2"));
        }
        if (const Entry* e = find(s, "oracle")) {
            if (e->value == "on") cfg.solver.oracle = true;
            else if (e->value == "off") cfg.solver.oracle = false;
            else throw Error(ErrorKind::ValidationError, at_line(e->line, "oracle must be on or off"));
        }
        if (const Entry* e = find(s, "reg_tol")) cfg.solver.reg_tol = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "tol")) cfg.solver.tol = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "homogeneous_tol")) cfg.solver.homogeneous_tol = parse_number(e->value, e->line);
        if (const Entry* e = find(s, "bound_mode")) {
            if (e->value == "auto") cfg.solver.bound_mode = BoundModeChoice::Auto;
            else if (e->value == "const") cfg.solver.bound_mode = BoundModeChoice::Const;
            else if (e->value == "var") cfg.solver.bound_mode = BoundModeChoice::Var;
            else throw Error(ErrorKind::ValidationError, at_line(e->line, "bound_mode must be auto, const or var"));
        }
    }

    validate_config(cfg, lines);
    return cfg;
}

std::string echo_config(const ProblemConfig& c) {
    std::ostringstream os;
    os << "[timescale]\n";
    os << "family = " << family_name(c.timescale.family) << "\n";
    switch (c.timescale.family) {
        case FamilyKind::Integers:
            os << "a = " << fmt(c.timescale.a) << "\nb = " << fmt(c.timescale.b) << "\n";
            break;
        case FamilyKind::HZ:
        case FamilyKind::Reals:
            os << "a = " << fmt(c.timescale.a) << "\nb = " << fmt(c.timescale.b) << "\nh = " << fmt(c.timescale.h)
               << "\n";
            break;
        case FamilyKind::Quantum:
            os << "a = " << fmt(c.timescale.a) << "\nh = " << fmt(c.timescale.h) << "\nk_max = " << c.timescale.k_max
               << "\n";
            break;
        case FamilyKind::Explicit:
            os << "points = " << fmt_list(c.timescale.points) << "\n";
            break;
    }
    os << "\n[coefficients]\nform = " << form_name(c.form) << "\n";
    for (const auto& [sym, coef] : c.coefficients) {
        switch (coef.kind) {
            case CoefficientKind::Constant: os << sym << ".constant = " << fmt(coef.constant) << "\n"; break;
            case CoefficientKind::Poly: os << sym << ".poly = " << fmt_list(coef.poly) << "\n"; break;
            case CoefficientKind::Table: {
                os << sym << ".table = ";
                for (std::size_t i = 0; i < coef.table.size(); ++i) {
                    if (i) os << ", ";
                    os << fmt(coef.table[i].first) << ":" << fmt(coef.table[i].second);
                }
                os << "\n";
                break;
            }
        }
    }
    os << "\n[initial]\n";
    if (c.t0) os << "t0 = " << fmt(*c.t0) << "\n";
    if (c.anchor) os << "a = " << fmt(*c.anchor) << "\n";
    os << "A = " << fmt(c.A) << "\nB = " << fmt(c.B) << "\n";
    os << "\n[solver]\n";
    const char* basis = c.solver.basis == BasisChoice::Auto ? "auto" : c.solver.basis == BasisChoice::First ? "1" : "2";
    const char* mode = c.solver.bound_mode == BoundModeChoice::Auto    ? "auto"
                       : c.solver.bound_mode == BoundModeChoice::Const ? "const"
                                                                       : "var";
    os << "basis = " << basis << "\n";
    os << "oracle = " << (c.solver.oracle ? "on" : "off") << "\n";
    os << "reg_tol = " << fmt(c.solver.reg_tol) << "\n";
    os << "tol = " << fmt(c.solver.tol) << "\n";
    os << "homogeneous_tol = " << fmt(c.solver.homogeneous_tol) << "\n";
    os << "bound_mode = " << mode << "\n";
    return os.str();
}

std::string config_hash(const ProblemConfig& config) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : echo_config(config)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

BuiltProblem build_problem(const ProblemConfig& cfg) {
    const TimeScale ts = build_timescale(cfg.timescale);
    const auto index = [&](const std::optional<double>& t) -> std::size_t {
        if (!t) return 0;
        const auto idx = ts.index_of(*t);
        if (!idx) throw Error(ErrorKind::ValidationError, fmt(*t) + " is not a grid point");
        return *idx;
    };
    const std::size_t t0 = index(cfg.t0);
    const std::size_t a = index(cfg.anchor);
    const auto coef = [&](const std::string& sym) {
        const auto it = cfg.coefficients.find(sym);
        if (it == cfg.coefficients.end()) {
            throw Error(ErrorKind::ValidationError, "missing coefficient '" + sym + "'");
        }
        return evaluate_coefficient(it->second, ts, sym);
    };

    BuiltProblem out{ProblemSpec{ts, GridFn::constant(ts, 0.0), GridFn::constant(ts, 0.0),
                                 GridFn::constant(ts, 0.0), t0, cfg.A, cfg.B, a, cfg.solver.reg_tol},
                     cfg.form, std::nullopt, std::nullopt, std::nullopt, std::nullopt};
    switch (cfg.form) {
        case EquationForm::Delta:
            out.spec.p = coef("p");
            out.spec.q = coef("q");
            out.spec.r = coef("r");
            break;
        case EquationForm::Shift: {
            const GridFn alpha = coef("alpha");
            const GridFn beta = coef("beta");
            const GridFn r = coef("r");
            const auto need = ts.size() - 1;
            z::ShiftFormSpec shift{static_cast<long>(cfg.timescale.a), static_cast<long>(cfg.timescale.b),
                                   std::vector<double>(alpha.values().begin(), alpha.values().begin() + need),
                                   std::vector<double>(beta.values().begin(), beta.values().begin() + need),
                                   std::vector<double>(r.values().begin(), r.values().begin() + need)};
            shift.validate();
            const z::DeltaCoefficients dc = z::shift_to_delta(shift.alpha, shift.beta);
            out.spec.p = GridFn(ts, dc.p);
            out.spec.q = GridFn(ts, dc.q);
            out.spec.r = r;
            out.alpha = alpha;
            out.beta = beta;
            out.raw_r = r;
            out.shift = std::move(shift);
            break;
        }
        case EquationForm::Sigma: {
            const GridFn alpha = coef("alpha");
            const GridFn beta = coef("beta");
            const GridFn r = coef("r");
            SigmaConversion conv = convert_sigma_form(alpha, beta, cfg.solver.reg_tol);
            out.spec.p = std::move(conv.p);
            out.spec.q = std::move(conv.q);
            out.spec.r = convert_sigma_forcing(alpha, r, cfg.solver.reg_tol);
            out.alpha = alpha;
            out.beta = beta;
            out.raw_r = r;
            break;
        }
    }
    return out;
}

ProblemConfig with_mesh(const ProblemConfig& config, double h) {
    if (config.timescale.family != FamilyKind::Reals) {
        throw Error(ErrorKind::ValidationError, "mesh refinement applies to continuum configs only");
    }
    ProblemConfig out = config;
    out.timescale.h = h;
    return out;
}

}  // namespace tsdyn::io
