#ifndef CAUCHYPROP_CONFIG_HPP
#define CAUCHYPROP_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "operator.hpp"
#include "propagator.hpp"
#include "series.hpp"

// Run configuration: a flat, TOML-like document of [section] headers and
// `key = value` lines. Values are numbers (optionally `pi`, `2*pi`, `pi/2`,
// `3*pi/4`), double-quoted strings, or single-line lists of either.
namespace cauchyprop::config {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "config line " + std::to_string(line) + ": " + what
                                  : "config: " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

using Scalar = std::variant<double, std::string>;

struct Value {
    std::vector<Scalar> items;  // one item unless is_list
    bool is_list = false;
    std::size_t line = 0;
};

/// Parsed document: "section.key" -> value.
using Document = std::map<std::string, Value>;

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        return std::nullopt;
    return v;
}

// number | [num*]pi[/num]
inline std::optional<double> parse_number(std::string_view s) {
    s = trim(s);
    const auto at = s.find("pi");
    if (at == std::string_view::npos)
        return to_double(s);
    double scale = 1.0;
    std::string_view head = trim(s.substr(0, at));
    if (head == "-") {
        scale = -1.0;
    } else if (!head.empty()) {
        if (head.back() != '*')
            return std::nullopt;
        const auto h = to_double(head.substr(0, head.size() - 1));
        if (!h)
            return std::nullopt;
        scale = *h;
    }
    std::string_view tail = trim(s.substr(at + 2));
    if (!tail.empty()) {
        if (tail.front() != '/')
            return std::nullopt;
        const auto d = to_double(tail.substr(1));
        if (!d || *d == 0.0)
            return std::nullopt;
        scale /= *d;
    }
    return scale * M_PI;
}

inline Scalar parse_scalar(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"')
        return std::string(tok.substr(1, tok.size() - 2));
    if (const auto v = parse_number(tok))
        return *v;
    throw ConfigError("cannot parse value '" + std::string(tok) + "'", line);
}

// Split on commas that are outside quotes and parentheses.
inline std::vector<std::string_view> split_items(std::string_view body) {
    std::vector<std::string_view> out;
    int depth = 0;
    bool quoted = false;
    std::size_t start = 0;
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c == '"')
            quoted = !quoted;
        else if (!quoted && c == '(')
            ++depth;
        else if (!quoted && c == ')')
            --depth;
        else if (!quoted && depth == 0 && c == ',') {
            out.push_back(body.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(body.substr(start));
    return out;
}

inline std::string strip_comment(std::string_view line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"')
            quoted = !quoted;
        else if (line[i] == '#' && !quoted)
            return std::string(line.substr(0, i));
    }
    return std::string(line);
}

} // namespace detail

inline Document parse_document(std::string_view text) {
    Document doc;
    std::string section;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw =
            text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        const std::string stripped = detail::strip_comment(raw);
        const std::string_view line = detail::trim(stripped);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header", line_no);
            section = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (section.empty())
                throw ConfigError("empty section name", line_no);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("expected 'key = value'", line_no);
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view rhs = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("missing key before '='", line_no);
        if (section.empty())
            throw ConfigError("key '" + key + "' appears before any [section]", line_no);
        if (rhs.empty())
            throw ConfigError("key '" + key + "' has no value", line_no);
        Value v;
        v.line = line_no;
        if (rhs.front() == '[') {
            if (rhs.back() != ']')
                throw ConfigError("list for '" + key + "' must close on the same line", line_no);
            v.is_list = true;
            const std::string_view body = detail::trim(rhs.substr(1, rhs.size() - 2));
            if (!body.empty())
                for (auto item : detail::split_items(body))
                    v.items.push_back(detail::parse_scalar(item, line_no));
        } else {
            v.items.push_back(detail::parse_scalar(rhs, line_no));
        }
        const std::string full = section + "." + key;
        if (doc.count(full))
            throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line_no);
        doc.emplace(full, std::move(v));
    }
    return doc;
}

/// Closed catalog of initial-data expressions.
struct InitialExpr {
    enum class Kind { sin, cos, gaussian, zero, constant };
    Kind kind = Kind::zero;
    double p0 = 0.0;  // k, center or c
    double p1 = 0.0;  // width
    std::string text;

    double operator()(double x) const {
        switch (kind) {
        case Kind::sin: return std::sin(p0 * x);
        case Kind::cos: return std::cos(p0 * x);
        case Kind::gaussian: {
            const double s = (x - p0) / p1;
            return std::exp(-s * s);
        }
        case Kind::constant: return p0;
        case Kind::zero: break;
        }
        return 0.0;
    }
};

inline constexpr const char* expression_catalog =
    "sin(k), cos(k), gaussian(center, width), zero, constant(c)";

inline InitialExpr parse_expression(std::string_view text, std::size_t line = 0) {
    const std::string_view s = detail::trim(text);
    InitialExpr e;
    e.text = std::string(s);
    auto fail = [&]() -> InitialExpr {
        throw ConfigError("initial_data expression '" + std::string(s) +
                              "' is not in the catalog: " + expression_catalog,
                          line);
    };
    if (s == "zero")
        return e;
    const auto open = s.find('(');
    if (open == std::string_view::npos || s.back() != ')')
        return fail();
    const std::string_view name = detail::trim(s.substr(0, open));
    const auto args = detail::split_items(s.substr(open + 1, s.size() - open - 2));
    std::vector<double> vals;
    for (auto a : args) {
        const auto v = detail::parse_number(a);
        if (!v)
            return fail();
        vals.push_back(*v);
    }
    using K = InitialExpr::Kind;
    if ((name == "sin" || name == "cos" || name == "constant") && vals.size() == 1) {
        e.kind = name == "sin" ? K::sin : name == "cos" ? K::cos : K::constant;
        e.p0 = vals[0];
        return e;
    }
    if (name == "gaussian" && vals.size() == 2) {
        if (!(vals[1] > 0.0))
            throw ConfigError("gaussian width must be positive in '" + std::string(s) + "'", line);
        e.kind = K::gaussian;
        e.p0 = vals[0];
        e.p1 = vals[1];
        return e;
    }
    return fail();
}

enum class OperatorKind { scalar, dense, fourier, stencil };
enum class OracleKind { none, rk4, dalembert, heat_eigen, translate };
enum class ScanParam { terms, substeps, grid_n };

struct OperatorConfig {
    OperatorKind kind = OperatorKind::scalar;
    complex value = 0.0;              // scalar
    std::size_t dim = 0;              // dense
    std::vector<complex> entries;     // dense, row-major
    complex coefficient = 1.0;        // fourier, stencil
    int power = 2;                    // fourier: coefficient * (i k)^power
    std::vector<double> stencil;      // stencil
    int h_power = 0;                  // stencil: coefficients scaled by coefficient / h^h_power
};

struct GridConfig {
    std::optional<std::size_t> n;
    double a = 0.0;
    double b = 2.0 * M_PI;
};

struct OracleConfig {
    OracleKind kind = OracleKind::none;
    std::size_t steps = 10000;
};

struct RunConfig {
    int order = 1;
    double t0 = 0.0;
    OperatorConfig op;
    GridConfig grid;
    std::vector<InitialExpr> initial_data;
    std::vector<double> times;
    SeriesParams series;
    OracleConfig oracle;
    std::string output_path = "out";
    // 0 selects the sub-step count from the safety radius.
    std::size_t substeps = 1;
};

namespace detail {

struct Reader {
    const Document& doc;
    std::set<std::string> used;

    const Value* find(const std::string& key) {
        const auto it = doc.find(key);
        if (it == doc.end())
            return nullptr;
        used.insert(key);
        return &it->second;
    }

    static std::string short_name(const std::string& key) { return key.substr(key.find('.') + 1); }

    double number(const Value& v, const std::string& key) {
        if (v.is_list || !std::holds_alternative<double>(v.items[0]))
            throw ConfigError("'" + short_name(key) + "' must be a number", v.line);
        const double d = std::get<double>(v.items[0]);
        if (!std::isfinite(d))
            throw ConfigError("'" + short_name(key) + "' must be finite", v.line);
        return d;
    }

    std::optional<double> number(const std::string& key) {
        const Value* v = find(key);
        if (!v)
            return std::nullopt;
        return number(*v, key);
    }

    std::optional<long> integer(const std::string& key) {
        const Value* v = find(key);
        if (!v)
            return std::nullopt;
        const double d = number(*v, key);
        if (d != std::floor(d) || std::abs(d) > 1e12)
            throw ConfigError("'" + short_name(key) + "' must be an integer", v->line);
        return static_cast<long>(d);
    }

    std::optional<std::string> string(const std::string& key) {
        const Value* v = find(key);
        if (!v)
            return std::nullopt;
        if (v->is_list || !std::holds_alternative<std::string>(v->items[0]))
            throw ConfigError("'" + short_name(key) + "' must be a quoted string", v->line);
        return std::get<std::string>(v->items[0]);
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        const Value* v = find(key);
        if (!v)
            return std::nullopt;
        if (!v->is_list)
            throw ConfigError("'" + short_name(key) + "' must be a list", v->line);
        std::vector<double> out;
        for (const auto& item : v->items) {
            if (!std::holds_alternative<double>(item))
                throw ConfigError("'" + short_name(key) + "' must hold numbers", v->line);
            out.push_back(std::get<double>(item));
        }
        return out;
    }

    std::size_t line_of(const std::string& key) const {
        const auto it = doc.find(key);
        return it == doc.end() ? 0 : it->second.line;
    }

    template <class T>
    T required(std::optional<T> v, const std::string& key) {
        if (!v)
            throw ConfigError("missing required key '" + short_name(key) + "' in [" +
                              key.substr(0, key.find('.')) + "]");
        return *v;
    }
};

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "problem.order",      "problem.t0",          "problem.initial_data",
        "operator.kind",      "operator.value",      "operator.value_im",
        "operator.dim",       "operator.entries",    "operator.entries_im",
        "operator.coefficient", "operator.coefficient_im", "operator.power",
        "operator.stencil",   "operator.h_power",
        "grid.n",             "grid.a",              "grid.b",
        "run.times",          "run.output",          "run.substeps",
        "series.tol",         "series.max_terms",    "series.safety_radius",
        "oracle.kind",        "oracle.steps",
    };
    return keys;
}

inline const std::set<std::string>& keys_for(OperatorKind k) {
    static const std::set<std::string> scalar = {"operator.value", "operator.value_im"};
    static const std::set<std::string> dense = {"operator.dim", "operator.entries",
                                                "operator.entries_im"};
    static const std::set<std::string> fourier = {"operator.coefficient", "operator.coefficient_im",
                                                  "operator.power"};
    static const std::set<std::string> stencil = {"operator.coefficient", "operator.stencil",
                                                  "operator.h_power"};
    switch (k) {
    case OperatorKind::scalar: return scalar;
    case OperatorKind::dense: return dense;
    case OperatorKind::fourier: return fourier;
    default: return stencil;
    }
}

} // namespace detail

/// Parses and validates a run configuration. Unknown sections and keys are errors.
inline RunConfig parse_config(std::string_view text) {
    const Document doc = parse_document(text);
    for (const auto& [key, v] : doc) {
        if (!detail::known_keys().count(key)) {
            const auto dot = key.find('.');
            throw ConfigError("unknown key '" + key.substr(dot + 1) + "' in [" + key.substr(0, dot) + "]",
                              v.line);
        }
    }
    detail::Reader rd{doc, {}};
    RunConfig cfg;

    // [problem]
    const long order = rd.required(rd.integer("problem.order"), "problem.order");
    if (order < 1)
        throw ConfigError("'order' must be >= 1", rd.line_of("problem.order"));
    cfg.order = static_cast<int>(order);
    cfg.t0 = rd.number("problem.t0").value_or(0.0);
    const Value* init = rd.find("problem.initial_data");
    if (!init)
        throw ConfigError("missing required key 'initial_data' in [problem]");
    if (!init->is_list)
        throw ConfigError("'initial_data' must be a list of expression strings", init->line);
    for (const auto& item : init->items) {
        if (!std::holds_alternative<std::string>(item))
            throw ConfigError("'initial_data' entries must be quoted expression strings", init->line);
        cfg.initial_data.push_back(parse_expression(std::get<std::string>(item), init->line));
    }
    if (cfg.initial_data.size() != static_cast<std::size_t>(cfg.order))
        throw ConfigError("'initial_data' has " + std::to_string(cfg.initial_data.size()) +
                              " entries but order is " + std::to_string(cfg.order) +
                              " (one expression per derivative u_0 .. u_{N-1})",
                          init->line);

    // [operator]
    const std::string kind = rd.required(rd.string("operator.kind"), "operator.kind");
    const std::size_t kind_line = rd.line_of("operator.kind");
    if (kind == "scalar")
        cfg.op.kind = OperatorKind::scalar;
    else if (kind == "dense")
        cfg.op.kind = OperatorKind::dense;
    else if (kind == "fourier")
        cfg.op.kind = OperatorKind::fourier;
    else if (kind == "stencil")
        cfg.op.kind = OperatorKind::stencil;
    else
        throw ConfigError("operator kind '" + kind + "' unknown (scalar, dense, fourier, stencil)",
                          kind_line);
    for (const auto& [key, v] : doc) {
        if (key.rfind("operator.", 0) == 0 && key != "operator.kind" &&
            !detail::keys_for(cfg.op.kind).count(key))
            throw ConfigError("key '" + key.substr(9) + "' does not apply to operator kind '" + kind + "'",
                              v.line);
    }
    switch (cfg.op.kind) {
    case OperatorKind::scalar:
        cfg.op.value = complex(rd.required(rd.number("operator.value"), "operator.value"),
                               rd.number("operator.value_im").value_or(0.0));
        break;
    case OperatorKind::dense: {
        const long dim = rd.required(rd.integer("operator.dim"), "operator.dim");
        if (dim < 1)
            throw ConfigError("'dim' must be positive", rd.line_of("operator.dim"));
        cfg.op.dim = static_cast<std::size_t>(dim);
        const auto re = rd.required(rd.numbers("operator.entries"), "operator.entries");
        const auto im = rd.numbers("operator.entries_im").value_or(std::vector<double>(re.size()));
        if (re.size() != cfg.op.dim * cfg.op.dim)
            throw ConfigError("'entries' must hold dim*dim = " + std::to_string(dim * dim) + " numbers",
                              rd.line_of("operator.entries"));
        if (im.size() != re.size())
            throw ConfigError("'entries_im' must match 'entries' in length",
                              rd.line_of("operator.entries_im"));
        for (std::size_t i = 0; i < re.size(); ++i)
            cfg.op.entries.emplace_back(re[i], im[i]);
        break;
    }
    case OperatorKind::fourier: {
        cfg.op.coefficient = complex(rd.number("operator.coefficient").value_or(1.0),
                                     rd.number("operator.coefficient_im").value_or(0.0));
        const long p = rd.integer("operator.power").value_or(2);
        if (p < 0 || p > 16)
            throw ConfigError("'power' must lie in [0, 16]", rd.line_of("operator.power"));
        cfg.op.power = static_cast<int>(p);
        break;
    }
    case OperatorKind::stencil: {
        cfg.op.coefficient = complex(rd.number("operator.coefficient").value_or(1.0),
                                     rd.number("operator.coefficient_im").value_or(0.0));
        if (cfg.op.coefficient.imag() != 0.0)
            throw ConfigError("stencil coefficients are real; drop 'coefficient_im'",
                              rd.line_of("operator.coefficient_im"));
        cfg.op.stencil = rd.required(rd.numbers("operator.stencil"), "operator.stencil");
        if (cfg.op.stencil.empty() || cfg.op.stencil.size() % 2 == 0)
            throw ConfigError("'stencil' must have odd length", rd.line_of("operator.stencil"));
        const long hp = rd.integer("operator.h_power").value_or(0);
        if (hp < 0 || hp > 16)
            throw ConfigError("'h_power' must lie in [0, 16]", rd.line_of("operator.h_power"));
        cfg.op.h_power = static_cast<int>(hp);
        break;
    }
    }

    // [grid]
    if (const auto n = rd.integer("grid.n")) {
        if (*n < 2)
            throw ConfigError("grid 'n' must be >= 2", rd.line_of("grid.n"));
        cfg.grid.n = static_cast<std::size_t>(*n);
    }
    cfg.grid.a = rd.number("grid.a").value_or(0.0);
    cfg.grid.b = rd.number("grid.b").value_or(cfg.grid.a + 2.0 * M_PI);
    if (!(cfg.grid.b > cfg.grid.a))
        throw ConfigError("grid requires a < b", rd.line_of("grid.b"));
    if (cfg.op.kind == OperatorKind::dense && cfg.grid.n && *cfg.grid.n != cfg.op.dim)
        throw ConfigError("grid 'n' must equal operator 'dim' for a dense operator",
                          rd.line_of("grid.n"));

    // [run]
    const Value* times = rd.find("run.times");
    if (!times)
        throw ConfigError("missing required key 'times' in [run]");
    cfg.times = *rd.numbers("run.times");
    if (cfg.times.empty())
        throw ConfigError("times must be nonempty", times->line);
    for (double t : cfg.times)
        if (!std::isfinite(t))
            throw ConfigError("times must be finite", times->line);
    cfg.output_path = rd.string("run.output").value_or("out");
    if (const Value* sub = rd.find("run.substeps")) {
        if (!sub->is_list && std::holds_alternative<std::string>(sub->items[0])) {
            if (std::get<std::string>(sub->items[0]) != "auto")
                throw ConfigError("'substeps' must be a positive integer or \"auto\"", sub->line);
            cfg.substeps = 0;
        } else {
            const long s = *rd.integer("run.substeps");
            if (s < 1)
                throw ConfigError("'substeps' must be a positive integer or \"auto\"", sub->line);
            cfg.substeps = static_cast<std::size_t>(s);
        }
    }

    // [series]
    cfg.series.tol = rd.number("series.tol").value_or(cfg.series.tol);
    if (const auto m = rd.integer("series.max_terms")) {
        if (*m < 4)
            throw ConfigError("'max_terms' must be >= 4", rd.line_of("series.max_terms"));
        cfg.series.max_terms = static_cast<std::size_t>(*m);
    }
    cfg.series.safety_radius = rd.number("series.safety_radius").value_or(cfg.series.safety_radius);
    try {
        cfg.series.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    // [oracle]
    if (const auto ok = rd.string("oracle.kind")) {
        const std::size_t line = rd.line_of("oracle.kind");
        if (*ok == "none")
            cfg.oracle.kind = OracleKind::none;
        else if (*ok == "rk4")
            cfg.oracle.kind = OracleKind::rk4;
        else if (*ok == "dalembert")
            cfg.oracle.kind = OracleKind::dalembert;
        else if (*ok == "heat_eigen")
            cfg.oracle.kind = OracleKind::heat_eigen;
        else if (*ok == "translate")
            cfg.oracle.kind = OracleKind::translate;
        else
            throw ConfigError("oracle kind '" + *ok +
                                  "' unknown (none, rk4, dalembert, heat_eigen, translate)",
                              line);
    }
    if (const auto s = rd.integer("oracle.steps")) {
        if (*s < 1)
            throw ConfigError("'steps' must be >= 1", rd.line_of("oracle.steps"));
        if (cfg.oracle.kind != OracleKind::rk4)
            throw ConfigError("'steps' applies only to the rk4 oracle", rd.line_of("oracle.steps"));
        cfg.oracle.steps = static_cast<std::size_t>(*s);
    }
    return cfg;
}

/// Points at which initial data are sampled. Scalar operators use x = a alone.
inline std::vector<double> sample_points(const RunConfig& cfg) {
    std::size_t n = 1;
    if (cfg.op.kind == OperatorKind::dense)
        n = cfg.op.dim;
    else if (cfg.op.kind != OperatorKind::scalar)
        n = cfg.grid.n.value_or(64);
    std::vector<double> xs(n);
    const double h = (cfg.grid.b - cfg.grid.a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = cfg.grid.a + static_cast<double>(i) * h;
    return xs;
}

inline Grid build_grid(const RunConfig& cfg) {
    return Grid(cfg.grid.n.value_or(64), cfg.grid.a, cfg.grid.b);
}

inline OperatorSpec build_operator(const RunConfig& cfg) {
    switch (cfg.op.kind) {
    case OperatorKind::scalar: return ScalarOperator{cfg.op.value};
    case OperatorKind::dense: return DenseMatrix(cfg.op.dim, cfg.op.entries);
    case OperatorKind::fourier:
        return FourierSymbol::derivative(build_grid(cfg), cfg.op.coefficient, cfg.op.power);
    case OperatorKind::stencil: {
        const Grid g = build_grid(cfg);
        const double scale = cfg.op.coefficient.real() / std::pow(g.spacing(), cfg.op.h_power);
        std::vector<double> s = cfg.op.stencil;
        for (double& c : s)
            c *= scale;
        try {
            return FiniteDifference(g, std::move(s));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    }
    throw ConfigError("unhandled operator kind");
}

inline CauchyProblem build_problem(const RunConfig& cfg) {
    CauchyProblem p{cfg.order, build_operator(cfg), cfg.t0, {}};
    const auto xs = sample_points(cfg);
    for (const auto& e : cfg.initial_data) {
        StateVector v(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            v[i] = e(xs[i]);
        p.initial_data.push_back(std::move(v));
    }
    p.validate();
    return p;
}

} // namespace cauchyprop::config

#endif
