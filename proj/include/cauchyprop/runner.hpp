#ifndef CAUCHYPROP_RUNNER_HPP
#define CAUCHYPROP_RUNNER_HPP

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "oracles.hpp"
#include "propagator.hpp"

// solve / compare / scan workflows behind the command-line driver.
namespace cauchyprop::runner {

enum ExitCode : int { success = 0, io_or_config_error = 1, numerical_failure = 2 };

/// Shortest-safe decimal form: 17 significant digits, '.' radix, no locale.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_)
            throw std::runtime_error("cannot write '" + path.string() + "'");
    }

    template <class... Cols>
    void row(const Cols&... cols) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(cols), first = false), ...);
        out_ << '\n';
        if (!out_)
            throw std::runtime_error("write failed on '" + path_.string() + "'");
    }

private:
    static std::string cell(double v) { return format_double(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const char* v) { return v; }
    static std::string cell(const std::string& v) { return v; }

    std::filesystem::path path_;
    std::ofstream out_;
};

struct FrameCsv {
    std::vector<double> x;
    StateVector u;
};

/// Reads back a `x,re_u,im_u` frame file.
inline FrameCsv read_frame_csv(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);
    if (line != "x,re_u,im_u")
        throw std::runtime_error("unexpected header in '" + path.string() + "'");
    FrameCsv f;
    while (std::getline(in, line)) {
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const auto x = parse_double(std::string_view(line).substr(0, c1));
        const auto re = parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1));
        const auto im = parse_double(std::string_view(line).substr(c2 + 1));
        if (c1 == std::string::npos || c2 == std::string::npos || !x || !re || !im)
            throw std::runtime_error("malformed row in '" + path.string() + "'");
        f.x.push_back(*x);
        f.u.emplace_back(*re, *im);
    }
    return f;
}

inline void write_frame_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                            const StateVector& u) {
    CsvWriter w(path);
    w.row("x", "re_u", "im_u");
    for (std::size_t i = 0; i < u.size(); ++i)
        w.row(xs[i], u[i].real(), u[i].imag());
}

struct FrameOutcome {
    std::optional<SolutionFrame> frame;
    std::string error;
};

/// Propagates with the configured sub-step policy; numerical refusals are
/// returned as an error string rather than thrown.
inline FrameOutcome solve_frame(const CauchyProblem& problem, double t, const SeriesParams& series,
                                std::size_t substeps) {
    try {
        if (substeps == 0)
            return {substep_propagate(problem, t, series, series.safety_radius), {}};
        return {substep_propagate_steps(problem, t, series, substeps), {}};
    } catch (const RadiusExceeded& e) {
        return {std::nullopt, e.what()};
    } catch (const SeriesNotConverged& e) {
        return {std::nullopt, e.what()};
    } catch (const NonFiniteError& e) {
        return {std::nullopt, e.what()};
    }
}

inline FrameOutcome solve_frame(const config::RunConfig& cfg, const CauchyProblem& problem, double t) {
    return solve_frame(problem, t, cfg.series, cfg.substeps);
}

/// Reference solution for the configured oracle; throws ConfigError when the
/// oracle does not fit the problem.
class Oracle {
public:
    explicit Oracle(const config::RunConfig& cfg) : cfg_(cfg) {
        using config::ConfigError;
        using config::OperatorKind;
        using config::OracleKind;
        const auto& op = cfg.op;
        const bool real_coef = op.coefficient.imag() == 0.0;
        switch (cfg.oracle.kind) {
        case OracleKind::none:
            throw ConfigError("compare/scan need an [oracle] kind other than none");
        case OracleKind::rk4:
            break;
        case OracleKind::dalembert:
            if (cfg.order != 2)
                throw ConfigError("oracle dalembert requires order 2, got " + std::to_string(cfg.order));
            if (op.kind != OperatorKind::fourier || op.power != 2 || !real_coef ||
                !(op.coefficient.real() > 0.0))
                throw ConfigError("oracle dalembert requires a fourier operator with power 2 and a "
                                  "positive real coefficient v^2");
            speed_ = std::sqrt(op.coefficient.real());
            break;
        case OracleKind::heat_eigen: {
            if (cfg.order != 1)
                throw ConfigError("oracle heat_eigen requires order 1, got " + std::to_string(cfg.order));
            const bool fourier = op.kind == OperatorKind::fourier && op.power == 2;
            const bool stencil = op.kind == OperatorKind::stencil && op.h_power == 2;
            if ((!fourier && !stencil) || !real_coef)
                throw ConfigError("oracle heat_eigen requires a second-derivative fourier or stencil "
                                  "operator with a real coefficient");
            const auto& e = cfg.initial_data[0];
            if (e.kind != config::InitialExpr::Kind::sin || e.p0 != std::floor(e.p0))
                throw ConfigError("oracle heat_eigen requires initial_data = [\"sin(k)\"] with integer k");
            mode_ = static_cast<long>(e.p0);
            break;
        }
        case OracleKind::translate:
            if (cfg.order != 1)
                throw ConfigError("oracle translate requires order 1, got " + std::to_string(cfg.order));
            if (op.kind != OperatorKind::fourier || op.power != 1 || !real_coef)
                throw ConfigError("oracle translate requires a fourier operator with power 1 and a "
                                  "real coefficient");
            speed_ = op.coefficient.real();
            break;
        }
    }

    StateVector operator()(const CauchyProblem& problem, double t, std::size_t rk4_steps = 0) const {
        using config::OracleKind;
        const double dt = t - problem.t0;
        switch (cfg_.oracle.kind) {
        case OracleKind::rk4:
            return oracles::companion_rk4(problem, t, rk4_steps ? rk4_steps : cfg_.oracle.steps);
        case OracleKind::dalembert: {
            const Grid g = *grid_of(problem.op);
            return oracles::dalembert(GridFunction(g, problem.initial_data[0]),
                                      GridFunction(g, problem.initial_data[1]), speed_, dt)
                .values();
        }
        case OracleKind::heat_eigen:
            return oracles::heat_eigen_exact(mode_, cfg_.op.coefficient.real(), dt, *grid_of(problem.op))
                .values();
        case OracleKind::translate: {
            const Grid g = *grid_of(problem.op);
            return oracles::translate(GridFunction(g, problem.initial_data[0]), speed_ * dt).values();
        }
        case OracleKind::none: break;
        }
        throw config::ConfigError("no oracle configured");
    }

private:
    const config::RunConfig& cfg_;
    double speed_ = 0.0;
    long mode_ = 0;
};

inline int run_solve(const config::RunConfig& cfg, const std::filesystem::path& out_dir,
                     std::ostream& out, std::ostream& err) {
    try {
        const CauchyProblem problem = config::build_problem(cfg);
        const auto xs = config::sample_points(cfg);
        std::filesystem::create_directories(out_dir);
        CsvWriter report(out_dir / "report.csv");
        report.row("t", "terms_used", "truncation_bound", "converged");
        bool all_converged = true;
        for (std::size_t i = 0; i < cfg.times.size(); ++i) {
            const double t = cfg.times[i];
            const FrameOutcome r = solve_frame(cfg, problem, t);
            if (!r.frame) {
                err << "t = " << format_double(t) << ": " << r.error << '\n';
                report.row(t, std::size_t{0}, std::numeric_limits<double>::infinity(), false);
                all_converged = false;
                continue;
            }
            write_frame_csv(out_dir / ("t_" + std::to_string(i) + ".csv"), xs, r.frame->state);
            report.row(t, r.frame->terms_used, r.frame->truncation_bound, r.frame->converged);
            all_converged = all_converged && r.frame->converged;
        }
        out << "wrote " << cfg.times.size() << " frame(s) to " << out_dir.string() << '\n';
        return all_converged ? success : numerical_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_or_config_error;
    }
}

inline int run_compare(const config::RunConfig& cfg, double tol, const std::filesystem::path& out_dir,
                       std::ostream& out, std::ostream& err) {
    try {
        const Oracle oracle(cfg);
        const CauchyProblem problem = config::build_problem(cfg);
        std::filesystem::create_directories(out_dir);
        CsvWriter csv(out_dir / "compare.csv");
        csv.row("t", "l2_error", "linf_error", "terms_used");
        double worst = 0.0;
        bool failed = false;
        for (double t : cfg.times) {
            const FrameOutcome r = solve_frame(cfg, problem, t);
            if (!r.frame) {
                err << "t = " << format_double(t) << ": " << r.error << '\n';
                failed = true;
                continue;
            }
            const StateVector ref = oracle(problem, t);
            StateVector diff = r.frame->state;
            axpy(-1.0, ref, diff);
            const double linf = norm_inf(diff);
            csv.row(t, norm_2(diff), linf, r.frame->terms_used);
            worst = std::max(worst, linf);
            failed = failed || !r.frame->converged;
        }
        out << "max linf error: " << format_double(worst) << " (tol " << format_double(tol) << ")\n";
        return !failed && worst <= tol ? success : numerical_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_or_config_error;
    }
}

struct ScanPoint {
    double value;
    double linf_error;
};

/// log2 error ratio of the last consecutive pair with both errors above floor.
inline std::optional<double> observed_order(const std::vector<ScanPoint>& pts, double floor = 1e-13) {
    for (std::size_t i = pts.size(); i-- > 1;) {
        const double a = pts[i - 1].linf_error, b = pts[i].linf_error;
        if (a > floor && b > floor)
            return std::log2(a / b) / std::log2(pts[i].value / pts[i - 1].value);
    }
    return std::nullopt;
}

/// Doubling ladders swept by run_scan.
inline std::vector<std::size_t> scan_ladder(config::ScanParam param, const config::RunConfig& cfg) {
    switch (param) {
    case config::ScanParam::terms: return {4, 8, 16, 32, 64, 128};
    case config::ScanParam::substeps:
        if (cfg.oracle.kind == config::OracleKind::rk4)
            return {8, 16, 32, 64, 128, 256};
        return {1, 2, 4, 8, 16, 32};
    case config::ScanParam::grid_n: return {16, 32, 64, 128};
    }
    return {};
}

/// Sweeps one resolution parameter at the last configured time.
///   terms    - series max_terms; truncated sums are kept
///   substeps - RK4 step count when the oracle is rk4 (propagate is the
///              reference), otherwise the propagator's sub-step count
///   grid_n   - grid point count of a fourier or stencil problem
inline int run_scan(const config::RunConfig& cfg, config::ScanParam param,
                    const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err) {
    try {
        const Oracle probe(cfg);
        if (param == config::ScanParam::grid_n && cfg.op.kind != config::OperatorKind::fourier &&
            cfg.op.kind != config::OperatorKind::stencil)
            throw config::ConfigError("grid_n scan needs a fourier or stencil operator");
        const double t = cfg.times.back();
        std::vector<ScanPoint> pts;
        for (std::size_t value : scan_ladder(param, cfg)) {
            config::RunConfig c = cfg;
            SeriesParams series = cfg.series;
            std::size_t substeps = cfg.substeps;
            std::size_t rk4_steps = 0;
            switch (param) {
            case config::ScanParam::terms:
                series.max_terms = value;
                series.throw_on_nonconvergence = false;
                break;
            case config::ScanParam::substeps:
                if (cfg.oracle.kind == config::OracleKind::rk4)
                    rk4_steps = value;
                else
                    substeps = value;
                break;
            case config::ScanParam::grid_n:
                c.grid.n = value;
                break;
            }
            const Oracle oracle(c);
            const CauchyProblem problem = config::build_problem(c);
            const FrameOutcome r = solve_frame(problem, t, series, substeps);
            if (!r.frame) {
                err << "value " << value << ": " << r.error << '\n';
                return numerical_failure;
            }
            pts.push_back({static_cast<double>(value),
                           max_abs_diff(r.frame->state, oracle(problem, t, rk4_steps))});
        }
        std::filesystem::create_directories(out_dir);
        CsvWriter csv(out_dir / "scan.csv");
        csv.row("value", "linf_error");
        for (const auto& p : pts) {
            csv.row(p.value, p.linf_error);
            out << "value " << format_double(p.value) << "  linf_error " << format_double(p.linf_error)
                << '\n';
        }
        if (const auto order = observed_order(pts))
            out << "observed order: " << format_double(*order) << '\n';
        else
            out << "observed order: n/a (errors at round-off floor)\n";
        return success;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_or_config_error;
    }
}

} // namespace cauchyprop::runner

#endif
