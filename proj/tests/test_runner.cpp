#include <cauchyprop/config.hpp>
#include <cauchyprop/runner.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include "test_support.hpp"

using namespace cauchyprop;
using namespace cauchyprop::runner;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("cauchyprop_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

config::RunConfig shipped(const std::string& name) {
    return config::parse_config(read_file(fs::path(CAUCHYPROP_CONFIG_DIR) / name));
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
    std::istringstream in(read_file(p));
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cols;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');)
            cols.push_back(c);
        rows.push_back(cols);
    }
    return rows;
}

struct Captured {
    int rc;
    std::string out, err;
};

template <class F>
Captured capture(F&& f) {
    std::ostringstream out, err;
    const int rc = f(out, err);
    return {rc, out.str(), err.str()};
}

double printed_value(const std::string& text, const std::string& label) {
    const auto pos = text.find(label);
    if (pos == std::string::npos)
        return std::nan("");
    return std::stod(text.substr(pos + label.size()));
}

} // namespace

TEST(Csv, RoundTripIsLossless) {
    std::mt19937_64 rng(11);
    TempDir dir;
    std::vector<double> xs(257);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    for (auto& x : xs)
        x = u(rng) * std::pow(10.0, static_cast<int>(u(rng)) % 200);
    StateVector v = fixtures::random_vector(rng, xs.size());
    v[0] = complex(-0.0, 5e-324);
    v[1] = complex(1.7976931348623157e308, 2.2250738585072014e-308);
    write_frame_csv(dir.path() / "f.csv", xs, v);
    const FrameCsv back = read_frame_csv(dir.path() / "f.csv");
    ASSERT_EQ(back.u.size(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        EXPECT_EQ(back.x[i], xs[i]);
        EXPECT_LE(std::abs(back.u[i] - v[i]), 1e-15 * std::abs(v[i]));
    }
}

TEST(Csv, FormatIsLocaleFree) {
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(-2.0), "-2");
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_FALSE(parse_double("1,5").has_value());
    EXPECT_FALSE(parse_double("").has_value());
}

TEST(Solve, HeatAmplitudeAtUnitTime) {
    TempDir dir;
    config::RunConfig cfg = shipped("heat_fourier.toml");
    cfg.times = {1.0};
    const Captured r = capture([&](auto& o, auto& e) { return run_solve(cfg, dir.path(), o, e); });
    ASSERT_EQ(r.rc, success) << r.err;
    const FrameCsv f = read_frame_csv(dir.path() / "t_0.csv");
    ASSERT_EQ(f.u.size(), 64u);
    double peak = 0.0;
    for (const auto& z : f.u)
        peak = std::max(peak, std::abs(z.real()));
    EXPECT_NEAR(peak, 0.36787944, 1e-8);

    const auto report = read_rows(dir.path() / "report.csv");
    ASSERT_EQ(report.size(), 2u);
    EXPECT_EQ(report[0], (std::vector<std::string>{"t", "terms_used", "truncation_bound", "converged"}));
    EXPECT_EQ(report[1][0], "1");
    EXPECT_EQ(report[1][3], "true");
}

TEST(Solve, InitialTimeReproducesSampledData) {
    TempDir dir;
    config::RunConfig cfg = shipped("wave_dalembert.toml");
    cfg.times = {cfg.t0};
    ASSERT_EQ(run_solve(cfg, dir.path(), std::cout, std::cerr), success);
    const FrameCsv f = read_frame_csv(dir.path() / "t_0.csv");
    const CauchyProblem p = config::build_problem(cfg);
    EXPECT_EQ(f.x, config::sample_points(cfg));
    EXPECT_EQ(f.u, p.initial_data[0]);
}

TEST(Solve, RadiusViolationExitsTwo) {
    TempDir dir;
    config::RunConfig cfg = shipped("third_order_scalar.toml");
    cfg.op.value = 1e6;
    cfg.times = {0.5, 10.0};
    const Captured r = capture([&](auto& o, auto& e) { return run_solve(cfg, dir.path(), o, e); });
    EXPECT_EQ(r.rc, numerical_failure);
    EXPECT_FALSE(r.err.empty());
    const auto report = read_rows(dir.path() / "report.csv");
    ASSERT_EQ(report.size(), 3u);
    EXPECT_EQ(report[2][3], "false");
    EXPECT_FALSE(fs::exists(dir.path() / "t_1.csv"));
}

TEST(Solve, OutputIsDeterministic) {
    TempDir a, b;
    const config::RunConfig cfg = shipped("advection_translate.toml");
    ASSERT_EQ(run_solve(cfg, a.path(), std::cout, std::cerr), success);
    ASSERT_EQ(run_solve(cfg, b.path(), std::cout, std::cerr), success);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a.path())) {
        EXPECT_EQ(read_file(e.path()), read_file(b.path() / e.path().filename()));
        ++files;
    }
    EXPECT_EQ(files, cfg.times.size() + 1);
}

TEST(Solve, UnwritableOutputExitsOne) {
    TempDir dir;
    const fs::path blocker = dir.path() / "file";
    std::ofstream(blocker) << "x";
    const Captured r = capture(
        [&](auto& o, auto& e) { return run_solve(shipped("heat_fourier.toml"), blocker / "sub", o, e); });
    EXPECT_EQ(r.rc, io_or_config_error);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Compare, WaveMatchesDalembert) {
    TempDir dir;
    const Captured r = capture(
        [&](auto& o, auto& e) { return run_compare(shipped("wave_dalembert.toml"), 1e-8, dir.path(), o, e); });
    EXPECT_EQ(r.rc, success) << r.out << r.err;
    EXPECT_LE(printed_value(r.out, "max linf error: "), 1e-8);
    const auto rows = read_rows(dir.path() / "compare.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "l2_error", "linf_error", "terms_used"}));
    EXPECT_EQ(rows.size(), 6u);
}

TEST(Compare, ThirdOrderMatchesRk4) {
    TempDir dir;
    config::RunConfig cfg = shipped("third_order_scalar.toml");
    cfg.times = {1.0};
    cfg.oracle.steps = 10000;
    const Captured r = capture([&](auto& o, auto& e) { return run_compare(cfg, 1e-6, dir.path(), o, e); });
    EXPECT_EQ(r.rc, success) << r.out << r.err;
    EXPECT_LE(printed_value(r.out, "max linf error: "), 1e-6);
}

TEST(Compare, ToleranceFailureExitsTwo) {
    TempDir dir;
    const Captured r = capture(
        [&](auto& o, auto& e) { return run_compare(shipped("heat_stencil.toml"), 1e-6, dir.path(), o, e); });
    EXPECT_EQ(r.rc, numerical_failure);
    EXPECT_GT(printed_value(r.out, "max linf error: "), 1e-6);
}

TEST(Compare, DalembertNeedsSecondOrder) {
    TempDir dir;
    config::RunConfig cfg = shipped("heat_fourier.toml");
    cfg.oracle.kind = config::OracleKind::dalembert;
    const Captured r = capture([&](auto& o, auto& e) { return run_compare(cfg, 1e-6, dir.path(), o, e); });
    EXPECT_EQ(r.rc, io_or_config_error);
    EXPECT_NE(r.err.find("dalembert"), std::string::npos) << r.err;
}

TEST(Compare, NoOracleIsConfigError) {
    TempDir dir;
    config::RunConfig cfg = shipped("heat_fourier.toml");
    cfg.oracle.kind = config::OracleKind::none;
    EXPECT_EQ(run_compare(cfg, 1e-6, dir.path(), std::cout, std::cerr), io_or_config_error);
}

TEST(Scan, Rk4StepsGiveFourthOrder) {
    TempDir dir;
    config::RunConfig cfg = shipped("oscillator_rk4.toml");
    const Captured r =
        capture([&](auto& o, auto& e) { return run_scan(cfg, config::ScanParam::substeps, dir.path(), o, e); });
    ASSERT_EQ(r.rc, success) << r.err;
    EXPECT_NEAR(printed_value(r.out, "observed order: "), 4.0, 0.3) << r.out;
    const auto rows = read_rows(dir.path() / "scan.csv");
    EXPECT_EQ(rows[0], (std::vector<std::string>{"value", "linf_error"}));
    EXPECT_EQ(rows.size(), 7u);
}

TEST(Scan, StencilGridGivesSecondOrder) {
    TempDir dir;
    const Captured r = capture([&](auto& o, auto& e) {
        return run_scan(shipped("heat_stencil.toml"), config::ScanParam::grid_n, dir.path(), o, e);
    });
    ASSERT_EQ(r.rc, success) << r.err;
    EXPECT_NEAR(printed_value(r.out, "observed order: "), 2.0, 0.2) << r.out;
}

TEST(Scan, TermsPlateauOnceConverged) {
    TempDir dir;
    config::RunConfig cfg = shipped("oscillator_rk4.toml");
    cfg.times = {0.25};
    const Captured r =
        capture([&](auto& o, auto& e) { return run_scan(cfg, config::ScanParam::terms, dir.path(), o, e); });
    ASSERT_EQ(r.rc, success) << r.err;
    const auto rows = read_rows(dir.path() / "scan.csv");
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_GT(std::stod(rows[1][1]), 1e3 * std::stod(rows[6][1]));
    for (std::size_t i = 4; i < rows.size(); ++i)
        EXPECT_LE(std::stod(rows[i][1]), 1e-12) << rows[i][0];
    EXPECT_EQ(rows[5][1], rows[6][1]);
}

TEST(Scan, GridScanNeedsGrid) {
    TempDir dir;
    EXPECT_EQ(run_scan(shipped("third_order_scalar.toml"), config::ScanParam::grid_n, dir.path(), std::cout,
                       std::cerr),
              io_or_config_error);
}
