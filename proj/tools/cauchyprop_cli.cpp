#include <cauchyprop/config.hpp>
#include <cauchyprop/runner.hpp>

#include <CLI11.hpp>

#include <iostream>

namespace cfg = cauchyprop::config;
namespace run = cauchyprop::runner;

namespace {

int load(const std::string& path, cfg::RunConfig& out) {
    try {
        out = cfg::parse_config(run::read_file(path));
        return run::success;
    } catch (const std::exception& e) {
        std::cerr << "error: " << path << ": " << e.what() << '\n';
        return run::io_or_config_error;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nth-order Cauchy problem propagator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, param = "substeps";
    double tol = 1e-6;

    auto* solve = app.add_subcommand("solve", "propagate the configured problem to each time");
    solve->add_option("--config", config_path, "run configuration file")->required();
    solve->add_option("--out", out_dir, "output directory (default: [run] output)");

    auto* compare = app.add_subcommand("compare", "compare the propagator against the configured oracle");
    compare->add_option("--config", config_path, "run configuration file")->required();
    compare->add_option("--tol", tol, "maximum accepted Linf error")->capture_default_str();
    compare->add_option("--out", out_dir, "output directory (default: [run] output)");

    auto* scan = app.add_subcommand("scan", "sweep a resolution parameter and report convergence");
    scan->add_option("--config", config_path, "run configuration file")->required();
    scan->add_option("--param", param, "parameter to sweep")
        ->check(CLI::IsMember({"terms", "substeps", "grid_n"}))
        ->capture_default_str();
    scan->add_option("--out", out_dir, "output directory (default: [run] output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : run::io_or_config_error;
    }

    cfg::RunConfig config;
    if (const int rc = load(config_path, config); rc != run::success)
        return rc;
    const std::filesystem::path dir = out_dir.empty() ? config.output_path : out_dir;

    if (*solve)
        return run::run_solve(config, dir, std::cout, std::cerr);
    if (*compare)
        return run::run_compare(config, tol, dir, std::cout, std::cerr);
    const cfg::ScanParam p = param == "terms"    ? cfg::ScanParam::terms
                             : param == "grid_n" ? cfg::ScanParam::grid_n
                                                 : cfg::ScanParam::substeps;
    return run::run_scan(config, p, dir, std::cout, std::cerr);
}
