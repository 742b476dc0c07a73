// gaugelab: run named experiments from a JSON configuration.
//
//   gaugelab run --config dispersion.json [--seed 7] [--out results/]
//   gaugelab list
//
// Exit codes: 0 all assertions passed, 1 an assertion failed, 2 configuration error.

#include "gaugelab/experiments.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>

namespace {

int run(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& out)
{
    using namespace gaugelab::run;
    RunConfig cfg;
    RunReport report;
    try {
        cfg = RunConfig::load(config_path);
        if (seed)
            cfg.seed = *seed;
        if (!out.empty())
            cfg.output_dir = out;
        report = run_experiment(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    try {
        emit_report(report, cfg.output_dir);
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return 2;
    }

    std::cout << report.experiment << " (" << std::fixed << std::setprecision(2) << report.wall_seconds << " s)\n";
    std::cout.unsetf(std::ios::floatfield);
    for (const auto& [k, v] : report.scalars)
        std::cout << "  " << k << " = " << format_number(v) << "\n";
    for (const auto& a : report.assertions)
        std::cout << (a.passed ? "  PASS " : "  FAIL ") << a.name << " [" << a.detail << "]\n";
    std::cout << "  wrote";
    for (const auto& f : report.files)
        std::cout << " " << f;
    std::cout << " to " << cfg.output_dir.string() << "\n";
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"gaugelab: elastic gauge field experiments"};
    app.require_subcommand(1);

    std::string config_path, out;
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run one experiment");
    run_cmd->add_option("--config", config_path, "JSON run configuration")->required();
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the configured seed");
    run_cmd->add_option("--out", out, "output directory (default: config, then $GAUGELAB_OUT/<experiment>)");

    app.add_subcommand("list", "list experiments and their parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (app.got_subcommand("list")) {
        std::cout << gaugelab::run::describe_experiments();
        return 0;
    }
    return run(config_path, seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt, out);
}
