#include <iostream>

#include "CLI11.hpp"
#include "lsavg/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Quasihyperbolic distance experiments for L^s-averaging domains"};
    app.set_version_flag("--version", lsavg::cli::kVersion);
    app.require_subcommand(1, 1);

    lsavg::cli::Options opt;
    app.add_option("--config", opt.configPath, "key = value configuration file");
    app.add_option("--out", opt.outDir, "output directory")->capture_default_str();
    app.add_option("--seed", opt.seed, "seed for sampled checks")->capture_default_str();
    app.add_option("--threads", opt.threads, "worker threads, 0 = all cores")->capture_default_str();
    app.add_option("--tol", opt.tol, "relative tolerance for tube verification")->capture_default_str()
        ->check(CLI::PositiveNumber);

    for (const auto& sub : lsavg::cli::subcommands()) {
        app.add_subcommand(sub)->fallthrough();
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : lsavg::cli::Error;
    }
    opt.subcommand = app.get_subcommands().front()->get_name();
    return lsavg::cli::run(opt, std::cout, std::cerr);
}
