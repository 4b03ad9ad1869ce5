// entroprod.cpp — command-line entry point
#include <iostream>

#include <CLI11.hpp>

#include "entroprod/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Entropy production scenario runner"};
    app.require_subcommand(1);

    std::string config;
    entroprod::cli::RunOptions opt;
    std::string out_dir = ".";
    CLI::App* run = app.add_subcommand("run", "Run a JSON scenario configuration");
    run->add_option("config", config, "Path to the config file")->required();
    run->add_option("--jobs,-j", opt.jobs, "Concurrent sweep points")->check(CLI::PositiveNumber);
    run->add_option("--out,-o", out_dir, "Output directory");

    std::string suite;
    CLI::App* verify = app.add_subcommand("verify", "Run a cross-check suite");
    verify->add_option("suite", suite, "ft-table, landauer, gaussian-ness, majorization, quench or all")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : entroprod::cli::kExitValidation;
    }

    if (run->parsed()) {
        opt.out_dir = out_dir;
        return entroprod::cli::run(config, opt, std::cout, std::cerr);
    }
    return entroprod::cli::verify(suite, std::cout, std::cerr);
}
