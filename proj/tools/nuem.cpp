#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nuem/cli/commands.hpp"
#include "nuem/cli/config.hpp"
#include "nuem/error.hpp"

namespace {

int exit_code(nuem::ErrorCode code) {
    switch (code) {
        case nuem::ErrorCode::ParseError:
        case nuem::ErrorCode::ValidationError:
            return 2;
        default:
            return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilevel-noise Euler scheme for spectral Galerkin SPDE approximations"};
    app.set_version_flag("--version", std::string(nuem::cli::kVersion));
    app.require_subcommand(1);

    std::string config_path;
    nuem::cli::Overrides overrides;
    nuem::cli::CommandOptions options;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t threads = 0;
    std::string out_dir;

    for (auto name : nuem::cli::kSubcommands) {
        auto* sub = app.add_subcommand(std::string(name));
        sub->add_option("-c,--config", config_path, "TOML config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override seed");
        sub->add_option("--paths", paths, "override number of Monte Carlo paths");
        sub->add_option("--threads", threads, "worker threads");
        sub->add_option("--out-dir", out_dir, "output directory");
        if (name == "simulate") {
            sub->add_flag("--dump-increments", options.dump_increments, "write increments.csv for replay");
        }
    }

    CLI11_PARSE(app, argc, argv);

    const auto* sub = app.get_subcommands().front();
    const std::string subcommand = sub->get_name();
    if (sub->count("--seed")) overrides.seed = seed;
    if (sub->count("--paths")) overrides.paths = paths;
    if (sub->count("--threads")) overrides.threads = threads;
    if (sub->count("--out-dir")) overrides.out_dir = out_dir;

    try {
        std::ifstream in(config_path, std::ios::binary);
        std::stringstream text;
        text << in.rdbuf();
        const auto cfg = nuem::cli::parse_config(text.str(), overrides);
        nuem::cli::run(subcommand, cfg, options);
    } catch (const nuem::Error& e) {
        std::cerr << nuem::cli::error_json(subcommand, nuem::to_string(e.code()), e.what(), e.step()) << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << nuem::cli::error_json(subcommand, "InternalError", e.what()) << '\n';
        return 1;
    }
    return 0;
}
