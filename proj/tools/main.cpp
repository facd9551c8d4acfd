#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "fracfund/verify.hpp"

int main(int argc, char** argv) {
    using fracfund::cli::Invocation;

    CLI::App app{"Fundamental solutions of nonlocal Schroedinger operators L_K + V"};
    app.require_subcommand(1);

    Invocation inv;
    std::string suite;
    std::uint64_t seed = 0;
    std::string out;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", inv.config_path, "experiment config (INI)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory (overrides FRACFUND_OUT_DIR and the config)");
        sub->add_option("--seed", seed, "random seed (overrides the config)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve (L_K + V) u = f on one ball");
    common(solve);
    CLI::App* fundamental =
        app.add_subcommand("fundamental", "exhaustion run towards the fundamental solution");
    common(fundamental);
    CLI::App* verify = app.add_subcommand("verify", "run a property suite");
    std::string valid;
    for (const auto& n : fracfund::verify_suite_names()) valid += n + ", ";
    verify->add_option("suite", suite, "one of: " + valid + "all")->required();
    common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    if (!out.empty()) inv.out_dir = out;
    for (CLI::App* sub : {solve, fundamental, verify}) {
        if (sub->count("--seed")) inv.seed = seed;
    }

    if (*solve) return fracfund::cli::cmd_solve(inv);
    if (*fundamental) return fracfund::cli::cmd_fundamental(inv);
    return fracfund::cli::cmd_verify(suite, inv);
}
