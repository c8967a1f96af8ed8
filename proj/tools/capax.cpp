// capax: capacity-achieving discrete input distributions for peak-constrained
// scalar channels, with Kuhn-Tucker certificates and channel condition checks.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "capax/app.hpp"

int main(int argc, char** argv) {
    CLI::App cli{"capacity solver for peak-constrained scalar channels"};
    cli.require_subcommand(1);

    struct SharedArgs {
        std::string config;
        std::string out;
        std::string format = "json";
        std::int64_t seed = -1;
    };

    const std::vector<std::string> commands = {"solve", "certify", "sweep",
                                               "check-conditions"};
    const std::vector<std::string> descriptions = {
        "solve for the capacity-achieving discrete input",
        "evaluate the Kuhn-Tucker certificate for a given distribution",
        "solve across a list of peak values (CSV or JSON)",
        "verify the channel's envelope and regularity conditions"};

    std::map<std::string, SharedArgs> args;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        auto* sub = cli.add_subcommand(commands[k], descriptions[k]);
        auto& a = args[commands[k]];
        sub->add_option("--config", a.config, "JSON configuration file")->required();
        sub->add_option("--out", a.out, "output path (default: stdout)");
        sub->add_option("--format", a.format, "output format: json|csv");
        sub->add_option("--seed", a.seed, "override the solver seed");
    }

    CLI11_PARSE(cli, argc, argv);

    for (const auto& name : commands) {
        if (cli.got_subcommand(name)) {
            const auto& a = args[name];
            capax::AppOptions opts;
            opts.config_path = a.config;
            if (!a.out.empty()) opts.out_path = a.out;
            opts.format = a.format;
            if (a.seed >= 0) opts.seed = static_cast<std::uint64_t>(a.seed);
            return capax::run_command(name, opts, std::cout, std::cerr);
        }
    }
    std::cerr << "error: no command given\n";
    return 1;
}
