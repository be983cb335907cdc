// Command line front end: every subcommand reads one JSON config and writes
// its reports into the output directory.
//
// Exit codes: 0 ok, 2 invalid input, 3 numerical failure, 1 anything else.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "architope.hpp"

namespace ex = architope::experiment;

namespace {

int run(const std::string& command, const std::string& config_path, const std::string& out_override,
        std::optional<std::uint64_t> seed) {
    const auto cfg = ex::load_config(config_path, seed);
    ex::Reports reports;
    if (command == "upgrade") reports = ex::run_upgrade(cfg);
    else if (command == "gap-demo") reports = ex::run_gap_demo(cfg);
    else if (command == "diagnose") reports = ex::run_diagnostic(cfg);
    else if (command == "metrics") reports = ex::run_metrics(cfg);
    else reports = ex::run_partition(cfg);

    const std::string out = out_override.empty() ? cfg.output : out_override;
    ex::write_reports(reports, out);
    for (const auto& [name, body] : reports) std::cout << (std::filesystem::path(out) / name).string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Architope upgrades of local learners"};
    app.require_subcommand(1);

    std::string config, out;
    std::uint64_t seed = 0;
    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"partition", "validate a partition and report region masses"},
        {"upgrade", "fit one model per region and report errors"},
        {"gap-demo", "compare global polynomial fits with the architope"},
        {"diagnose", "classify strict convergence of a sequence"},
        {"metrics", "distances between two functions"},
    };
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("-c,--config", config, "JSON config file")->required();
        sub->add_option("-o,--out", out, "output directory (overrides the config)");
        sub->add_option("-s,--seed", seed, "seed (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto* chosen = app.get_subcommands().front();
    std::optional<std::uint64_t> seed_override;
    if (chosen->count("--seed") > 0) seed_override = seed;

    try {
        return run(chosen->get_name(), config, out, seed_override);
    } catch (const architope::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const architope::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
