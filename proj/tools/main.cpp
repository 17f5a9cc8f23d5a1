#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    using namespace gapeq::cli;

    CLI::App app{"gapeq - BCS gap equation laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir, format;
    int threads = 0;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol-override", overrides, "key=value applied after the config file");

    const std::pair<const char*, const char*> commands[] = {
        {"simplified", "Delta_1 and Delta_2 over temperature"},
        {"tc", "tau_1, tau_2 and the transition temperature"},
        {"solve", "gap function at one temperature"},
        {"sweep", "gap function over a temperature grid"},
        {"thermo", "potential, entropy and specific heat"},
        {"jump", "critical limits and the specific-heat jump"},
        {"verify", "run the acceptance suite"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        for (const auto& o : overrides) apply_override(cfg, o);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        if (threads > 0) cfg.threads = threads;
        return run_subcommand(app.get_subcommands().front()->get_name(), cfg, std::cout);
    } catch (...) {
        return exit_code_for(std::current_exception(), std::cerr);
    }
}
