#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ginzburg/cli.hpp"
#include "ginzburg/version.hpp"

// ginzburg <subcommand> --config <file> [--set key=value ...]
//          [--out <path>] [--format csv|json]
// Subcommands: dispersion correlator rate1d rate3d surface experiment sweep.
// Thread count comes from GINZBURG_THREADS.

int main(int argc, char** argv)
{
    CLI::App app{"quantum-field observables in a dispersive, dissipative dielectric"};
    app.set_version_flag("--version", std::string("ginzburg ") + ginzburg::version_string);
    app.require_subcommand(1);

    const std::vector<std::string> names = {"dispersion", "correlator", "rate1d", "rate3d",
                                            "surface", "experiment", "sweep"};
    struct Opts {
        std::string config_path;
        std::vector<std::string> overrides;
        std::string out_path;
        std::string format = "csv";
    };
    std::vector<Opts> opts(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i]);
        sub->add_option("--config", opts[i].config_path, "JSON config file");
        sub->add_option("--set", opts[i].overrides, "override: key.path=value (JSON literal)");
        sub->add_option("--out", opts[i].out_path, "output path (default: stdout)");
        sub->add_option("--format", opts[i].format, "csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : ginzburg::cli::exit_config_error;
    }

    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!app.get_subcommand(names[i])->parsed()) continue;
        ginzburg::cli::RunConfig rc;
        rc.subcommand = names[i];
        rc.out_path = opts[i].out_path;
        rc.format = opts[i].format;
        if (!opts[i].config_path.empty()) {
            std::ifstream f(opts[i].config_path);
            if (!f) {
                std::cerr << "config error: cannot open '" << opts[i].config_path << "'\n";
                return ginzburg::cli::exit_config_error;
            }
            try {
                f >> rc.config;
            } catch (const nlohmann::json::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return ginzburg::cli::exit_config_error;
            }
        } else {
            rc.config = nlohmann::json::object();
        }
        try {
            for (const auto& kv : opts[i].overrides) ginzburg::cli::apply_override(rc.config, kv);
        } catch (const ginzburg::DomainError& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return ginzburg::cli::exit_config_error;
        }
        return ginzburg::cli::run(rc, std::cout, std::cerr);
    }
    return ginzburg::cli::exit_config_error;
}
