#include "commands.hpp"
#include "config.hpp"

#include "nlsw/error.hpp"
#include "nlsw/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace nlsw::cli;

    CLI::App app{"Multibump standing waves of the periodic NLS"};
    app.set_version_flag("--version", nlsw::library_version);
    app.require_subcommand(1);

    std::string config_path, out_dir, field;
    int jobs = 1, snapshot_stride = 0;
    for (const char* name : {"groundstate", "glue", "spectrum", "evolve", "semiclassical", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, name == std::string("sweep") ? "manifest file" : "run configuration")
            ->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--jobs", jobs, "worker threads for independent jobs")->check(CLI::PositiveNumber);
        sub->add_option("--snapshot-stride", snapshot_stride, "steps between field snapshots (evolve)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--field", field, "input field file (.csv or binary)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Context ctx;
        ctx.jobs = jobs;
        ctx.snapshot_stride = snapshot_stride;
        if (!field.empty())
            ctx.field = field;
        if (command == "sweep") {
            const char* env = std::getenv("NLSW_OUT");
            ctx.out = !out_dir.empty() ? out_dir : env ? env : "out";
            return cmd_sweep(config_path, ctx);
        }
        const RunConfig cfg = load_config(config_path);
        if (!out_dir.empty())
            ctx.out = out_dir;
        else if (const char* env = std::getenv("NLSW_OUT"))
            ctx.out = env;
        else if (!cfg.output.empty())
            ctx.out = cfg.output;
        return run_command(command, cfg, ctx);
    } catch (const std::exception& e) {
        std::cerr << "nlsw " << command << ": " << e.what() << '\n';
        return exit_code_for(e);
    }
}
