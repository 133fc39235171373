// SPDX-License-Identifier: Apache-2.0
// Command line front end: scenario runs, the manufactured-solution
// convergence study, and the builtin scenario catalog.
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fpm/config_io.hpp"
#include "fpm/scenarios.hpp"
#include "fpm/sim_io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Meshfree two-phase flow simulator (incompressible, surface tension, "
                 "prescribed contact angles)"};
    app.require_subcommand(1);

    // run
    std::string source;
    fpm::RunOptions run_opts;
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario to t_end");
    run_cmd->add_option("config", source, "Builtin scenario name or path to a config file")
        ->required();
    run_cmd->add_option("--out", run_opts.out_dir, "Output directory (default .)");
    run_cmd->add_option("--snapshot-every", run_opts.snapshot_interval,
                        "Snapshot interval in seconds (default: config output.interval)");
    run_cmd->add_option("--log-every", run_opts.log_every,
                        "Progress line cadence in steps (default 50)");
    run_cmd->add_flag("--quiet", quiet, "No progress lines on stdout");

    // convergence
    int example = 1;
    std::vector<double> hs = {0.08, 0.04, 0.02};
    std::string conv_out = ".";
    double conv_eps = 1e-6;
    int conv_sweeps = 30000;
    auto* conv_cmd = app.add_subcommand(
        "convergence", "Convergence study on the manufactured diffusion problem");
    conv_cmd->add_option("--example", example, "Manufactured case, 1 or 2")->required();
    conv_cmd->add_option("--hs", hs, "Interaction radii to test (comma separated)")
        ->delimiter(',');
    conv_cmd->add_option("--out", conv_out, "Output directory for errors.csv (default .)");
    conv_cmd->add_option("--eps", conv_eps,
                         "Tightest relaxation tolerance tried per h (default 1e-6)");
    conv_cmd->add_option("--max-sweeps", conv_sweeps,
                         "Relaxation sweep cap per attempt (default 30000)");

    // scenarios
    std::string emit_name;
    auto* list_cmd = app.add_subcommand("scenarios", "List builtin scenarios");
    list_cmd->add_option("--emit", emit_name,
                         "Print the full config of one builtin scenario and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            fpm::ConfigParseResult parsed = fpm::load_config(source);
            run_opts.echo_progress = !quiet;
            fpm::RunSummary sum = fpm::run_scenario(parsed.config, run_opts, parsed.defaulted_keys);
            std::printf("completed %d steps to t=%g, %d snapshots, %zu particles\n",
                        sum.steps, sum.t_final, sum.snapshots, sum.particles_final);
            std::printf("diagnostics: %s\n", sum.diagnostics_path.c_str());
        } else if (*conv_cmd) {
            fpm::ConvergenceResult r =
                fpm::run_diffusion_convergence(example, hs, conv_eps, conv_sweeps, true);
            fpm::write_convergence(r, conv_out);
            std::printf("fitted order %.3f\n", r.order);
            std::printf("errors: %s/errors.csv\n", conv_out.c_str());
        } else if (*list_cmd) {
            if (!emit_name.empty()) {
                std::printf("%s", fpm::emit_config(fpm::builtin_scenario(emit_name)).c_str());
            } else {
                for (const auto& name : fpm::builtin_scenario_names())
                    std::printf("%s\n", name.c_str());
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
