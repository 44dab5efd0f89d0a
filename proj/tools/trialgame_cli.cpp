// trialgame: incentive-aware hypothesis-testing bounds, exact Bayes/FDR
// quantities, and a seeded simulator of the principal-agent trial game.
//
// Subcommands: bound | design | fda-table | sweep | simulate | lfdr.
// Data goes to stdout, diagnostics to stderr; exit status 0 iff no errors.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trialgame/commands.hpp"

namespace {

using trialgame::cli::LfdrGrid;
using trialgame::cli::OutputFormat;
using trialgame::cli::RenderOptions;
using trialgame::cli::ScenarioConfig;

struct GlobalArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool precise = false;
    std::string output = "table";
};

OutputFormat parse_format(const std::string& name) {
    if (name == "table") return OutputFormat::table;
    if (name == "csv") return OutputFormat::csv;
    if (name == "json-lines") return OutputFormat::json_lines;
    throw CLI::ValidationError("--output", "expected table, csv, or json-lines");
}

RenderOptions make_options(const GlobalArgs& args, OutputFormat default_format) {
    RenderOptions options;
    options.format = args.output.empty() ? default_format : parse_format(args.output);
    options.precise = args.precise;
    options.seed_override = args.seed;
    return options;
}

void add_common_flags(CLI::App* command, GlobalArgs& args, bool needs_config) {
    auto* config = command->add_option("--config", args.config_path,
                                       "Path to a scenario JSON file");
    if (needs_config) config->required();
    command->add_option("--seed", args.seed, "Override the scenario seed");
    command->add_flag("--precise", args.precise,
                      "Print raw values instead of display rounding");
    command->add_option("--output", args.output,
                        "Output format: table, csv, or json-lines");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Principal-agent statistical trial toolkit"};
    app.require_subcommand(1);

    GlobalArgs args;
    args.output = "";

    double alpha = 0.25;
    LfdrGrid lfdr_grid;
    std::string lfdr_group;

    auto* bound = app.add_subcommand(
        "bound", "Incentive bounds for the scenario's protocol and economics");
    add_common_flags(bound, args, true);

    auto* design = app.add_subcommand(
        "design", "Threshold tau = alpha*C/R achieving a target FDR bound");
    add_common_flags(design, args, true);
    design->add_option("--alpha", alpha, "Target Bayes FDR level in (0,1)")->required();

    auto* fda = app.add_subcommand(
        "fda-table", "Two FDA-style protocols across drug revenues of $1B-$100B");
    add_common_flags(fda, args, false);

    auto* sweep = app.add_subcommand(
        "sweep", "Threshold sweep: exact and simulated FDR against the bound");
    add_common_flags(sweep, args, true);

    auto* simulate = app.add_subcommand(
        "simulate", "One seeded play of the trial game for the scenario population");
    add_common_flags(simulate, args, true);

    auto* lfdr = app.add_subcommand(
        "lfdr", "Local and cumulative false discovery rates over a p-value grid");
    add_common_flags(lfdr, args, true);
    lfdr->add_option("--x-min", lfdr_grid.x_min, "Grid start, in (0,1)");
    lfdr->add_option("--x-max", lfdr_grid.x_max, "Grid end, in (0,1)");
    lfdr->add_option("--points", lfdr_grid.n_points, "Number of grid points");
    lfdr->add_flag("--log-spacing", lfdr_grid.log_spacing, "Logarithmic grid");
    lfdr->add_option("--group", lfdr_group,
                     "Use this group's prior instead of the population mixture");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) {
            const ScenarioConfig config = trialgame::cli::load_scenario(args.config_path);
            trialgame::cli::cmd_bound(config, make_options(args, OutputFormat::table),
                                      std::cout);
        } else if (design->parsed()) {
            const ScenarioConfig config = trialgame::cli::load_scenario(args.config_path);
            trialgame::cli::cmd_design(alpha, config,
                                       make_options(args, OutputFormat::table), std::cout);
        } else if (fda->parsed()) {
            trialgame::cli::cmd_fda_table(make_options(args, OutputFormat::table),
                                          std::cout);
        } else if (sweep->parsed()) {
            const ScenarioConfig config = trialgame::cli::load_scenario(args.config_path);
            trialgame::cli::cmd_sweep(config, make_options(args, OutputFormat::csv),
                                      std::cout, std::cerr);
        } else if (simulate->parsed()) {
            const ScenarioConfig config = trialgame::cli::load_scenario(args.config_path);
            trialgame::cli::cmd_simulate(config, make_options(args, OutputFormat::table),
                                         std::cout, std::cerr);
        } else if (lfdr->parsed()) {
            const ScenarioConfig config = trialgame::cli::load_scenario(args.config_path);
            if (!lfdr_group.empty()) lfdr_grid.group = lfdr_group;
            trialgame::cli::cmd_lfdr(config, lfdr_grid,
                                     make_options(args, OutputFormat::csv), std::cout);
        }
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
