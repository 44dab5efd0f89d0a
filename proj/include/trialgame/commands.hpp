#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "trialgame/scenario.hpp"

namespace trialgame::cli {

enum class OutputFormat { table, csv, json_lines };

struct RenderOptions {
    OutputFormat format = OutputFormat::table;
    bool precise = false; // raw values instead of display rounding
    std::optional<std::uint64_t> seed_override;
};

// Display rounding used by the non-precise table outputs: currency to the
// nearest $1M, percentages to 3 significant figures.
std::string format_currency_millions(double dollars);
std::string format_currency_compact(double dollars); // "$1B", "$50M", ...
std::string format_percent(double fraction);
std::string format_double(double value); // shortest round-trip

// Each command writes data to `out`; diagnostics (including the seed note
// for CSV outputs) go to `diag`. Config problems throw ConfigError.
void cmd_bound(const ScenarioConfig& config, const RenderOptions& options,
               std::ostream& out);
void cmd_design(double alpha, const ScenarioConfig& config, const RenderOptions& options,
                std::ostream& out);
void cmd_fda_table(const RenderOptions& options, std::ostream& out);
void cmd_simulate(const ScenarioConfig& config, const RenderOptions& options,
                  std::ostream& out, std::ostream& diag);
void cmd_sweep(const ScenarioConfig& config, const RenderOptions& options,
               std::ostream& out, std::ostream& diag);

struct LfdrGrid {
    double x_min = 0.001;
    double x_max = 0.5;
    int n_points = 100;
    bool log_spacing = false;
    std::optional<std::string> group;
};

void cmd_lfdr(const ScenarioConfig& config, const LfdrGrid& grid,
              const RenderOptions& options, std::ostream& out);

} // namespace trialgame::cli
