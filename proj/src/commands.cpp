#include "trialgame/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include <json.hpp>

#include "trialgame/bayes.hpp"
#include "trialgame/bounds.hpp"
#include "trialgame/sim.hpp"

namespace trialgame::cli {

using nlohmann::json;

std::string format_double(double value) {
    char buffer[32];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string format_currency_millions(double dollars) {
    const long long millions = std::llround(dollars / 1e6);
    if (millions == 0) return "$0M";
    if (millions < 0) return "-$" + std::to_string(-millions) + "M";
    return "$" + std::to_string(millions) + "M";
}

namespace {

std::string trim_sig(double value, const char* format) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), format, value);
    return buffer;
}

} // namespace

std::string format_currency_compact(double dollars) {
    const double magnitude = std::fabs(dollars);
    const char* sign = dollars < 0.0 ? "-" : "";
    if (magnitude >= 1e9) return sign + ("$" + trim_sig(magnitude / 1e9, "%.4g") + "B");
    if (magnitude >= 1e6) return sign + ("$" + trim_sig(magnitude / 1e6, "%.4g") + "M");
    return sign + ("$" + trim_sig(magnitude, "%.4g"));
}

std::string format_percent(double fraction) {
    return trim_sig(fraction * 100.0, "%.3g") + "%";
}

namespace {

// One output cell: a display string for tables, a raw JSON value for
// json-lines and precise CSV. Undefined cells render as the display
// label in tables, as an empty CSV field, and as JSON null.
struct Cell {
    std::string display;
    json raw;
    bool undefined = false;
};

Cell number_cell(double value) {
    return Cell{format_double(value), value};
}

Cell integer_cell(std::int64_t value) {
    return Cell{std::to_string(value), value};
}

Cell text_cell(std::string text) {
    Cell cell;
    cell.raw = text;
    cell.display = std::move(text);
    return cell;
}

Cell flag_cell(bool value) {
    return Cell{value ? "1" : "0", value};
}

Cell undefined_cell(const char* label) {
    Cell cell;
    cell.display = label;
    cell.raw = nullptr;
    cell.undefined = true;
    return cell;
}

Cell percent_cell(double fraction, bool precise) {
    return Cell{precise ? format_double(fraction) : format_percent(fraction), fraction};
}

// Plain numeric display column: 6 significant figures unless --precise.
Cell rounded_cell(double value, bool precise) {
    return Cell{precise ? format_double(value) : trim_sig(value, "%.6g"), value};
}

Cell currency_cell(double dollars, bool precise) {
    return Cell{precise ? format_double(dollars) : format_currency_millions(dollars), dollars};
}

Cell optional_number_cell(const std::optional<double>& value, const char* label = "") {
    return value ? number_cell(*value) : undefined_cell(label);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (const char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

struct Document {
    std::vector<std::string> headers;
    std::vector<std::vector<Cell>> rows;
};

void render_csv(const Document& doc, std::ostream& out) {
    for (std::size_t i = 0; i < doc.headers.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(doc.headers[i]);
    }
    out << '\n';
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (row[i].undefined) continue; // empty field = undefined
            if (row[i].raw.is_number_integer()) {
                out << row[i].raw.get<std::int64_t>();
            } else if (row[i].raw.is_number()) {
                out << format_double(row[i].raw.get<double>());
            } else if (row[i].raw.is_boolean()) {
                out << (row[i].raw.get<bool>() ? "1" : "0");
            } else {
                out << csv_escape(row[i].display);
            }
        }
        out << '\n';
    }
}

void render_json_lines(const Document& doc, std::ostream& out) {
    for (const auto& row : doc.rows) {
        json object = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            object[doc.headers[i]] = row[i].raw;
        }
        out << object.dump() << '\n';
    }
}

void render_table(const Document& doc, std::ostream& out) {
    std::vector<std::size_t> widths(doc.headers.size());
    for (std::size_t i = 0; i < doc.headers.size(); ++i) {
        widths[i] = doc.headers[i].size();
    }
    for (const auto& row : doc.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].display.size());
        }
    }
    const auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << " | ";
            out << cells[i];
            if (i + 1 < cells.size()) {
                out << std::string(widths[i] - cells[i].size(), ' ');
            }
        }
        out << '\n';
    };
    emit(doc.headers);
    std::size_t total = 0;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        total += widths[i] + (i ? 3 : 0);
    }
    out << std::string(total, '-') << '\n';
    for (const auto& row : doc.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (const auto& cell : row) cells.push_back(cell.display);
        emit(cells);
    }
}

void render(const Document& doc, OutputFormat format, std::ostream& out) {
    switch (format) {
    case OutputFormat::csv: render_csv(doc, out); break;
    case OutputFormat::json_lines: render_json_lines(doc, out); break;
    case OutputFormat::table: render_table(doc, out); break;
    }
}

const model::Economics& need_economics(const ScenarioConfig& config) {
    if (!config.economics) throw ConfigError("config is missing the \"economics\" block");
    return *config.economics;
}

const model::ApprovalProtocol& need_protocol(const ScenarioConfig& config) {
    if (!config.protocol) throw ConfigError("config is missing the \"protocol\" block");
    return *config.protocol;
}

const model::PopulationSpec& need_population(const ScenarioConfig& config) {
    if (!config.population) throw ConfigError("config is missing the \"population\" block");
    return *config.population;
}

std::vector<Cell> bound_report_cells(const bounds::BoundReport& report, bool precise) {
    std::vector<Cell> cells;
    cells.push_back(percent_cell(report.tau, precise));
    cells.push_back(rounded_cell(report.cost_reward_ratio, precise));
    cells.push_back(report.posterior_odds_lower
                        ? rounded_cell(*report.posterior_odds_lower, precise)
                        : undefined_cell("vacuous"));
    cells.push_back(currency_cell(report.null_expected_profit, precise));
    cells.push_back(report.bayes_fdr_upper ? percent_cell(*report.bayes_fdr_upper, precise)
                                           : undefined_cell("n/a"));
    return cells;
}

const std::vector<std::string> kBoundHeaders = {
    "type_i_level", "cost_reward_ratio", "posterior_odds_lower",
    "null_expected_profit", "fdr_bound"};

} // namespace

void cmd_bound(const ScenarioConfig& config, const RenderOptions& options,
               std::ostream& out) {
    const auto& econ = need_economics(config);
    const auto& protocol = need_protocol(config);
    const auto report = bounds::bound_report(econ, protocol.effective_tau());

    Document doc;
    doc.headers = kBoundHeaders;
    doc.rows.push_back(bound_report_cells(report, options.precise));
    render(doc, options.format, out);
}

void cmd_design(double alpha, const ScenarioConfig& config, const RenderOptions& options,
                std::ostream& out) {
    const auto& econ = need_economics(config);
    const auto tau = bounds::design_tau(alpha, econ);
    const auto report = bounds::bound_report(econ, tau);

    Document doc;
    doc.headers = {"alpha", "designed_tau"};
    doc.headers.insert(doc.headers.end(), kBoundHeaders.begin(), kBoundHeaders.end());
    std::vector<Cell> cells = {number_cell(alpha), number_cell(tau.value())};
    const auto rest = bound_report_cells(report, options.precise);
    cells.insert(cells.end(), rest.begin(), rest.end());
    doc.rows.push_back(std::move(cells));
    render(doc, options.format, out);
}

void cmd_fda_table(const RenderOptions& options, std::ostream& out) {
    // FDA-style presets: phase-III cost $50M; two confirmatory trials at
    // the two-sided 0.05 level (one-sided 0.025 each), or a single trial
    // at the 0.005 level.
    const model::Economics base(50e6, 1e9);
    const model::ApprovalProtocol standard(numerics::Probability(0.025), 2);
    const model::ApprovalProtocol modernized(numerics::Probability(0.005), 1);
    const double revenues[] = {1e9, 1e10, 1e11};

    Document doc;
    doc.headers = {"protocol", "type_i_level", "revenue", "null_expected_profit",
                   "fdr_bound"};
    for (const auto* entry : {&standard, &modernized}) {
        const bool is_standard = entry == &standard;
        for (const double revenue : revenues) {
            const model::Economics econ(base.cost(), revenue);
            const auto report = bounds::bound_report(econ, entry->effective_tau());
            std::vector<Cell> cells;
            cells.push_back(text_cell(is_standard ? "standard" : "modernized"));
            cells.push_back(percent_cell(report.tau, options.precise));
            cells.push_back(options.precise ? number_cell(revenue)
                                            : Cell{format_currency_compact(revenue), revenue});
            cells.push_back(currency_cell(report.null_expected_profit, options.precise));
            cells.push_back(report.bayes_fdr_upper
                                ? percent_cell(*report.bayes_fdr_upper, options.precise)
                                : undefined_cell("n/a"));
            doc.rows.push_back(std::move(cells));
        }
    }
    render(doc, options.format, out);
}

void cmd_simulate(const ScenarioConfig& config, const RenderOptions& options,
                  std::ostream& out, std::ostream& diag) {
    const auto& econ = need_economics(config);
    const auto& protocol = need_protocol(config);
    const auto& population = need_population(config);
    if (!config.simulation) throw ConfigError("config is missing the \"simulation\" block");
    if (config.simulation->n_agents < 1) {
        throw ConfigError("simulation.n_agents must be >= 1 for the simulate command");
    }
    const std::uint64_t seed = options.seed_override.value_or(config.simulation->seed);

    const auto report = sim::simulate(population, model::GaussianTestModel{}, protocol,
                                      econ, config.simulation->n_agents, seed);

    Document doc;
    doc.headers = {"n_agents",       "n_opted_in",     "n_approved",
                   "n_false_approved", "n_true_approved", "total_agent_profit",
                   "empirical_fdr",  "fdr_std_error",  "seed"};
    std::vector<Cell> cells = {integer_cell(report.n_agents),
                               integer_cell(report.n_opted_in),
                               integer_cell(report.n_approved),
                               integer_cell(report.n_false_approved),
                               integer_cell(report.n_true_approved),
                               number_cell(report.total_agent_profit),
                               optional_number_cell(report.empirical_fdr, "undefined"),
                               optional_number_cell(report.fdr_std_error, "undefined"),
                               integer_cell(static_cast<std::int64_t>(report.seed))};
    doc.rows.push_back(std::move(cells));

    if (options.format == OutputFormat::table) {
        // Vertical key/value layout reads better for a single report.
        for (std::size_t i = 0; i < doc.headers.size(); ++i) {
            out << doc.headers[i] << ": " << doc.rows[0][i].display << '\n';
        }
        return;
    }
    if (options.format == OutputFormat::csv) diag << "seed=" << seed << '\n';
    render(doc, options.format, out);
}

void cmd_sweep(const ScenarioConfig& config, const RenderOptions& options,
               std::ostream& out, std::ostream& diag) {
    const auto& econ = need_economics(config);
    const auto& population = need_population(config);
    if (!config.sweep) throw ConfigError("config is missing the \"sweep\" block");

    const auto grid = make_tau_grid(*config.sweep);
    std::int64_t n_agents = 0;
    std::uint64_t seed = options.seed_override.value_or(0);
    if (config.simulation) {
        n_agents = config.simulation->n_agents;
        if (!options.seed_override) seed = config.simulation->seed;
    }

    const auto rows = sim::sweep_tau(population, model::GaussianTestModel{}, econ, grid,
                                     n_agents, seed, config.sweep->mc_every);

    Document doc;
    doc.headers = {"tau", "exact_fdr", "empirical_fdr", "bound"};
    for (const auto& group : population.groups()) {
        doc.headers.push_back(group.name + "_in");
    }
    for (const auto& row : rows) {
        std::vector<Cell> cells = {number_cell(row.tau),
                                   optional_number_cell(row.exact_fdr),
                                   optional_number_cell(row.empirical_fdr),
                                   number_cell(row.bound)};
        for (const bool in : row.group_opted_in) cells.push_back(flag_cell(in));
        doc.rows.push_back(std::move(cells));
    }

    if (options.format == OutputFormat::json_lines && n_agents > 0) {
        out << json{{"seed", seed}}.dump() << '\n';
    }
    if (options.format == OutputFormat::csv && n_agents > 0) {
        diag << "seed=" << seed << '\n';
    }
    render(doc, options.format, out);
}

void cmd_lfdr(const ScenarioConfig& config, const LfdrGrid& grid,
              const RenderOptions& options, std::ostream& out) {
    const auto& population = need_population(config);
    if (!(grid.x_min > 0.0 && grid.x_min < grid.x_max && grid.x_max < 1.0)) {
        throw ConfigError("lfdr grid requires 0 < x_min < x_max < 1");
    }
    if (grid.n_points < 2) throw ConfigError("lfdr grid needs at least 2 points");

    const auto prior = scenario_prior(population, grid.group);
    const model::GaussianTestModel model;

    Document doc;
    doc.headers = {"x", "lfdr", "fdr_region_0_to_x"};
    const double n = static_cast<double>(grid.n_points - 1);
    for (int i = 0; i < grid.n_points; ++i) {
        const double t = static_cast<double>(i) / n;
        const double x = grid.log_spacing
                             ? grid.x_min * std::pow(grid.x_max / grid.x_min, t)
                             : grid.x_min + t * (grid.x_max - grid.x_min);
        const auto local = bayes::local_fdr(prior, model, numerics::Probability(x));
        const auto region = bayes::fdr_over_region(
            prior, model,
            bayes::PValueRegion(numerics::Probability(0.0), numerics::Probability(x)));
        std::vector<Cell> cells = {number_cell(x), number_cell(local.value())};
        cells.push_back(region ? number_cell(region->value()) : undefined_cell(""));
        doc.rows.push_back(std::move(cells));
    }
    render(doc, options.format, out);
}

} // namespace trialgame::cli
