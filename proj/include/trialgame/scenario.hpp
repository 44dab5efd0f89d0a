#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trialgame/model.hpp"

namespace trialgame::cli {

// A config problem, carrying the JSON path of the offending field.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimulationSpec {
    std::int64_t n_agents = 0;
    std::uint64_t seed = 0;
};

struct SweepSpec {
    double tau_min = 0.0;
    double tau_max = 0.0;
    int n_points = 0;
    bool log_spacing = false;
    std::int64_t mc_every = 1; // Monte Carlo at every mc_every-th grid point
};

// A scenario file: any subset of the blocks below. Each command checks
// for the blocks it needs and reports missing ones by name.
struct ScenarioConfig {
    std::optional<model::Economics> economics;
    std::optional<model::ApprovalProtocol> protocol;
    std::optional<model::PopulationSpec> population;
    std::optional<SimulationSpec> simulation;
    std::optional<SweepSpec> sweep;
};

// Currency field: a plain number in dollars, or a string like
// "50M" / "$1.5B" (suffix K/M/B), normalized to dollars on load.
double parse_currency(const nlohmann::json& value, const std::string& path);

ScenarioConfig parse_scenario(const nlohmann::json& root);
ScenarioConfig load_scenario(const std::string& file_path);

nlohmann::json scenario_to_json(const ScenarioConfig& config);
std::string serialize_scenario(const ScenarioConfig& config);

// The sweep's threshold grid, strictly increasing inside (0,1).
std::vector<double> make_tau_grid(const SweepSpec& sweep);

// Fraction-weighted mixture of all group priors (the marginal belief of
// a randomly drawn agent), or a single group's prior when name is given.
model::DiscretePrior scenario_prior(const model::PopulationSpec& population,
                                    const std::optional<std::string>& group_name);

} // namespace trialgame::cli
