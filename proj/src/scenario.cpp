#include "trialgame/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace trialgame::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ConfigError(path + ": " + message);
}

const json& member(const json& object, const std::string& path, const char* key) {
    if (!object.is_object()) fail(path, "expected an object");
    const auto it = object.find(key);
    if (it == object.end()) fail(path + "." + key, "missing required field");
    return *it;
}

const json* member_opt(const json& object, const std::string& path, const char* key) {
    if (!object.is_object()) fail(path, "expected an object");
    const auto it = object.find(key);
    return it == object.end() ? nullptr : &*it;
}

double as_number(const json& value, const std::string& path) {
    if (!value.is_number()) fail(path, "expected a number");
    return value.get<double>();
}

std::int64_t as_integer(const json& value, const std::string& path) {
    if (!value.is_number_integer()) fail(path, "expected an integer");
    return value.get<std::int64_t>();
}

bool as_bool(const json& value, const std::string& path) {
    if (!value.is_boolean()) fail(path, "expected a boolean");
    return value.get<bool>();
}

std::string as_string(const json& value, const std::string& path) {
    if (!value.is_string()) fail(path, "expected a string");
    return value.get<std::string>();
}

// Re-throws domain-type construction failures with the field path attached.
template <typename Fn>
auto with_path(const std::string& path, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& error) {
        fail(path, error.what());
    }
}

model::ParameterPoint parse_point(const json& value, const std::string& path) {
    model::ParameterPoint point;
    point.effect = as_number(member(value, path, "effect"), path + ".effect");
    if (const json* null_flag = member_opt(value, path, "null")) {
        point.is_null = as_bool(*null_flag, path + ".null");
    } else {
        point.is_null = point.effect == 0.0;
    }
    return point;
}

model::DiscretePrior parse_prior(const json& value, const std::string& path) {
    if (!value.is_array() || value.empty()) fail(path, "expected a nonempty array");
    std::vector<model::DiscretePrior::Entry> entries;
    entries.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string entry_path = path + "[" + std::to_string(i) + "]";
        model::DiscretePrior::Entry entry;
        entry.point = parse_point(value[i], entry_path);
        entry.weight = as_number(member(value[i], entry_path, "weight"), entry_path + ".weight");
        entries.push_back(entry);
    }
    return with_path(path, [&] { return model::DiscretePrior(std::move(entries)); });
}

model::UtilitySpec parse_utility(const json& value, const std::string& path) {
    const std::string kind = as_string(member(value, path, "kind"), path + ".kind");
    if (kind == "linear") return model::UtilitySpec::linear();
    if (kind == "concave") {
        const double aversion =
            as_number(member(value, path, "risk_aversion"), path + ".risk_aversion");
        return with_path(path + ".risk_aversion",
                         [&] { return model::UtilitySpec::concave(aversion); });
    }
    fail(path + ".kind", "expected \"linear\" or \"concave\"");
}

model::PopulationGroup parse_group(const json& value, const std::string& path) {
    auto prior = parse_prior(member(value, path, "prior"), path + ".prior");
    auto utility = model::UtilitySpec::linear();
    if (const json* u = member_opt(value, path, "utility")) {
        utility = parse_utility(*u, path + ".utility");
    }
    model::PopulationGroup group{
        "", model::AgentProfile{std::move(prior), utility},
        as_number(member(value, path, "fraction"), path + ".fraction"),
        model::OptInRule::profit, model::ThetaMode::from_prior, {}};
    if (const json* name = member_opt(value, path, "name")) {
        group.name = as_string(*name, path + ".name");
    }
    if (const json* rule = member_opt(value, path, "opt_in_rule")) {
        const std::string text = as_string(*rule, path + ".opt_in_rule");
        if (text == "profit") {
            group.opt_in_rule = model::OptInRule::profit;
        } else if (text == "utility") {
            group.opt_in_rule = model::OptInRule::utility;
        } else {
            fail(path + ".opt_in_rule", "expected \"profit\" or \"utility\"");
        }
    }
    if (const json* mode = member_opt(value, path, "theta_mode")) {
        const std::string text = as_string(*mode, path + ".theta_mode");
        if (text == "prior") {
            group.theta_mode = model::ThetaMode::from_prior;
        } else if (text == "fixed") {
            group.theta_mode = model::ThetaMode::fixed_list;
        } else {
            fail(path + ".theta_mode", "expected \"prior\" or \"fixed\"");
        }
    }
    if (group.theta_mode == model::ThetaMode::fixed_list) {
        const json& list = member(value, path, "fixed_thetas");
        const std::string list_path = path + ".fixed_thetas";
        if (!list.is_array() || list.empty()) fail(list_path, "expected a nonempty array");
        for (std::size_t i = 0; i < list.size(); ++i) {
            group.fixed_thetas.push_back(
                parse_point(list[i], list_path + "[" + std::to_string(i) + "]"));
        }
    }
    return group;
}

json point_to_json(const model::ParameterPoint& point) {
    return json{{"effect", point.effect}, {"null", point.is_null}};
}

json group_to_json(const model::PopulationGroup& group) {
    json prior = json::array();
    for (const auto& entry : group.profile.prior.support()) {
        json item = point_to_json(entry.point);
        item["weight"] = entry.weight;
        prior.push_back(std::move(item));
    }
    json out{{"name", group.name},
             {"fraction", group.fraction},
             {"prior", std::move(prior)},
             {"opt_in_rule",
              group.opt_in_rule == model::OptInRule::utility ? "utility" : "profit"},
             {"theta_mode",
              group.theta_mode == model::ThetaMode::fixed_list ? "fixed" : "prior"}};
    if (group.profile.utility.is_linear()) {
        out["utility"] = json{{"kind", "linear"}};
    } else {
        out["utility"] = json{{"kind", "concave"},
                              {"risk_aversion", group.profile.utility.risk_aversion()}};
    }
    if (group.theta_mode == model::ThetaMode::fixed_list) {
        json list = json::array();
        for (const auto& point : group.fixed_thetas) list.push_back(point_to_json(point));
        out["fixed_thetas"] = std::move(list);
    }
    return out;
}

} // namespace

double parse_currency(const json& value, const std::string& path) {
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) fail(path, "expected a number or a string like \"50M\"");
    std::string text = value.get<std::string>();
    if (!text.empty() && text.front() == '$') text.erase(text.begin());
    if (text.empty()) fail(path, "empty currency string");

    double scale = 1.0;
    switch (text.back()) {
    case 'K': case 'k': scale = 1e3; text.pop_back(); break;
    case 'M': case 'm': scale = 1e6; text.pop_back(); break;
    case 'B': case 'b': scale = 1e9; text.pop_back(); break;
    default: break;
    }

    std::size_t consumed = 0;
    double amount = 0.0;
    try {
        amount = std::stod(text, &consumed);
    } catch (const std::exception&) {
        fail(path, "cannot parse currency amount \"" + text + "\"");
    }
    if (consumed != text.size()) fail(path, "trailing characters in currency amount");
    return amount * scale;
}

ScenarioConfig parse_scenario(const json& root) {
    if (!root.is_object()) throw ConfigError("config: top level must be an object");
    ScenarioConfig config;

    if (const json* econ = member_opt(root, "config", "economics")) {
        const double cost = parse_currency(member(*econ, "economics", "cost"), "economics.cost");
        const double reward =
            parse_currency(member(*econ, "economics", "reward"), "economics.reward");
        config.economics =
            with_path("economics", [&] { return model::Economics(cost, reward); });
    }
    if (const json* protocol = member_opt(root, "config", "protocol")) {
        const double threshold = as_number(
            member(*protocol, "protocol", "per_trial_threshold"),
            "protocol.per_trial_threshold");
        std::int64_t trials = 1;
        if (const json* k = member_opt(*protocol, "protocol", "num_trials")) {
            trials = as_integer(*k, "protocol.num_trials");
        }
        config.protocol = with_path("protocol", [&] {
            return model::ApprovalProtocol(numerics::Probability(threshold),
                                           static_cast<int>(trials));
        });
    }
    if (const json* population = member_opt(root, "config", "population")) {
        const json& groups = member(*population, "population", "groups");
        if (!groups.is_array() || groups.empty()) {
            fail("population.groups", "expected a nonempty array");
        }
        std::vector<model::PopulationGroup> parsed;
        parsed.reserve(groups.size());
        for (std::size_t i = 0; i < groups.size(); ++i) {
            parsed.push_back(parse_group(
                groups[i], "population.groups[" + std::to_string(i) + "]"));
        }
        config.population =
            with_path("population", [&] { return model::PopulationSpec(std::move(parsed)); });
    }
    if (const json* simulation = member_opt(root, "config", "simulation")) {
        SimulationSpec spec;
        spec.n_agents =
            as_integer(member(*simulation, "simulation", "n_agents"), "simulation.n_agents");
        if (spec.n_agents < 0) fail("simulation.n_agents", "must be >= 0");
        if (const json* seed = member_opt(*simulation, "simulation", "seed")) {
            const std::int64_t raw = as_integer(*seed, "simulation.seed");
            if (raw < 0) fail("simulation.seed", "must be >= 0");
            spec.seed = static_cast<std::uint64_t>(raw);
        }
        config.simulation = spec;
    }
    if (const json* sweep = member_opt(root, "config", "sweep")) {
        SweepSpec spec;
        spec.tau_min = as_number(member(*sweep, "sweep", "tau_min"), "sweep.tau_min");
        spec.tau_max = as_number(member(*sweep, "sweep", "tau_max"), "sweep.tau_max");
        spec.n_points = static_cast<int>(
            as_integer(member(*sweep, "sweep", "n_points"), "sweep.n_points"));
        if (const json* log_spacing = member_opt(*sweep, "sweep", "log_spacing")) {
            spec.log_spacing = as_bool(*log_spacing, "sweep.log_spacing");
        }
        if (const json* every = member_opt(*sweep, "sweep", "mc_every")) {
            spec.mc_every = as_integer(*every, "sweep.mc_every");
            if (spec.mc_every < 1) fail("sweep.mc_every", "must be >= 1");
        }
        if (!(spec.tau_min > 0.0 && spec.tau_min < spec.tau_max && spec.tau_max < 1.0)) {
            fail("sweep", "requires 0 < tau_min < tau_max < 1");
        }
        if (spec.n_points < 2) fail("sweep.n_points", "must be >= 2");
        config.sweep = spec;
    }
    return config;
}

ScenarioConfig load_scenario(const std::string& file_path) {
    std::ifstream input(file_path);
    if (!input) throw ConfigError("cannot open config file: " + file_path);
    json root;
    try {
        root = json::parse(input);
    } catch (const json::parse_error& error) {
        throw ConfigError(file_path + ": " + error.what());
    }
    return parse_scenario(root);
}

json scenario_to_json(const ScenarioConfig& config) {
    json out = json::object();
    if (config.economics) {
        out["economics"] =
            json{{"cost", config.economics->cost()}, {"reward", config.economics->reward()}};
    }
    if (config.protocol) {
        out["protocol"] = json{{"per_trial_threshold",
                                config.protocol->per_trial_threshold().value()},
                               {"num_trials", config.protocol->num_trials()}};
    }
    if (config.population) {
        json groups = json::array();
        for (const auto& group : config.population->groups()) {
            groups.push_back(group_to_json(group));
        }
        out["population"] = json{{"groups", std::move(groups)}};
    }
    if (config.simulation) {
        out["simulation"] = json{{"n_agents", config.simulation->n_agents},
                                 {"seed", config.simulation->seed}};
    }
    if (config.sweep) {
        out["sweep"] = json{{"tau_min", config.sweep->tau_min},
                            {"tau_max", config.sweep->tau_max},
                            {"n_points", config.sweep->n_points},
                            {"log_spacing", config.sweep->log_spacing},
                            {"mc_every", config.sweep->mc_every}};
    }
    return out;
}

std::string serialize_scenario(const ScenarioConfig& config) {
    return scenario_to_json(config).dump(2) + "\n";
}

std::vector<double> make_tau_grid(const SweepSpec& sweep) {
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(sweep.n_points));
    const double n = static_cast<double>(sweep.n_points - 1);
    for (int i = 0; i < sweep.n_points; ++i) {
        const double t = static_cast<double>(i) / n;
        const double tau =
            sweep.log_spacing
                ? sweep.tau_min * std::pow(sweep.tau_max / sweep.tau_min, t)
                : sweep.tau_min + t * (sweep.tau_max - sweep.tau_min);
        grid.push_back(tau);
    }
    grid.front() = sweep.tau_min;
    grid.back() = sweep.tau_max;
    return grid;
}

model::DiscretePrior scenario_prior(const model::PopulationSpec& population,
                                    const std::optional<std::string>& group_name) {
    if (group_name) {
        for (const auto& group : population.groups()) {
            if (group.name == *group_name) return group.profile.prior;
        }
        throw ConfigError("population has no group named \"" + *group_name + "\"");
    }
    std::vector<model::DiscretePrior::Entry> merged;
    for (const auto& group : population.groups()) {
        for (const auto& entry : group.profile.prior.support()) {
            const double weight = group.fraction * entry.weight;
            auto found = std::find_if(merged.begin(), merged.end(), [&](const auto& m) {
                return m.point == entry.point;
            });
            if (found == merged.end()) {
                merged.push_back({entry.point, weight});
            } else {
                found->weight += weight;
            }
        }
    }
    return model::DiscretePrior(std::move(merged));
}

} // namespace trialgame::cli
