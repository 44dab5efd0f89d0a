#include "trialgame/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "trialgame/bayes.hpp"
#include "trialgame/rng.hpp"

namespace trialgame::sim {

namespace {

// Per-group state hoisted out of the agent loop. Participation is a
// property of the group's profile, so it is decided once.
struct GroupPlan {
    bool opted_in = false;
    double fraction_cumulative = 0.0;
    std::vector<double> theta_cumulative; // prior mode
    const std::vector<model::ParameterPoint>* fixed = nullptr;
    std::vector<model::ParameterPoint> prior_points;
};

std::vector<GroupPlan> plan_groups(const PopulationSpec& population,
                                   const GaussianTestModel& model,
                                   const ApprovalProtocol& protocol, const Economics& econ) {
    std::vector<GroupPlan> plans;
    plans.reserve(population.groups().size());
    double cumulative = 0.0;
    for (const auto& group : population.groups()) {
        GroupPlan plan;
        plan.opted_in = model::opts_in(group.profile, model, protocol, econ,
                                       group.opt_in_rule);
        cumulative += group.fraction;
        plan.fraction_cumulative = cumulative;
        if (group.theta_mode == model::ThetaMode::from_prior) {
            double mass = 0.0;
            for (const auto& entry : group.profile.prior.support()) {
                mass += entry.weight;
                plan.theta_cumulative.push_back(mass);
                plan.prior_points.push_back(entry.point);
            }
        } else {
            model::check_points_binding(model, group.fixed_thetas);
            plan.fixed = &group.fixed_thetas;
        }
        plans.push_back(std::move(plan));
    }
    plans.back().fraction_cumulative = 1.0;
    return plans;
}

const model::ParameterPoint& draw_theta(const GroupPlan& plan, rng::SplitMix64& generator) {
    const double u = generator.next_uniform_open();
    if (plan.fixed != nullptr) {
        auto index = static_cast<std::size_t>(u * static_cast<double>(plan.fixed->size()));
        if (index >= plan.fixed->size()) index = plan.fixed->size() - 1;
        return (*plan.fixed)[index];
    }
    for (std::size_t i = 0; i < plan.theta_cumulative.size(); ++i) {
        if (u <= plan.theta_cumulative[i]) return plan.prior_points[i];
    }
    return plan.prior_points.back();
}

bool run_trials(const GaussianTestModel& model, const ApprovalProtocol& protocol,
                double theta, rng::SplitMix64& generator) {
    const double threshold = protocol.per_trial_threshold().value();
    for (int trial = 0; trial < protocol.num_trials(); ++trial) {
        if (model::sample_pvalue(model, theta, generator).value() > threshold) return false;
    }
    return true;
}

} // namespace

Tally simulate_range(const PopulationSpec& population, const GaussianTestModel& model,
                     const ApprovalProtocol& protocol, const Economics& econ,
                     std::int64_t first_agent, std::int64_t last_agent, std::uint64_t seed) {
    if (first_agent < 0 || last_agent < first_agent) {
        throw std::invalid_argument("simulate_range: invalid agent index range");
    }
    const auto plans = plan_groups(population, model, protocol, econ);

    Tally tally;
    tally.n_agents = last_agent - first_agent;
    for (std::int64_t agent = first_agent; agent < last_agent; ++agent) {
        auto generator = rng::substream(seed, static_cast<std::uint64_t>(agent));
        const double u = generator.next_uniform_open();
        std::size_t group_index = plans.size() - 1;
        for (std::size_t g = 0; g < plans.size(); ++g) {
            if (u <= plans[g].fraction_cumulative) {
                group_index = g;
                break;
            }
        }
        const GroupPlan& plan = plans[group_index];
        if (!plan.opted_in) continue;
        ++tally.n_opted_in;
        const model::ParameterPoint& point = draw_theta(plan, generator);
        if (!run_trials(model, protocol, point.effect, generator)) continue;
        ++tally.n_approved;
        if (point.is_null) {
            ++tally.n_false_approved;
        } else {
            ++tally.n_true_approved;
        }
    }
    return tally;
}

SimulationReport report_from_tally(const Tally& tally, const Economics& econ,
                                   std::uint64_t seed) {
    SimulationReport report;
    report.n_agents = tally.n_agents;
    report.n_opted_in = tally.n_opted_in;
    report.n_approved = tally.n_approved;
    report.n_false_approved = tally.n_false_approved;
    report.n_true_approved = tally.n_true_approved;
    report.total_agent_profit = static_cast<double>(tally.n_approved) * econ.reward() -
                                static_cast<double>(tally.n_opted_in) * econ.cost();
    if (tally.n_approved > 0) {
        const double fdr = static_cast<double>(tally.n_false_approved) /
                           static_cast<double>(tally.n_approved);
        report.empirical_fdr = fdr;
        report.fdr_std_error =
            std::sqrt(fdr * (1.0 - fdr) / static_cast<double>(tally.n_approved));
    }
    report.seed = seed;
    return report;
}

SimulationReport simulate(const PopulationSpec& population, const GaussianTestModel& model,
                          const ApprovalProtocol& protocol, const Economics& econ,
                          std::int64_t n_agents, std::uint64_t seed) {
    if (n_agents < 1) {
        throw std::invalid_argument("simulate: n_agents must be >= 1");
    }
    const Tally tally =
        simulate_range(population, model, protocol, econ, 0, n_agents, seed);
    return report_from_tally(tally, econ, seed);
}

std::vector<SweepRow> sweep_tau(const PopulationSpec& population,
                                const GaussianTestModel& model, const Economics& econ,
                                std::span<const double> tau_grid, std::int64_t n_agents,
                                std::uint64_t seed, std::int64_t mc_stride) {
    if (mc_stride < 1) {
        throw std::invalid_argument("sweep_tau: mc_stride must be >= 1");
    }
    double previous = 0.0;
    for (const double tau : tau_grid) {
        if (!(tau > previous && tau < 1.0)) {
            throw std::invalid_argument(
                "sweep_tau: grid must be strictly increasing within (0,1)");
        }
        previous = tau;
    }

    std::vector<SweepRow> rows;
    rows.reserve(tau_grid.size());
    for (std::size_t index = 0; index < tau_grid.size(); ++index) {
        const double tau = tau_grid[index];
        const ApprovalProtocol protocol{numerics::Probability(tau), 1};

        SweepRow row;
        row.tau = tau;
        row.bound = std::min(1.0, tau * econ.reward() / econ.cost());

        const auto exact = bayes::population_fdr_exact(population, model, protocol, econ);
        row.group_opted_in = exact.group_opted_in;
        if (exact.defined()) row.exact_fdr = exact.value;

        const bool run_mc = n_agents > 0 && (index % static_cast<std::size_t>(mc_stride)) == 0;
        if (run_mc) {
            const auto report =
                simulate(population, model, protocol, econ, n_agents,
                         rng::derive_seed(seed, static_cast<std::uint64_t>(index)));
            row.empirical_fdr = report.empirical_fdr;
            row.empirical_se = report.fdr_std_error;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Theorem2Empirical theorem2_empirical(std::span<const ParameterPoint> thetas,
                                     const GaussianTestModel& model,
                                     const ApprovalProtocol& protocol, const Economics& econ,
                                     std::int64_t n_replicates, std::uint64_t seed) {
    if (n_replicates < 1) {
        throw std::invalid_argument("theorem2_empirical: n_replicates must be >= 1");
    }
    Theorem2Empirical result;
    result.n_replicates = n_replicates;
    result.ledger = bounds::theorem2_ledger(thetas, model, protocol, econ);

    double sum_profit = 0.0, sumsq_profit = 0.0;
    double sum_tp = 0.0, sumsq_tp = 0.0;
    double sum_fp = 0.0, sumsq_fp = 0.0;
    for (std::int64_t replicate = 0; replicate < n_replicates; ++replicate) {
        auto generator = rng::substream(seed, static_cast<std::uint64_t>(replicate));
        std::int64_t approved = 0, true_pos = 0, false_pos = 0;
        for (const auto& point : thetas) {
            if (!run_trials(model, protocol, point.effect, generator)) continue;
            ++approved;
            if (point.is_null) {
                ++false_pos;
            } else {
                ++true_pos;
            }
        }
        const double profit = static_cast<double>(approved) * econ.reward() -
                              static_cast<double>(thetas.size()) * econ.cost();
        sum_profit += profit;
        sumsq_profit += profit * profit;
        sum_tp += static_cast<double>(true_pos);
        sumsq_tp += static_cast<double>(true_pos) * static_cast<double>(true_pos);
        sum_fp += static_cast<double>(false_pos);
        sumsq_fp += static_cast<double>(false_pos) * static_cast<double>(false_pos);
    }

    const double n = static_cast<double>(n_replicates);
    const auto finish = [n](double sum, double sumsq, double& mean, double& se) {
        mean = sum / n;
        if (n > 1.5) {
            const double variance = std::max(0.0, (sumsq - n * mean * mean) / (n - 1.0));
            se = std::sqrt(variance / n);
        } else {
            se = 0.0;
        }
    };
    finish(sum_profit, sumsq_profit, result.mean_profit, result.se_profit);
    finish(sum_tp, sumsq_tp, result.mean_true_positives, result.se_true_positives);
    finish(sum_fp, sumsq_fp, result.mean_false_positives, result.se_false_positives);
    return result;
}

} // namespace trialgame::sim
