// Acceptance suite: one pass/fail line per criterion, exit code equal to
// the number of failures. Run with no arguments for all criteria or with
// a criterion number (1-8) for a single one.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "trialgame/bayes.hpp"
#include "trialgame/bounds.hpp"
#include "trialgame/commands.hpp"
#include "trialgame/sim.hpp"

using namespace trialgame;
using numerics::Probability;

namespace {

const model::GaussianTestModel kModel;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail = message;
        }
    }
};

model::DiscretePrior promising_prior() {
    return model::DiscretePrior({{{1.0, false}, 0.8}, {{0.0, true}, 0.2}});
}

model::PopulationSpec two_type_population() {
    const model::AgentProfile promising{promising_prior(), model::UtilitySpec::linear()};
    const model::AgentProfile unpromising{
        model::DiscretePrior::point_mass({0.0, true}), model::UtilitySpec::linear()};
    return model::PopulationSpec(
        {model::PopulationGroup{"promising", promising, 0.01},
         model::PopulationGroup{"unpromising", unpromising, 0.99}});
}

// --- criterion 1: the six golden FDA rows at the display rounding -------

void criterion1(Check& check) {
    std::ostringstream out;
    cli::cmd_fda_table(cli::RenderOptions{cli::OutputFormat::table, false, {}}, out);
    const std::string text = out.str();

    std::vector<std::string> rows;
    std::istringstream stream(text);
    for (std::string line; std::getline(stream, line);) rows.push_back(line);
    check.require(rows.size() == 8, "expected header + separator + 6 rows");
    if (!check.ok) return;

    const struct {
        const char* protocol;
        const char* level;
        const char* profit;
        const char* bound;
    } expected[6] = {
        {"standard", "0.0625%", "-$49M", "1.25%"},
        {"standard", "0.0625%", "-$44M", "12.5%"},
        {"standard", "0.0625%", "$13M", "n/a"},
        {"modernized", "0.5%", "-$45M", "10%"},
        {"modernized", "0.5%", "$0M", "n/a"},
        {"modernized", "0.5%", "$450M", "n/a"},
    };
    for (int i = 0; i < 6; ++i) {
        const std::string& row = rows[static_cast<std::size_t>(i) + 2];
        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const auto pos = row.find(" | ", start);
            if (pos == std::string::npos) {
                cells.push_back(row.substr(start));
                break;
            }
            cells.push_back(row.substr(start, pos - start));
            start = pos + 3;
        }
        const auto strip = [](std::string s) {
            while (!s.empty() && s.back() == ' ') s.pop_back();
            return s;
        };
        check.require(cells.size() == 5, "row " + std::to_string(i) + ": expected 5 cells");
        if (!check.ok) return;
        check.require(strip(cells[0]) == expected[i].protocol &&
                          strip(cells[1]) == expected[i].level &&
                          strip(cells[3]) == expected[i].profit &&
                          strip(cells[4]) == expected[i].bound,
                      "row " + std::to_string(i) + " mismatch: " + row);
    }
}

// --- criterion 2: structural reproduction of the two-type FDR curve -----

void criterion2(Check& check) {
    const auto population = two_type_population();
    const model::Economics econ(1.0, 100.0);

    std::vector<double> grid;
    grid.reserve(200);
    for (int i = 0; i < 200; ++i) {
        grid.push_back(1e-4 * std::pow(5e-2 / 1e-4, i / 199.0));
    }
    grid.front() = 1e-4;
    grid.back() = 5e-2;

    const auto rows = sim::sweep_tau(population, kModel, econ, grid, 1000000, 20240601, 10);
    check.require(rows.size() == 200, "expected 200 sweep rows");

    const auto promising_root =
        model::opt_in_threshold(promising_prior(), kModel, econ);
    const auto unpromising_root = model::opt_in_threshold(
        model::DiscretePrior::point_mass({0.0, true}), kModel, econ);
    check.require(promising_root.has_value() && unpromising_root.has_value(),
                  "opt-in thresholds must exist");
    if (!check.ok) return;

    // (b) second participation change sits at tau = 0.01 +- 1e-9
    check.require(std::fabs(unpromising_root->value() - 0.01) <= 1e-9,
                  "unpromising opt-in root must be 0.01 within 1e-9");

    int flips = 0;
    std::vector<bool> previous;
    int mc_rows_checked = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const bool anyone_in = row.group_opted_in[0] || row.group_opted_in[1];

        // (a) undefined exactly while nobody participates
        check.require(row.exact_fdr.has_value() == anyone_in,
                      "fdr definedness must track participation at tau=" +
                          std::to_string(row.tau));
        check.require(anyone_in ==
                          (row.tau >= promising_root->value() - 1e-12),
                      "participation must begin at the promising root");

        // (c) dominance by the incentive bound wherever it is informative
        if (row.exact_fdr) {
            if (row.bound < 1.0) {
                check.require(*row.exact_fdr <= row.bound + 1e-12,
                              "exact fdr must respect the bound at tau=" +
                                  std::to_string(row.tau));
            } else {
                check.require(*row.exact_fdr <= 1.0 + 1e-12, "fdr must stay below 1");
            }
        }

        if (!previous.empty() && row.group_opted_in != previous) ++flips;
        previous = row.group_opted_in;

        // Monte Carlo agreement at the sampled rows
        if (row.empirical_fdr) {
            ++mc_rows_checked;
            check.require(row.exact_fdr.has_value(),
                          "empirical fdr without exact fdr at tau=" +
                              std::to_string(row.tau));
            if (row.exact_fdr) {
                const double se = row.empirical_se.value_or(0.0);
                check.require(std::fabs(*row.empirical_fdr - *row.exact_fdr) <=
                                  4.0 * se + 1e-12,
                              "empirical fdr outside 4 sigma at tau=" +
                                  std::to_string(row.tau));
            }
        }
    }
    check.require(flips == 2, "expected exactly 2 participation flips, saw " +
                                  std::to_string(flips));
    check.require(mc_rows_checked >= 10, "expected Monte Carlo at the sampled rows");

    // (d) upward discontinuity at tau = 0.01
    const auto left = bayes::population_fdr_exact(
        population, kModel, model::ApprovalProtocol(Probability(0.01 - 1e-9), 1), econ);
    const auto right = bayes::population_fdr_exact(
        population, kModel, model::ApprovalProtocol(Probability(0.01), 1), econ);
    check.require(left.defined() && right.defined(), "jump endpoints must be defined");
    if (left.defined() && right.defined()) {
        check.require(right.value - left.value > 0.1,
                      "fdr must jump upward by more than 0.1 at tau = 0.01");
    }
}

// --- criterion 3: posterior odds dominate the incentive bound -----------

void criterion3(Check& check) {
    rng::SplitMix64 generator(1001);
    for (int instance = 0; instance < 1000; ++instance) {
        const double theta = 0.2 + 2.8 * generator.next_uniform_open();
        const double nonnull_weight = generator.next_uniform_open();
        const model::DiscretePrior prior(
            {{{theta, false}, nonnull_weight}, {{0.0, true}, 1.0 - nonnull_weight}});
        const double cost_reward = 0.001 + 0.499 * generator.next_uniform_open();
        const model::Economics econ(cost_reward, 1.0);

        const auto root = model::opt_in_threshold(prior, kModel, econ);
        check.require(root.has_value(), "participation threshold must exist");
        if (!root) return;

        // participation enforced: tau drawn from [root, C/R)
        const double tau = root->value() +
                           generator.next_uniform_open() * (cost_reward - root->value());
        if (!(tau > 0.0 && tau < cost_reward)) continue;
        const model::ApprovalProtocol protocol{Probability(tau), 1};

        const model::AgentProfile profile{prior, model::UtilitySpec::linear()};
        check.require(model::opts_in(profile, kModel, protocol, econ),
                      "instance must participate");

        const auto odds = bayes::posterior_odds_nonnull(prior, kModel, protocol);
        check.require(odds.has_value(), "posterior odds must be defined");
        if (!odds) return;
        const double bound = (cost_reward - tau) / tau;
        check.require(*odds >= bound - 1e-12,
                      "posterior odds " + std::to_string(*odds) + " below bound " +
                          std::to_string(bound));
        if (!check.ok) return;
    }
}

// --- criterion 4: prior-free ledger implication ---------------------------

void criterion4(Check& check) {
    rng::SplitMix64 generator(2002);
    int nonvacuous = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        const double cost_reward = 0.001 + 0.499 * generator.next_uniform_open();
        const model::Economics econ(cost_reward, 1.0);
        const double tau = cost_reward * generator.next_uniform_open();
        if (tau <= 1e-12) continue;
        const int trials = generator.next_u64() % 4 == 0 ? 2 : 1;
        const double per_trial = trials == 2 ? std::sqrt(tau) : tau;
        const model::ApprovalProtocol protocol{Probability(per_trial), trials};
        if (!(protocol.effective_tau().value() < cost_reward)) continue;

        const auto count = 1 + generator.next_u64() % 50;
        std::vector<model::ParameterPoint> agents;
        for (std::uint64_t i = 0; i < count; ++i) {
            if (generator.next_uniform_open() < 0.5) {
                agents.push_back({0.0, true});
            } else {
                agents.push_back({3.0 * generator.next_uniform_open(), false});
            }
        }

        const auto report = bounds::theorem2_ledger(agents, kModel, protocol, econ);
        check.require(report.verdict == bounds::LedgerVerdict::consistent,
                      "ledger verdict must be consistent");
        if (report.agent_total >= 0.0) {
            ++nonvacuous;
            check.require(report.ratio >= report.bound, "weak implication violated");
            if (report.agent_total > 0.0) {
                check.require(report.ratio > report.bound, "strict implication violated");
            }
        }
        for (const auto& entry : report.entries) {
            check.require(entry.principal_value >= entry.agent_value - 1e-12,
                          "per-agent domination violated");
        }
        if (!check.ok) return;
    }
    check.require(nonvacuous >= 100, "implication exercised too rarely");
}

// --- criterion 5: simulator agrees with the exact engine ------------------

struct Scenario {
    std::string name;
    model::PopulationSpec population;
    model::ApprovalProtocol protocol;
    model::Economics econ;
};

double group_mean_approval(const model::PopulationGroup& group,
                           const model::ApprovalProtocol& protocol) {
    if (group.theta_mode == model::ThetaMode::from_prior) {
        return model::expected_protocol_power(group.profile.prior, kModel, protocol)
            .value();
    }
    double total = 0.0;
    for (const auto& point : group.fixed_thetas) {
        total += model::protocol_power(kModel, point.effect, protocol).value();
    }
    return total / static_cast<double>(group.fixed_thetas.size());
}

void criterion5(Check& check) {
    const model::Economics small(1.0, 100.0);
    const model::AgentProfile promising{promising_prior(), model::UtilitySpec::linear()};
    const model::AgentProfile null_believer{
        model::DiscretePrior::point_mass({0.0, true}), model::UtilitySpec::linear()};
    const model::AgentProfile half_half{
        model::DiscretePrior({{{1.0, false}, 0.5}, {{0.0, true}, 0.5}}),
        model::UtilitySpec::linear()};
    const model::AgentProfile averse{promising_prior(), model::UtilitySpec::concave(2.0)};

    std::vector<Scenario> scenarios;
    scenarios.push_back({"two-type tau=0.02", two_type_population(),
                         model::ApprovalProtocol(Probability(0.02), 1), small});
    scenarios.push_back({"two-type tau=0.005", two_type_population(),
                         model::ApprovalProtocol(Probability(0.005), 1), small});
    scenarios.push_back({"two-type below thresholds", two_type_population(),
                         model::ApprovalProtocol(Probability(2e-4), 1), small});
    scenarios.push_back(
        {"pure null tau=0.02",
         model::PopulationSpec({model::PopulationGroup{"nulls", null_believer, 1.0}}),
         model::ApprovalProtocol(Probability(0.02), 1), small});
    scenarios.push_back(
        {"promising two-trial",
         model::PopulationSpec({model::PopulationGroup{"promising", promising, 1.0}}),
         model::ApprovalProtocol(Probability(0.025), 2), small});
    scenarios.push_back(
        {"deluded fixed nulls",
         model::PopulationSpec({model::PopulationGroup{"deluded", promising, 1.0,
                                                       model::OptInRule::profit,
                                                       model::ThetaMode::fixed_list,
                                                       {{0.0, true}}}}),
         model::ApprovalProtocol(Probability(0.005), 1), small});
    scenarios.push_back(
        {"fixed mixed list",
         model::PopulationSpec({model::PopulationGroup{"mixed", promising, 1.0,
                                                       model::OptInRule::profit,
                                                       model::ThetaMode::fixed_list,
                                                       {{0.0, true}, {2.0, false}}}}),
         model::ApprovalProtocol(Probability(0.005), 1), small});
    scenarios.push_back(
        {"linear plus averse",
         model::PopulationSpec(
             {model::PopulationGroup{"linear", promising, 0.5},
              model::PopulationGroup{"averse", averse, 0.5, model::OptInRule::utility}}),
         model::ApprovalProtocol(Probability(6.3e-4), 1), small});
    scenarios.push_back(
        {"half-half three-trial",
         model::PopulationSpec({model::PopulationGroup{"half", half_half, 1.0}}),
         model::ApprovalProtocol(Probability(0.1), 3), small});
    scenarios.push_back(
        {"two priors tau=0.03",
         model::PopulationSpec({model::PopulationGroup{"promising", promising, 0.3},
                                model::PopulationGroup{"half", half_half, 0.7}}),
         model::ApprovalProtocol(Probability(0.03), 1), small});

    check.require(scenarios.size() == 10, "expected 10 scenarios");

    const std::int64_t n = 1000000;
    for (std::size_t index = 0; index < scenarios.size(); ++index) {
        const auto& scenario = scenarios[index];
        const auto exact = bayes::population_fdr_exact(scenario.population, kModel,
                                                       scenario.protocol, scenario.econ);
        const auto report = sim::simulate(scenario.population, kModel, scenario.protocol,
                                          scenario.econ, n, 600 + index);

        // expected profit and its CLT standard error from the exact engine
        double p_approve = 0.0;
        double p_denied = 0.0;
        for (std::size_t g = 0; g < scenario.population.groups().size(); ++g) {
            const auto& group = scenario.population.groups()[g];
            if (!exact.group_opted_in[g]) continue;
            const double mean_beta = group_mean_approval(group, scenario.protocol);
            p_approve += group.fraction * mean_beta;
            p_denied += group.fraction * (1.0 - mean_beta);
        }
        const double reward = scenario.econ.reward();
        const double cost = scenario.econ.cost();
        const double mean_profit =
            p_approve * (reward - cost) + p_denied * (-cost);
        const double second_moment = p_approve * (reward - cost) * (reward - cost) +
                                     p_denied * cost * cost;
        const double variance = second_moment - mean_profit * mean_profit;
        const double se_profit = std::sqrt(std::max(0.0, variance) * n);

        check.require(std::fabs(report.total_agent_profit - mean_profit * n) <=
                          4.0 * se_profit + 1e-9,
                      scenario.name + ": profit outside 4 sigma");

        if (!exact.defined()) {
            check.require(!report.empirical_fdr.has_value(),
                          scenario.name + ": empirical fdr without approval mass");
        }
        if (exact.defined() && report.empirical_fdr) {
            const double se = report.fdr_std_error.value_or(0.0);
            check.require(std::fabs(*report.empirical_fdr - exact.value) <=
                              4.0 * se + 1e-12,
                          scenario.name + ": fdr outside 4 sigma");
        }
        if (!check.ok) return;
    }
}

// --- criterion 6: Jensen opt-out and participation containment ------------

void criterion6(Check& check) {
    rng::SplitMix64 generator(3003);
    int found = 0;
    int guard = 0;
    while (found < 500 && guard < 100000) {
        ++guard;
        const double theta = 0.2 + 2.8 * generator.next_uniform_open();
        const double weight = generator.next_uniform_open();
        const model::DiscretePrior prior(
            {{{theta, false}, weight}, {{0.0, true}, 1.0 - weight}});
        const double cost_reward = 0.01 + 0.49 * generator.next_uniform_open();
        const model::Economics econ(cost_reward, 1.0);
        const double tau = 1e-4 + 0.8 * generator.next_uniform_open();
        if (tau >= 1.0) continue;
        const model::ApprovalProtocol protocol{Probability(tau), 1};

        if (model::expected_profit(prior, kModel, protocol, econ) >= 0.0) continue;
        ++found;
        const double aversion = 0.1 + 10.0 * generator.next_uniform_open();
        const model::AgentProfile profile{prior, model::UtilitySpec::concave(aversion)};
        check.require(model::expected_utility(profile, kModel, protocol, econ) < 0.0,
                      "negative profit must imply negative utility");
        if (!check.ok) return;
    }
    check.require(found == 500, "could not generate 500 negative-profit instances");

    // risk-averse participation set is contained in the linear one
    const model::Economics econ(1.0, 100.0);
    for (const double aversion : {0.2, 1.0, 5.0}) {
        const model::AgentProfile linear{promising_prior(), model::UtilitySpec::linear()};
        const model::AgentProfile averse{promising_prior(),
                                         model::UtilitySpec::concave(aversion)};
        for (double tau = 1e-4; tau < 0.5; tau *= 1.31) {
            const model::ApprovalProtocol protocol{Probability(tau), 1};
            const bool in_averse =
                model::opts_in(averse, kModel, protocol, econ, model::OptInRule::utility);
            const bool in_linear =
                model::opts_in(linear, kModel, protocol, econ, model::OptInRule::profit);
            check.require(!in_averse || in_linear,
                          "risk-averse participation must be contained in linear");
        }
    }
}

// --- criterion 7: numerics accuracy ---------------------------------------

void criterion7(Check& check) {
    for (const auto& point : oracle::kPhiTable) {
        check.require(std::fabs(numerics::std_normal_cdf(point.x).value() - point.phi) <=
                          1e-9,
                      "cdf off reference at x=" + std::to_string(point.x));
    }
    for (double x = -6.0; x <= 6.0; x += 0.012) {
        const auto p = numerics::std_normal_cdf(x);
        check.require(std::fabs(numerics::std_normal_quantile(p) - x) <= 1e-8,
                      "quantile round trip off at x=" + std::to_string(x));
        if (!check.ok) return;
    }
    for (int i = 0; i < 1000; ++i) {
        const double p = 1e-8 + (1.0 - 2e-8) * (static_cast<double>(i) + 0.5) / 1000.0;
        const double x = numerics::std_normal_quantile(Probability(p));
        check.require(std::fabs(numerics::std_normal_cdf(x).value() - p) <= 1e-8,
                      "cdf(quantile(p)) off at p=" + std::to_string(p));
        if (!check.ok) return;
    }
}

// --- criterion 8: Appendix-B identities ------------------------------------

void criterion8(Check& check) {
    const auto priors = {promising_prior(),
                         model::DiscretePrior({{{1.0, false}, 0.5}, {{0.0, true}, 0.5}}),
                         model::DiscretePrior({{{2.0, false}, 0.3},
                                               {{0.5, false}, 0.2},
                                               {{0.0, true}, 0.5}})};

    for (const auto& prior : priors) {
        for (double tau = 0.002; tau < 0.3; tau *= 1.7) {
            const auto via_region = bayes::fdr_over_region(
                prior, kModel,
                bayes::PValueRegion(Probability(0.0), Probability(tau)));
            const auto via_posterior = bayes::posterior_null_given_approve(
                prior, kModel, model::ApprovalProtocol(Probability(tau), 1));
            check.require(via_region.has_value() && via_posterior.has_value(),
                          "region and posterior quantities must be defined");
            if (!check.ok) return;
            check.require(std::fabs(via_region->value() - via_posterior->value()) <=
                              1e-14,
                          "region fdr must equal the approval posterior");
        }

        const auto mixture_density = [&](double x) {
            double total = 0.0;
            for (const auto& entry : prior.support()) {
                total += entry.weight *
                         bayes::pvalue_density(kModel, entry.point.effect, Probability(x));
            }
            return total;
        };
        const std::pair<double, double> regions[] = {{0.001, 0.3}, {0.05, 0.9}};
        for (const auto& [a, b] : regions) {
            const double numerator = oracle::integrate(
                [&](double x) {
                    return bayes::local_fdr(prior, kModel, Probability(x)).value() *
                           mixture_density(x);
                },
                a, b, 1e-10);
            const double denominator = oracle::integrate(mixture_density, a, b, 1e-10);
            const auto direct = bayes::fdr_over_region(
                prior, kModel, bayes::PValueRegion(Probability(a), Probability(b)));
            check.require(direct.has_value(), "region fdr must be defined");
            if (!check.ok) return;
            check.require(std::fabs(direct->value() - numerator / denominator) <= 1e-6,
                          "region fdr must match the lfdr quadrature");
        }
    }
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_seconds; // 0 = no stated limit
    std::function<void(Check&)> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "FDA table golden rows", 1.0, criterion1},
        {2, "two-type FDR curve structure", 30.0, criterion2},
        {3, "posterior-odds bound property suite", 5.0, criterion3},
        {4, "prior-free ledger property suite", 5.0, criterion4},
        {5, "simulator/exact-engine agreement", 60.0, criterion5},
        {6, "Jensen opt-out and containment", 0.0, criterion6},
        {7, "normal cdf/quantile accuracy", 0.0, criterion7},
        {8, "Bayes FDR identities", 0.0, criterion8},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        Check check;
        const auto start = std::chrono::steady_clock::now();
        criterion.run(check);
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();

        bool time_ok = true;
        if (criterion.time_limit_seconds > 0.0 &&
            elapsed > criterion.time_limit_seconds) {
            time_ok = false;
        }
        if (check.ok && time_ok) {
            std::printf("PASS  criterion %d: %s (%.2fs%s)\n", criterion.id,
                        criterion.name, elapsed,
                        criterion.time_limit_seconds > 0.0
                            ? (", limit " + std::to_string(static_cast<int>(
                                                criterion.time_limit_seconds)) + "s")
                                  .c_str()
                            : "");
        } else {
            ++failures;
            std::printf("FAIL  criterion %d: %s (%.2fs)%s%s\n", criterion.id,
                        criterion.name, elapsed,
                        check.ok ? " [time limit exceeded]" : " — ",
                        check.ok ? "" : check.detail.c_str());
        }
    }
    return failures;
}
