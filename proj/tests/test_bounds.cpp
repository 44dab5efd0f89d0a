#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "trialgame/bayes.hpp"
#include "trialgame/bounds.hpp"
#include "trialgame/rng.hpp"

using namespace trialgame;
using namespace trialgame::bounds;
using numerics::Probability;

namespace {

const GaussianTestModel kModel;

} // namespace

TEST_CASE("posterior_odds_bound: informative, boundary, FDA regime") {
    const Economics small(1.0, 100.0);
    const auto informative = posterior_odds_bound(small, Probability(0.005));
    REQUIRE(informative.has_value());
    CHECK(*informative == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_FALSE(posterior_odds_bound(small, Probability(0.01)).has_value());
    CHECK_FALSE(posterior_odds_bound(small, Probability(0.3)).has_value());
    CHECK_THROWS_AS(posterior_odds_bound(small, Probability(0.0)), std::domain_error);

    const Economics fda(50e6, 1e9);
    const auto odds = posterior_odds_bound(fda, Probability(0.000625));
    REQUIRE(odds.has_value());
    CHECK(*odds == doctest::Approx(79.0).epsilon(1e-12));
    // consistent with the 1.25% FDR bound: 1/(1+79) = 0.0125
    CHECK(1.0 / (1.0 + *odds) == doctest::Approx(0.0125).epsilon(1e-12));
}

TEST_CASE("bayes_fdr_bound: Table-style values and the n/a regime") {
    const Economics fda(50e6, 1e9);
    const auto standard = bayes_fdr_bound(fda, Probability(0.000625));
    REQUIRE(standard.has_value());
    CHECK(standard->value() == doctest::Approx(0.0125).epsilon(1e-12));

    const Economics rich(50e6, 1e10);
    CHECK_FALSE(bayes_fdr_bound(rich, Probability(0.005)).has_value()); // bound = 1.0

    // design rule inverts exactly
    for (double alpha = 0.05; alpha < 1.0; alpha += 0.05) {
        const auto tau = design_tau(alpha, fda);
        const auto bound = bayes_fdr_bound(fda, tau);
        REQUIRE(bound.has_value());
        CHECK(std::fabs(bound->value() - alpha) <= 1e-14);
    }
}

TEST_CASE("design_tau: guideline value and infeasible economics") {
    const Economics fda(50e6, 1e9);
    CHECK(design_tau(0.25, fda).value() == doctest::Approx(0.0125).epsilon(1e-14));
    CHECK(design_tau(0.25, Economics(1.0, 100.0)).value() ==
          doctest::Approx(0.0025).epsilon(1e-14));
    CHECK_THROWS_AS(design_tau(0.5, Economics(10.0, 1.0)), std::domain_error);
    CHECK_THROWS_AS(design_tau(0.0, fda), std::domain_error);
    CHECK_THROWS_AS(design_tau(1.0, fda), std::domain_error);
}

TEST_CASE("null_expected_profit matches the FDA rows") {
    const ApprovalProtocol standard(Probability(0.025), 2);
    CHECK(null_expected_profit(Economics(50e6, 1e11), standard.effective_tau()) ==
          doctest::Approx(12.5e6).epsilon(1e-9));
    CHECK(null_expected_profit(Economics(50e6, 1e10), Probability(0.005)) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK(null_expected_profit(Economics(50e6, 1e9), Probability(0.0)) ==
          doctest::Approx(-50e6).epsilon(1e-12));
}

TEST_CASE("bound_report flags co-occur exactly at tau = C/R") {
    const Economics econ(1.0, 100.0);
    for (double tau = 0.001; tau < 0.05; tau += 0.0005) {
        const auto report = bound_report(econ, Probability(tau));
        CHECK(report.posterior_odds_lower.has_value() ==
              report.bayes_fdr_upper.has_value());
        if (report.bayes_fdr_upper) {
            CHECK(*report.bayes_fdr_upper < 1.0);
            CHECK(*report.posterior_odds_lower > 0.0);
        }
    }
}

TEST_CASE("theorem2_ledger rejects a violated hypothesis and empty lists") {
    const Economics econ(1.0, 100.0);
    CHECK_THROWS_AS(
        theorem2_ledger(std::vector<ParameterPoint>{{1.0, false}}, kModel,
                        ApprovalProtocol(Probability(0.01), 1), econ),
        std::domain_error);
    CHECK_THROWS_AS(theorem2_ledger(std::vector<ParameterPoint>{}, kModel,
                                    ApprovalProtocol(Probability(0.005), 1), econ),
                    std::invalid_argument);
}

TEST_CASE("theorem2_ledger: all-null lists lose money and stay consistent") {
    const Economics econ(1.0, 100.0);
    const ApprovalProtocol protocol(Probability(0.005), 1);
    const std::vector<ParameterPoint> nulls(7, ParameterPoint{0.0, true});
    const auto report = theorem2_ledger(nulls, kModel, protocol, econ);
    CHECK(report.agent_total < 0.0);
    CHECK(report.tp_mass == 0.0);
    CHECK(report.fp_mass == doctest::Approx(7 * 0.005).epsilon(1e-12));
    CHECK(report.verdict == LedgerVerdict::consistent);
}

TEST_CASE("theorem2_ledger: break-even nonnull boundary has infinite ratio") {
    const Economics econ(1.0, 100.0);
    const ApprovalProtocol protocol(Probability(0.002), 1);
    // theta placed so that beta(theta) == C/R
    const double theta = numerics::std_normal_quantile(Probability(0.01)) -
                         numerics::std_normal_quantile(Probability(0.002));
    const std::vector<ParameterPoint> agents(5, ParameterPoint{theta, false});
    const auto report = theorem2_ledger(agents, kModel, protocol, econ);
    CHECK(std::fabs(report.agent_total) <= 1e-6);
    CHECK(report.fp_mass == 0.0);
    CHECK(std::isinf(report.ratio));
    CHECK(report.verdict == LedgerVerdict::consistent);
}

TEST_CASE("theorem2_ledger: two-type population at tau = 0.005") {
    const Economics econ(1.0, 100.0);
    const ApprovalProtocol protocol(Probability(0.005), 1);
    std::vector<ParameterPoint> agents;
    for (int i = 0; i < 8; ++i) agents.push_back({1.0, false});
    for (int i = 0; i < 2; ++i) agents.push_back({0.0, true});

    const auto report = theorem2_ledger(agents, kModel, protocol, econ);
    CHECK(report.bound == doctest::Approx(1.0).epsilon(1e-12));
    const double expected_ratio =
        0.8 * oracle::kBeta1_t0p005 / (0.2 * 0.005);
    CHECK(report.ratio == doctest::Approx(expected_ratio).epsilon(1e-10));
    CHECK(report.agent_total > 0.0);
    CHECK(report.ratio > report.bound);
    CHECK(report.verdict == LedgerVerdict::consistent);
    for (const auto& entry : report.entries) {
        CHECK(entry.principal_value >= entry.agent_value - 1e-12);
    }
}

TEST_CASE("theorem 2 randomized suite: implication, strictness, per-agent domination") {
    rng::SplitMix64 generator(4242);
    int nonvacuous = 0;
    for (int instance = 0; instance < 1000; ++instance) {
        const double cost_reward = 0.001 + 0.499 * generator.next_uniform_open();
        const Economics econ(cost_reward, 1.0);
        const double tau = cost_reward * generator.next_uniform_open();
        if (tau <= 1e-12) continue;
        const int k = generator.next_u64() % 4 == 0 ? 2 : 1;
        const double per_trial = k == 2 ? std::sqrt(tau) : tau;
        const ApprovalProtocol protocol(Probability(per_trial), k);

        const auto n_agents = 1 + generator.next_u64() % 50;
        std::vector<ParameterPoint> agents;
        for (std::uint64_t i = 0; i < n_agents; ++i) {
            if (generator.next_uniform_open() < 0.5) {
                agents.push_back({0.0, true});
            } else {
                agents.push_back({3.0 * generator.next_uniform_open(), false});
            }
        }

        const auto report = theorem2_ledger(agents, kModel, protocol, econ);
        CHECK(report.verdict == LedgerVerdict::consistent);
        if (report.agent_total >= 0.0) {
            ++nonvacuous;
            CHECK(report.ratio >= report.bound);
            if (report.agent_total > 0.0) CHECK(report.ratio > report.bound);
        }
        for (const auto& entry : report.entries) {
            CHECK(entry.principal_value >= entry.agent_value - 1e-12);
        }
    }
    // the implication must be exercised, not vacuously true
    CHECK(nonvacuous > 100);
}

TEST_CASE("theorem 1 randomized suite: exact odds dominate the bound") {
    rng::SplitMix64 generator(7171);
    for (int instance = 0; instance < 1000; ++instance) {
        const double theta = 0.2 + 2.8 * generator.next_uniform_open();
        const double nonnull_weight = generator.next_uniform_open();
        const model::DiscretePrior prior(
            {{{theta, false}, nonnull_weight}, {{0.0, true}, 1.0 - nonnull_weight}});
        const double cost_reward = 0.001 + 0.499 * generator.next_uniform_open();
        const Economics econ(cost_reward, 1.0);

        const auto root = model::opt_in_threshold(prior, kModel, econ);
        REQUIRE(root.has_value());
        const double tau = root->value() +
                           generator.next_uniform_open() * (cost_reward - root->value());
        if (!(tau > 0.0 && tau < cost_reward)) continue;
        const ApprovalProtocol protocol{Probability(tau), 1};
        const model::AgentProfile profile{prior, model::UtilitySpec::linear()};
        REQUIRE(model::opts_in(profile, kModel, protocol, econ));

        const auto bound = posterior_odds_bound(econ, Probability(tau));
        REQUIRE(bound.has_value()); // tau < C/R keeps the bound informative
        const auto odds = bayes::posterior_odds_nonnull(prior, kModel, protocol);
        REQUIRE(odds.has_value());
        CHECK(*odds >= *bound - 1e-12);
    }
}

TEST_CASE("marginal fdr is the ledger ratio folded into a probability") {
    rng::SplitMix64 generator(31337);
    for (int instance = 0; instance < 200; ++instance) {
        const double cost_reward = 0.01 + 0.4 * generator.next_uniform_open();
        const Economics econ(cost_reward, 1.0);
        const double tau = 0.5 * cost_reward * (0.1 + 0.9 * generator.next_uniform_open());
        const ApprovalProtocol protocol(Probability(tau), 1);
        std::vector<ParameterPoint> agents{{0.0, true}};
        const auto extra = generator.next_u64() % 20;
        for (std::uint64_t i = 0; i < extra; ++i) {
            agents.push_back({0.2 + 2.8 * generator.next_uniform_open(), false});
        }
        const auto ledger = theorem2_ledger(agents, kModel, protocol, econ);
        const auto fdr = bayes::marginal_fdr(agents, kModel, protocol);
        REQUIRE(fdr.has_value());
        CHECK(fdr->value() ==
              doctest::Approx(1.0 / (1.0 + ledger.ratio)).epsilon(1e-12));
    }
}
