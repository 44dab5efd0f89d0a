#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trialgame/model.hpp"

namespace trialgame::bounds {

using model::ApprovalProtocol;
using model::Economics;
using model::GaussianTestModel;
using model::ParameterPoint;
using numerics::Probability;

// Everything the incentive argument says about one (economics, tau) pair.
// nullopt fields mark the uninformative regime (tau >= C/R): the odds
// bound is vacuous exactly when the FDR bound reaches 100%.
struct BoundReport {
    double tau = 0.0;
    double cost_reward_ratio = 0.0;
    std::optional<double> posterior_odds_lower; // nullopt = vacuous
    std::optional<double> bayes_fdr_upper;      // nullopt = n/a (>= 1)
    double null_expected_profit = 0.0;          // tau*R - C
};

// Lower bound (C/R - tau)/tau on the nonnull:null posterior odds given
// approval, valid whenever the agent opted in. nullopt when <= 0.
std::optional<double> posterior_odds_bound(const Economics& econ, Probability tau);

// Upper bound tau*R/C on the posterior null probability given approval;
// nullopt when the bound is >= 1 (no information).
std::optional<Probability> bayes_fdr_bound(const Economics& econ, Probability tau);

// The threshold achieving a target FDR bound alpha: tau = alpha*C/R.
// Throws when the result would be >= 1 (economics cannot support alpha).
Probability design_tau(double alpha, const Economics& econ);

// Expected profit of an agent certain the null holds: tau*R - C.
double null_expected_profit(const Economics& econ, Probability tau);

BoundReport bound_report(const Economics& econ, Probability tau);

enum class LedgerVerdict { consistent, theorem_violated };

struct LedgerEntry {
    ParameterPoint point;
    double approval_prob = 0.0;  // beta_i through the protocol
    double agent_value = 0.0;    // beta_i - C/R
    double principal_value = 0.0; // 1{nonnull} beta_i - bound * 1{null} beta_i
};

// Aggregate accounting over a fixed list of participating agents:
// if they are not losing money in total, true positives must outnumber
// false positives by at least the bound.
struct LedgerReport {
    double agent_total = 0.0; // sum_i (R*beta_i - C), currency
    double tp_mass = 0.0;     // sum of nonnull approval probabilities
    double fp_mass = 0.0;     // sum of null approval probabilities
    double ratio = 0.0;       // tp_mass / fp_mass; +inf when fp_mass == 0
    double bound = 0.0;       // (C/R - tau)/tau at the protocol's effective tau
    LedgerVerdict verdict = LedgerVerdict::consistent;
    std::vector<LedgerEntry> entries;
};

// Requires a nonempty agent list and effective tau < C/R.
LedgerReport theorem2_ledger(std::span<const ParameterPoint> thetas,
                             const GaussianTestModel& model,
                             const ApprovalProtocol& protocol,
                             const Economics& econ);

} // namespace trialgame::bounds
