#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trialgame/numerics.hpp"
#include "trialgame/rng.hpp"

namespace trialgame::model {

using numerics::Probability;

// A point of the parameter space: standardized effect size plus its
// null-set membership. The partition is explicit rather than inferred
// from the sign of the effect.
struct ParameterPoint {
    double effect = 0.0;
    bool is_null = false;

    friend bool operator==(const ParameterPoint&, const ParameterPoint&) = default;
};

// An agent's private belief: a finite distribution over parameter points.
class DiscretePrior {
public:
    struct Entry {
        ParameterPoint point;
        double weight = 0.0;
    };

    // Requires: nonempty support, distinct points, finite nonnegative
    // weights summing to 1 within 1e-12.
    explicit DiscretePrior(std::vector<Entry> support);

    static DiscretePrior point_mass(ParameterPoint point);

    const std::vector<Entry>& support() const noexcept { return support_; }
    double null_mass() const noexcept { return null_mass_; } // pi0
    double nonnull_mass() const noexcept { return 1.0 - null_mass_; }

private:
    std::vector<Entry> support_;
    double null_mass_ = 0.0;
};

// Trial cost C and approval reward R, in consistent currency units.
class Economics {
public:
    Economics(double cost, double reward);

    double cost() const noexcept { return cost_; }
    double reward() const noexcept { return reward_; }
    double cost_reward_ratio() const noexcept { return cost_ / reward_; }

private:
    double cost_;
    double reward_;
};

// Unit-variance Gaussian shift model: test statistic Z ~ N(theta, 1),
// reported as the p-value X = 1 - Phi(Z). Stateless; all behavior is in
// the free functions below.
struct GaussianTestModel {};

// Approval requires num_trials independent trials to each come in at or
// below per_trial_threshold; the effective type-I level is the product.
class ApprovalProtocol {
public:
    ApprovalProtocol(Probability per_trial_threshold, int num_trials);

    Probability per_trial_threshold() const noexcept { return per_trial_threshold_; }
    int num_trials() const noexcept { return num_trials_; }
    Probability effective_tau() const noexcept { return effective_tau_; }

private:
    Probability per_trial_threshold_;
    int num_trials_;
    Probability effective_tau_;
};

// Utility of profit: linear, or the one-parameter concave family
// u(x) = (1 - exp(-a*x)) / a with u(0) = 0 and unit slope at 0.
// risk_aversion == 0 degenerates to the linear case.
class UtilitySpec {
public:
    static UtilitySpec linear() noexcept { return UtilitySpec(0.0); }
    static UtilitySpec concave(double risk_aversion);

    double risk_aversion() const noexcept { return risk_aversion_; }
    bool is_linear() const noexcept { return risk_aversion_ == 0.0; }

    double operator()(double profit) const noexcept;

private:
    explicit UtilitySpec(double risk_aversion) noexcept : risk_aversion_(risk_aversion) {}
    double risk_aversion_ = 0.0;
};

struct AgentProfile {
    DiscretePrior prior;
    UtilitySpec utility = UtilitySpec::linear();
};

// Which expectation gates participation. The profit rule is the default;
// the utility rule can only shrink the participation set (Jensen).
enum class OptInRule { profit, utility };

// How an opted-in agent's true parameter is generated: drawn from the
// agent's own prior (correct-prior mode), or uniformly from a fixed list
// the prior knows nothing about (prior-free mode).
enum class ThetaMode { from_prior, fixed_list };

struct PopulationGroup {
    std::string name;
    AgentProfile profile;
    double fraction = 0.0;
    OptInRule opt_in_rule = OptInRule::profit;
    ThetaMode theta_mode = ThetaMode::from_prior;
    std::vector<ParameterPoint> fixed_thetas; // used when theta_mode == fixed_list
};

class PopulationSpec {
public:
    // Requires: nonempty groups, fractions >= 0 summing to 1 within 1e-12,
    // fixed_list groups carrying a nonempty theta list. Unnamed groups get
    // names "group0", "group1", ...
    explicit PopulationSpec(std::vector<PopulationGroup> groups);

    const std::vector<PopulationGroup>& groups() const noexcept { return groups_; }

private:
    std::vector<PopulationGroup> groups_;
};

// Rejects priors the Gaussian model cannot host: every effect must be
// finite and >= 0, with effect == 0 iff the point is flagged null.
void check_prior_binding(const GaussianTestModel& model, const DiscretePrior& prior);

// Same binding rule for a bare parameter list (fixed-theta generators,
// ledger agent lists).
void check_points_binding(const GaussianTestModel& model,
                          std::span<const ParameterPoint> points);

// Single-trial power beta_theta(t) = P_theta(X <= t). Exactly t when
// theta == 0 or t in {0,1}; otherwise Phi(theta + Phi^-1(t)).
Probability power(const GaussianTestModel& model, double theta, Probability t);

// Probability that all of the protocol's trials pass: power(...)^k.
Probability protocol_power(const GaussianTestModel& model, double theta,
                           const ApprovalProtocol& protocol);

// One p-value draw X = 1 - Phi(Z), Z ~ N(theta,1). Consumes exactly one
// uniform from rng; identical generator state gives identical output.
Probability sample_pvalue(const GaussianTestModel& model, double theta,
                          rng::SplitMix64& generator);

// E_{theta~prior}[beta_theta(t)] for a single trial at threshold t.
Probability expected_power(const DiscretePrior& prior, const GaussianTestModel& model,
                           Probability t);

// Same expectation with the per-theta approval probability composed
// through the protocol.
Probability expected_protocol_power(const DiscretePrior& prior, const GaussianTestModel& model,
                                    const ApprovalProtocol& protocol);

// reward * E[approval] - cost, in currency units.
double expected_profit(const DiscretePrior& prior, const GaussianTestModel& model,
                       const ApprovalProtocol& protocol, const Economics& econ);

// E[u(reward * 1{approve} - cost)] under the profile's utility.
double expected_utility(const AgentProfile& profile, const GaussianTestModel& model,
                        const ApprovalProtocol& protocol, const Economics& econ);

// Participation decision; ties (expectation exactly 0) opt in.
bool opts_in(const AgentProfile& profile, const GaussianTestModel& model,
             const ApprovalProtocol& protocol, const Economics& econ,
             OptInRule rule = OptInRule::profit);

// Smallest single-trial threshold tau (tolerance 1e-9) at which the
// agent's expected profit is nonnegative; nullopt when even tau = 1
// is unprofitable (reward below cost).
std::optional<Probability> opt_in_threshold(const DiscretePrior& prior,
                                            const GaussianTestModel& model,
                                            const Economics& econ);

} // namespace trialgame::model
