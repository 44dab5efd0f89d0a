#include "trialgame/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace trialgame::model {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw std::invalid_argument(message);
}

} // namespace

DiscretePrior::DiscretePrior(std::vector<Entry> support) : support_(std::move(support)) {
    require(!support_.empty(), "DiscretePrior: support must be nonempty");
    double total = 0.0;
    for (const auto& entry : support_) {
        require(std::isfinite(entry.point.effect), "DiscretePrior: effect must be finite");
        require(std::isfinite(entry.weight) && entry.weight >= 0.0,
                "DiscretePrior: weights must be finite and >= 0");
        total += entry.weight;
        if (entry.point.is_null) null_mass_ += entry.weight;
    }
    require(std::fabs(total - 1.0) <= 1e-12, "DiscretePrior: weights must sum to 1");
    for (std::size_t i = 0; i < support_.size(); ++i) {
        for (std::size_t j = i + 1; j < support_.size(); ++j) {
            require(!(support_[i].point == support_[j].point),
                    "DiscretePrior: support points must be distinct");
        }
    }
    null_mass_ = std::min(null_mass_, 1.0);
}

DiscretePrior DiscretePrior::point_mass(ParameterPoint point) {
    return DiscretePrior({Entry{point, 1.0}});
}

Economics::Economics(double cost, double reward) : cost_(cost), reward_(reward) {
    require(std::isfinite(cost) && cost > 0.0, "Economics: cost must be finite and > 0");
    require(std::isfinite(reward) && reward > 0.0, "Economics: reward must be finite and > 0");
}

ApprovalProtocol::ApprovalProtocol(Probability per_trial_threshold, int num_trials)
    : per_trial_threshold_(per_trial_threshold),
      num_trials_(num_trials),
      effective_tau_(Probability(std::pow(per_trial_threshold.value(), num_trials))) {
    require(num_trials >= 1, "ApprovalProtocol: num_trials must be >= 1");
    const double tau = effective_tau_.value();
    require(tau > 0.0 && tau < 1.0, "ApprovalProtocol: effective tau must lie in (0,1)");
}

UtilitySpec UtilitySpec::concave(double risk_aversion) {
    if (!(std::isfinite(risk_aversion) && risk_aversion >= 0.0)) {
        throw std::invalid_argument("UtilitySpec: risk_aversion must be finite and >= 0");
    }
    return UtilitySpec(risk_aversion);
}

double UtilitySpec::operator()(double profit) const noexcept {
    if (risk_aversion_ == 0.0) return profit;
    // -expm1 keeps precision for small a*x, where u(x) ~ x.
    return -std::expm1(-risk_aversion_ * profit) / risk_aversion_;
}

PopulationSpec::PopulationSpec(std::vector<PopulationGroup> groups) : groups_(std::move(groups)) {
    require(!groups_.empty(), "PopulationSpec: groups must be nonempty");
    double total = 0.0;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        auto& group = groups_[i];
        require(std::isfinite(group.fraction) && group.fraction >= 0.0,
                "PopulationSpec: fractions must be finite and >= 0");
        total += group.fraction;
        if (group.theta_mode == ThetaMode::fixed_list) {
            require(!group.fixed_thetas.empty(),
                    "PopulationSpec: fixed_list groups need a nonempty theta list");
            for (const auto& point : group.fixed_thetas) {
                require(std::isfinite(point.effect),
                        "PopulationSpec: fixed thetas must be finite");
            }
        }
        if (group.name.empty()) group.name = "group" + std::to_string(i);
    }
    require(std::fabs(total - 1.0) <= 1e-12, "PopulationSpec: fractions must sum to 1");
}

namespace {

void check_point(const ParameterPoint& point) {
    require(point.effect >= 0.0, "Gaussian model binding: effects must be >= 0");
    require((point.effect == 0.0) == point.is_null,
            "Gaussian model binding: effect 0 must be null, effect > 0 nonnull");
}

} // namespace

void check_prior_binding(const GaussianTestModel&, const DiscretePrior& prior) {
    for (const auto& entry : prior.support()) check_point(entry.point);
}

void check_points_binding(const GaussianTestModel&,
                          std::span<const ParameterPoint> points) {
    for (const auto& point : points) check_point(point);
}

Probability power(const GaussianTestModel&, double theta, Probability t) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("power: theta must be finite");
    }
    const double level = t.value();
    // Null p-values are exactly uniform, and the boundary thresholds
    // accept nothing / everything regardless of theta.
    if (theta == 0.0 || level == 0.0 || level == 1.0) return t;
    return numerics::std_normal_cdf(theta + numerics::std_normal_quantile(t));
}

Probability protocol_power(const GaussianTestModel& model, double theta,
                           const ApprovalProtocol& protocol) {
    const double single = power(model, theta, protocol.per_trial_threshold()).value();
    if (protocol.num_trials() == 1) return Probability(single);
    return Probability(std::pow(single, protocol.num_trials()));
}

Probability sample_pvalue(const GaussianTestModel&, double theta,
                          rng::SplitMix64& generator) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("sample_pvalue: theta must be finite");
    }
    const double z = theta + numerics::std_normal_quantile(
                                 Probability(generator.next_uniform_open()));
    // 1 - Phi(z) evaluated as Phi(-z) to avoid cancellation in the tail.
    return numerics::std_normal_cdf(-z);
}

Probability expected_power(const DiscretePrior& prior, const GaussianTestModel& model,
                           Probability t) {
    check_prior_binding(model, prior);
    double total = 0.0;
    for (const auto& entry : prior.support()) {
        total += entry.weight * power(model, entry.point.effect, t).value();
    }
    return Probability(std::min(total, 1.0));
}

Probability expected_protocol_power(const DiscretePrior& prior, const GaussianTestModel& model,
                                    const ApprovalProtocol& protocol) {
    check_prior_binding(model, prior);
    double total = 0.0;
    for (const auto& entry : prior.support()) {
        total += entry.weight * protocol_power(model, entry.point.effect, protocol).value();
    }
    return Probability(std::min(total, 1.0));
}

double expected_profit(const DiscretePrior& prior, const GaussianTestModel& model,
                       const ApprovalProtocol& protocol, const Economics& econ) {
    return econ.reward() * expected_protocol_power(prior, model, protocol).value() - econ.cost();
}

double expected_utility(const AgentProfile& profile, const GaussianTestModel& model,
                        const ApprovalProtocol& protocol, const Economics& econ) {
    const double approve = expected_protocol_power(profile.prior, model, protocol).value();
    const auto& u = profile.utility;
    return approve * u(econ.reward() - econ.cost()) + (1.0 - approve) * u(-econ.cost());
}

bool opts_in(const AgentProfile& profile, const GaussianTestModel& model,
             const ApprovalProtocol& protocol, const Economics& econ, OptInRule rule) {
    switch (rule) {
    case OptInRule::utility:
        return expected_utility(profile, model, protocol, econ) >= 0.0;
    case OptInRule::profit:
    default:
        return expected_profit(profile.prior, model, protocol, econ) >= 0.0;
    }
}

std::optional<Probability> opt_in_threshold(const DiscretePrior& prior,
                                            const GaussianTestModel& model,
                                            const Economics& econ) {
    check_prior_binding(model, prior);
    const auto profit_at = [&](double tau) {
        return econ.reward() * expected_power(prior, model, Probability(tau)).value() -
               econ.cost();
    };
    if (profit_at(1.0) < 0.0) return std::nullopt; // never profitable
    return Probability(numerics::find_root_increasing(profit_at, 0.0, 1.0, 1e-9));
}

} // namespace trialgame::model
