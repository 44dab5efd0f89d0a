#include "trialgame/bayes.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trialgame::bayes {

PValueRegion::PValueRegion(Probability lo, Probability hi) : lo_(lo), hi_(hi) {
    if (!(lo.value() < hi.value())) {
        throw std::invalid_argument("PValueRegion: requires lo < hi");
    }
}

double pvalue_density(const GaussianTestModel&, double theta, Probability x) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("pvalue_density: theta must be finite");
    }
    const double p = x.value();
    if (p <= 0.0 || p >= 1.0) {
        throw std::domain_error("pvalue_density: x must lie strictly in (0,1)");
    }
    if (theta == 0.0) return 1.0;
    // Likelihood ratio of the shift model against the uniform null:
    // phi(z + theta) / phi(z) at z = Phi^-1(x).
    const double z = numerics::std_normal_quantile(x);
    return std::exp(-theta * z - 0.5 * theta * theta);
}

namespace {

struct Masses {
    double null_part = 0.0;
    double total = 0.0;
};

Masses approval_masses(const DiscretePrior& prior, const GaussianTestModel& model,
                       const ApprovalProtocol& protocol) {
    Masses masses;
    for (const auto& entry : prior.support()) {
        const double beta =
            model::protocol_power(model, entry.point.effect, protocol).value();
        masses.total += entry.weight * beta;
        if (entry.point.is_null) masses.null_part += entry.weight * beta;
    }
    return masses;
}

// Approval masses under the group's true-theta generator (its prior in
// correct-prior mode, the uniform fixed list otherwise).
Masses generator_masses(const model::PopulationGroup& group, const GaussianTestModel& model,
                        const ApprovalProtocol& protocol) {
    if (group.theta_mode == model::ThetaMode::from_prior) {
        return approval_masses(group.profile.prior, model, protocol);
    }
    model::check_points_binding(model, group.fixed_thetas);
    Masses masses;
    const double weight = 1.0 / static_cast<double>(group.fixed_thetas.size());
    for (const auto& point : group.fixed_thetas) {
        const double beta = model::protocol_power(model, point.effect, protocol).value();
        masses.total += weight * beta;
        if (point.is_null) masses.null_part += weight * beta;
    }
    return masses;
}

} // namespace

std::optional<Probability> posterior_null_given_approve(const DiscretePrior& prior,
                                                        const GaussianTestModel& model,
                                                        const ApprovalProtocol& protocol) {
    model::check_prior_binding(model, prior);
    const Masses masses = approval_masses(prior, model, protocol);
    if (masses.total <= 0.0) return std::nullopt;
    return Probability(std::min(masses.null_part / masses.total, 1.0));
}

std::optional<double> posterior_odds_nonnull(const DiscretePrior& prior,
                                             const GaussianTestModel& model,
                                             const ApprovalProtocol& protocol) {
    model::check_prior_binding(model, prior);
    const Masses masses = approval_masses(prior, model, protocol);
    if (masses.total <= 0.0) return std::nullopt;
    const double nonnull = masses.total - masses.null_part;
    if (masses.null_part <= 0.0) return std::numeric_limits<double>::infinity();
    return nonnull / masses.null_part;
}

std::optional<Probability> fdr_over_region(const DiscretePrior& prior,
                                           const GaussianTestModel& model,
                                           const PValueRegion& region) {
    model::check_prior_binding(model, prior);
    double null_part = 0.0;
    double total = 0.0;
    for (const auto& entry : prior.support()) {
        const double mass =
            model::power(model, entry.point.effect, region.hi()).value() -
            model::power(model, entry.point.effect, region.lo()).value();
        total += entry.weight * mass;
        if (entry.point.is_null) null_part += entry.weight * mass;
    }
    if (total <= 0.0) return std::nullopt;
    return Probability(std::min(std::max(null_part / total, 0.0), 1.0));
}

Probability local_fdr(const DiscretePrior& prior, const GaussianTestModel& model,
                      Probability x) {
    model::check_prior_binding(model, prior);
    double null_part = 0.0;
    double total = 0.0;
    for (const auto& entry : prior.support()) {
        const double density = pvalue_density(model, entry.point.effect, x);
        total += entry.weight * density;
        if (entry.point.is_null) null_part += entry.weight * density;
    }
    return Probability(std::min(null_part / total, 1.0));
}

PopulationFdr population_fdr_exact(const PopulationSpec& population,
                                   const GaussianTestModel& model,
                                   const ApprovalProtocol& protocol,
                                   const Economics& econ) {
    PopulationFdr result;
    result.group_opted_in.reserve(population.groups().size());

    double null_mass = 0.0;
    double total_mass = 0.0;
    bool any_in = false;
    for (const auto& group : population.groups()) {
        const bool in = model::opts_in(group.profile, model, protocol, econ,
                                       group.opt_in_rule);
        result.group_opted_in.push_back(in);
        if (!in) continue;
        any_in = true;
        const Masses masses = generator_masses(group, model, protocol);
        null_mass += group.fraction * masses.null_part;
        total_mass += group.fraction * masses.total;
    }

    if (!any_in) {
        result.status = PopulationFdr::Status::no_participation;
        return result;
    }
    if (total_mass <= 0.0) {
        result.status = PopulationFdr::Status::no_approval_mass;
        return result;
    }
    result.status = PopulationFdr::Status::defined;
    result.value = std::min(null_mass / total_mass, 1.0);
    return result;
}

std::optional<Probability> marginal_fdr(std::span<const ParameterPoint> thetas,
                                        const GaussianTestModel& model,
                                        const ApprovalProtocol& protocol) {
    if (thetas.empty()) {
        throw std::invalid_argument("marginal_fdr: agent list must be nonempty");
    }
    model::check_points_binding(model, thetas);
    double null_part = 0.0;
    double total = 0.0;
    for (const auto& point : thetas) {
        const double beta = model::protocol_power(model, point.effect, protocol).value();
        total += beta;
        if (point.is_null) null_part += beta;
    }
    if (total <= 0.0) return std::nullopt;
    return Probability(std::min(null_part / total, 1.0));
}

} // namespace trialgame::bayes
