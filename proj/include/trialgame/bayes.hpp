#pragma once

#include <optional>
#include <span>
#include <vector>

#include "trialgame/model.hpp"

namespace trialgame::bayes {

using model::ApprovalProtocol;
using model::DiscretePrior;
using model::Economics;
using model::GaussianTestModel;
using model::ParameterPoint;
using model::PopulationSpec;
using numerics::Probability;

// A p-value interval [lo, hi], 0 <= lo < hi <= 1.
class PValueRegion {
public:
    PValueRegion(Probability lo, Probability hi);

    Probability lo() const noexcept { return lo_; }
    Probability hi() const noexcept { return hi_; }

private:
    Probability lo_;
    Probability hi_;
};

// Density of the p-value X = 1 - Phi(Z), Z ~ N(theta,1), at x in (0,1):
// f_theta(x) = exp(-theta * Phi^-1(x) - theta^2 / 2); identically 1 at
// theta = 0. Endpoints are rejected (the density diverges for theta != 0).
double pvalue_density(const GaussianTestModel& model, double theta, Probability x);

// P(null | approve) = (sum over null support of w*beta) / (total w*beta),
// with beta the protocol approval probability. nullopt when the approval
// mass is zero (no conditioning event).
std::optional<Probability> posterior_null_given_approve(const DiscretePrior& prior,
                                                        const GaussianTestModel& model,
                                                        const ApprovalProtocol& protocol);

// Posterior odds of nonnull given approval; +inf when the null approval
// mass is zero, nullopt when total approval mass is zero.
std::optional<double> posterior_odds_nonnull(const DiscretePrior& prior,
                                             const GaussianTestModel& model,
                                             const ApprovalProtocol& protocol);

// P(null | X in region) for a single-trial p-value, via the identity
// P_theta(X <= x) = beta_theta(x). nullopt on zero-mass regions.
std::optional<Probability> fdr_over_region(const DiscretePrior& prior,
                                           const GaussianTestModel& model,
                                           const PValueRegion& region);

// P(null | X = x): null density mass over total density mass at x.
Probability local_fdr(const DiscretePrior& prior, const GaussianTestModel& model,
                      Probability x);

// Exact fraction of false approvals across a strategic population
// (the large-population limit of the simulator's empirical fraction).
// Undefined outcomes are first-class: below every opt-in threshold
// nobody runs a trial and the curve simply has no value.
struct PopulationFdr {
    enum class Status { defined, no_participation, no_approval_mass };

    Status status = Status::no_participation;
    double value = 0.0; // meaningful only when status == defined
    std::vector<bool> group_opted_in;

    bool defined() const noexcept { return status == Status::defined; }
};

PopulationFdr population_fdr_exact(const PopulationSpec& population,
                                   const GaussianTestModel& model,
                                   const ApprovalProtocol& protocol,
                                   const Economics& econ);

// Expected false positives over expected rejections for a fixed agent
// list; nullopt when nothing is ever rejected.
std::optional<Probability> marginal_fdr(std::span<const ParameterPoint> thetas,
                                        const GaussianTestModel& model,
                                        const ApprovalProtocol& protocol);

} // namespace trialgame::bayes
