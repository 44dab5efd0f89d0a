#include "trialgame/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace trialgame::bounds {

std::optional<double> posterior_odds_bound(const Economics& econ, Probability tau) {
    const double t = tau.value();
    if (t <= 0.0) {
        throw std::domain_error("posterior_odds_bound: tau must be > 0 (no approvals at 0)");
    }
    const double value = (econ.cost_reward_ratio() - t) / t;
    if (value <= 0.0) return std::nullopt; // vacuous
    return value;
}

std::optional<Probability> bayes_fdr_bound(const Economics& econ, Probability tau) {
    const double t = tau.value();
    if (t <= 0.0) {
        throw std::domain_error("bayes_fdr_bound: tau must be > 0");
    }
    const double value = t * econ.reward() / econ.cost();
    if (value >= 1.0) return std::nullopt; // cannot be bounded below 100%
    return Probability(value);
}

Probability design_tau(double alpha, const Economics& econ) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::domain_error("design_tau: alpha must lie strictly in (0,1)");
    }
    const double tau = alpha * econ.cost_reward_ratio();
    if (tau >= 1.0) {
        throw std::domain_error("design_tau: economics cannot support this level");
    }
    return Probability(tau);
}

double null_expected_profit(const Economics& econ, Probability tau) {
    return tau.value() * econ.reward() - econ.cost();
}

BoundReport bound_report(const Economics& econ, Probability tau) {
    BoundReport report;
    report.tau = tau.value();
    report.cost_reward_ratio = econ.cost_reward_ratio();
    report.posterior_odds_lower = posterior_odds_bound(econ, tau);
    if (auto fdr = bayes_fdr_bound(econ, tau)) report.bayes_fdr_upper = fdr->value();
    report.null_expected_profit = null_expected_profit(econ, tau);
    return report;
}

LedgerReport theorem2_ledger(std::span<const ParameterPoint> thetas,
                             const GaussianTestModel& model,
                             const ApprovalProtocol& protocol,
                             const Economics& econ) {
    if (thetas.empty()) {
        throw std::invalid_argument("theorem2_ledger: agent list must be nonempty");
    }
    const double tau = protocol.effective_tau().value();
    const double ratio_cr = econ.cost_reward_ratio();
    if (!(tau < ratio_cr)) {
        throw std::domain_error("theorem2_ledger: requires effective tau < C/R");
    }

    LedgerReport report;
    report.bound = (ratio_cr - tau) / tau;
    report.entries.reserve(thetas.size());

    for (const auto& point : thetas) {
        const double beta = model::protocol_power(model, point.effect, protocol).value();
        LedgerEntry entry;
        entry.point = point;
        entry.approval_prob = beta;
        entry.agent_value = beta - ratio_cr;
        entry.principal_value = point.is_null ? -report.bound * beta : beta;
        report.agent_total += econ.reward() * beta - econ.cost();
        (point.is_null ? report.fp_mass : report.tp_mass) += beta;
        report.entries.push_back(entry);
    }

    report.ratio = report.fp_mass > 0.0
                       ? report.tp_mass / report.fp_mass
                       : std::numeric_limits<double>::infinity();

    const bool weak_ok = report.agent_total < 0.0 || report.ratio >= report.bound;
    const bool strict_ok = !(report.agent_total > 0.0) || report.ratio > report.bound;
    report.verdict = (weak_ok && strict_ok) ? LedgerVerdict::consistent
                                            : LedgerVerdict::theorem_violated;
    return report;
}

} // namespace trialgame::bounds
