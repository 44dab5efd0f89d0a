#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trialgame/bounds.hpp"
#include "trialgame/model.hpp"

namespace trialgame::sim {

using model::ApprovalProtocol;
using model::Economics;
using model::GaussianTestModel;
using model::ParameterPoint;
using model::PopulationSpec;

struct SimulationReport {
    std::int64_t n_agents = 0;
    std::int64_t n_opted_in = 0;
    std::int64_t n_approved = 0;
    std::int64_t n_false_approved = 0;
    std::int64_t n_true_approved = 0;
    double total_agent_profit = 0.0; // n_approved*R - n_opted_in*C, exactly
    std::optional<double> empirical_fdr;
    std::optional<double> fdr_std_error; // binomial, sqrt(f(1-f)/n_approved)
    std::uint64_t seed = 0;
};

// Raw counts for an index range of agents. Tallies over disjoint ranges
// merge by plain addition, which is what makes scheduling irrelevant:
// agent i's randomness depends only on (seed, i).
struct Tally {
    std::int64_t n_agents = 0;
    std::int64_t n_opted_in = 0;
    std::int64_t n_approved = 0;
    std::int64_t n_false_approved = 0;
    std::int64_t n_true_approved = 0;

    Tally& operator+=(const Tally& other) noexcept {
        n_agents += other.n_agents;
        n_opted_in += other.n_opted_in;
        n_approved += other.n_approved;
        n_false_approved += other.n_false_approved;
        n_true_approved += other.n_true_approved;
        return *this;
    }
};

Tally simulate_range(const PopulationSpec& population, const GaussianTestModel& model,
                     const ApprovalProtocol& protocol, const Economics& econ,
                     std::int64_t first_agent, std::int64_t last_agent, std::uint64_t seed);

SimulationReport report_from_tally(const Tally& tally, const Economics& econ,
                                   std::uint64_t seed);

// One full play of the trial game for n_agents strategic agents:
// group membership by fraction, participation decided from the group's
// profile (never the realized theta), then per-trial p-value draws.
SimulationReport simulate(const PopulationSpec& population, const GaussianTestModel& model,
                          const ApprovalProtocol& protocol, const Economics& econ,
                          std::int64_t n_agents, std::uint64_t seed);

struct SweepRow {
    double tau = 0.0;
    std::optional<double> exact_fdr;
    std::optional<double> empirical_fdr;
    std::optional<double> empirical_se; // binomial error of empirical_fdr
    double bound = 0.0;                 // min(1, tau*R/C)
    std::vector<bool> group_opted_in;
};

// One row per grid threshold (single-trial protocol at that tau).
// Monte Carlo columns are filled at every mc_stride-th grid index when
// n_agents > 0, with the per-row seed derived from (seed, index).
std::vector<SweepRow> sweep_tau(const PopulationSpec& population,
                                const GaussianTestModel& model, const Economics& econ,
                                std::span<const double> tau_grid, std::int64_t n_agents,
                                std::uint64_t seed, std::int64_t mc_stride = 1);

// Replicated simulation of a fixed, already-participating agent list,
// against the ledger's expected values.
struct Theorem2Empirical {
    std::int64_t n_replicates = 0;
    double mean_profit = 0.0;
    double se_profit = 0.0;
    double mean_true_positives = 0.0;
    double se_true_positives = 0.0;
    double mean_false_positives = 0.0;
    double se_false_positives = 0.0;
    bounds::LedgerReport ledger;
};

Theorem2Empirical theorem2_empirical(std::span<const ParameterPoint> thetas,
                                     const GaussianTestModel& model,
                                     const ApprovalProtocol& protocol, const Economics& econ,
                                     std::int64_t n_replicates, std::uint64_t seed);

} // namespace trialgame::sim
