#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "trialgame/bayes.hpp"
#include "trialgame/bounds.hpp"
#include "trialgame/model.hpp"
#include "trialgame/numerics.hpp"
#include "trialgame/rng.hpp"
#include "trialgame/sim.hpp"

namespace py = pybind11;

using namespace trialgame;

namespace {

model::DiscretePrior make_prior(const std::vector<std::tuple<double, bool, double>>& support) {
    std::vector<model::DiscretePrior::Entry> entries;
    entries.reserve(support.size());
    for (const auto& [effect, is_null, weight] : support) {
        entries.push_back({model::ParameterPoint{effect, is_null}, weight});
    }
    return model::DiscretePrior(std::move(entries));
}

std::optional<double> unwrap(const std::optional<numerics::Probability>& p) {
    if (!p) return std::nullopt;
    return p->value();
}

} // namespace

PYBIND11_MODULE(_trialgame, m) {
    m.doc() = "Incentive-aware hypothesis testing: posterior/FDR bounds, exact "
              "Bayes quantities, and a seeded principal-agent trial simulator.";

    py::class_<model::ParameterPoint>(m, "ParameterPoint")
        .def(py::init([](double effect, bool is_null) {
                 return model::ParameterPoint{effect, is_null};
             }),
             py::arg("effect"), py::arg("is_null"))
        .def_readonly("effect", &model::ParameterPoint::effect)
        .def_readonly("is_null", &model::ParameterPoint::is_null)
        .def("__repr__", [](const model::ParameterPoint& p) {
            return "ParameterPoint(effect=" + std::to_string(p.effect) +
                   ", is_null=" + (p.is_null ? std::string("True") : std::string("False")) +
                   ")";
        });

    py::class_<model::DiscretePrior>(m, "DiscretePrior")
        .def(py::init(&make_prior), py::arg("support"),
             "support: list of (effect, is_null, weight) tuples")
        .def_property_readonly("null_mass", &model::DiscretePrior::null_mass)
        .def_property_readonly("support", [](const model::DiscretePrior& prior) {
            std::vector<std::tuple<double, bool, double>> out;
            for (const auto& entry : prior.support()) {
                out.emplace_back(entry.point.effect, entry.point.is_null, entry.weight);
            }
            return out;
        })
        .def_static("point_mass", [](double effect, bool is_null) {
            return model::DiscretePrior::point_mass({effect, is_null});
        }, py::arg("effect"), py::arg("is_null"));

    py::class_<model::Economics>(m, "Economics")
        .def(py::init<double, double>(), py::arg("cost"), py::arg("reward"))
        .def_property_readonly("cost", &model::Economics::cost)
        .def_property_readonly("reward", &model::Economics::reward)
        .def_property_readonly("cost_reward_ratio", &model::Economics::cost_reward_ratio);

    py::class_<model::GaussianTestModel>(m, "GaussianTestModel").def(py::init<>());

    py::class_<model::ApprovalProtocol>(m, "ApprovalProtocol")
        .def(py::init([](double per_trial_threshold, int num_trials) {
                 return model::ApprovalProtocol(numerics::Probability(per_trial_threshold),
                                                num_trials);
             }),
             py::arg("per_trial_threshold"), py::arg("num_trials") = 1)
        .def_property_readonly("per_trial_threshold",
                               [](const model::ApprovalProtocol& p) {
                                   return p.per_trial_threshold().value();
                               })
        .def_property_readonly("num_trials", &model::ApprovalProtocol::num_trials)
        .def_property_readonly("effective_tau", [](const model::ApprovalProtocol& p) {
            return p.effective_tau().value();
        });

    py::class_<model::UtilitySpec>(m, "UtilitySpec")
        .def_static("linear", &model::UtilitySpec::linear)
        .def_static("concave", &model::UtilitySpec::concave, py::arg("risk_aversion"))
        .def_property_readonly("risk_aversion", &model::UtilitySpec::risk_aversion)
        .def_property_readonly("is_linear", &model::UtilitySpec::is_linear)
        .def("__call__", &model::UtilitySpec::operator(), py::arg("profit"));

    py::class_<model::AgentProfile>(m, "AgentProfile")
        .def(py::init([](const model::DiscretePrior& prior, const model::UtilitySpec& u) {
                 return model::AgentProfile{prior, u};
             }),
             py::arg("prior"), py::arg("utility") = model::UtilitySpec::linear())
        .def_readonly("prior", &model::AgentProfile::prior)
        .def_readonly("utility", &model::AgentProfile::utility);

    py::enum_<model::OptInRule>(m, "OptInRule")
        .value("profit", model::OptInRule::profit)
        .value("utility", model::OptInRule::utility);

    py::enum_<model::ThetaMode>(m, "ThetaMode")
        .value("from_prior", model::ThetaMode::from_prior)
        .value("fixed_list", model::ThetaMode::fixed_list);

    py::class_<model::PopulationGroup>(m, "PopulationGroup")
        .def(py::init([](std::string name, const model::AgentProfile& profile,
                         double fraction, model::OptInRule rule, model::ThetaMode mode,
                         std::vector<model::ParameterPoint> fixed_thetas) {
                 return model::PopulationGroup{std::move(name), profile, fraction, rule,
                                               mode, std::move(fixed_thetas)};
             }),
             py::arg("name"), py::arg("profile"), py::arg("fraction"),
             py::arg("opt_in_rule") = model::OptInRule::profit,
             py::arg("theta_mode") = model::ThetaMode::from_prior,
             py::arg("fixed_thetas") = std::vector<model::ParameterPoint>{})
        .def_readonly("name", &model::PopulationGroup::name)
        .def_readonly("fraction", &model::PopulationGroup::fraction);

    py::class_<model::PopulationSpec>(m, "PopulationSpec")
        .def(py::init<std::vector<model::PopulationGroup>>(), py::arg("groups"));

    // numerics
    m.def("std_normal_cdf",
          [](double x) { return numerics::std_normal_cdf(x).value(); }, py::arg("x"));
    m.def("std_normal_quantile",
          [](double p) { return numerics::std_normal_quantile(numerics::Probability(p)); },
          py::arg("p"));

    // model operations
    m.def("power",
          [](const model::GaussianTestModel& gm, double theta, double t) {
              return model::power(gm, theta, numerics::Probability(t)).value();
          },
          py::arg("model"), py::arg("theta"), py::arg("t"));
    m.def("protocol_power",
          [](const model::GaussianTestModel& gm, double theta,
             const model::ApprovalProtocol& protocol) {
              return model::protocol_power(gm, theta, protocol).value();
          },
          py::arg("model"), py::arg("theta"), py::arg("protocol"));
    m.def("sample_pvalues",
          [](const model::GaussianTestModel& gm, double theta, std::int64_t count,
             std::uint64_t seed) {
              auto generator = rng::SplitMix64(seed);
              std::vector<double> out;
              out.reserve(static_cast<std::size_t>(count));
              for (std::int64_t i = 0; i < count; ++i) {
                  out.push_back(model::sample_pvalue(gm, theta, generator).value());
              }
              return out;
          },
          py::arg("model"), py::arg("theta"), py::arg("count"), py::arg("seed"));
    m.def("expected_power",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             double t) {
              return model::expected_power(prior, gm, numerics::Probability(t)).value();
          },
          py::arg("prior"), py::arg("model"), py::arg("t"));
    m.def("expected_protocol_power",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             const model::ApprovalProtocol& protocol) {
              return model::expected_protocol_power(prior, gm, protocol).value();
          },
          py::arg("prior"), py::arg("model"), py::arg("protocol"));
    m.def("expected_profit", &model::expected_profit, py::arg("prior"), py::arg("model"),
          py::arg("protocol"), py::arg("econ"));
    m.def("expected_utility", &model::expected_utility, py::arg("profile"),
          py::arg("model"), py::arg("protocol"), py::arg("econ"));
    m.def("opts_in", &model::opts_in, py::arg("profile"), py::arg("model"),
          py::arg("protocol"), py::arg("econ"),
          py::arg("rule") = model::OptInRule::profit);
    m.def("opt_in_threshold",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             const model::Economics& econ) {
              return unwrap(model::opt_in_threshold(prior, gm, econ));
          },
          py::arg("prior"), py::arg("model"), py::arg("econ"),
          "Smallest profitable single-trial threshold, or None if never profitable");

    // bounds
    py::class_<bounds::BoundReport>(m, "BoundReport")
        .def_readonly("tau", &bounds::BoundReport::tau)
        .def_readonly("cost_reward_ratio", &bounds::BoundReport::cost_reward_ratio)
        .def_readonly("posterior_odds_lower", &bounds::BoundReport::posterior_odds_lower)
        .def_readonly("bayes_fdr_upper", &bounds::BoundReport::bayes_fdr_upper)
        .def_readonly("null_expected_profit", &bounds::BoundReport::null_expected_profit);

    py::enum_<bounds::LedgerVerdict>(m, "LedgerVerdict")
        .value("consistent", bounds::LedgerVerdict::consistent)
        .value("theorem_violated", bounds::LedgerVerdict::theorem_violated);

    py::class_<bounds::LedgerEntry>(m, "LedgerEntry")
        .def_readonly("point", &bounds::LedgerEntry::point)
        .def_readonly("approval_prob", &bounds::LedgerEntry::approval_prob)
        .def_readonly("agent_value", &bounds::LedgerEntry::agent_value)
        .def_readonly("principal_value", &bounds::LedgerEntry::principal_value);

    py::class_<bounds::LedgerReport>(m, "LedgerReport")
        .def_readonly("agent_total", &bounds::LedgerReport::agent_total)
        .def_readonly("tp_mass", &bounds::LedgerReport::tp_mass)
        .def_readonly("fp_mass", &bounds::LedgerReport::fp_mass)
        .def_readonly("ratio", &bounds::LedgerReport::ratio)
        .def_readonly("bound", &bounds::LedgerReport::bound)
        .def_readonly("verdict", &bounds::LedgerReport::verdict)
        .def_readonly("entries", &bounds::LedgerReport::entries);

    m.def("posterior_odds_bound",
          [](const model::Economics& econ, double tau) {
              return bounds::posterior_odds_bound(econ, numerics::Probability(tau));
          },
          py::arg("econ"), py::arg("tau"), "Lower bound on nonnull:null odds, or None");
    m.def("bayes_fdr_bound",
          [](const model::Economics& econ, double tau) {
              return unwrap(bounds::bayes_fdr_bound(econ, numerics::Probability(tau)));
          },
          py::arg("econ"), py::arg("tau"), "Upper bound tau*R/C, or None when >= 1");
    m.def("design_tau",
          [](double alpha, const model::Economics& econ) {
              return bounds::design_tau(alpha, econ).value();
          },
          py::arg("alpha"), py::arg("econ"));
    m.def("null_expected_profit",
          [](const model::Economics& econ, double tau) {
              return bounds::null_expected_profit(econ, numerics::Probability(tau));
          },
          py::arg("econ"), py::arg("tau"));
    m.def("bound_report",
          [](const model::Economics& econ, double tau) {
              return bounds::bound_report(econ, numerics::Probability(tau));
          },
          py::arg("econ"), py::arg("tau"));
    m.def("theorem2_ledger",
          [](const std::vector<model::ParameterPoint>& thetas,
             const model::GaussianTestModel& gm, const model::ApprovalProtocol& protocol,
             const model::Economics& econ) {
              return bounds::theorem2_ledger(thetas, gm, protocol, econ);
          },
          py::arg("thetas"), py::arg("model"), py::arg("protocol"), py::arg("econ"));

    // bayes
    py::class_<bayes::PValueRegion>(m, "PValueRegion")
        .def(py::init([](double lo, double hi) {
                 return bayes::PValueRegion(numerics::Probability(lo),
                                            numerics::Probability(hi));
             }),
             py::arg("lo"), py::arg("hi"));

    py::enum_<bayes::PopulationFdr::Status>(m, "PopulationFdrStatus")
        .value("defined", bayes::PopulationFdr::Status::defined)
        .value("no_participation", bayes::PopulationFdr::Status::no_participation)
        .value("no_approval_mass", bayes::PopulationFdr::Status::no_approval_mass);

    py::class_<bayes::PopulationFdr>(m, "PopulationFdr")
        .def_readonly("status", &bayes::PopulationFdr::status)
        .def_readonly("value", &bayes::PopulationFdr::value)
        .def_readonly("group_opted_in", &bayes::PopulationFdr::group_opted_in)
        .def_property_readonly("defined", &bayes::PopulationFdr::defined);

    m.def("pvalue_density",
          [](const model::GaussianTestModel& gm, double theta, double x) {
              return bayes::pvalue_density(gm, theta, numerics::Probability(x));
          },
          py::arg("model"), py::arg("theta"), py::arg("x"));
    m.def("posterior_null_given_approve",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             const model::ApprovalProtocol& protocol) {
              return unwrap(bayes::posterior_null_given_approve(prior, gm, protocol));
          },
          py::arg("prior"), py::arg("model"), py::arg("protocol"));
    m.def("posterior_odds_nonnull",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             const model::ApprovalProtocol& protocol) {
              return bayes::posterior_odds_nonnull(prior, gm, protocol);
          },
          py::arg("prior"), py::arg("model"), py::arg("protocol"));
    m.def("fdr_over_region",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             const bayes::PValueRegion& region) {
              return unwrap(bayes::fdr_over_region(prior, gm, region));
          },
          py::arg("prior"), py::arg("model"), py::arg("region"));
    m.def("local_fdr",
          [](const model::DiscretePrior& prior, const model::GaussianTestModel& gm,
             double x) {
              return bayes::local_fdr(prior, gm, numerics::Probability(x)).value();
          },
          py::arg("prior"), py::arg("model"), py::arg("x"));
    m.def("population_fdr_exact", &bayes::population_fdr_exact, py::arg("population"),
          py::arg("model"), py::arg("protocol"), py::arg("econ"));
    m.def("marginal_fdr",
          [](const std::vector<model::ParameterPoint>& thetas,
             const model::GaussianTestModel& gm, const model::ApprovalProtocol& protocol) {
              return unwrap(bayes::marginal_fdr(thetas, gm, protocol));
          },
          py::arg("thetas"), py::arg("model"), py::arg("protocol"));

    // sim
    py::class_<sim::SimulationReport>(m, "SimulationReport")
        .def_readonly("n_agents", &sim::SimulationReport::n_agents)
        .def_readonly("n_opted_in", &sim::SimulationReport::n_opted_in)
        .def_readonly("n_approved", &sim::SimulationReport::n_approved)
        .def_readonly("n_false_approved", &sim::SimulationReport::n_false_approved)
        .def_readonly("n_true_approved", &sim::SimulationReport::n_true_approved)
        .def_readonly("total_agent_profit", &sim::SimulationReport::total_agent_profit)
        .def_readonly("empirical_fdr", &sim::SimulationReport::empirical_fdr)
        .def_readonly("fdr_std_error", &sim::SimulationReport::fdr_std_error)
        .def_readonly("seed", &sim::SimulationReport::seed);

    py::class_<sim::SweepRow>(m, "SweepRow")
        .def_readonly("tau", &sim::SweepRow::tau)
        .def_readonly("exact_fdr", &sim::SweepRow::exact_fdr)
        .def_readonly("empirical_fdr", &sim::SweepRow::empirical_fdr)
        .def_readonly("empirical_se", &sim::SweepRow::empirical_se)
        .def_readonly("bound", &sim::SweepRow::bound)
        .def_readonly("group_opted_in", &sim::SweepRow::group_opted_in);

    py::class_<sim::Theorem2Empirical>(m, "Theorem2Empirical")
        .def_readonly("n_replicates", &sim::Theorem2Empirical::n_replicates)
        .def_readonly("mean_profit", &sim::Theorem2Empirical::mean_profit)
        .def_readonly("se_profit", &sim::Theorem2Empirical::se_profit)
        .def_readonly("mean_true_positives", &sim::Theorem2Empirical::mean_true_positives)
        .def_readonly("se_true_positives", &sim::Theorem2Empirical::se_true_positives)
        .def_readonly("mean_false_positives",
                      &sim::Theorem2Empirical::mean_false_positives)
        .def_readonly("se_false_positives", &sim::Theorem2Empirical::se_false_positives)
        .def_readonly("ledger", &sim::Theorem2Empirical::ledger);

    m.def("simulate", &sim::simulate, py::arg("population"), py::arg("model"),
          py::arg("protocol"), py::arg("econ"), py::arg("n_agents"), py::arg("seed"));
    m.def("sweep_tau",
          [](const model::PopulationSpec& population, const model::GaussianTestModel& gm,
             const model::Economics& econ, const std::vector<double>& tau_grid,
             std::int64_t n_agents, std::uint64_t seed, std::int64_t mc_stride) {
              return sim::sweep_tau(population, gm, econ, tau_grid, n_agents, seed,
                                    mc_stride);
          },
          py::arg("population"), py::arg("model"), py::arg("econ"), py::arg("tau_grid"),
          py::arg("n_agents"), py::arg("seed"), py::arg("mc_stride") = 1);
    m.def("theorem2_empirical",
          [](const std::vector<model::ParameterPoint>& thetas,
             const model::GaussianTestModel& gm, const model::ApprovalProtocol& protocol,
             const model::Economics& econ, std::int64_t n_replicates, std::uint64_t seed) {
              return sim::theorem2_empirical(thetas, gm, protocol, econ, n_replicates,
                                             seed);
          },
          py::arg("thetas"), py::arg("model"), py::arg("protocol"), py::arg("econ"),
          py::arg("n_replicates"), py::arg("seed"));
}
