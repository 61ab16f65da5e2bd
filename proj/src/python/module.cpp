#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbsb/config.hpp"
#include "rbsb/designs.hpp"
#include "rbsb/engine.hpp"
#include "rbsb/metrics.hpp"
#include "rbsb/report.hpp"
#include "rbsb/rng.hpp"
#include "rbsb/sim.hpp"

namespace py = pybind11;
using namespace rbsb;

namespace {

MixtureDistribution make_mixture(const std::vector<std::tuple<double, double, double>>& comps) {
    std::vector<PathComponent> parts;
    int idx = 1;
    for (const auto& [weight, mean, sd] : comps) {
        PathComponent c;
        c.start = idx;
        c.end = idx;
        ++idx;
        c.pooled = PooledNormal::from_precision(mean, 1.0 / (sd * sd));
        c.weight = weight;
        parts.push_back(c);
    }
    return MixtureDistribution(std::move(parts), MixtureKind::posterior);
}

py::dict table_to_dict(const DesignTable& t) {
    auto rates = [](const std::vector<RateCell>& cells) {
        py::list out;
        for (const auto& c : cells) {
            py::dict d;
            if (c.is_na) {
                d["value"] = py::none();
            } else {
                d["value"] = c.value;
                d["mc_stderr"] = c.stderr_;
            }
            d["n"] = c.n;
            out.append(d);
        }
        return out;
    };
    auto means = [](const std::vector<MeanCell>& cells) {
        py::list out;
        for (const auto& c : cells) {
            py::dict d;
            d["value"] = c.value;
            d["mc_stderr"] = c.stderr_;
            out.append(d);
        }
        return out;
    };
    py::dict d;
    d["design"] = to_string(t.design);
    d["marginal"] = rates(t.marginal);
    d["conditional"] = rates(t.conditional);
    d["joint"] = rates(t.joint);
    d["bias"] = means(t.bias);
    d["ess_pct"] = means(t.ess_pct);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Robust Bayesian sequential borrowing core";

    py::class_<StudySummary>(m, "StudySummary")
        .def(py::init<double, double, std::string>(), py::arg("mean"), py::arg("se"),
             py::arg("label") = std::string())
        .def_readonly("mean", &StudySummary::mean_hat)
        .def_readonly("se", &StudySummary::se_hat)
        .def_readonly("label", &StudySummary::label)
        .def("__repr__", [](const StudySummary& s) {
            return "StudySummary(mean=" + std::to_string(s.mean_hat) +
                   ", se=" + std::to_string(s.se_hat) + ")";
        });

    py::class_<PooledNormal>(m, "PooledNormal")
        .def_readonly("mean", &PooledNormal::mean)
        .def_readonly("sd", &PooledNormal::sd)
        .def_readonly("precision", &PooledNormal::precision);

    py::class_<PathComponent>(m, "PathComponent")
        .def_readonly("start", &PathComponent::start)
        .def_readonly("end", &PathComponent::end)
        .def_readonly("pooled", &PathComponent::pooled)
        .def_readonly("weight", &PathComponent::weight);

    py::class_<MixtureDistribution>(m, "MixtureDistribution")
        .def("pdf", &MixtureDistribution::pdf)
        .def("cdf", &MixtureDistribution::cdf)
        .def("quantile", &MixtureDistribution::quantile)
        .def("median", &MixtureDistribution::median)
        .def("mean", &MixtureDistribution::mean)
        .def("variance", &MixtureDistribution::variance)
        .def_property_readonly("components", &MixtureDistribution::components);

    py::enum_<Direction>(m, "Direction")
        .value("higher_is_better", Direction::higher_is_better)
        .value("lower_is_better", Direction::lower_is_better);

    py::enum_<EssMethod>(m, "EssMethod")
        .value("moment", EssMethod::moment)
        .value("elir", EssMethod::elir);

    py::class_<ProgrammeSpec>(m, "ProgrammeSpec")
        .def(py::init([](int num_stages, std::vector<double> weights, double mu0, double s0,
                         double threshold, const std::string& direction) {
                 ProgrammeSpec spec;
                 spec.num_stages = num_stages;
                 spec.borrow_weights = std::move(weights);
                 spec.unit_info = StudySummary(mu0, s0, "unit-info");
                 spec.threshold = threshold;
                 spec.direction = direction == "lower_is_better" ? Direction::lower_is_better
                                                                 : Direction::higher_is_better;
                 spec.validate();
                 return spec;
             }),
             py::arg("num_stages"), py::arg("borrow_weights"), py::arg("mu0") = 0.0,
             py::arg("s0") = 2.0, py::arg("threshold") = 0.975,
             py::arg("direction") = "higher_is_better")
        .def_readonly("num_stages", &ProgrammeSpec::num_stages)
        .def_readonly("borrow_weights", &ProgrammeSpec::borrow_weights)
        .def_readonly("threshold", &ProgrammeSpec::threshold);

    py::class_<EngineState>(m, "EngineState")
        .def(py::init<>())
        .def_readonly("stage", &EngineState::stage)
        .def_readonly("wstar_history", &EngineState::wstar_history)
        .def_readonly("posterior", &EngineState::posterior);

    m.def("normal_pdf", &normal_pdf, py::arg("x"), py::arg("mean"), py::arg("sd"));
    m.def("normal_upper_tail", &normal_upper_tail, py::arg("threshold"), py::arg("mean"),
          py::arg("sd"));
    m.def("normal_quantile", &normal_quantile, py::arg("p"));
    m.def(
        "pool",
        [](const StudySummary& prior, const std::vector<StudySummary>& studies) {
            return pool(prior, studies);
        },
        py::arg("prior"), py::arg("studies"));
    m.def("enumerate_paths", &enumerate_paths, py::arg("j"));
    m.def("path_weights", &path_weights, py::arg("wstar_history"));
    m.def("advance", &advance, py::arg("state"), py::arg("spec"), py::arg("obs"));
    m.def("success_probability", &success_probability, py::arg("mixture"), py::arg("direction"));
    m.def("decide", &decide, py::arg("mixture"), py::arg("spec"));
    m.def("mixture", &make_mixture, py::arg("components"),
          "Build a mixture from (weight, mean, sd) tuples");
    m.def("ess_moment", &ess_moment, py::arg("mixture"), py::arg("unit_variance"));
    m.def("ess_elir", &ess_elir, py::arg("mixture"), py::arg("unit_variance"),
          py::arg("rel_tol") = 1e-8);
    m.def("ess_pct", &ess_pct, py::arg("ess"), py::arg("n_own"));
    m.def("bias_sample", &bias_sample, py::arg("mixture"), py::arg("true_mu"));

    m.def(
        "run_scenario",
        [](const std::vector<double>& true_effects, const std::vector<int>& sample_sizes,
           double sigma, const ProgrammeSpec& spec, const std::vector<std::string>& designs,
           long reps, std::uint64_t seed, int workers, const std::string& ess_method) {
            ScenarioSpec scenario;
            scenario.true_effects = true_effects;
            scenario.sample_sizes = sample_sizes;
            scenario.sigma = sigma;
            scenario.label = "scenario";
            std::vector<DesignKind> kinds;
            for (const auto& d : designs) kinds.push_back(design_from_string(d));
            SimOptions options;
            options.workers = workers;
            options.ess_method = ess_method_from_string(ess_method);
            const SimReport report = run_scenario(scenario, kinds, spec, reps, seed, options);
            py::dict out;
            out["replicates"] = report.replicates;
            out["seed"] = report.seed;
            py::list tables;
            for (const auto& t : report.tables) tables.append(table_to_dict(t));
            out["tables"] = tables;
            return out;
        },
        py::arg("true_effects"), py::arg("sample_sizes"), py::arg("sigma"), py::arg("spec"),
        py::arg("designs"), py::arg("reps"), py::arg("seed") = 0, py::arg("workers") = 1,
        py::arg("ess_method") = "elir");

    m.def(
        "analyze",
        [](const std::vector<StudySummary>& summaries, const ProgrammeSpec& spec,
           const std::string& ess_method, const std::vector<double>& n_own) {
            const AnalysisReport report =
                run_analyze(summaries, spec, ess_method_from_string(ess_method), n_own);
            py::list stages;
            for (const auto& s : report.stages) {
                py::dict d;
                d["stage"] = s.stage;
                d["label"] = s.label;
                d["wstar"] = s.wstar;
                d["path_weights"] = s.path_weights;
                d["success_prob"] = s.success_prob;
                d["decision"] = s.decision;
                d["median"] = s.median;
                d["cri"] = py::make_tuple(s.cri_lo, s.cri_hi);
                d["median_exp"] = s.median_exp;
                d["cri_exp"] = py::make_tuple(s.cri_lo_exp, s.cri_hi_exp);
                d["ess"] = s.ess;
                d["ess_pct"] = s.ess_pct;
                stages.append(d);
            }
            return stages;
        },
        py::arg("summaries"), py::arg("spec"), py::arg("ess_method") = "elir",
        py::arg("n_own") = std::vector<double>{});

    py::class_<CounterRng>(m, "CounterRng")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &CounterRng::uniform, py::arg("replicate"), py::arg("stream"),
             py::arg("index"))
        .def("normal", &CounterRng::normal, py::arg("replicate"), py::arg("stream"),
             py::arg("index"));
}
