#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbsb/sim.hpp"

namespace rbsb {

/// Full run configuration for the simulate command. Defaults mirror the
/// five-stage reference programme (n = 160,60,60,60,60; w = 0,.5,.5,.5,.5;
/// unit-information prior N(0,2); p* = 0.975).
struct RunConfig {
    std::vector<ScenarioSpec> scenarios;
    ProgrammeSpec programme;
    std::vector<DesignKind> designs;
    long reps = 10000;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    std::set<std::string> formats = {"csv", "json"};
    EssMethod ess_method = EssMethod::elir;
    int workers = 1;
    int conditional_start = 1;

    void validate() const;
};

ProgrammeSpec default_programme();

RunConfig parse_config(const std::string& path);
RunConfig parse_config_json(const nlohmann::json& j);
ProgrammeSpec parse_programme_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// One stratum of a case-study input. Exactly one of {se, ci, events} must
/// allow an SE to be derived; precedence is explicit SE > CI > events.
struct CaseStudyStratum {
    std::string label;
    double log_effect = 0.0;
    std::optional<double> se;
    std::optional<std::pair<double, double>> ci;  // 95% bounds on the log scale
    std::optional<double> events;
    std::optional<double> n_own;  // ESS% denominator override
};

struct CaseStudyInput {
    std::vector<CaseStudyStratum> strata;
    StudySummary unit_info{0.0, 2.0, "unit-info"};
    std::vector<double> borrow_weights;
    double threshold = 0.975;
    Direction direction = Direction::lower_is_better;
    EssMethod ess_method = EssMethod::elir;
};

CaseStudyInput parse_case_study(const std::string& path);
CaseStudyInput parse_case_study_json(const nlohmann::json& j);

/// Resolved per-stratum summary plus which SE source was used
/// ("explicit" | "ci" | "events").
struct ResolvedStratum {
    StudySummary summary;
    std::string se_source;
    double n_own = 0.0;
};

ResolvedStratum resolve_stratum(const CaseStudyStratum& stratum, double unit_variance);

}  // namespace rbsb
