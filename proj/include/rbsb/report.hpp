#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "rbsb/config.hpp"

namespace rbsb {

/// Everything the per-stage report prints: inputs, prior, weights, posterior
/// summaries on the analysis and exponentiated scales, and ESS.
struct StageReport {
    int stage = 0;
    std::string label;
    StudySummary input;
    std::string se_source = "explicit";
    double borrow_weight = 0.0;
    double wstar = 0.0;
    std::vector<double> path_weights;  // over P_{1:stage}, longest path first
    MixtureDistribution prior;         // stage-j robust mixture before obs
    MixtureDistribution posterior;
    double success_prob = 0.0;
    bool decision = false;
    double median = 0.0;
    double cri_lo = 0.0;
    double cri_hi = 0.0;
    double median_exp = 0.0;  // exp-scale analogues (hazard-ratio style)
    double cri_lo_exp = 0.0;
    double cri_hi_exp = 0.0;
    double ess = 0.0;
    double ess_pct = 0.0;
    double n_own = 0.0;
};

struct AnalysisReport {
    ProgrammeSpec programme;
    EssMethod ess_method = EssMethod::elir;
    std::string cri_convention = "equal_tailed";
    std::vector<StageReport> stages;
};

/// Sequential analysis of user-supplied summaries (Algorithm-style single
/// pass). n_own may be empty; each entry overrides the ESS% denominator.
AnalysisReport run_analyze(const std::vector<StudySummary>& summaries, const ProgrammeSpec& spec,
                           EssMethod ess_method = EssMethod::elir,
                           const std::vector<double>& n_own = {});

AnalysisReport run_case_study(const CaseStudyInput& input);

nlohmann::json report_to_json(const AnalysisReport& report);
std::string report_to_markdown(const AnalysisReport& report);

struct SimulateOutput {
    std::vector<SimReport> reports;   // one per scenario
    std::vector<std::string> files;   // paths written
};

/// Run every scenario in the config and write one CSV per metric plus the
/// run manifest (and optional markdown/json mirrors) under config.out_dir.
SimulateOutput run_simulate(const RunConfig& config);

/// Long-format plot files (setting, design, stage, metric, value, stderr),
/// one per metric, derived from the table CSVs in `from_dir` so the values
/// stay byte-consistent with them.
std::vector<std::string> emit_plot_data(const std::string& from_dir, const std::string& out_dir);

/// 6-significant-digit numeric formatting used in all CSV output.
std::string format_csv_number(double v);

/// RFC 4180 field quoting.
std::string csv_escape(const std::string& field);

std::uint64_t fnv1a64(const std::string& data);

}  // namespace rbsb
