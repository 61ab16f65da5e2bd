#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbsb/errors.hpp"
#include "rbsb/report.hpp"

namespace {

using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

rbsb::RunConfig load_config(const std::string& config_path, const std::string& manifest_path) {
    if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in) throw rbsb::IoError("cannot open manifest: " + manifest_path);
        json m;
        try {
            in >> m;
        } catch (const json::exception& e) {
            throw rbsb::ConfigError("manifest is not valid JSON: " + std::string(e.what()));
        }
        if (!m.contains("config")) throw rbsb::ConfigError("manifest has no 'config' entry");
        return rbsb::parse_config_json(m.at("config"));
    }
    return rbsb::parse_config(config_path);
}

// analyze accepts either a full run configuration or a bare programme block
rbsb::ProgrammeSpec load_programme(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rbsb::IoError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw rbsb::ConfigError("config is not valid JSON: " + std::string(e.what()));
    }
    if (j.contains("scenarios")) {
        return rbsb::parse_config_json(j).programme;
    }
    if (j.contains("programme")) {
        return rbsb::parse_programme_json(j.at("programme"));
    }
    throw rbsb::ConfigError("config must contain a 'programme' or 'scenarios' entry");
}

std::vector<rbsb::StudySummary> load_summaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rbsb::IoError("cannot open summaries file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw rbsb::ConfigError("summaries file is not valid JSON: " + std::string(e.what()));
    }
    if (!j.is_array()) throw rbsb::ConfigError("summaries file must be a JSON array");
    std::vector<rbsb::StudySummary> out;
    int idx = 0;
    for (const auto& s : j) {
        const std::string where = "summaries[" + std::to_string(idx++) + "]";
        if (!s.contains("mean") || !s.contains("se")) {
            throw rbsb::ConfigError(where + ": fields 'mean' and 'se' are required");
        }
        out.emplace_back(s.at("mean").get<double>(), s.at("se").get<double>(),
                         s.value("label", where));
    }
    return out;
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw rbsb::IoError("cannot open for writing: " + path);
    out << content;
}

void emit_analysis(const rbsb::AnalysisReport& report, const std::string& out_dir,
                   const std::string& stem) {
    if (out_dir.empty()) {
        std::cout << rbsb::report_to_json(report).dump(2) << "\n";
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw rbsb::IoError("cannot create output directory: " + out_dir);
    const auto base = std::filesystem::path(out_dir) / stem;
    write_text(base.string() + ".json", rbsb::report_to_json(report).dump(2) + "\n");
    write_text(base.string() + ".md", rbsb::report_to_markdown(report));
    std::cout << "wrote " << base.string() << ".json and " << base.string() << ".md\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust Bayesian sequential borrowing: analysis and simulation"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Run scenario simulations and write metric tables");
    std::string sim_config;
    std::string sim_manifest;
    std::string sim_out;
    std::vector<std::string> sim_designs;
    long sim_reps = -1;
    std::int64_t sim_seed = -1;
    int sim_workers = -1;
    sim->add_option("--config", sim_config, "JSON run configuration");
    sim->add_option("--from-manifest", sim_manifest, "Re-run from a manifest.json");
    sim->add_option("--seed", sim_seed, "Override the config seed");
    sim->add_option("--reps", sim_reps, "Override the replicate count");
    sim->add_option("--designs", sim_designs, "Override the design list")->delimiter(',');
    sim->add_option("--out", sim_out, "Override the output directory");
    sim->add_option("--workers", sim_workers, "Worker threads (0 = all cores)");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Sequential analysis of observed summaries");
    std::string an_config;
    std::string an_summaries;
    std::string an_out;
    analyze->add_option("--config", an_config, "JSON run configuration (programme block used)");
    analyze->add_option("--summaries", an_summaries, "JSON array of {mean, se, label}")
        ->required();
    analyze->add_option("--out", an_out, "Output directory (stdout when omitted)");

    // case-study
    auto* cs = app.add_subcommand("case-study", "Stage-by-stage report for a case-study input");
    std::string cs_input;
    std::string cs_out;
    cs->add_option("--input", cs_input, "Case-study JSON input")->required();
    cs->add_option("--out", cs_out, "Output directory (stdout when omitted)");

    // assurance
    auto* as = app.add_subcommand("assurance", "Probability of success under the stage prior");
    std::string as_config;
    std::string as_summaries;
    int as_stage = 1;
    std::string as_mode = "marginal";
    std::string as_upstream = "prospective";
    long as_reps = -1;
    std::int64_t as_seed = -1;
    int as_scenario_index = 0;
    as->add_option("--config", as_config, "JSON run configuration")->required();
    as->add_option("--stage", as_stage, "Analysis stage j")->required();
    as->add_option("--mode", as_mode, "marginal | conditional | joint");
    as->add_option("--upstream", as_upstream, "prospective | fixed");
    as->add_option("--summaries", as_summaries, "Fixed upstream summaries (JSON array)");
    as->add_option("--scenario", as_scenario_index, "Scenario index in the config (default 0)");
    as->add_option("--reps", as_reps, "Override the replicate count");
    as->add_option("--seed", as_seed, "Override the config seed");

    // emit-plots
    auto* plots = app.add_subcommand("emit-plots", "Reshape metric tables into plot-ready CSVs");
    std::string plots_from;
    std::string plots_out;
    plots->add_option("--from", plots_from, "Directory holding the simulate output")->required();
    plots->add_option("--out", plots_out, "Output directory (default: same as --from)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            if (sim_config.empty() && sim_manifest.empty()) {
                throw rbsb::ConfigError("simulate: --config or --from-manifest is required");
            }
            rbsb::RunConfig config = load_config(sim_config, sim_manifest);
            if (sim_seed >= 0) config.seed = static_cast<std::uint64_t>(sim_seed);
            if (sim_reps > 0) config.reps = sim_reps;
            if (sim_workers >= 0) config.workers = sim_workers;
            if (!sim_out.empty()) config.out_dir = sim_out;
            if (!sim_designs.empty()) {
                config.designs.clear();
                for (const auto& d : sim_designs) {
                    config.designs.push_back(rbsb::design_from_string(d));
                }
            }
            config.validate();
            const auto out = rbsb::run_simulate(config);
            for (const auto& f : out.files) std::cout << "wrote " << f << "\n";
        } else if (analyze->parsed()) {
            rbsb::ProgrammeSpec spec =
                an_config.empty() ? rbsb::default_programme() : load_programme(an_config);
            const auto summaries = load_summaries(an_summaries);
            const auto report = rbsb::run_analyze(summaries, spec);
            emit_analysis(report, an_out, "analysis");
        } else if (cs->parsed()) {
            const auto input = rbsb::parse_case_study(cs_input);
            const auto report = rbsb::run_case_study(input);
            emit_analysis(report, cs_out, "case-study");
        } else if (as->parsed()) {
            rbsb::RunConfig config = rbsb::parse_config(as_config);
            if (as_scenario_index < 0 ||
                as_scenario_index >= static_cast<int>(config.scenarios.size())) {
                throw rbsb::ConfigError("assurance: --scenario index out of range");
            }
            rbsb::AssuranceRequest request;
            request.stage = as_stage;
            request.mode = rbsb::assurance_mode_from_string(as_mode);
            request.upstream = rbsb::assurance_upstream_from_string(as_upstream);
            if (request.upstream == rbsb::AssuranceUpstream::fixed) {
                if (as_summaries.empty()) {
                    throw rbsb::ConfigError(
                        "assurance: --summaries is required with --upstream fixed");
                }
                request.fixed_upstream = load_summaries(as_summaries);
            }
            request.reps = as_reps > 0 ? as_reps : config.reps;
            request.seed = as_seed >= 0 ? static_cast<std::uint64_t>(as_seed) : config.seed;
            const auto result = rbsb::assurance(
                config.scenarios[static_cast<std::size_t>(as_scenario_index)], config.programme,
                request);
            json out{{"stage", request.stage},
                     {"mode", rbsb::to_string(request.mode)},
                     {"upstream", rbsb::to_string(request.upstream)},
                     {"reps", result.reps},
                     {"seed", request.seed},
                     {"n_conditioning", result.n_conditioning}};
            if (result.is_na) {
                out["estimate"] = nullptr;
            } else {
                out["estimate"] = result.estimate;
                out["mc_stderr"] = result.stderr_;
            }
            std::cout << out.dump(2) << "\n";
        } else if (plots->parsed()) {
            const std::string out_dir = plots_out.empty() ? plots_from : plots_out;
            const auto files = rbsb::emit_plot_data(plots_from, out_dir);
            for (const auto& f : files) std::cout << "wrote " << f << "\n";
        }
    } catch (const rbsb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const rbsb::IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
