#include "rbsb/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbsb/errors.hpp"

namespace rbsb {

using nlohmann::json;

namespace fs = std::filesystem;

std::string format_csv_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string round_to(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

StageReport make_stage_report(int stage, const StudySummary& obs, const EngineState& state,
                              const ProgrammeSpec& spec, EssMethod method, double n_own) {
    StageReport r;
    r.stage = stage;
    r.label = obs.label.empty() ? ("stage-" + std::to_string(stage)) : obs.label;
    r.input = obs;
    r.borrow_weight = spec.borrow_weights[static_cast<std::size_t>(stage - 1)];
    r.wstar = state.wstar_history.back();
    r.path_weights = path_weights(state.wstar_history);
    r.posterior = state.posterior;
    r.success_prob = success_probability(state.posterior, spec.direction);
    r.decision = r.success_prob > spec.threshold;
    r.median = state.posterior.median();
    r.cri_lo = state.posterior.quantile(0.025);
    r.cri_hi = state.posterior.quantile(0.975);
    r.median_exp = std::exp(r.median);
    r.cri_lo_exp = std::exp(r.cri_lo);
    r.cri_hi_exp = std::exp(r.cri_hi);
    const double unit_var = spec.unit_info.se_hat * spec.unit_info.se_hat;
    r.ess = ess(state.posterior, unit_var, method);
    r.n_own = n_own > 0.0 ? n_own : unit_var / (obs.se_hat * obs.se_hat);
    r.ess_pct = ess_pct(r.ess, r.n_own);
    return r;
}

}  // namespace

AnalysisReport run_analyze(const std::vector<StudySummary>& summaries, const ProgrammeSpec& spec,
                           EssMethod ess_method, const std::vector<double>& n_own) {
    spec.validate();
    if (summaries.empty()) {
        throw ConfigError("analyze: at least one summary is required");
    }
    if (static_cast<int>(summaries.size()) > spec.num_stages) {
        throw ConfigError("analyze: more summaries (" + std::to_string(summaries.size()) +
                          ") than programme stages (" + std::to_string(spec.num_stages) + ")");
    }
    if (!n_own.empty() && n_own.size() != summaries.size()) {
        throw ConfigError("analyze: n_own length must match summaries");
    }
    AnalysisReport report;
    report.programme = spec;
    report.ess_method = ess_method;
    EngineState state;
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        MixtureDistribution prior;
        if (i == 0) {
            std::vector<PathComponent> vague{
                {0, 0, pool(spec.unit_info, std::vector<StudySummary>{}), 1.0}};
            prior = MixtureDistribution(std::move(vague), MixtureKind::prior);
        } else {
            prior = build_prior(state, spec, static_cast<int>(i + 1));
        }
        state = advance(state, spec, summaries[i]);
        const double n = n_own.empty() ? 0.0 : n_own[i];
        StageReport stage =
            make_stage_report(static_cast<int>(i + 1), summaries[i], state, spec, ess_method, n);
        stage.prior = std::move(prior);
        report.stages.push_back(std::move(stage));
    }
    return report;
}

AnalysisReport run_case_study(const CaseStudyInput& input) {
    const int K = static_cast<int>(input.strata.size());
    ProgrammeSpec spec;
    spec.num_stages = K;
    spec.borrow_weights = input.borrow_weights;
    spec.unit_info = input.unit_info;
    spec.threshold = input.threshold;
    spec.direction = input.direction;
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("case-study: ") + e.what());
    }

    const double unit_var = input.unit_info.se_hat * input.unit_info.se_hat;
    std::vector<StudySummary> summaries;
    std::vector<double> n_own;
    std::vector<std::string> sources;
    for (const auto& stratum : input.strata) {
        const ResolvedStratum r = resolve_stratum(stratum, unit_var);
        summaries.push_back(r.summary);
        n_own.push_back(r.n_own);
        sources.push_back(r.se_source);
    }
    AnalysisReport report = run_analyze(summaries, spec, input.ess_method, n_own);
    for (std::size_t i = 0; i < report.stages.size(); ++i) {
        report.stages[i].se_source = sources[i];
    }
    return report;
}

json report_to_json(const AnalysisReport& report) {
    json stages = json::array();
    const auto mixture_json = [](const MixtureDistribution& mix) {
        json comps = json::array();
        for (const auto& c : mix.components()) {
            comps.push_back({{"start", c.start},
                             {"end", c.end},
                             {"mean", c.pooled.mean},
                             {"sd", c.pooled.sd},
                             {"weight", c.weight}});
        }
        return comps;
    };
    for (const auto& s : report.stages) {
        json comps = mixture_json(s.posterior);
        stages.push_back({{"stage", s.stage},
                          {"label", s.label},
                          {"input", {{"mean", s.input.mean_hat}, {"se", s.input.se_hat}}},
                          {"se_source", s.se_source},
                          {"borrow_weight", s.borrow_weight},
                          {"wstar", s.wstar},
                          {"path_weights", s.path_weights},
                          {"prior", mixture_json(s.prior)},
                          {"posterior", comps},
                          {"success_prob", s.success_prob},
                          {"decision", s.decision},
                          {"median", s.median},
                          {"cri", {s.cri_lo, s.cri_hi}},
                          {"median_exp", s.median_exp},
                          {"cri_exp", {s.cri_lo_exp, s.cri_hi_exp}},
                          {"ess", s.ess},
                          {"ess_pct", s.ess_pct},
                          {"n_own", s.n_own}});
    }
    return json{{"ess_method", to_string(report.ess_method)},
                {"cri_convention", report.cri_convention},
                {"threshold", report.programme.threshold},
                {"direction", report.programme.direction == Direction::higher_is_better
                                  ? "higher_is_better"
                                  : "lower_is_better"},
                {"unit_info",
                 {{"mean", report.programme.unit_info.mean_hat},
                  {"sd", report.programme.unit_info.se_hat}}},
                {"stages", stages}};
}

std::string report_to_markdown(const AnalysisReport& report) {
    const bool exp_scale = report.programme.direction == Direction::lower_is_better;
    std::ostringstream md;
    md << "| Population | Posterior Median " << (exp_scale ? "HR " : "") << "(95% CrI) | Posterior ESS | ESS % | w* |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& s : report.stages) {
        const double med = exp_scale ? s.median_exp : s.median;
        const double lo = exp_scale ? s.cri_lo_exp : s.cri_lo;
        const double hi = exp_scale ? s.cri_hi_exp : s.cri_hi;
        md << "| " << s.label << " | " << round_to(med, 2) << " (" << round_to(lo, 2) << ", "
           << round_to(hi, 2) << ") | " << round_to(s.ess, 0) << " | "
           << round_to(100.0 * s.ess_pct, 1) << "% | " << round_to(s.wstar, 2) << " |\n";
    }
    return md.str();
}

namespace {

struct CsvTables {
    std::string marginal;
    std::string conditional;
    std::string joint;
    std::string bias;
    std::string ess_pct;
};

CsvTables render_csv(const std::vector<SimReport>& reports) {
    CsvTables t;
    t.marginal = "setting,design,stage,value,mc_stderr\n";
    t.joint = "setting,design,stage,value,mc_stderr\n";
    t.conditional = "setting,design,stage,value,mc_stderr,n_conditioning,low_conditioning\n";
    t.bias = "setting,design,stage,value,mc_stderr\n";
    t.ess_pct = "setting,design,stage,value,mc_stderr\n";
    for (const auto& report : reports) {
        for (const auto& table : report.tables) {
            const std::string prefix_base =
                csv_escape(report.scenario_label) + "," + to_string(table.design) + ",";
            for (int k = 0; k < report.num_stages; ++k) {
                const std::string prefix = prefix_base + std::to_string(k + 1) + ",";
                const auto& m = table.marginal[static_cast<std::size_t>(k)];
                t.marginal += prefix + format_csv_number(m.value) + "," +
                              format_csv_number(m.stderr_) + "\n";
                const auto& jn = table.joint[static_cast<std::size_t>(k)];
                t.joint += prefix + format_csv_number(jn.value) + "," +
                           format_csv_number(jn.stderr_) + "\n";
                const auto& c = table.conditional[static_cast<std::size_t>(k)];
                if (c.is_na) {
                    t.conditional += prefix + "NA,NA,0,false\n";
                } else {
                    t.conditional += prefix + format_csv_number(c.value) + "," +
                                     format_csv_number(c.stderr_) + "," + std::to_string(c.n) +
                                     "," + (c.sparse ? "true" : "false") + "\n";
                }
                const auto& b = table.bias[static_cast<std::size_t>(k)];
                t.bias += prefix + format_csv_number(b.value) + "," +
                          format_csv_number(b.stderr_) + "\n";
                const auto& e = table.ess_pct[static_cast<std::size_t>(k)];
                t.ess_pct += prefix + format_csv_number(e.value) + "," +
                             format_csv_number(e.stderr_) + "\n";
            }
        }
    }
    return t;
}

std::string render_markdown(const std::vector<SimReport>& reports) {
    std::ostringstream md;
    auto rate_table = [&](const std::string& title, auto accessor, bool conditional_cols) {
        md << "## " << title << "\n\n";
        for (const auto& report : reports) {
            md << "**" << report.scenario_label << "**\n\n";
            md << "| design |";
            for (int k = 1; k <= report.num_stages; ++k) md << " k=" << k << " |";
            md << "\n|---|";
            for (int k = 0; k < report.num_stages; ++k) md << "---|";
            md << "\n";
            for (const auto& table : report.tables) {
                md << "| " << to_string(table.design) << " |";
                for (int k = 0; k < report.num_stages; ++k) {
                    const RateCell& c = accessor(table)[static_cast<std::size_t>(k)];
                    if (conditional_cols && c.is_na) {
                        md << " NA |";
                    } else {
                        md << " " << round_to(100.0 * c.value, 1) << " |";
                    }
                }
                md << "\n";
            }
            md << "\n";
        }
    };
    rate_table("Marginal rejection rate (%)",
               [](const DesignTable& t) -> const std::vector<RateCell>& { return t.marginal; },
               false);
    rate_table("Conditional rejection rate (%)",
               [](const DesignTable& t) -> const std::vector<RateCell>& { return t.conditional; },
               true);
    rate_table("Joint rejection rate (%)",
               [](const DesignTable& t) -> const std::vector<RateCell>& { return t.joint; },
               false);
    md << "## Bias and ESS %\n\n";
    for (const auto& report : reports) {
        md << "**" << report.scenario_label << "**\n\n";
        md << "| design | metric |";
        for (int k = 1; k <= report.num_stages; ++k) md << " k=" << k << " |";
        md << "\n|---|---|";
        for (int k = 0; k < report.num_stages; ++k) md << "---|";
        md << "\n";
        for (const auto& table : report.tables) {
            md << "| " << to_string(table.design) << " | bias |";
            for (int k = 0; k < report.num_stages; ++k) {
                md << " " << round_to(table.bias[static_cast<std::size_t>(k)].value, 2) << " |";
            }
            md << "\n| " << to_string(table.design) << " | ESS% |";
            for (int k = 0; k < report.num_stages; ++k) {
                md << " " << round_to(100.0 * table.ess_pct[static_cast<std::size_t>(k)].value, 2)
                   << " |";
            }
            md << "\n";
        }
        md << "\n";
    }
    return md.str();
}

json reports_to_json(const std::vector<SimReport>& reports) {
    json out = json::array();
    for (const auto& report : reports) {
        json tables = json::array();
        for (const auto& table : report.tables) {
            auto rates = [](const std::vector<RateCell>& cells) {
                json arr = json::array();
                for (const auto& c : cells) {
                    if (c.is_na) {
                        arr.push_back({{"value", nullptr}, {"n", c.n}});
                    } else {
                        arr.push_back({{"value", c.value},
                                       {"mc_stderr", c.stderr_},
                                       {"n", c.n},
                                       {"sparse", c.sparse}});
                    }
                }
                return arr;
            };
            auto means = [](const std::vector<MeanCell>& cells) {
                json arr = json::array();
                for (const auto& c : cells) {
                    arr.push_back({{"value", c.value}, {"mc_stderr", c.stderr_}});
                }
                return arr;
            };
            tables.push_back({{"design", to_string(table.design)},
                              {"marginal", rates(table.marginal)},
                              {"conditional", rates(table.conditional)},
                              {"joint", rates(table.joint)},
                              {"bias", means(table.bias)},
                              {"ess_pct", means(table.ess_pct)}});
        }
        out.push_back({{"setting", report.scenario_label},
                       {"stages", report.num_stages},
                       {"replicates", report.replicates},
                       {"seed", report.seed},
                       {"ess_method", to_string(report.ess_method)},
                       {"tables", tables}});
    }
    return out;
}

}  // namespace

SimulateOutput run_simulate(const RunConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();

    SimulateOutput out;
    SimOptions options;
    options.workers = config.workers;
    options.ess_method = config.ess_method;
    options.conditional_start = config.conditional_start;
    for (const auto& scenario : config.scenarios) {
        out.reports.push_back(
            run_scenario(scenario, config.designs, config.programme, config.reps, config.seed,
                         options));
    }

    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + config.out_dir);
    const fs::path dir(config.out_dir);

    const CsvTables tables = render_csv(out.reports);
    auto emit = [&](const std::string& name, const std::string& content) {
        const fs::path p = dir / name;
        write_file(p, content);
        out.files.push_back(p.string());
    };
    if (config.formats.count("csv")) {
        emit("marginal.csv", tables.marginal);
        emit("conditional.csv", tables.conditional);
        emit("joint.csv", tables.joint);
        emit("bias.csv", tables.bias);
        emit("ess_pct.csv", tables.ess_pct);
    }
    if (config.formats.count("markdown")) {
        emit("tables.md", render_markdown(out.reports));
    }
    if (config.formats.count("json")) {
        emit("report.json", reports_to_json(out.reports).dump(2) + "\n");
    }

    const json config_json = to_json(config);
    const std::string config_dump = config_json.dump();
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();
    const json manifest{{"seed", config.seed},
                        {"reps", config.reps},
                        {"config", config_json},
                        {"config_hash", hex64(fnv1a64(config_dump))},
                        {"wall_time_seconds", wall},
                        {"ess_method", to_string(config.ess_method)}};
    emit("manifest.json", manifest.dump(2) + "\n");
    return out;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else if (c == '"') {
                    quoted = false;
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(std::move(field));
        rows.push_back(std::move(fields));
    }
    return rows;
}

}  // namespace

std::vector<std::string> emit_plot_data(const std::string& from_dir, const std::string& out_dir) {
    const fs::path src(from_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);
    const fs::path dst(out_dir);

    std::vector<std::string> written;
    const std::vector<std::string> metrics = {"marginal", "conditional", "joint", "bias",
                                              "ess_pct"};
    for (const auto& metric : metrics) {
        const fs::path in_path = src / (metric + ".csv");
        if (!fs::exists(in_path)) {
            throw IoError("missing metric table: " + in_path.string());
        }
        const auto rows = read_csv(in_path);
        std::string content = "setting,design,stage,metric,value,stderr\n";
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& r = rows[i];
            if (r.size() < 5) continue;
            content += csv_escape(r[0]) + "," + r[1] + "," + r[2] + "," + metric + "," + r[3] +
                       "," + r[4] + "\n";
        }
        const fs::path out_path = dst / ("plot_" + metric + ".csv");
        write_file(out_path, content);
        written.push_back(out_path.string());
    }
    return written;
}

}  // namespace rbsb
