#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rbsb/errors.hpp"
#include "rbsb/report.hpp"

using namespace rbsb;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

CaseStudyInput start_input() {
    return parse_case_study(std::string(RBSB_SOURCE_DIR) + "/data/start-case-study.json");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig tiny_config(const std::string& out_dir) {
    json j{{"scenarios",
            json::array({json{{"label", "null, with comma"},
                              {"true_effects", {0.0, 0.0, 0.0}},
                              {"sample_sizes", {160, 60, 60}}},
                         json{{"label", "effect"},
                              {"true_effects", {0.5, 0.5, 0.5}},
                              {"sample_sizes", {160, 60, 60}}}})},
           {"programme", {{"borrow_weights", {0.0, 0.5, 0.5}}}},
           {"reps", 400},
           {"seed", 7},
           {"out_dir", out_dir},
           {"formats", {"csv", "json", "markdown"}}};
    return parse_config_json(j);
}

int count_lines(const std::string& content) {
    int n = 0;
    for (char c : content) {
        if (c == '\n') ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("case study and analyze agree") {
    const auto input = start_input();
    const auto cs = run_case_study(input);

    std::vector<StudySummary> summaries;
    std::vector<double> n_own;
    for (const auto& s : input.strata) {
        const auto r = resolve_stratum(s, 4.0);
        summaries.push_back(r.summary);
        n_own.push_back(r.n_own);
    }
    ProgrammeSpec spec;
    spec.num_stages = 3;
    spec.borrow_weights = input.borrow_weights;
    spec.unit_info = input.unit_info;
    spec.threshold = input.threshold;
    spec.direction = input.direction;
    const auto an = run_analyze(summaries, spec, input.ess_method, n_own);

    REQUIRE(cs.stages.size() == an.stages.size());
    for (std::size_t i = 0; i < cs.stages.size(); ++i) {
        CHECK(cs.stages[i].wstar == an.stages[i].wstar);
        CHECK(cs.stages[i].median == an.stages[i].median);
        CHECK(cs.stages[i].ess == an.stages[i].ess);
    }
}

TEST_CASE("START case study reproduces the reference posterior summaries") {
    const auto report = run_case_study(start_input());
    REQUIRE(report.stages.size() == 3);

    const auto& adult = report.stages[0];
    CHECK(adult.median_exp == doctest::Approx(0.54).epsilon(0.01));
    CHECK(adult.cri_lo_exp == doctest::Approx(0.40).epsilon(0.025));
    CHECK(adult.cri_hi_exp == doctest::Approx(0.74).epsilon(0.015));
    CHECK(adult.ess == doctest::Approx(163.0).epsilon(1e-6));
    CHECK(adult.ess_pct == doctest::Approx(0.0061).epsilon(0.05));
    CHECK(adult.se_source == "events");
    CHECK(adult.decision);

    const auto& adolescent = report.stages[1];
    CHECK(adolescent.wstar == doctest::Approx(0.86).epsilon(0.025));
    CHECK(adolescent.median_exp == doctest::Approx(0.55).epsilon(0.02));
    CHECK(adolescent.ess == doctest::Approx(154.2).epsilon(0.001));

    const auto& paediatric = report.stages[2];
    CHECK(paediatric.path_weights[0] == doctest::Approx(0.75).epsilon(0.03));
    CHECK(paediatric.path_weights[1] == doctest::Approx(0.13).epsilon(0.05));
    CHECK(paediatric.path_weights[2] == doctest::Approx(0.12).epsilon(0.02));
    CHECK(paediatric.median_exp == doctest::Approx(0.57).epsilon(0.01));
    CHECK(paediatric.ess == doctest::Approx(217.9).epsilon(0.001));
}

TEST_CASE("single-stratum case study equals the standalone analysis") {
    CaseStudyInput input;
    CaseStudyStratum s;
    s.label = "only";
    s.log_effect = -0.62;
    s.events = 162.0;
    input.strata = {s};
    input.borrow_weights = {0.0};
    const auto report = run_case_study(input);
    REQUIRE(report.stages.size() == 1);
    REQUIRE(report.stages[0].posterior.size() == 1);
    const auto pooled = pool(input.unit_info,
                             {StudySummary(-0.62, std::sqrt(4.0 / 162.0))});
    CHECK(report.stages[0].posterior.components()[0].pooled.mean ==
          doctest::Approx(pooled.mean).epsilon(1e-14));
}

TEST_CASE("no borrowing reproduces standalone at every stage") {
    ProgrammeSpec spec;
    spec.num_stages = 4;
    spec.borrow_weights = {0.0, 0.0, 0.0, 0.0};
    spec.unit_info = StudySummary(0.0, 2.0, "unit-info");
    std::vector<StudySummary> summaries{
        {0.3, 0.2}, {0.1, 0.3}, {-0.2, 0.25}, {0.4, 0.15}};
    const auto report = run_analyze(summaries, spec);
    for (std::size_t i = 0; i < summaries.size(); ++i) {
        const auto& stage = report.stages[i];
        CHECK(stage.wstar == 0.0);
        const auto expected = pool(spec.unit_info, {summaries[i]});
        // the singleton path carries all the weight
        const auto& comps = stage.posterior.components();
        CHECK(comps.back().weight == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(comps.back().pooled.mean == doctest::Approx(expected.mean).epsilon(1e-12));
        for (std::size_t c = 0; c + 1 < comps.size(); ++c) {
            CHECK(comps[c].weight <= 1e-12);
        }
    }
}

TEST_CASE("concordant data raise the posterior weight above its prior") {
    ProgrammeSpec spec;
    spec.num_stages = 2;
    spec.borrow_weights = {0.0, 0.5};
    spec.unit_info = StudySummary(0.0, 2.0, "unit-info");
    const auto report = run_analyze({{0.5, 0.1}, {0.5, 0.1}}, spec);
    CHECK(report.stages[1].wstar > 0.5);
}

TEST_CASE("markdown mirrors the JSON report at printed precision") {
    const auto report = run_case_study(start_input());
    const std::string md = report_to_markdown(report);
    const json js = report_to_json(report);

    // markdown rows: | label | median (lo, hi) | ess | ess% | w* |
    std::istringstream lines(md);
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);  // header + separator
    for (const auto& stage : js.at("stages")) {
        REQUIRE(std::getline(lines, line));
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%.2f (%.2f, %.2f)",
                      stage.at("median_exp").get<double>(),
                      stage.at("cri_exp")[0].get<double>(),
                      stage.at("cri_exp")[1].get<double>());
        CHECK(line.find(buf) != std::string::npos);
        std::snprintf(buf, sizeof(buf), "| %.0f |", stage.at("ess").get<double>());
        CHECK(line.find(buf) != std::string::npos);
    }
}

TEST_CASE("simulate writes deterministic tables and a manifest") {
    const fs::path dir = fs::temp_directory_path() / "rbsb_report_test";
    fs::remove_all(dir);
    const RunConfig config = tiny_config((dir / "run1").string());
    const auto out = run_simulate(config);
    REQUIRE(out.reports.size() == 2);

    SUBCASE("expected files exist with the right schema") {
        CHECK(fs::exists(dir / "run1" / "marginal.csv"));
        CHECK(fs::exists(dir / "run1" / "conditional.csv"));
        CHECK(fs::exists(dir / "run1" / "joint.csv"));
        CHECK(fs::exists(dir / "run1" / "bias.csv"));
        CHECK(fs::exists(dir / "run1" / "ess_pct.csv"));
        CHECK(fs::exists(dir / "run1" / "manifest.json"));
        CHECK(fs::exists(dir / "run1" / "report.json"));
        CHECK(fs::exists(dir / "run1" / "tables.md"));

        const std::string marginal = slurp(dir / "run1" / "marginal.csv");
        CHECK(marginal.rfind("setting,design,stage,value,mc_stderr\n", 0) == 0);
        // header + settings x designs x stages rows
        CHECK(count_lines(marginal) == 1 + 2 * 4 * 3);
        // RFC 4180: the label with a comma must be quoted
        CHECK(marginal.find("\"null, with comma\"") != std::string::npos);

        const std::string cond = slurp(dir / "run1" / "conditional.csv");
        CHECK(cond.rfind("setting,design,stage,value,mc_stderr,n_conditioning,low_conditioning\n",
                         0) == 0);
        CHECK(cond.find(",NA,NA,0,") != std::string::npos);
    }

    SUBCASE("identical config and seed reproduce byte-identical CSVs") {
        RunConfig config2 = tiny_config((dir / "run2").string());
        run_simulate(config2);
        for (const char* name :
             {"marginal.csv", "conditional.csv", "joint.csv", "bias.csv", "ess_pct.csv",
              "report.json", "tables.md"}) {
            CHECK(slurp(dir / "run1" / name) == slurp(dir / "run2" / name));
        }
    }

    SUBCASE("worker count does not change the bytes") {
        RunConfig config8 = tiny_config((dir / "run8").string());
        config8.workers = 8;
        run_simulate(config8);
        CHECK(slurp(dir / "run1" / "marginal.csv") == slurp(dir / "run8" / "marginal.csv"));
        CHECK(slurp(dir / "run1" / "ess_pct.csv") == slurp(dir / "run8" / "ess_pct.csv"));
    }

    SUBCASE("the manifest alone reproduces the outputs") {
        const json manifest = json::parse(slurp(dir / "run1" / "manifest.json"));
        CHECK(manifest.contains("config_hash"));
        CHECK(manifest.at("seed") == 7);
        CHECK(manifest.at("reps") == 400);
        RunConfig rerun = parse_config_json(manifest.at("config"));
        rerun.out_dir = (dir / "rerun").string();
        run_simulate(rerun);
        CHECK(slurp(dir / "run1" / "marginal.csv") == slurp(dir / "rerun" / "marginal.csv"));
        CHECK(slurp(dir / "run1" / "conditional.csv") ==
              slurp(dir / "rerun" / "conditional.csv"));
    }

    SUBCASE("plot files reshape the tables without changing values") {
        const auto files = emit_plot_data((dir / "run1").string(), (dir / "plots").string());
        CHECK(files.size() == 5);
        const std::string plot = slurp(dir / "plots" / "plot_marginal.csv");
        CHECK(plot.rfind("setting,design,stage,metric,value,stderr\n", 0) == 0);
        CHECK(count_lines(plot) == 1 + 2 * 4 * 3);
        // spot check: every value string in the table CSV appears in the plot file
        const std::string table = slurp(dir / "run1" / "marginal.csv");
        std::istringstream rows(table);
        std::string row;
        std::getline(rows, row);
        std::getline(rows, row);
        const auto last_comma = row.find_last_of(',');
        const auto prev_comma = row.find_last_of(',', last_comma - 1);
        const std::string value = row.substr(prev_comma + 1, last_comma - prev_comma - 1);
        CHECK(plot.find("," + value + ",") != std::string::npos);
        const std::string cond_plot = slurp(dir / "plots" / "plot_conditional.csv");
        CHECK(cond_plot.find(",NA,NA") != std::string::npos);
    }

    fs::remove_all(dir);
}

TEST_CASE("unwritable output directory raises an I/O error") {
    const fs::path dir = fs::temp_directory_path() / "rbsb_blocker";
    fs::remove_all(dir);
    {
        std::ofstream blocker(dir);
        blocker << "not a directory";
    }
    RunConfig config = tiny_config((dir / "sub").string());
    CHECK_THROWS_AS(run_simulate(config), IoError);
    fs::remove_all(dir);
}

TEST_CASE("csv helpers") {
    CHECK(format_csv_number(0.02595919) == "0.0259592");
    CHECK(format_csv_number(163.0) == "163");
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("analyze rejects oversupplied summaries") {
    ProgrammeSpec spec;
    spec.num_stages = 1;
    spec.borrow_weights = {0.0};
    spec.unit_info = StudySummary(0.0, 2.0, "unit-info");
    CHECK_THROWS_AS(run_analyze({{0.1, 0.2}, {0.1, 0.2}}, spec), ConfigError);
    CHECK_THROWS_AS(run_analyze({}, spec), ConfigError);
}
