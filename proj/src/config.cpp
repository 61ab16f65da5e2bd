#include "rbsb/config.hpp"

#include <cmath>
#include <fstream>

#include "rbsb/errors.hpp"

namespace rbsb {

using nlohmann::json;

namespace {

constexpr double kZ975 = 1.959963984540054;

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw ConfigError(where + ": unknown key '" + key + "'");
        }
    }
}

double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

StudySummary parse_unit_info(const json& j, const std::string& where) {
    reject_unknown_keys(j, {"mean", "sd"}, where);
    const double mean = require_number(j, "mean", where);
    const double sd = require_number(j, "sd", where);
    if (!(sd > 0.0)) throw ConfigError(where + ": sd must be positive");
    return StudySummary(mean, sd, "unit-info");
}

Direction parse_direction(const std::string& s, const std::string& where) {
    if (s == "higher_is_better") return Direction::higher_is_better;
    if (s == "lower_is_better") return Direction::lower_is_better;
    throw ConfigError(where + ": direction must be higher_is_better or lower_is_better");
}

std::string direction_to_string(Direction d) {
    return d == Direction::higher_is_better ? "higher_is_better" : "lower_is_better";
}

ProgrammeSpec parse_programme(const json& j) {
    reject_unknown_keys(j, {"num_stages", "borrow_weights", "unit_info", "threshold", "direction"},
                        "programme");
    ProgrammeSpec spec = default_programme();
    if (j.contains("num_stages")) {
        if (!j.at("num_stages").is_number_integer() || j.at("num_stages").get<int>() < 1) {
            throw ConfigError("programme: num_stages must be a positive integer");
        }
        spec.num_stages = j.at("num_stages").get<int>();
        spec.borrow_weights.assign(static_cast<std::size_t>(spec.num_stages), 0.5);
        spec.borrow_weights[0] = 0.0;
    }
    if (j.contains("borrow_weights")) {
        if (!j.at("borrow_weights").is_array()) {
            throw ConfigError("programme: borrow_weights must be an array");
        }
        spec.borrow_weights = j.at("borrow_weights").get<std::vector<double>>();
        if (!j.contains("num_stages")) {
            spec.num_stages = static_cast<int>(spec.borrow_weights.size());
        }
    }
    if (j.contains("unit_info")) {
        spec.unit_info = parse_unit_info(j.at("unit_info"), "programme.unit_info");
    }
    if (j.contains("threshold")) {
        spec.threshold = require_number(j, "threshold", "programme");
    }
    if (j.contains("direction")) {
        spec.direction = parse_direction(j.at("direction").get<std::string>(), "programme");
    }
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("programme: ") + e.what());
    }
    return spec;
}

ScenarioSpec parse_scenario(const json& j, int index, const ProgrammeSpec& programme) {
    const std::string where = "scenarios[" + std::to_string(index) + "]";
    reject_unknown_keys(j, {"label", "true_effects", "sample_sizes", "sigma", "delta"}, where);
    ScenarioSpec s;
    s.label = j.value("label", "scenario-" + std::to_string(index + 1));
    if (!j.contains("true_effects") || !j.at("true_effects").is_array()) {
        throw ConfigError(where + ": missing array field 'true_effects'");
    }
    s.true_effects = j.at("true_effects").get<std::vector<double>>();
    if (j.contains("sample_sizes")) {
        if (!j.at("sample_sizes").is_array()) {
            throw ConfigError(where + ": sample_sizes must be an array");
        }
        s.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
    } else {
        s.sample_sizes.assign(s.true_effects.size(), 60);
        if (!s.sample_sizes.empty()) s.sample_sizes[0] = 160;
    }
    s.sigma = j.value("sigma", 2.0);
    s.delta = j.value("delta", 0.5);
    s.validate(programme);
    return s;
}

json scenario_to_json(const ScenarioSpec& s) {
    return json{{"label", s.label},
                {"true_effects", s.true_effects},
                {"sample_sizes", s.sample_sizes},
                {"sigma", s.sigma},
                {"delta", s.delta}};
}

}  // namespace

ProgrammeSpec default_programme() {
    ProgrammeSpec spec;
    spec.num_stages = 5;
    spec.borrow_weights = {0.0, 0.5, 0.5, 0.5, 0.5};
    spec.unit_info = StudySummary(0.0, 2.0, "unit-info");
    spec.threshold = 0.975;
    spec.direction = Direction::higher_is_better;
    return spec;
}

ProgrammeSpec parse_programme_json(const nlohmann::json& j) {
    return parse_programme(j);
}

void RunConfig::validate() const {
    try {
        programme.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("programme: ") + e.what());
    }
    if (scenarios.empty()) throw ConfigError("config: at least one scenario is required");
    if (designs.empty()) throw ConfigError("config: at least one design is required");
    if (formats.empty()) throw ConfigError("config: at least one output format is required");
    for (const auto& f : formats) {
        if (f != "csv" && f != "markdown" && f != "json") {
            throw ConfigError("config: unknown output format '" + f + "'");
        }
    }
    if (reps < 1) throw ConfigError("config: reps must be >= 1");
    if (workers < 0) throw ConfigError("config: workers must be >= 0");
    if (conditional_start < 1 || conditional_start > programme.num_stages) {
        throw ConfigError("config: conditional_start out of range");
    }
    for (const auto& s : scenarios) s.validate(programme);
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config_json(j);
}

RunConfig parse_config_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown_keys(j,
                        {"scenarios", "programme", "designs", "reps", "seed", "out_dir", "formats",
                         "ess_method", "workers", "conditional_start"},
                        "config");
    RunConfig config;
    config.programme = j.contains("programme") ? parse_programme(j.at("programme"))
                                               : default_programme();
    if (!j.contains("scenarios") || !j.at("scenarios").is_array()) {
        throw ConfigError("config: missing array field 'scenarios'");
    }
    int idx = 0;
    for (const auto& sj : j.at("scenarios")) {
        config.scenarios.push_back(parse_scenario(sj, idx++, config.programme));
    }
    if (j.contains("designs")) {
        if (!j.at("designs").is_array()) throw ConfigError("config: designs must be an array");
        for (const auto& dj : j.at("designs")) {
            try {
                config.designs.push_back(design_from_string(dj.get<std::string>()));
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
        }
    } else {
        config.designs = {DesignKind::standalone, DesignKind::full_pooling, DesignKind::adjacent,
                          DesignKind::rbsb};
    }
    if (j.contains("reps")) {
        if (!j.at("reps").is_number_integer()) throw ConfigError("config: reps must be an integer");
        config.reps = j.at("reps").get<long>();
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
            throw ConfigError("config: seed must be an integer");
        }
        config.seed = j.at("seed").get<std::uint64_t>();
    }
    config.out_dir = j.value("out_dir", config.out_dir);
    if (j.contains("formats")) {
        config.formats.clear();
        for (const auto& f : j.at("formats")) config.formats.insert(f.get<std::string>());
    }
    if (j.contains("ess_method")) {
        try {
            config.ess_method = ess_method_from_string(j.at("ess_method").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
    }
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_integer()) {
            throw ConfigError("config: workers must be an integer");
        }
        config.workers = j.at("workers").get<int>();
    }
    config.conditional_start = j.value("conditional_start", 1);
    config.validate();
    return config;
}

nlohmann::json to_json(const RunConfig& config) {
    json scenarios = json::array();
    for (const auto& s : config.scenarios) scenarios.push_back(scenario_to_json(s));
    json designs = json::array();
    for (const auto& d : config.designs) designs.push_back(to_string(d));
    return json{
        {"scenarios", scenarios},
        {"programme",
         {{"num_stages", config.programme.num_stages},
          {"borrow_weights", config.programme.borrow_weights},
          {"unit_info",
           {{"mean", config.programme.unit_info.mean_hat},
            {"sd", config.programme.unit_info.se_hat}}},
          {"threshold", config.programme.threshold},
          {"direction", direction_to_string(config.programme.direction)}}},
        {"designs", designs},
        {"reps", config.reps},
        {"seed", config.seed},
        {"out_dir", config.out_dir},
        {"formats", std::vector<std::string>(config.formats.begin(), config.formats.end())},
        {"ess_method", to_string(config.ess_method)},
        {"workers", config.workers},
        {"conditional_start", config.conditional_start}};
}

ResolvedStratum resolve_stratum(const CaseStudyStratum& stratum, double unit_variance) {
    ResolvedStratum out;
    double se = 0.0;
    if (stratum.se) {
        se = *stratum.se;
        if (!(se > 0.0)) throw ConfigError("stratum '" + stratum.label + "': se must be positive");
        out.se_source = "explicit";
    } else if (stratum.ci) {
        const auto [lo, hi] = *stratum.ci;
        if (!(lo < stratum.log_effect && stratum.log_effect < hi)) {
            throw ConfigError("stratum '" + stratum.label + "': CI does not bracket the estimate");
        }
        se = (hi - lo) / (2.0 * kZ975);
        out.se_source = "ci";
    } else if (stratum.events) {
        if (!(*stratum.events > 0.0)) {
            throw ConfigError("stratum '" + stratum.label + "': events must be positive");
        }
        se = std::sqrt(unit_variance / *stratum.events);
        out.se_source = "events";
    } else {
        throw ConfigError("stratum '" + stratum.label + "': one of se, ci, events is required");
    }
    out.summary = StudySummary(stratum.log_effect, se, stratum.label);
    if (stratum.n_own) {
        out.n_own = *stratum.n_own;
    } else if (stratum.events) {
        out.n_own = *stratum.events;
    } else {
        out.n_own = unit_variance / (se * se);
    }
    return out;
}

CaseStudyInput parse_case_study(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open case-study file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("case-study '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_case_study_json(j);
}

CaseStudyInput parse_case_study_json(const json& j) {
    if (!j.is_object()) throw ConfigError("case-study: top level must be a JSON object");
    reject_unknown_keys(
        j, {"strata", "unit_info", "borrow_weights", "threshold", "direction", "ess_method"},
        "case-study");
    CaseStudyInput input;
    if (!j.contains("strata") || !j.at("strata").is_array() || j.at("strata").empty()) {
        throw ConfigError("case-study: at least one stratum is required");
    }
    int idx = 0;
    for (const auto& sj : j.at("strata")) {
        const std::string where = "strata[" + std::to_string(idx++) + "]";
        reject_unknown_keys(sj, {"label", "log_effect", "se", "ci", "events", "n_own"}, where);
        CaseStudyStratum s;
        s.label = sj.value("label", where);
        s.log_effect = require_number(sj, "log_effect", where);
        if (sj.contains("se")) s.se = sj.at("se").get<double>();
        if (sj.contains("ci")) {
            const auto ci = sj.at("ci").get<std::vector<double>>();
            if (ci.size() != 2) throw ConfigError(where + ": ci must be [lower, upper]");
            s.ci = std::make_pair(ci[0], ci[1]);
        }
        if (sj.contains("events")) s.events = sj.at("events").get<double>();
        if (sj.contains("n_own")) s.n_own = sj.at("n_own").get<double>();
        input.strata.push_back(std::move(s));
    }
    if (j.contains("unit_info")) {
        input.unit_info = parse_unit_info(j.at("unit_info"), "case-study.unit_info");
    }
    if (j.contains("borrow_weights")) {
        input.borrow_weights = j.at("borrow_weights").get<std::vector<double>>();
    } else {
        input.borrow_weights.assign(input.strata.size(), 0.5);
        input.borrow_weights[0] = 0.0;
    }
    if (input.borrow_weights.size() != input.strata.size()) {
        throw ConfigError("case-study: borrow_weights length must match strata count");
    }
    input.threshold = j.value("threshold", 0.975);
    if (j.contains("direction")) {
        input.direction = parse_direction(j.at("direction").get<std::string>(), "case-study");
    }
    if (j.contains("ess_method")) {
        try {
            input.ess_method = ess_method_from_string(j.at("ess_method").get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("case-study: ") + e.what());
        }
    }
    return input;
}

}  // namespace rbsb
