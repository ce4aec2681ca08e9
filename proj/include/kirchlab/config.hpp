#pragma once

// Experiment configuration: a single JSON tree, decimal numerics only.
// Parsing collects every violation so a bad config reports all of its
// problems (with the hypothesis named) in one pass.

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kirchlab/grid.hpp"
#include "kirchlab/kirchhoff.hpp"

namespace kirchlab {

struct Tolerances {
    double cg = 1e-10;
    double groundstate = 1e-9;
    double root = 1e-11;  // scaled by max(aS, 1) where roots are found
    double fixed_point = 1e-11;
};

struct SweepConfig {
    std::string variable;
    std::vector<double> values;
};

struct ExperimentConfig {
    DomainSpec domain;
    KirchhoffParams params;
    PerturbationSpec perturbation;
    Tolerances tolerances;
    std::optional<double> S_override;  // skip the ground-state solve in `branch`
    std::optional<SweepConfig> sweep;
    std::vector<double> t_schedule;  // empty -> default 0:0.1:1
    std::optional<double> t_fixed;
    std::string branch = "upper";
    bool dump_fields = false;  // per-record CSV grids next to the report
    std::string output;        // report path prefix
    int threads = 1;

    HomotopyOptions homotopy_options() const {
        HomotopyOptions o;
        o.tol = tolerances.fixed_point;
        o.cg_tol = tolerances.cg;
        return o;
    }
};

namespace detail {

inline const char* kSweepVars[] = {"a", "b", "alpha", "p", "mu", "lambda", "q", "q1", "t"};

inline bool known_sweep_var(const std::string& v) {
    for (auto* s : kSweepVars)
        if (v == s) return true;
    return false;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    std::vector<std::string> errs;
    auto fail = [&](const std::string& m) { errs.push_back(m); };

    try {
        if (!j.contains("domain")) {
            fail("missing 'domain'");
        } else {
            const auto& d = j.at("domain");
            const std::string shape = d.value("shape", "rectangle");
            if (shape == "rectangle") {
                cfg.domain.shape = DomainShape::Rectangle;
                cfg.domain.width = d.value("width", 1.0);
                cfg.domain.height = d.value("height", 1.0);
                if (cfg.domain.width <= 0 || cfg.domain.height <= 0)
                    fail("domain: width and height must be > 0");
            } else if (shape == "disk") {
                cfg.domain.shape = DomainShape::Disk;
                cfg.domain.radius = d.value("radius", 1.0);
                if (cfg.domain.radius <= 0) fail("domain: radius must be > 0");
            } else {
                fail("domain: shape must be 'rectangle' or 'disk'");
            }
            cfg.domain.resolution = d.value("resolution", 64);
            if (cfg.domain.resolution < 16) fail("domain: resolution must be >= 16");
        }

        if (!j.contains("params")) {
            fail("missing 'params'");
        } else {
            const auto& p = j.at("params");
            cfg.params.a = p.value("a", 1.0);
            cfg.params.b = p.value("b", 0.0);
            cfg.params.alpha = p.value("alpha", 1.0);
            cfg.params.p = p.value("p", 2.0);
            if (!(cfg.params.a > 0)) fail("params: a must be > 0");
            if (!(cfg.params.b >= 0)) fail("params: b must be >= 0");
            if (!(cfg.params.alpha > 0)) fail("params: alpha must be > 0");
            if (!(cfg.params.p > 0)) fail("params: p must be > 0");
            if (std::abs(cfg.params.p - 1.0) < kExponentGap)
                fail("params: |p - 1| must be >= " + std::to_string(kExponentGap) +
                     " (p = 1 is excluded)");
            if (cfg.params.p > kExponentCap)
                fail("params: p exceeds the supported cap " + std::to_string(kExponentCap));
        }

        if (j.contains("perturbation")) {
            const auto& q = j.at("perturbation");
            const std::string kind = q.value("kind", "none");
            if (kind == "none") {
                cfg.perturbation = PerturbationSpec::none();
            } else if (kind == "sublinear") {
                cfg.perturbation = PerturbationSpec::sublinear(
                    q.value("mu", 0.0), q.value("q", 0.0), q.value("q1", 0.0));
            } else if (kind == "superlinear") {
                cfg.perturbation = PerturbationSpec::superlinear(q.value("lambda", 0.0),
                                                                 q.value("q", 0.0));
            } else {
                fail("perturbation: kind must be 'none', 'sublinear' or 'superlinear'");
            }
            for (auto& v : cfg.perturbation.violations(cfg.params.p)) fail(v);
        }

        if (j.contains("tolerances")) {
            const auto& t = j.at("tolerances");
            cfg.tolerances.cg = t.value("cg", cfg.tolerances.cg);
            cfg.tolerances.groundstate = t.value("groundstate", cfg.tolerances.groundstate);
            cfg.tolerances.root = t.value("root", cfg.tolerances.root);
            cfg.tolerances.fixed_point = t.value("fixed_point", cfg.tolerances.fixed_point);
            for (double v : {cfg.tolerances.cg, cfg.tolerances.groundstate, cfg.tolerances.root,
                             cfg.tolerances.fixed_point})
                if (!(v > 0)) {
                    fail("tolerances: all values must be > 0");
                    break;
                }
        }

        if (j.contains("S")) {
            cfg.S_override = j.at("S").get<double>();
            if (!(*cfg.S_override > 0)) fail("S override must be > 0");
        }

        if (j.contains("sweep")) {
            SweepConfig s;
            s.variable = j.at("sweep").value("variable", "");
            if (!detail::known_sweep_var(s.variable))
                fail("sweep: variable '" + s.variable + "' does not name a config field");
            if (j.at("sweep").contains("values"))
                s.values = j.at("sweep").at("values").get<std::vector<double>>();
            if (s.values.empty()) fail("sweep: values must be a non-empty list");
            cfg.sweep = std::move(s);
        }

        if (j.contains("t_schedule")) {
            cfg.t_schedule = j.at("t_schedule").get<std::vector<double>>();
            try {
                validate_schedule(cfg.t_schedule);
            } catch (const ConfigError& e) {
                fail(e.what());
            }
        }

        if (j.contains("t_fixed")) {
            cfg.t_fixed = j.at("t_fixed").get<double>();
            if (!(*cfg.t_fixed > 0 && *cfg.t_fixed <= 1)) fail("t_fixed must lie in (0, 1]");
        }

        cfg.branch = j.value("branch", std::string("upper"));
        if (cfg.branch != "upper" && cfg.branch != "lower")
            fail("branch must be 'upper' or 'lower'");
        cfg.dump_fields = j.value("dump_fields", false);

        cfg.output = j.value("output", std::string(""));
        cfg.threads = j.value("threads", 1);
        if (cfg.threads < 1) fail("threads must be >= 1");
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("malformed config: ") + e.what());
    }

    if (!errs.empty()) {
        std::string msg = "config validation failed:";
        for (auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/// Resolved config, embedded verbatim into every report for provenance.
inline nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    if (cfg.domain.shape == DomainShape::Rectangle)
        j["domain"] = {{"shape", "rectangle"},
                       {"width", cfg.domain.width},
                       {"height", cfg.domain.height},
                       {"resolution", cfg.domain.resolution}};
    else
        j["domain"] = {{"shape", "disk"},
                       {"radius", cfg.domain.radius},
                       {"resolution", cfg.domain.resolution}};
    j["params"] = {{"a", cfg.params.a},
                   {"b", cfg.params.b},
                   {"alpha", cfg.params.alpha},
                   {"p", cfg.params.p},
                   {"gamma", cfg.params.gamma()}};
    switch (cfg.perturbation.kind) {
        case PerturbationSpec::Kind::None:
            j["perturbation"] = {{"kind", "none"}};
            break;
        case PerturbationSpec::Kind::Sublinear:
            j["perturbation"] = {{"kind", "sublinear"},
                                 {"mu", cfg.perturbation.mu},
                                 {"q", cfg.perturbation.q},
                                 {"q1", cfg.perturbation.q1}};
            break;
        case PerturbationSpec::Kind::Superlinear:
            j["perturbation"] = {{"kind", "superlinear"},
                                 {"lambda", cfg.perturbation.lambda},
                                 {"q", cfg.perturbation.q}};
            break;
    }
    j["tolerances"] = {{"cg", cfg.tolerances.cg},
                       {"groundstate", cfg.tolerances.groundstate},
                       {"root", cfg.tolerances.root},
                       {"fixed_point", cfg.tolerances.fixed_point}};
    if (cfg.S_override) j["S"] = *cfg.S_override;
    if (cfg.sweep) j["sweep"] = {{"variable", cfg.sweep->variable}, {"values", cfg.sweep->values}};
    if (!cfg.t_schedule.empty()) j["t_schedule"] = cfg.t_schedule;
    if (cfg.t_fixed) j["t_fixed"] = *cfg.t_fixed;
    j["branch"] = cfg.branch;
    j["dump_fields"] = cfg.dump_fields;
    j["output"] = cfg.output;
    j["threads"] = cfg.threads;
    return j;
}

} // namespace kirchlab
