// kirchlab: configuration-driven experiment runner for the Kirchhoff
// Dirichlet problem. Each pipeline stage is a subcommand; reports are
// machine-readable (JSON + CSV) and byte-identical across repeated runs.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "kirchlab/acceptance.hpp"
#include "kirchlab/config.hpp"
#include "kirchlab/io.hpp"

namespace kl = kirchlab;

namespace {

struct CliOverrides {
    std::string config_path;
    std::string out_prefix;
    int threads = 0;
    int resolution = 0;
};

void prepare_output(const std::string& prefix) {
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

kl::ExperimentConfig load(const CliOverrides& cli) {
    kl::ExperimentConfig cfg = kl::load_config(cli.config_path);
    if (cli.resolution > 0) {
        if (cli.resolution < 16) throw kl::ConfigError("--resolution must be >= 16");
        cfg.domain.resolution = cli.resolution;
    }
    if (!cli.out_prefix.empty()) cfg.output = cli.out_prefix;
    if (cli.threads > 0) cfg.threads = cli.threads;
    if (cfg.output.empty())
        throw kl::ConfigError("no output prefix: set 'output' in the config or pass --out");
    prepare_output(cfg.output);
    return cfg;
}

kl::GroundState ground_state_for(const kl::Grid& g, const kl::ExperimentConfig& cfg) {
    return kl::compute_ground_state(g, cfg.params.p, cfg.tolerances.groundstate,
                                    cfg.tolerances.cg);
}

double spectral_check(const kl::Grid& g, const kl::ExperimentConfig& cfg) {
    if (cfg.perturbation.kind != kl::PerturbationSpec::Kind::Superlinear)
        return std::numeric_limits<double>::quiet_NaN();
    return kl::validate_spectral(g, cfg.params, cfg.perturbation);
}

nlohmann::json base_report(const kl::ExperimentConfig& cfg) {
    nlohmann::json j;
    j["config"] = kl::config_to_json(cfg);
    return j;
}

int run_groundstate(const kl::ExperimentConfig& cfg) {
    const kl::Grid g = kl::build_domain(cfg.domain);
    const kl::GroundState gs = ground_state_for(g, cfg);
    auto n = kl::norms(g, gs.v, cfg.params.p + 1.0);
    auto j = base_report(cfg);
    j["groundstate"] = {{"p", gs.p},
                        {"S_omega", gs.S_omega},
                        {"S", gs.S},
                        {"grad_norm", gs.grad_norm},
                        {"residual_rel", gs.residual_rel},
                        {"iterations", gs.iterations},
                        {"sup", n.sup},
                        {"l2", n.l2},
                        {"lp1", n.lq}};
    kl::write_json(cfg.output + ".report.json", j);
    kl::write_field_csv(cfg.output + ".csv", g, gs.v);
    return 0;
}

int run_branch(const kl::ExperimentConfig& cfg) {
    const bool needs_gs = !cfg.S_override.has_value();
    std::optional<kl::Grid> g;
    if (needs_gs) g = kl::build_domain(cfg.domain);

    std::vector<kl::KirchhoffParams> cells;
    std::vector<double> sweep_values;
    if (cfg.sweep && cfg.sweep->variable != "t") {
        for (double v : cfg.sweep->values) {
            kl::KirchhoffParams prm = cfg.params;
            kl::PerturbationSpec pert = cfg.perturbation;
            kl::detail::apply_sweep_value(prm, pert, cfg.sweep->variable, v);
            cells.push_back(prm);
            sweep_values.push_back(v);
        }
    } else {
        cells.push_back(cfg.params);
        sweep_values.push_back(std::numeric_limits<double>::quiet_NaN());
    }

    kl::CsvWriter csv(cfg.output + ".csv");
    csv.header({"a", "b", "alpha", "p", "S", "case", "y0", "root1", "root2"});
    auto j = base_report(cfg);
    auto rows = nlohmann::json::array();
    double S_fixed_p = std::numeric_limits<double>::quiet_NaN();
    double last_p = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& prm = cells[i];
        double S;
        if (cfg.S_override) {
            S = *cfg.S_override;
        } else {
            if (prm.p != last_p) {  // ground state depends on p only
                S_fixed_p = kl::compute_ground_state(*g, prm.p, cfg.tolerances.groundstate,
                                                     cfg.tolerances.cg)
                                .S;
                last_p = prm.p;
            }
            S = S_fixed_p;
        }
        const double root_tol = cfg.tolerances.root * std::max(prm.a * S, 1.0);
        auto rep = kl::find_roots(prm, S, root_tol);
        csv.row({kl::fmt17(prm.a), kl::fmt17(prm.b), kl::fmt17(prm.alpha), kl::fmt17(prm.p),
                 kl::fmt17(S), kl::case_name(rep.label),
                 rep.y0 ? kl::fmt17(double(*rep.y0)) : "",
                 rep.roots.size() > 0 ? kl::fmt17(double(rep.roots[0])) : "",
                 rep.roots.size() > 1 ? kl::fmt17(double(rep.roots[1])) : ""});
        nlohmann::json row = {{"a", prm.a},         {"b", prm.b},
                              {"alpha", prm.alpha}, {"p", prm.p},
                              {"S", S},             {"case", kl::case_name(rep.label)},
                              {"predicted", rep.predicted_count}};
        if (rep.y0) row["y0"] = double(*rep.y0);
        auto roots = nlohmann::json::array();
        for (auto y : rep.roots) roots.push_back(double(y));
        row["roots"] = roots;
        if (!std::isnan(sweep_values[i])) row["sweep_value"] = sweep_values[i];
        rows.push_back(std::move(row));
    }
    j["branch"] = rows;
    kl::write_json(cfg.output + ".report.json", j);
    return 0;
}

int run_solve(const kl::ExperimentConfig& cfg) {
    const kl::Grid g = kl::build_domain(cfg.domain);
    spectral_check(g, cfg);
    const kl::GroundState gs = ground_state_for(g, cfg);
    const double root_tol = cfg.tolerances.root * std::max(cfg.params.a * gs.S, 1.0);
    auto rep = kl::find_roots(cfg.params, gs.S, root_tol);

    auto j = base_report(cfg);
    j["S"] = gs.S;
    j["S_omega"] = gs.S_omega;
    j["case"] = kl::case_name(rep.label);
    auto records = nlohmann::json::array();
    kl::CsvWriter csv(cfg.output + ".csv");
    csv.header({"root_index", "beta", "grad_sq", "sup_norm", "residual_rel"});
    for (std::size_t i = 0; i < rep.roots.size(); ++i) {
        auto rec = kl::reconstruct(g, gs, double(rep.roots[i]), cfg.params, int(i));
        records.push_back(kl::record_to_json(rec));
        csv.row({double(i), rec.beta, rec.grad_sq, rec.sup_norm, rec.residual_rel});
        if (cfg.dump_fields)
            kl::write_field_csv(cfg.output + ".field" + std::to_string(i) + ".csv", g, rec.u);
    }
    j["records"] = records;
    kl::write_json(cfg.output + ".report.json", j);
    return 0;
}

int run_continuation(const kl::ExperimentConfig& cfg) {
    const kl::Grid g = kl::build_domain(cfg.domain);
    const double lambda1 = spectral_check(g, cfg);
    const kl::GroundState gs = ground_state_for(g, cfg);

    kl::Field init = gs.v;
    const double scale = std::pow(cfg.params.a, 1.0 / (cfg.params.p - 1.0));
    for (auto& x : init) x *= scale;

    const auto schedule = cfg.t_schedule.empty() ? kl::default_schedule() : cfg.t_schedule;
    auto res = kl::continuation(g, cfg.params, cfg.perturbation, schedule, init,
                                cfg.homotopy_options());

    auto j = base_report(cfg);
    j["completed"] = res.completed;
    if (!res.message.empty()) j["message"] = res.message;
    if (!std::isnan(lambda1)) j["lambda1"] = lambda1;
    auto path = nlohmann::json::array();
    kl::CsvWriter csv(cfg.output + ".csv");
    csv.header({"t", "sup_norm", "grad_sq", "residual_rel", "iterations"});
    for (const auto& rec : res.path) {
        path.push_back(kl::record_to_json(rec));
        csv.row({rec.provenance.t, rec.sup_norm, rec.grad_sq, rec.residual_rel,
                 double(rec.iterations)});
    }
    j["path"] = path;
    kl::write_json(cfg.output + ".report.json", j);
    return res.completed ? 0 : 1;
}

int run_sweep(const kl::ExperimentConfig& cfg) {
    if (!cfg.sweep) throw kl::ConfigError("sweep subcommand needs a 'sweep' config section");
    const kl::Grid g = kl::build_domain(cfg.domain);
    spectral_check(g, cfg);
    const kl::GroundState gs = ground_state_for(g, cfg);

    kl::SweepSpec sweep;
    sweep.variable = cfg.sweep->variable;
    sweep.values = cfg.sweep->values;
    if (!cfg.t_schedule.empty()) sweep.t_schedule = cfg.t_schedule;
    sweep.t_fixed = cfg.t_fixed;
    sweep.branch = cfg.branch;
    sweep.threads = cfg.threads;
    auto rep = kl::bound_sweep(g, gs, cfg.params, cfg.perturbation, sweep,
                               cfg.homotopy_options());

    auto j = base_report(cfg);
    j["variable"] = rep.variable;
    j["sup_min"] = rep.sup_min;
    j["sup_max"] = rep.sup_max;
    j["all_converged"] = rep.all_converged;
    if (!std::isnan(rep.lambda1)) {
        j["lambda1"] = rep.lambda1;
        j["lambda_margin_min"] = rep.lambda_margin_min;
    }
    auto cells = nlohmann::json::array();
    kl::CsvWriter csv(cfg.output + ".csv");
    csv.header({"value", "sup_norm", "grad_sq", "residual_rel", "converged"});
    for (const auto& cell : rep.cells) {
        nlohmann::json c = {{"value", cell.value}, {"converged", cell.converged}};
        if (!cell.record.u.values.empty()) c["record"] = kl::record_to_json(cell.record);
        cells.push_back(std::move(c));
        csv.row({cell.value, cell.record.sup_norm, cell.record.grad_sq,
                 cell.record.residual_rel, cell.converged ? 1.0 : 0.0});
    }
    j["cells"] = cells;
    kl::write_json(cfg.output + ".report.json", j);
    return rep.all_converged ? 0 : 1;
}

int run_oracle(const kl::ExperimentConfig& cfg) {
    if (cfg.domain.shape != kl::DomainShape::Disk)
        throw kl::ConfigError("oracle subcommand needs a disk domain");
    auto sh = kl::shooting_oracle(cfg.params.p, cfg.domain.radius, 1e-12, 8192);
    auto j = base_report(cfg);
    j["oracle"] = {{"S_omega", sh.S_omega},
                   {"S", sh.S},
                   {"grad_norm", sh.grad_norm},
                   {"v0", sh.v0},
                   {"boundary_value", sh.boundary_value},
                   {"bisections", sh.bisections}};
    kl::write_json(cfg.output + ".report.json", j);
    kl::CsvWriter csv(cfg.output + ".csv");
    csv.header({"r", "v"});
    for (std::size_t k = 0; k < sh.r.size(); ++k) csv.row({sh.r[k], sh.v[k]});
    return 0;
}

int run_verify(const CliOverrides& cli) {
    const int threads = cli.threads > 0 ? cli.threads : 2;
    std::vector<int> ids;
    auto results = kl::acceptance::run(ids, threads, std::cout);
    int failures = 0;
    for (auto& r : results)
        if (!r.pass) ++failures;
    std::cout << (failures == 0 ? "ALL CRITERIA PASSED"
                                : std::to_string(failures) + " CRITERIA FAILED")
              << " (" << results.size() << " run)\n";
    if (!cli.out_prefix.empty()) {
        prepare_output(cli.out_prefix);
        nlohmann::json j;
        auto arr = nlohmann::json::array();
        for (auto& r : results)
            arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        j["criteria"] = arr;
        j["failures"] = failures;
        kl::write_json(cli.out_prefix + ".report.json", j);
    }
    return failures == 0 ? 0 : 1;
}

void report_error(const CliOverrides& cli, const std::string& what) {
    std::cerr << "error: " << what << "\n";
    if (cli.out_prefix.empty()) return;
    try {
        prepare_output(cli.out_prefix);
        nlohmann::json j;
        auto errors = nlohmann::json::array();
        std::string cur;
        for (char ch : what) {
            if (ch == '\n') {
                if (!cur.empty()) errors.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) errors.push_back(cur);
        j["errors"] = errors;
        kl::write_json(cli.out_prefix + ".error.json", j);
    } catch (...) {
        // error report is best effort
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kirchlab: a numerical laboratory for the Kirchhoff Dirichlet problem"};
    app.require_subcommand(1);

    CliOverrides cli;
    const std::vector<std::string> names = {"groundstate", "branch",      "solve", "continuation",
                                            "sweep",       "oracle", "verify"};
    const std::vector<std::string> descs = {
        "positive ground state of -lap v = v^p and its constants S(Omega), S",
        "regime classification and branch-equation roots (bifurcation CSV)",
        "reconstruct Kirchhoff solutions from all branch roots",
        "homotopy continuation from t=0 to t=1",
        "parameter sweep with sup-norm bound report",
        "radial shooting reference for disk ground states",
        "run the full acceptance suite"};
    for (std::size_t i = 0; i < names.size(); ++i) {
        auto* sc = app.add_subcommand(names[i], descs[i]);
        auto* opt = sc->add_option("--config", cli.config_path, "experiment config (JSON)");
        if (names[i] != "verify") opt->required();
        sc->add_option("--out", cli.out_prefix, "output path prefix");
        sc->add_option("--threads", cli.threads, "parallel sweep workers");
        sc->add_option("--resolution", cli.resolution, "override domain resolution");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string sub = app.get_subcommands().front()->get_name();

    try {
        if (sub == "verify") return run_verify(cli);
        const kl::ExperimentConfig cfg = load(cli);
        if (sub == "groundstate") return run_groundstate(cfg);
        if (sub == "branch") return run_branch(cfg);
        if (sub == "solve") return run_solve(cfg);
        if (sub == "continuation") return run_continuation(cfg);
        if (sub == "sweep") return run_sweep(cfg);
        if (sub == "oracle") return run_oracle(cfg);
    } catch (const std::exception& e) {
        report_error(cli, e.what());
        return 2;
    }
    return 2;
}
