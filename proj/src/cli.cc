// Copyright 2026 The qoed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qoed/cli.h"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "qoed/parallel.h"
#include "qoed/sweep.h"

namespace qoed {

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

double parse_number(const std::string &s, const std::string &what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw ContractError(what + ": '" + s + "' is not a finite number");
    }
}

std::uint64_t parse_count(const std::string &s, const std::string &what) {
    const double v = parse_number(s, what);
    if (v < 0 || v != std::floor(v)) {
        throw ContractError(what + ": '" + s + "' is not a non-negative integer");
    }
    return static_cast<std::uint64_t>(v);
}

std::vector<double> parse_list(const std::string &s, const std::string &what) {
    std::vector<double> out;
    for (const auto &part : split(s, ',')) {
        out.push_back(parse_number(part, what));
    }
    return out;
}

std::pair<double, double> parse_pair(const std::string &s, const std::string &what) {
    const auto v = parse_list(s, what);
    if (v.size() != 2) {
        throw ContractError(what + " expects F,G");
    }
    return {v[0], v[1]};
}

double finite(const Json &j, const std::string &key) {
    if (!j.is_number()) {
        throw ContractError("config key '" + key + "' must be a number");
    }
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
        throw ContractError("config key '" + key + "' must be finite");
    }
    return v;
}

Json grid_to_json(const GridSpec &g) {
    return Json{{"f_min", g.f_min}, {"f_max", g.f_max}, {"nf", g.nf},
                {"g_min", g.g_min}, {"g_max", g.g_max}, {"ng", g.ng}};
}

GridSpec grid_from_json(const Json &j) {
    if (j.is_string()) {
        return parse_grid(j.get<std::string>());
    }
    GridSpec g;
    g.f_min = finite(j.at("f_min"), "grid.f_min");
    g.f_max = finite(j.at("f_max"), "grid.f_max");
    g.nf = j.at("nf").get<std::size_t>();
    g.g_min = finite(j.at("g_min"), "grid.g_min");
    g.g_max = finite(j.at("g_max"), "grid.g_max");
    g.ng = j.at("ng").get<std::size_t>();
    g.validate();
    return g;
}

void validate(const RunConfig &c) {
    for (double v : {c.theta_f, c.theta_g, c.truth_f, c.truth_g, c.delta_omega, c.gate_error_prep,
                     c.gate_error_meas}) {
        if (!std::isfinite(v)) {
            throw ContractError("config: numeric fields must be finite");
        }
    }
    if (c.times.empty()) {
        throw ContractError("config: times must be non-empty");
    }
    for (double t : c.times) {
        if (!std::isfinite(t) || t < 0) {
            throw ContractError("config: times must be finite and non-negative");
        }
    }
    if (c.n < 1) {
        throw ContractError("config: n must be >= 1");
    }
    if (c.grid) {
        c.grid->validate();
    }
}

class Runner {
   public:
    Runner(RunConfig cfg, std::ostream &out) : cfg_(std::move(cfg)), out_(out) {
        std::filesystem::create_directories(cfg_.out);
        preamble_ = std::string(kArtifactVersion) + " config " + cfg_.hash();
    }

    int menu_cmd() {
        const ExperimentMenu menu = load_menu();
        Json j = stamped(menu_to_json(menu));
        write_json("menu.json", j);
        out_ << menu.size() << "\n";
        return kExitOk;
    }

    int fisher_cmd() {
        const ExperimentMenu menu = load_menu();
        const auto fishers = menu_fishers(menu, cfg_.guess());
        std::ostringstream os;
        write_fisher_csv(os, fishers, preamble_);
        write_text_file(path("fisher.csv"), os.str());
        out_ << "fisher matrices: " << fishers.size() << "\n";
        return kExitOk;
    }

    int design_cmd() {
        const ExperimentMenu menu = load_menu();
        const auto fishers = menu_fishers(menu, cfg_.guess());
        const DesignResult r = optimize_a_design(fishers, cfg_.solver);
        write_json("design.json", stamped(design_to_json(r, cfg_.solver)));
        out_ << "objective " << format_double(r.objective) << "\n";
        out_ << "gap " << format_double(r.equivalence_gap) << "\n";
        out_ << "converged " << (r.converged ? "true" : "false") << " after " << r.iterations << " iterations\n";
        out_ << "support";
        for (const auto &sp : r.merged_support) {
            out_ << " " << sp.id << ":" << format_double(sp.weight);
        }
        out_ << "\n";
        return kExitOk;
    }

    int simulate_cmd() {
        const ExperimentMenu menu = load_menu();
        const DesignFile design = load_design();
        const OutcomeDataset data =
            sample_dataset(menu, design.weights(menu.size()), cfg_.truth(), cfg_.n, cfg_.seed);
        write_json("dataset.json", stamped(dataset_to_json(data)));
        out_ << "total_n " << data.total_n << " over " << data.entries.size() << " experiments\n";
        return kExitOk;
    }

    int estimate_cmd() {
        const ExperimentMenu menu = load_menu();
        const OutcomeDataset data = load_dataset();
        const GridSpec grid = cfg_.grid ? *cfg_.grid : default_grid(menu, data);
        const LikelihoodSurface s = mle_grid(data, menu, grid, cfg_.guess());
        if (!std::isfinite(s.max_loglik)) {
            throw NotEstimableError("likelihood vanishes on the whole grid");
        }
        const ModelParams est = mle_refine(data, menu, cfg_.guess().with_fg(s.argmax_f, s.argmax_g));
        std::ostringstream os;
        write_surface_csv(os, s, preamble_);
        write_text_file(path("surface.csv"), os.str());
        Json j{{"grid_argmax", Json{{"f", s.argmax_f}, {"g", s.argmax_g}, {"loglik", s.max_loglik}}},
               {"estimate", params_to_json(est)},
               {"loglik", log_likelihood(data, menu, est)},
               {"grid", grid_to_json(grid)}};
        write_json("estimate.json", stamped(j));
        out_ << "estimate F " << format_double(est.f) << " G " << format_double(est.g) << "\n";
        return kExitOk;
    }

    int adapt_cmd() {
        const ExperimentMenu menu = load_menu();
        AdaptiveOptions opts;
        opts.solver = cfg_.solver;
        if (cfg_.grid) {
            opts.grid_nf = cfg_.grid->nf;
            opts.grid_ng = cfg_.grid->ng;
        }
        const auto trace = adaptive_loop(menu, cfg_.guess(), cfg_.truth(), cfg_.rounds, cfg_.n, cfg_.seed, opts);
        Json rounds = Json::array();
        for (const auto &r : trace) {
            Json support = Json::array();
            for (const auto &sp : r.design.merged_support) {
                support.push_back(Json{{"id", sp.id}, {"weight", sp.weight}});
            }
            rounds.push_back(Json{{"round", r.round},
                                  {"guess", params_to_json(r.guess)},
                                  {"objective", r.design.objective},
                                  {"gap", r.design.equivalence_gap},
                                  {"support", support},
                                  {"dataset", dataset_to_json(r.data)},
                                  {"estimate", params_to_json(r.estimate)}});
            out_ << "round " << r.round << " estimate F " << format_double(r.estimate.f) << " G "
                 << format_double(r.estimate.g) << "\n";
        }
        write_json("adapt.json", stamped(Json{{"rounds", rounds}}));
        return kExitOk;
    }

    int sweep_estimability_cmd() {
        const ExperimentMenu menu = load_menu();
        SolverOptions opts = cfg_.solver;
        if (!solver_overridden_) {
            opts = default_landscape_solver();
        }
        const LandscapeGrid g =
            estimability_landscape(menu, cfg_.grid ? *cfg_.grid : default_landscape_grid(), opts, cfg_.guess());
        return finish_landscape("landscape_estimability.csv", g);
    }

    int sweep_robustness_cmd() {
        const ExperimentMenu menu = load_menu();
        const DesignFile design = load_design();
        const LandscapeGrid g = robustness_landscape(menu, design.weights(menu.size()),
                                                     cfg_.grid ? *cfg_.grid : default_landscape_grid(), cfg_.guess());
        return finish_landscape("landscape_robustness.csv", g);
    }

    int certify_cmd() {
        const ExperimentMenu menu = load_menu();
        const DesignFile design = load_design();
        const std::vector<double> w = design.weights(menu.size());
        const auto fishers = menu_fishers(menu, design.theta_at);
        const FisherMatrix f = combined_fisher(fishers, w);
        const RealMatrix q = inverse_small(f.m);
        const bool psd = schur_certificate(q, f);
        const double objective = trace(q);
        const double gap = equivalence_gap(fishers, w);
        const double tol = solver_options_from_json(design.options).gap_tol_rel;
        // Reported support drops weights below support_tol, so allow that much extra slack.
        const double support_tol = solver_options_from_json(design.options).support_tol;
        const bool gap_ok = gap <= (tol + 10 * support_tol) * objective;
        const bool pass = psd && gap_ok;
        write_json("certify.json", stamped(Json{{"schur_psd", psd},
                                                {"objective", objective},
                                                {"gap", gap},
                                                {"gap_ok", gap_ok},
                                                {"result", pass ? "PASS" : "FAIL"}}));
        out_ << "schur block PSD: " << (psd ? "yes" : "no") << "\n";
        out_ << "equivalence gap " << format_double(gap) << " (objective " << format_double(objective) << ")\n";
        out_ << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? kExitOk : kExitCertificateFail;
    }

    int mse_curve_cmd() {
        const ExperimentMenu menu = load_menu();
        const DesignFile design = load_design();
        MonteCarloOptions opts;
        if (cfg_.grid) {
            opts.grid_nf = cfg_.grid->nf;
            opts.grid_ng = cfg_.grid->ng;
        }
        const auto rows = mse_curve(menu, design.weights(menu.size()), cfg_.truth(), cfg_.guess(), cfg_.n_list,
                                    cfg_.trials, cfg_.seed, opts);
        std::ostringstream os;
        write_mse_csv(os, rows, preamble_);
        write_text_file(path("mse.csv"), os.str());
        for (const auto &r : rows) {
            out_ << "n " << r.n << " mse " << format_double(r.mse_mean) << " cr " << format_double(r.cr_reference)
                 << "\n";
        }
        return kExitOk;
    }

    bool solver_overridden_ = false;

   private:
    std::string path(const std::string &name) const {
        return (std::filesystem::path(cfg_.out) / name).string();
    }

    Json stamped(Json j) const {
        j["version"] = kArtifactVersion;
        j["config_hash"] = cfg_.hash();
        return j;
    }

    void write_json(const std::string &name, const Json &j) const {
        write_text_file(path(name), j.dump(1) + "\n");
    }

    ExperimentMenu load_menu() const {
        ExperimentMenu menu;
        if (cfg_.menu == "full") {
            menu = build_full_menu(cfg_.times);
        } else if (cfg_.menu == "suboptimal") {
            menu = suboptimal_menu();
        } else if (cfg_.menu == "table3") {
            menu = optimal_pair_menu();
        } else if (std::filesystem::exists(cfg_.menu)) {
            menu = menu_from_json(read_json_file(cfg_.menu));
        } else {
            throw ContractError("menu source '" + cfg_.menu + "' is neither full, suboptimal, table3 nor a file");
        }
        if (cfg_.gate_error_prep != 0 || cfg_.gate_error_meas != 0) {
            menu = apply_gate_error(menu, cfg_.gate_error_prep, cfg_.gate_error_meas);
        }
        return menu;
    }

    DesignFile load_design() const {
        return design_from_json(read_json_file(cfg_.design.empty() ? path("design.json") : cfg_.design));
    }

    OutcomeDataset load_dataset() const {
        return dataset_from_json(read_json_file(cfg_.dataset.empty() ? path("dataset.json") : cfg_.dataset));
    }

    int finish_landscape(const std::string &name, const LandscapeGrid &g) {
        std::ostringstream os;
        write_landscape_csv(os, g, preamble_);
        write_text_file(path(name), os.str());
        const LandscapeStats s = landscape_stats(g);
        out_ << "ok cells " << s.ok_cells << " of " << g.flags.size() << "\n";
        out_ << "inv11 mean " << format_double(s.inv11.mean) << " min " << format_double(s.inv11.min) << " max "
             << format_double(s.inv11.max) << "\n";
        out_ << "inv22 mean " << format_double(s.inv22.mean) << " min " << format_double(s.inv22.min) << " max "
             << format_double(s.inv22.max) << "\n";
        return kExitOk;
    }

    RunConfig cfg_;
    std::ostream &out_;
    std::string preamble_;
};

}  // namespace

GridSpec parse_grid(const std::string &s) {
    const auto axes = split(s, ',');
    if (axes.size() != 2) {
        throw ContractError("--grid expects fmin:fmax:nf,gmin:gmax:ng");
    }
    std::array<std::vector<std::string>, 2> parts{split(axes[0], ':'), split(axes[1], ':')};
    if (parts[0].size() != 3 || parts[1].size() != 3) {
        throw ContractError("--grid expects fmin:fmax:nf,gmin:gmax:ng");
    }
    GridSpec g;
    g.f_min = parse_number(parts[0][0], "grid");
    g.f_max = parse_number(parts[0][1], "grid");
    g.nf = parse_count(parts[0][2], "grid");
    g.g_min = parse_number(parts[1][0], "grid");
    g.g_max = parse_number(parts[1][1], "grid");
    g.ng = parse_count(parts[1][2], "grid");
    g.validate();
    return g;
}

RunConfig RunConfig::from_json(const Json &j) {
    if (!j.is_object()) {
        throw ContractError("config must be a JSON object");
    }
    static const std::set<std::string> kKeys{
        "theta_guess", "truth", "delta_omega", "times",   "menu",   "n",      "seed",   "grid",
        "threads",     "out",   "gate_error_prep",        "gate_error_meas",  "design", "dataset",
        "rounds",      "trials", "n_list",     "solver"};
    RunConfig c;
    try {
        for (const auto &[key, value] : j.items()) {
            if (!kKeys.count(key)) {
                throw ContractError("unknown config key '" + key + "'");
            }
        }
        auto pair = [&](const char *key, double &a, double &b) {
            if (j.contains(key)) {
                const Json &v = j[key];
                if (!v.is_array() || v.size() != 2) {
                    throw ContractError(std::string("config key '") + key + "' must be [F, G]");
                }
                a = finite(v[0], key);
                b = finite(v[1], key);
            }
        };
        pair("theta_guess", c.theta_f, c.theta_g);
        pair("truth", c.truth_f, c.truth_g);
        if (j.contains("delta_omega")) {
            c.delta_omega = finite(j["delta_omega"], "delta_omega");
        }
        if (j.contains("times")) {
            c.times.clear();
            for (const auto &t : j["times"]) {
                c.times.push_back(finite(t, "times"));
            }
        }
        c.menu = j.value("menu", c.menu);
        c.n = j.value("n", c.n);
        c.seed = j.value("seed", c.seed);
        if (j.contains("grid")) {
            c.grid = grid_from_json(j["grid"]);
        }
        if (j.contains("threads")) {
            c.threads = j["threads"].is_string() && j["threads"] == "auto" ? 0 : j["threads"].get<std::size_t>();
        }
        c.out = j.value("out", c.out);
        if (j.contains("gate_error_prep")) {
            c.gate_error_prep = finite(j["gate_error_prep"], "gate_error_prep");
        }
        if (j.contains("gate_error_meas")) {
            c.gate_error_meas = finite(j["gate_error_meas"], "gate_error_meas");
        }
        c.design = j.value("design", c.design);
        c.dataset = j.value("dataset", c.dataset);
        c.rounds = j.value("rounds", c.rounds);
        c.trials = j.value("trials", c.trials);
        c.n_list = j.value("n_list", c.n_list);
        if (j.contains("solver")) {
            c.solver = solver_options_from_json(j["solver"]);
        }
    } catch (const Json::exception &ex) {
        throw ContractError(std::string("bad config: ") + ex.what());
    }
    validate(c);
    return c;
}

Json RunConfig::to_json() const {
    Json j{{"theta_guess", {theta_f, theta_g}},
           {"truth", {truth_f, truth_g}},
           {"delta_omega", delta_omega},
           {"times", times},
           {"menu", menu},
           {"n", n},
           {"seed", seed},
           {"threads", threads},
           {"out", out},
           {"gate_error_prep", gate_error_prep},
           {"gate_error_meas", gate_error_meas},
           {"design", design},
           {"dataset", dataset},
           {"rounds", rounds},
           {"trials", trials},
           {"n_list", n_list},
           {"solver", solver_options_to_json(solver)}};
    if (grid) {
        j["grid"] = grid_to_json(*grid);
    }
    return j;
}

std::string RunConfig::hash() const {
    Json j = to_json();
    j.erase("out");
    j.erase("threads");
    return config_hash(j);
}

ModelParams RunConfig::guess() const {
    ModelParams p;
    p.delta_omega = delta_omega;
    return p.with_fg(theta_f, theta_g);
}

ModelParams RunConfig::truth() const {
    return guess().with_fg(truth_f, truth_g);
}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Constrained A-optimal experiment design for a coupled qubit pair", "qoed"};
    app.require_subcommand(1);
    app.fallthrough();

    std::map<std::string, std::string> flags;
    auto flag = [&](const std::string &name, const std::string &help) {
        app.add_option_function<std::string>(
            "--" + name, [&flags, name](const std::string &v) { flags[name] = v; }, help);
    };
    flag("config", "JSON config file; flags override its values");
    flag("theta-guess", "F,G at which Fisher matrices and designs are computed");
    flag("truth", "F,G used to simulate data");
    flag("delta-omega", "detuning");
    flag("times", "probe times a,b,c for the full menu");
    flag("menu", "full | suboptimal | table3 | path to a menu JSON");
    flag("n", "number of runs");
    flag("seed", "RNG seed");
    flag("grid", "fmin:fmax:nf,gmin:gmax:ng");
    flag("threads", "worker threads, or auto");
    flag("out", "output directory");
    flag("gate-error-prep", "preparation Bloch contraction epsilon");
    flag("gate-error-meas", "measurement Bloch contraction epsilon");
    flag("design", "design JSON (default <out>/design.json)");
    flag("dataset", "dataset JSON (default <out>/dataset.json)");
    flag("rounds", "adaptive rounds");
    flag("trials", "Monte Carlo trials per N");
    flag("n-list", "sample sizes a,b,c for mse-curve");
    flag("gap-tol", "relative equivalence-gap stopping tolerance");
    flag("max-iters", "solver iteration cap");

    using Cmd = int (Runner::*)();
    const std::vector<std::pair<std::string, std::pair<Cmd, std::string>>> commands{
        {"menu", {&Runner::menu_cmd, "write the experiment menu"}},
        {"fisher", {&Runner::fisher_cmd, "Fisher matrix of every menu experiment"}},
        {"design", {&Runner::design_cmd, "A-optimal design over the menu"}},
        {"simulate", {&Runner::simulate_cmd, "sample a dataset from a design"}},
        {"estimate", {&Runner::estimate_cmd, "maximum-likelihood estimate from a dataset"}},
        {"adapt", {&Runner::adapt_cmd, "iterated design, sample, estimate"}},
        {"sweep-estimability", {&Runner::sweep_estimability_cmd, "optimal design re-solved across a grid"}},
        {"sweep-robustness", {&Runner::sweep_robustness_cmd, "fixed design evaluated across a grid"}},
        {"certify", {&Runner::certify_cmd, "check a design's optimality certificate"}},
        {"mse-curve", {&Runner::mse_curve_cmd, "Monte Carlo MSE against sample size"}},
    };
    for (const auto &[name, cmd] : commands) {
        app.add_subcommand(name, cmd.second);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        RunConfig cfg;
        bool solver_overridden = false;
        if (flags.count("config")) {
            const Json j = read_json_file(flags["config"]);
            cfg = RunConfig::from_json(j);
            solver_overridden = j.contains("solver");
        }
        for (const auto &[name, v] : flags) {
            if (name == "theta-guess") {
                std::tie(cfg.theta_f, cfg.theta_g) = parse_pair(v, "--theta-guess");
            } else if (name == "truth") {
                std::tie(cfg.truth_f, cfg.truth_g) = parse_pair(v, "--truth");
            } else if (name == "delta-omega") {
                cfg.delta_omega = parse_number(v, "--delta-omega");
            } else if (name == "times") {
                cfg.times = parse_list(v, "--times");
            } else if (name == "menu") {
                cfg.menu = v;
            } else if (name == "n") {
                cfg.n = parse_count(v, "--n");
            } else if (name == "seed") {
                cfg.seed = parse_count(v, "--seed");
            } else if (name == "grid") {
                cfg.grid = parse_grid(v);
            } else if (name == "threads") {
                cfg.threads = v == "auto" ? 0 : parse_count(v, "--threads");
            } else if (name == "out") {
                cfg.out = v;
            } else if (name == "gate-error-prep") {
                cfg.gate_error_prep = parse_number(v, "--gate-error-prep");
            } else if (name == "gate-error-meas") {
                cfg.gate_error_meas = parse_number(v, "--gate-error-meas");
            } else if (name == "design") {
                cfg.design = v;
            } else if (name == "dataset") {
                cfg.dataset = v;
            } else if (name == "rounds") {
                cfg.rounds = parse_count(v, "--rounds");
            } else if (name == "trials") {
                cfg.trials = parse_count(v, "--trials");
            } else if (name == "n-list") {
                cfg.n_list.clear();
                for (const auto &part : split(v, ',')) {
                    cfg.n_list.push_back(parse_count(part, "--n-list"));
                }
            } else if (name == "gap-tol") {
                cfg.solver.gap_tol_rel = parse_number(v, "--gap-tol");
                solver_overridden = true;
            } else if (name == "max-iters") {
                cfg.solver.max_iters = parse_count(v, "--max-iters");
                solver_overridden = true;
            }
        }
        validate(cfg);
        set_thread_count(cfg.threads);
        Runner runner(cfg, out);
        runner.solver_overridden_ = solver_overridden;
        for (const auto &[name, cmd] : commands) {
            if (app.got_subcommand(name)) {
                return (runner.*(cmd.first))();
            }
        }
        return kExitUsage;
    } catch (const ContractError &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError &e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace qoed
