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

#include "qoed/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qoed/rng.h"

namespace qoed {

namespace {

const char *frame_name(Frame f) {
    return f == Frame::kInteraction ? "interaction" : "corotating";
}

Frame frame_from_name(const std::string &s) {
    if (s == "interaction") {
        return Frame::kInteraction;
    }
    if (s == "corotating") {
        return Frame::kCorotating;
    }
    throw ContractError("unknown frame '" + s + "'");
}

Json angles_pair(const std::array<BlochAngles, 2> &a) {
    return Json::array({Json::array({a[0].polar, a[0].azimuth}), Json::array({a[1].polar, a[1].azimuth})});
}

std::array<BlochAngles, 2> angles_pair_from(const Json &j) {
    if (!j.is_array() || j.size() != 2) {
        throw ContractError("expected two [polar, azimuth] pairs");
    }
    std::array<BlochAngles, 2> out;
    for (std::size_t q = 0; q < 2; ++q) {
        if (!j[q].is_array() || j[q].size() != 2) {
            throw ContractError("expected [polar, azimuth]");
        }
        out[q] = {j[q][0].get<double>(), j[q][1].get<double>()};
    }
    return out;
}

void preamble_line(std::ostream &os, std::string_view preamble) {
    if (!preamble.empty()) {
        os << "# " << preamble << "\n";
    }
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const Json &config) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::uint64_t h = fnv1a64(config.dump());
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

Json params_to_json(const ModelParams &p) {
    return Json{{"f", p.f},
                {"g", p.g},
                {"delta_omega", p.delta_omega},
                {"free", Json::array({p.free_mask[0], p.free_mask[1], p.free_mask[2]})},
                {"frame", frame_name(p.frame)}};
}

ModelParams params_from_json(const Json &j) {
    ModelParams p;
    p.f = j.at("f").get<double>();
    p.g = j.at("g").get<double>();
    p.delta_omega = j.value("delta_omega", 1.0);
    if (j.contains("free")) {
        for (std::size_t k = 0; k < 3; ++k) {
            p.free_mask[k] = j["free"].at(k).get<bool>();
        }
    }
    p.frame = frame_from_name(j.value("frame", std::string("interaction")));
    return p;
}

Json menu_to_json(const ExperimentMenu &menu) {
    Json exps = Json::array();
    for (const auto &e : menu.experiments) {
        exps.push_back(Json{{"id", e.id},
                            {"prep", angles_pair(e.prep_angles)},
                            {"meas", angles_pair(e.meas_angles)},
                            {"t", e.t},
                            {"prep_scale", e.prep_scale},
                            {"meas_scale", e.meas_scale}});
    }
    return Json{{"version", kArtifactVersion},
                {"provenance", Json{{"generator", menu.provenance.generator},
                                    {"times", menu.provenance.times},
                                    {"eps_prep", menu.provenance.eps_prep},
                                    {"eps_meas", menu.provenance.eps_meas}}},
                {"count", menu.size()},
                {"experiments", exps}};
}

ExperimentMenu menu_from_json(const Json &j) {
    try {
        ExperimentMenu menu;
        const Json prov = j.value("provenance", Json::object());
        menu.provenance.generator = prov.value("generator", std::string("file"));
        menu.provenance.times = prov.value("times", std::vector<double>{});
        menu.provenance.eps_prep = prov.value("eps_prep", 0.0);
        menu.provenance.eps_meas = prov.value("eps_meas", 0.0);
        const Json &exps = j.at("experiments");
        if (!exps.is_array() || exps.empty()) {
            throw ContractError("menu file has no experiments");
        }
        for (std::size_t k = 0; k < exps.size(); ++k) {
            const Json &e = exps[k];
            if (e.at("id").get<std::size_t>() != k) {
                throw ContractError("menu ids must be 0..n-1 in order");
            }
            menu.experiments.push_back(Experiment::make(k, angles_pair_from(e.at("prep")),
                                                        angles_pair_from(e.at("meas")), e.at("t").get<double>(),
                                                        e.value("prep_scale", 1.0), e.value("meas_scale", 1.0)));
        }
        return menu;
    } catch (const Json::exception &ex) {
        throw ContractError(std::string("malformed menu: ") + ex.what());
    }
}

Json fisher_to_json(const FisherMatrix &f) {
    Json rows = Json::array();
    for (std::size_t a = 0; a < f.dim(); ++a) {
        Json row = Json::array();
        for (std::size_t b = 0; b < f.dim(); ++b) {
            row.push_back(f.m(a, b));
        }
        rows.push_back(row);
    }
    return Json{{"matrix", rows}, {"theta_at", params_to_json(f.theta_at)}, {"singular", f.singular}};
}

std::vector<double> DesignFile::weights(std::size_t menu_size) const {
    std::vector<double> w(menu_size, 0.0);
    double total = 0;
    for (const auto &[id, wt] : support) {
        if (id >= menu_size) {
            throw ContractError("design refers to experiment " + std::to_string(id) + " outside the menu");
        }
        w[id] += wt;
        total += wt;
    }
    if (!(total > 0)) {
        throw ContractError("design has no support");
    }
    for (double &x : w) {
        x /= total;
    }
    return w;
}

Json solver_options_to_json(const SolverOptions &o) {
    return Json{{"gap_tol_rel", o.gap_tol_rel},   {"max_iters", o.max_iters},   {"gamma", o.gamma},
                {"exchanges_per_iter", o.exchanges_per_iter}, {"support_tol", o.support_tol},
                {"merge_tol", o.merge_tol},       {"multistart", o.multistart}, {"seed", o.seed}};
}

SolverOptions solver_options_from_json(const Json &j, SolverOptions o) {
    o.gap_tol_rel = j.value("gap_tol_rel", o.gap_tol_rel);
    o.max_iters = j.value("max_iters", o.max_iters);
    o.gamma = j.value("gamma", o.gamma);
    o.exchanges_per_iter = j.value("exchanges_per_iter", o.exchanges_per_iter);
    o.support_tol = j.value("support_tol", o.support_tol);
    o.merge_tol = j.value("merge_tol", o.merge_tol);
    o.multistart = j.value("multistart", o.multistart);
    o.seed = j.value("seed", o.seed);
    return o;
}

Json design_to_json(const DesignResult &r, const SolverOptions &opts) {
    Json support = Json::array();
    for (std::size_t id : r.weights.support(opts.support_tol)) {
        support.push_back(Json{{"id", id}, {"weight", r.weights.weights[id]}});
    }
    Json merged = Json::array();
    for (const auto &sp : r.merged_support) {
        merged.push_back(Json{{"id", sp.id}, {"weight", sp.weight}, {"members", sp.members}});
    }
    return Json{{"version", kArtifactVersion},
                {"theta_at", params_to_json(r.fisher.theta_at)},
                {"objective", r.objective},
                {"gap", r.equivalence_gap},
                {"support", support},
                {"merged_support", merged},
                {"fisher", fisher_to_json(r.fisher)},
                {"options", solver_options_to_json(opts)},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

DesignFile design_from_json(const Json &j) {
    try {
        DesignFile d;
        d.theta_at = params_from_json(j.at("theta_at"));
        d.objective = j.at("objective").get<double>();
        d.gap = j.at("gap").get<double>();
        for (const auto &s : j.at("support")) {
            d.support.emplace_back(s.at("id").get<std::size_t>(), s.at("weight").get<double>());
        }
        if (j.contains("merged_support")) {
            for (const auto &s : j["merged_support"]) {
                d.merged_support.push_back({s.at("id").get<std::size_t>(), s.at("weight").get<double>(),
                                            s.value("members", std::vector<std::size_t>{})});
            }
        }
        d.iterations = j.value("iterations", std::size_t{0});
        d.converged = j.value("converged", false);
        d.options = j.value("options", Json::object());
        return d;
    } catch (const Json::exception &ex) {
        throw ContractError(std::string("malformed design: ") + ex.what());
    }
}

Json dataset_to_json(const OutcomeDataset &d) {
    Json entries = Json::array();
    for (const auto &e : d.entries) {
        entries.push_back(Json{{"id", e.id}, {"n_runs", e.n_runs}, {"counts", e.counts}});
    }
    return Json{{"version", kArtifactVersion},
                {"seed", d.seed},
                {"total_n", d.total_n},
                {"truth_hidden", d.truth_hidden},
                {"rng_stream_version", kRngStreamVersion},
                {"entries", entries}};
}

OutcomeDataset dataset_from_json(const Json &j) {
    try {
        OutcomeDataset d;
        d.seed = j.at("seed").get<std::uint64_t>();
        d.total_n = j.at("total_n").get<std::uint64_t>();
        d.truth_hidden = j.value("truth_hidden", true);
        for (const auto &e : j.at("entries")) {
            DatasetEntry entry;
            entry.id = e.at("id").get<std::size_t>();
            entry.n_runs = e.at("n_runs").get<std::uint64_t>();
            entry.counts = e.at("counts").get<std::array<std::uint64_t, 4>>();
            d.entries.push_back(entry);
        }
        d.validate();
        return d;
    } catch (const Json::exception &ex) {
        throw ContractError(std::string("malformed dataset: ") + ex.what());
    }
}

void write_fisher_csv(std::ostream &os, std::span<const FisherMatrix> fishers, std::string_view preamble) {
    preamble_line(os, preamble);
    const std::size_t p = fishers.empty() ? 2 : fishers[0].dim();
    os << "id";
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            os << ",m" << a + 1 << b + 1;
        }
    }
    os << "\n";
    for (std::size_t k = 0; k < fishers.size(); ++k) {
        os << k;
        for (std::size_t a = 0; a < p; ++a) {
            for (std::size_t b = a; b < p; ++b) {
                os << ',' << format_double(fishers[k].m(a, b));
            }
        }
        os << "\n";
    }
}

void write_surface_csv(std::ostream &os, const LikelihoodSurface &s, std::string_view preamble) {
    preamble_line(os, preamble);
    os << "f,g,loglik\n";
    for (std::size_t i = 0; i < s.f_axis.size(); ++i) {
        for (std::size_t j = 0; j < s.g_axis.size(); ++j) {
            os << format_double(s.f_axis[i]) << ',' << format_double(s.g_axis[j]) << ','
               << format_double(s.loglik[i * s.g_axis.size() + j]) << "\n";
        }
    }
}

void write_landscape_csv(std::ostream &os, const LandscapeGrid &g, std::string_view preamble) {
    preamble_line(os, preamble);
    os << "f,g,inv11,inv22,flag\n";
    for (std::size_t i = 0; i < g.f_axis.size(); ++i) {
        for (std::size_t j = 0; j < g.g_axis.size(); ++j) {
            const std::size_t k = g.index(i, j);
            os << format_double(g.f_axis[i]) << ',' << format_double(g.g_axis[j]) << ',' << format_double(g.inv11[k])
               << ',' << format_double(g.inv22[k]) << ',' << cell_flag_name(g.flags[k]) << "\n";
        }
    }
}

void write_mse_csv(std::ostream &os, std::span<const MseRow> rows, std::string_view preamble) {
    preamble_line(os, preamble);
    os << "n,mse_optimal,mse_reference,mse_median\n";
    for (const auto &r : rows) {
        os << r.n << ',' << format_double(r.mse_mean) << ',' << format_double(r.cr_reference) << ','
           << format_double(r.mse_median) << "\n";
    }
}

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ContractError("cannot open '" + path + "'");
    }
    try {
        return Json::parse(in);
    } catch (const Json::exception &ex) {
        throw ContractError("cannot parse '" + path + "': " + ex.what());
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ContractError("cannot write '" + path + "'");
    }
    out << text;
}

}  // namespace qoed
